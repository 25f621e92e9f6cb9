#pragma once

#include <filesystem>
#include <future>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace chunkbench {

// fixed-dimension embedding; providers return unit-normalized values
struct Vector {
    std::vector<float> values;
    std::string model_id;
    std::size_t dim() const { return values.size(); }
};

// exact cosine in double precision; throws ContractError on dimension mismatch
// or zero-norm input
double cosine_sim(const Vector& a, const Vector& b);

void normalize_in_place(Vector& v);  // ContractError on zero norm

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual const std::string& model_id() const = 0;
    virtual std::size_t dim() const = 0;
    virtual bool supports_token_level() const { return false; }

    // one vector per text, order-preserving, unit-normalized; must be safe to
    // call from several threads at once
    virtual std::vector<Vector> embed(const std::vector<std::string>& texts) = 0;

    // one vector per token text; only meaningful when supports_token_level()
    virtual std::vector<Vector> embed_tokens(const std::vector<std::string>& token_texts);
};

// deterministic local embedder: hashed codepoint 3-gram counts folded into dim
// buckets, then L2-normalized. Texts shorter than 3 codepoints hash as a whole;
// empty text maps to the unit vector on bucket 0.
Vector mock_embed(const std::string& text, std::size_t dim);  // ContractError if dim < 8

class MockEmbedder : public EmbeddingProvider {
public:
    explicit MockEmbedder(std::size_t dim, bool token_level = true, std::string model_id = "");
    const std::string& model_id() const override { return model_id_; }
    std::size_t dim() const override { return dim_; }
    bool supports_token_level() const override { return token_level_; }
    std::vector<Vector> embed(const std::vector<std::string>& texts) override;
    std::vector<Vector> embed_tokens(const std::vector<std::string>& token_texts) override;

private:
    std::size_t dim_;
    bool token_level_;
    std::string model_id_;
};

// remote embedder speaking POST {base}/embeddings with {"model","input"} and
// reading {"data":[{"index","embedding"}]}; order restored by index. Bearer
// auth when api_key is non-empty. 3 attempts per batch with exponential
// backoff from 250 ms; a batch that still fails raises ProviderError with its
// batch index. The dimension is discovered with a one-off probe on first use
// and is then enforced for the provider's lifetime.
class HttpEmbedder : public EmbeddingProvider {
public:
    HttpEmbedder(std::string base_url, std::string api_key, std::string model_id,
                 std::size_t batch_size = 32);
    static std::unique_ptr<HttpEmbedder> from_env(std::string model_id);

    const std::string& model_id() const override { return model_id_; }
    std::size_t dim() const override;
    std::vector<Vector> embed(const std::vector<std::string>& texts) override;

private:
    std::vector<Vector> embed_batch(const std::vector<std::string>& texts, int batch_index);

    std::string base_url_;
    std::string api_key_;
    std::string model_id_;
    std::size_t batch_size_;
    mutable std::mutex mu_;
    mutable std::size_t dim_ = 0;
};

// content-addressed cache around any provider: in-memory map, optional disk
// directory (one binary file per key: u32 dim + float32 values, little-endian),
// and in-flight de-duplication so identical concurrent requests hit the inner
// provider once
class CachingEmbedder : public EmbeddingProvider {
public:
    CachingEmbedder(std::shared_ptr<EmbeddingProvider> inner, std::filesystem::path cache_dir = {});
    const std::string& model_id() const override { return inner_->model_id(); }
    std::size_t dim() const override { return inner_->dim(); }
    bool supports_token_level() const override { return inner_->supports_token_level(); }
    std::vector<Vector> embed(const std::vector<std::string>& texts) override;
    std::vector<Vector> embed_tokens(const std::vector<std::string>& token_texts) override;

private:
    std::shared_ptr<EmbeddingProvider> inner_;
    std::filesystem::path cache_dir_;
    std::mutex mu_;
    std::unordered_map<std::string, Vector> memory_;
    std::unordered_map<std::string, std::shared_future<Vector>> in_flight_;
};

// cache file round-trip helpers, exposed for tests
void write_vector_file(const std::filesystem::path& p, const Vector& v);
Vector read_vector_file(const std::filesystem::path& p, const std::string& model_id);

}  // namespace chunkbench
