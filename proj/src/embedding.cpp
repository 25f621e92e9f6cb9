#include "chunkbench/embedding.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "http_util.hpp"

#include "chunkbench/errors.hpp"
#include "chunkbench/text.hpp"
#include "chunkbench/util.hpp"

static_assert(std::endian::native == std::endian::little,
              "vector cache and index snapshots are little-endian");

namespace chunkbench {

double cosine_sim(const Vector& a, const Vector& b) {
    if (a.dim() != b.dim() || a.dim() == 0)
        throw ContractError("cosine requires equal non-zero dimensions");
    double dot = 0;
    double na = 0;
    double nb = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        dot += static_cast<double>(a.values[i]) * b.values[i];
        na += static_cast<double>(a.values[i]) * a.values[i];
        nb += static_cast<double>(b.values[i]) * b.values[i];
    }
    if (na == 0 || nb == 0) throw ContractError("cosine undefined for zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

void normalize_in_place(Vector& v) {
    double n = 0;
    for (float x : v.values) n += static_cast<double>(x) * x;
    if (n == 0) throw ContractError("cannot normalize zero vector");
    const double inv = 1.0 / std::sqrt(n);
    for (float& x : v.values) x = static_cast<float>(x * inv);
}

std::vector<Vector> EmbeddingProvider::embed_tokens(const std::vector<std::string>&) {
    throw ContractError("provider has no token-level capability");
}

Vector mock_embed(const std::string& text, std::size_t dim) {
    if (dim < 8) throw ContractError("mock embedder needs dim >= 8");
    Utf8Text t{text};
    std::vector<double> counts(dim, 0.0);
    const std::size_t n = t.size();
    if (n == 0) {
        counts[0] = 1.0;
    } else if (n < 3) {
        counts[fnv1a64(t.bytes()) % dim] += 1.0;
    } else {
        for (std::size_t i = 0; i + 3 <= n; ++i) counts[fnv1a64(t.slice(i, i + 3)) % dim] += 1.0;
    }
    double norm = 0;
    for (double c : counts) norm += c * c;
    norm = std::sqrt(norm);
    Vector v;
    v.model_id = "mock-" + std::to_string(dim);
    v.values.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) v.values[i] = static_cast<float>(counts[i] / norm);
    return v;
}

MockEmbedder::MockEmbedder(std::size_t dim, bool token_level, std::string model_id)
    : dim_(dim), token_level_(token_level), model_id_(std::move(model_id)) {
    if (dim_ < 8) throw ContractError("mock embedder needs dim >= 8");
    if (model_id_.empty()) model_id_ = "mock-" + std::to_string(dim_);
}

std::vector<Vector> MockEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        Vector v = mock_embed(t, dim_);
        v.model_id = model_id_;
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<Vector> MockEmbedder::embed_tokens(const std::vector<std::string>& token_texts) {
    if (!token_level_) return EmbeddingProvider::embed_tokens(token_texts);
    return embed(token_texts);
}

HttpEmbedder::HttpEmbedder(std::string base_url, std::string api_key, std::string model_id,
                           std::size_t batch_size)
    : base_url_(std::move(base_url)),
      api_key_(std::move(api_key)),
      model_id_(std::move(model_id)),
      batch_size_(batch_size ? batch_size : 1) {
    if (base_url_.empty()) throw ConfigError("embedding endpoint base url is empty");
}

std::unique_ptr<HttpEmbedder> HttpEmbedder::from_env(std::string model_id) {
    const char* base = std::getenv("EMBED_API_BASE");
    const char* key = std::getenv("EMBED_API_KEY");
    if (!base || !*base) throw ConfigError("EMBED_API_BASE is not set");
    return std::make_unique<HttpEmbedder>(base, key ? key : "", std::move(model_id));
}

std::size_t HttpEmbedder::dim() const {
    {
        std::lock_guard lock(mu_);
        if (dim_ > 0) return dim_;
    }
    auto* self = const_cast<HttpEmbedder*>(this);
    self->embed({"dimension probe"});
    std::lock_guard lock(mu_);
    return dim_;
}

std::vector<Vector> HttpEmbedder::embed_batch(const std::vector<std::string>& texts,
                                              int batch_index) {
    nlohmann::json body = {{"model", model_id_}, {"input", texts}};
    nlohmann::json resp = detail::http_post_json(base_url_, "/embeddings", api_key_, body,
                                                 batch_index);
    if (!resp.contains("data") || !resp["data"].is_array())
        throw ProviderError("embedding response missing data array", batch_index);
    const auto& data = resp["data"];
    if (data.size() != texts.size())
        throw ProviderError("embedding response count mismatch", batch_index);

    std::vector<Vector> out(texts.size());
    std::vector<bool> filled(texts.size(), false);
    for (const auto& item : data) {
        if (!item.contains("index") || !item.contains("embedding"))
            throw ProviderError("embedding response item missing index/embedding", batch_index);
        const auto idx = item["index"].get<std::size_t>();
        if (idx >= texts.size() || filled[idx])
            throw ProviderError("embedding response index out of range or duplicated", batch_index);
        Vector v;
        v.model_id = model_id_;
        v.values = item["embedding"].get<std::vector<float>>();
        normalize_in_place(v);
        out[idx] = std::move(v);
        filled[idx] = true;
    }
    return out;
}

std::vector<Vector> HttpEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<Vector> out;
    out.reserve(texts.size());
    int batch_index = 0;
    for (std::size_t pos = 0; pos < texts.size(); pos += batch_size_, ++batch_index) {
        std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(pos),
                                       texts.begin() + static_cast<std::ptrdiff_t>(
                                                           std::min(pos + batch_size_, texts.size())));
        auto vecs = embed_batch(batch, batch_index);
        {
            std::lock_guard lock(mu_);
            for (const auto& v : vecs) {
                if (dim_ == 0) dim_ = v.dim();
                if (v.dim() != dim_)
                    throw ContractError("embedding dimension drifted from " + std::to_string(dim_) +
                                        " to " + std::to_string(v.dim()));
            }
        }
        for (auto& v : vecs) out.push_back(std::move(v));
    }
    return out;
}

void write_vector_file(const std::filesystem::path& p, const Vector& v) {
    std::string blob;
    const auto d = static_cast<std::uint32_t>(v.dim());
    blob.resize(4 + v.dim() * 4);
    std::memcpy(blob.data(), &d, 4);
    std::memcpy(blob.data() + 4, v.values.data(), v.dim() * 4);
    write_file_atomic(p, blob);
}

Vector read_vector_file(const std::filesystem::path& p, const std::string& model_id) {
    std::string blob = read_file(p);
    if (blob.size() < 4) throw Error("vector cache file too short: " + p.string());
    std::uint32_t d = 0;
    std::memcpy(&d, blob.data(), 4);
    if (blob.size() != 4 + static_cast<std::size_t>(d) * 4)
        throw Error("vector cache file size mismatch: " + p.string());
    Vector v;
    v.model_id = model_id;
    v.values.resize(d);
    std::memcpy(v.values.data(), blob.data() + 4, static_cast<std::size_t>(d) * 4);
    return v;
}

CachingEmbedder::CachingEmbedder(std::shared_ptr<EmbeddingProvider> inner,
                                 std::filesystem::path cache_dir)
    : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)) {
    if (!cache_dir_.empty()) ensure_dir(cache_dir_);
}

std::vector<Vector> CachingEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<Vector> out(texts.size());
    std::vector<std::string> keys(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) keys[i] = content_key(model_id(), texts[i]);

    struct Claim {
        std::string key;
        std::string text;
        std::promise<Vector> promise;
    };
    std::vector<Claim> claims;
    std::vector<std::pair<std::size_t, std::shared_future<Vector>>> waits;

    {
        std::lock_guard lock(mu_);
        for (std::size_t i = 0; i < texts.size(); ++i) {
            const auto& key = keys[i];
            if (auto it = memory_.find(key); it != memory_.end()) {
                out[i] = it->second;
                continue;
            }
            if (!cache_dir_.empty()) {
                auto file = cache_dir_ / (key + ".vec");
                std::error_code ec;
                if (std::filesystem::exists(file, ec)) {
                    Vector v = read_vector_file(file, model_id());
                    memory_[key] = v;
                    out[i] = std::move(v);
                    continue;
                }
            }
            if (auto it = in_flight_.find(key); it != in_flight_.end()) {
                waits.emplace_back(i, it->second);
                continue;
            }
            claims.push_back({key, texts[i], {}});
            in_flight_[key] = claims.back().promise.get_future().share();
            waits.emplace_back(i, in_flight_[key]);
        }
    }

    if (!claims.empty()) {
        std::vector<std::string> miss_texts;
        miss_texts.reserve(claims.size());
        for (const auto& c : claims) miss_texts.push_back(c.text);
        try {
            auto vecs = inner_->embed(miss_texts);
            if (vecs.size() != miss_texts.size())
                throw ContractError("inner provider returned wrong vector count");
            {
                std::lock_guard lock(mu_);
                for (std::size_t i = 0; i < claims.size(); ++i) {
                    memory_[claims[i].key] = vecs[i];
                    in_flight_.erase(claims[i].key);
                }
            }
            for (std::size_t i = 0; i < claims.size(); ++i) {
                if (!cache_dir_.empty())
                    write_vector_file(cache_dir_ / (claims[i].key + ".vec"), vecs[i]);
                claims[i].promise.set_value(std::move(vecs[i]));
            }
        } catch (...) {
            auto eptr = std::current_exception();
            {
                std::lock_guard lock(mu_);
                for (const auto& c : claims) in_flight_.erase(c.key);
            }
            for (auto& c : claims) c.promise.set_exception(eptr);
            std::rethrow_exception(eptr);
        }
    }

    for (auto& [i, fut] : waits) out[i] = fut.get();
    return out;
}

std::vector<Vector> CachingEmbedder::embed_tokens(const std::vector<std::string>& token_texts) {
    // token-level output is contextual and cheap to recompute; not cached
    return inner_->embed_tokens(token_texts);
}

}  // namespace chunkbench
