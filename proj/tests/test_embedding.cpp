#include "doctest.h"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "chunkbench/embedding.hpp"
#include "chunkbench/errors.hpp"
#include "chunkbench/util.hpp"

using namespace chunkbench;

namespace {

double l2(const Vector& v) {
    double s = 0;
    for (float x : v.values) s += static_cast<double>(x) * x;
    return std::sqrt(s);
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() / (tag + "-" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

// counts how often the inner provider is actually consulted
class CountingEmbedder : public EmbeddingProvider {
public:
    explicit CountingEmbedder(std::size_t dim) : inner_(dim) {}
    const std::string& model_id() const override { return inner_.model_id(); }
    std::size_t dim() const override { return inner_.dim(); }
    std::vector<Vector> embed(const std::vector<std::string>& texts) override {
        calls += 1;
        texts_seen += texts.size();
        return inner_.embed(texts);
    }
    std::atomic<int> calls{0};
    std::atomic<std::size_t> texts_seen{0};

private:
    MockEmbedder inner_;
};

}  // namespace

TEST_CASE("mock embedding is deterministic and unit length") {
    const Vector a = mock_embed("the quick brown fox", 64);
    const Vector b = mock_embed("the quick brown fox", 64);
    CHECK(a.values == b.values);
    CHECK(a.dim() == 64);
    CHECK(a.model_id == "mock-64");
    CHECK(l2(a) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("different texts land on different directions") {
    const Vector a = mock_embed("alpha bravo charlie delta", 64);
    const Vector b = mock_embed("wholly unrelated content here", 64);
    CHECK(cosine_sim(a, b) < 0.99);
    CHECK(cosine_sim(a, a) == doctest::Approx(1.0));
}

TEST_CASE("short and empty texts still embed") {
    const Vector tiny = mock_embed("ab", 32);  // below 3 codepoints: whole-text gram
    CHECK(l2(tiny) == doctest::Approx(1.0).epsilon(1e-6));
    const Vector empty = mock_embed("", 32);
    CHECK(empty.values[0] == doctest::Approx(1.0));
    for (std::size_t i = 1; i < empty.dim(); ++i) CHECK(empty.values[i] == 0.0f);
}

TEST_CASE("three-gram overlap raises similarity") {
    const Vector a = mock_embed("retrieval quality measurement", 128);
    const Vector b = mock_embed("retrieval quality assessment", 128);
    const Vector c = mock_embed("zebra xylophone quartz", 128);
    CHECK(cosine_sim(a, b) > cosine_sim(a, c));
}

TEST_CASE("mock embed validates dimension") {
    CHECK_THROWS_AS(mock_embed("text", 7), ContractError);
    CHECK_NOTHROW(mock_embed("text", 8));
}

TEST_CASE("cosine guards dimensions and zero norms") {
    const Vector a = mock_embed("one", 16);
    const Vector b = mock_embed("two", 32);
    CHECK_THROWS_AS(cosine_sim(a, b), ContractError);
    Vector zero;
    zero.values.assign(16, 0.0f);
    CHECK_THROWS_AS(cosine_sim(a, zero), ContractError);
    CHECK_THROWS_AS(normalize_in_place(zero), ContractError);
}

TEST_CASE("mock embedder batches and exposes token capability") {
    MockEmbedder e(64);
    CHECK(e.model_id() == "mock-64");
    CHECK(e.dim() == 64);
    CHECK(e.supports_token_level());
    const auto out = e.embed({"one", "two", "three"});
    REQUIRE(out.size() == 3);
    for (const auto& v : out) {
        CHECK(v.dim() == 64);
        CHECK(v.model_id == "mock-64");
    }
    CHECK(out[0].values == mock_embed("one", 64).values);

    const auto toks = e.embed_tokens({"tok"});
    REQUIRE(toks.size() == 1);
    CHECK(toks[0].values == mock_embed("tok", 64).values);

    MockEmbedder flat(64, false);
    CHECK_FALSE(flat.supports_token_level());
    CHECK_THROWS_AS(flat.embed_tokens({"tok"}), ContractError);
}

TEST_CASE("vector files round trip") {
    TempDir dir("cb_vecfile");
    const Vector v = mock_embed("persist me", 24);
    const auto p = dir.path / "v.vec";
    write_vector_file(p, v);
    const Vector back = read_vector_file(p, "mock-24");
    CHECK(back.values == v.values);
    CHECK(back.model_id == "mock-24");

    std::ofstream(dir.path / "short.vec", std::ios::binary) << "xy";
    CHECK_THROWS_AS(read_vector_file(dir.path / "short.vec", "m"), Error);
}

TEST_CASE("caching embedder deduplicates within and across calls") {
    auto counter = std::make_shared<CountingEmbedder>(32);
    CachingEmbedder cache(counter);

    const auto first = cache.embed({"a", "b", "a"});
    CHECK(counter->texts_seen == 2);  // in-call duplicate collapses
    CHECK(first[0].values == first[2].values);

    cache.embed({"a", "b"});
    CHECK(counter->texts_seen == 2);  // all hits, inner untouched

    const auto more = cache.embed({"b", "c"});
    CHECK(counter->texts_seen == 3);  // only "c" misses
    CHECK(more[0].values == first[1].values);
}

TEST_CASE("disk cache survives a new instance") {
    TempDir dir("cb_diskcache");
    auto c1 = std::make_shared<CountingEmbedder>(32);
    {
        CachingEmbedder cache(c1, dir.path);
        cache.embed({"persisted text", "another"});
        CHECK(c1->texts_seen == 2);
    }
    auto c2 = std::make_shared<CountingEmbedder>(32);
    CachingEmbedder cache(c2, dir.path);
    const auto out = cache.embed({"persisted text", "another"});
    CHECK(c2->texts_seen == 0);
    CHECK(out[0].values == mock_embed("persisted text", 32).values);
}

TEST_CASE("concurrent identical requests reach the inner provider once") {
    auto counter = std::make_shared<CountingEmbedder>(32);
    CachingEmbedder cache(counter);
    std::vector<std::thread> threads;
    std::atomic<int> failures{0};
    for (int t = 0; t < 8; ++t)
        threads.emplace_back([&] {
            const auto out = cache.embed({"shared key"});
            if (out.size() != 1 || out[0].dim() != 32) failures += 1;
        });
    for (auto& t : threads) t.join();
    CHECK(failures == 0);
    CHECK(counter->texts_seen == 1);
}

TEST_CASE("caching embedder propagates inner failures") {
    class FailingEmbedder : public EmbeddingProvider {
    public:
        const std::string& model_id() const override { return id_; }
        std::size_t dim() const override { return 8; }
        std::vector<Vector> embed(const std::vector<std::string>&) override {
            throw ProviderError("backend down");
        }

    private:
        std::string id_ = "failing";
    };
    CachingEmbedder cache(std::make_shared<FailingEmbedder>());
    CHECK_THROWS_AS(cache.embed({"x"}), ProviderError);
    // the failed claim must not wedge later calls
    CHECK_THROWS_AS(cache.embed({"x"}), ProviderError);
}
