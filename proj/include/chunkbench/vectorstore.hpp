#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "chunkbench/embedding.hpp"

namespace chunkbench {

// one index is built per (model, domain, strategy) configuration
struct IndexKey {
    std::string model_id;
    std::string domain;
    std::string strategy_id;

    bool operator==(const IndexKey&) const = default;
};

struct ScoredHit {
    std::string chunk_id;
    double score = 0;  // cosine
    int rank = 0;      // 1-based, contiguous
};

struct IndexStats {
    std::size_t count = 0;
    std::size_t dim = 0;
    std::size_t size_bytes = 0;
};

// exact in-memory cosine index. Scores are computed in double precision and
// ties broken by ascending chunk_id so rankings reproduce across platforms.
class VectorIndex {
public:
    // dimension is fixed by the first upsert; later mismatches throw
    void upsert(const std::string& chunk_id, const Vector& v);

    // top k by cosine, exact; returns fewer than k iff the index is smaller,
    // and an empty list for an empty index
    std::vector<ScoredHit> top_k(const Vector& query, std::size_t k) const;

    IndexStats stats() const;
    std::size_t count() const { return ids_.size(); }
    std::size_t dim() const { return dim_; }

    // snapshot: "CBIX1" magic, u32 dim, u64 count, then per record a
    // u32-length-prefixed id and dim float32 values; little-endian throughout
    void save(const std::filesystem::path& p) const;
    static VectorIndex load(const std::filesystem::path& p);

private:
    std::size_t dim_ = 0;
    std::vector<std::string> ids_;            // insertion order
    std::vector<float> data_;                 // row-major, ids_.size() x dim_
    std::vector<double> norms_;               // L2 norm per row
    std::unordered_map<std::string, std::size_t> pos_;  // id -> row
};

}  // namespace chunkbench
