#include "chunkbench/vectorstore.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "chunkbench/errors.hpp"
#include "chunkbench/util.hpp"

namespace chunkbench {

namespace {

constexpr char kMagic[5] = {'C', 'B', 'I', 'X', '1'};
constexpr std::size_t kFixedOverheadBytes = 64;

}  // namespace

void VectorIndex::upsert(const std::string& chunk_id, const Vector& v) {
    if (chunk_id.empty()) throw ContractError("chunk id is empty");
    if (v.dim() == 0) throw ContractError("cannot index a zero-dimensional vector");
    if (dim_ == 0) dim_ = v.dim();
    if (v.dim() != dim_)
        throw ContractError("vector dim " + std::to_string(v.dim()) + " does not match index dim " +
                            std::to_string(dim_));
    double norm = 0;
    for (float x : v.values) norm += static_cast<double>(x) * x;
    norm = std::sqrt(norm);
    if (norm == 0) throw ContractError("cannot index a zero vector");

    auto it = pos_.find(chunk_id);
    std::size_t row;
    if (it == pos_.end()) {
        row = ids_.size();
        ids_.push_back(chunk_id);
        data_.resize(data_.size() + dim_);
        norms_.push_back(0);
        pos_.emplace(chunk_id, row);
    } else {
        row = it->second;
    }
    std::copy(v.values.begin(), v.values.end(), data_.begin() + static_cast<std::ptrdiff_t>(row * dim_));
    norms_[row] = norm;
}

std::vector<ScoredHit> VectorIndex::top_k(const Vector& query, std::size_t k) const {
    if (k < 1) throw ContractError("top_k requires k >= 1");
    if (ids_.empty()) return {};
    if (query.dim() != dim_)
        throw ContractError("query dim " + std::to_string(query.dim()) +
                            " does not match index dim " + std::to_string(dim_));
    double qnorm = 0;
    for (float x : query.values) qnorm += static_cast<double>(x) * x;
    qnorm = std::sqrt(qnorm);
    if (qnorm == 0) throw ContractError("query vector has zero norm");

    std::vector<ScoredHit> hits;
    hits.reserve(ids_.size());
    for (std::size_t row = 0; row < ids_.size(); ++row) {
        const float* base = data_.data() + row * dim_;
        double dot = 0;
        for (std::size_t j = 0; j < dim_; ++j) dot += static_cast<double>(base[j]) * query.values[j];
        hits.push_back({ids_[row], dot / (qnorm * norms_[row]), 0});
    }

    const std::size_t n = std::min(k, hits.size());
    auto better = [](const ScoredHit& a, const ScoredHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    };
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(),
                      better);
    hits.resize(n);
    for (std::size_t i = 0; i < n; ++i) hits[i].rank = static_cast<int>(i + 1);
    return hits;
}

IndexStats VectorIndex::stats() const {
    IndexStats s;
    s.count = ids_.size();
    s.dim = dim_;
    s.size_bytes = kFixedOverheadBytes + ids_.size() * dim_ * 4;
    for (const auto& id : ids_) s.size_bytes += id.size();
    return s;
}

void VectorIndex::save(const std::filesystem::path& p) const {
    std::string blob;
    blob.reserve(sizeof(kMagic) + 12 + ids_.size() * (dim_ * 4 + 16));
    blob.append(kMagic, sizeof(kMagic));
    const auto d = static_cast<std::uint32_t>(dim_);
    const auto n = static_cast<std::uint64_t>(ids_.size());
    blob.append(reinterpret_cast<const char*>(&d), 4);
    blob.append(reinterpret_cast<const char*>(&n), 8);
    for (std::size_t row = 0; row < ids_.size(); ++row) {
        const auto len = static_cast<std::uint32_t>(ids_[row].size());
        blob.append(reinterpret_cast<const char*>(&len), 4);
        blob.append(ids_[row]);
        blob.append(reinterpret_cast<const char*>(data_.data() + row * dim_), dim_ * 4);
    }
    write_file_atomic(p, blob);
}

VectorIndex VectorIndex::load(const std::filesystem::path& p) {
    const std::string blob = read_file(p);
    const char* cur = blob.data();
    const char* end = blob.data() + blob.size();
    auto need = [&](std::size_t n) {
        if (static_cast<std::size_t>(end - cur) < n)
            throw Error("truncated index snapshot: " + p.string());
    };
    need(sizeof(kMagic));
    if (std::memcmp(cur, kMagic, sizeof(kMagic)) != 0)
        throw Error("not an index snapshot: " + p.string());
    cur += sizeof(kMagic);

    std::uint32_t d = 0;
    std::uint64_t n = 0;
    need(12);
    std::memcpy(&d, cur, 4);
    std::memcpy(&n, cur + 4, 8);
    cur += 12;
    if (d == 0 && n > 0) throw Error("index snapshot has records but zero dim: " + p.string());

    VectorIndex idx;
    Vector v;
    v.values.resize(d);
    for (std::uint64_t i = 0; i < n; ++i) {
        std::uint32_t len = 0;
        need(4);
        std::memcpy(&len, cur, 4);
        cur += 4;
        need(len);
        std::string id(cur, len);
        cur += len;
        need(static_cast<std::size_t>(d) * 4);
        std::memcpy(v.values.data(), cur, static_cast<std::size_t>(d) * 4);
        cur += static_cast<std::size_t>(d) * 4;
        idx.upsert(id, v);
    }
    if (cur != end) throw Error("trailing bytes in index snapshot: " + p.string());
    return idx;
}

}  // namespace chunkbench
