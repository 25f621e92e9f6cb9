#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "chunkbench/chat.hpp"
#include "chunkbench/corpus.hpp"
#include "chunkbench/embedding.hpp"
#include "chunkbench/segmentation.hpp"

namespace chunkbench {

enum class Family { deterministic, recursive, semantic, adaptive, late, llm, hybrid };

std::string family_name(Family f);

// atomic retrieval unit; spans are codepoint offsets into the source document
struct Chunk {
    std::string id;
    std::string doc_id;
    std::string strategy_id;
    int seq = 0;
    std::string text;
    Span char_span;
    std::optional<Span> token_span;
    std::optional<std::string> parent_id;
};

struct StrategyConfig {
    std::string name;
    Family family = Family::deterministic;
    std::map<std::string, double> num_params;
    std::map<std::string, std::string> str_params;

    double num(const std::string& key) const;             // ConfigError when absent
    std::string str(const std::string& key) const;        // ConfigError when absent
};

// persisted boundary probabilities so resumed runs spend no model calls;
// append-only jsonl {"key","p"}
class BoundaryCache {
public:
    BoundaryCache() = default;
    explicit BoundaryCache(std::filesystem::path file);

    std::optional<double> get(const std::string& key) const;
    void put(const std::string& key, double p);
    std::size_t entries() const;

private:
    std::filesystem::path file_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, double> memory_;
};

struct ChunkerServices {
    std::shared_ptr<EmbeddingProvider> embedder;
    std::shared_ptr<ChatProvider> chat;
    BoundaryCache* boundary_cache = nullptr;
};

struct ChunkResult {
    std::vector<Chunk> chunks;
    // parallel to chunks for the late family (index-first vectors); empty otherwise
    std::vector<Vector> vectors;
    bool used_late_fallback = false;
};

// ---- building blocks, exposed for direct testing. Ids, seq and strategy
// fields are attached by run_strategy; mechanisms fill text and spans.

std::vector<Chunk> window_chunk(const Utf8Text& text, const TokenSequence& tokens,
                                std::size_t window, std::size_t stride);
std::vector<Chunk> char_chunk(const Utf8Text& text, std::size_t size, std::size_t overlap);
std::vector<Chunk> group_chunk(const Utf8Text& text, const std::vector<Unit>& units,
                               std::size_t group, std::size_t overlap);

std::vector<std::string> recursive_separators();  // coarsest first
std::vector<Chunk> recursive_chunk(const Utf8Text& text, const TokenSequence& tokens,
                                   std::size_t max_tokens, std::size_t overlap,
                                   const std::vector<std::string>& separators);

// children carry parent_id placeholders ("p000000", ...) resolved to full ids
// by run_strategy; only children are returned
std::vector<Chunk> parent_child_chunk(const Utf8Text& text, const TokenSequence& tokens,
                                      std::size_t parent_size, std::size_t child_size);

// greedy whole-sentence accumulation into [k_min, k_max] token chunks; an
// oversized run is hard-split at k_max and only the final chunk may fall
// short of k_min
std::vector<Chunk> dynamic_size_chunk(const Utf8Text& text, const TokenSequence& tokens,
                                      const std::vector<Unit>& sentences, std::size_t k_min,
                                      std::size_t k_max);

inline constexpr std::size_t kDensityProbeTokens = 200;
inline constexpr double kDensityRhoRef = 0.5;
inline constexpr std::size_t kDensityMinTokens = 50;

// distinct-token fraction of tokens [start, start+count)
double lexical_density(const TokenSequence& tokens, std::size_t start, std::size_t count);
std::vector<Chunk> density_adaptive_chunk(const Utf8Text& text, const TokenSequence& tokens,
                                          std::size_t base_size);

// cosine of each adjacent sentence pair, embedded in one batch
std::vector<double> adjacent_sentence_sims(const std::vector<Unit>& sentences,
                                           EmbeddingProvider& embedder);

// boundary between neighbours iff sim < theta (strict); chunks are maximal
// runs of sentences
std::vector<Chunk> semantic_boundary_chunk(const Utf8Text& text,
                                           const std::vector<Unit>& sentences,
                                           EmbeddingProvider& embedder, double theta);

// theta adapts per document to the given percentile of its adjacent sims
std::vector<Chunk> semantic_adaptive_chunk(const Utf8Text& text,
                                           const std::vector<Unit>& sentences,
                                           EmbeddingProvider& embedder, double sim_percentile);

// boundary iff sim < rolling-mean(last `window` sims) - delta; the first pair
// never fires
std::vector<Chunk> variance_adaptive_chunk(const Utf8Text& text,
                                           const std::vector<Unit>& sentences,
                                           EmbeddingProvider& embedder, double delta,
                                           std::size_t window);

// sequential centroid agglomeration; sentence joins the running cluster iff
// cosine distance to its centroid <= dist_threshold
std::vector<Chunk> topic_chunk(const Utf8Text& text, const std::vector<Unit>& sentences,
                               EmbeddingProvider& embedder, double dist_threshold);

std::string render_boundary_prompt(const std::string& a, const std::string& b);

// boundary iff the model's probability p > tau; malformed replies retry twice
// then count as p = 0
std::vector<Chunk> llm_boundary_chunk(const Utf8Text& text, const std::vector<Unit>& sentences,
                                      ChatProvider& llm, double tau,
                                      BoundaryCache* cache = nullptr);

std::vector<Chunk> llm_segment_then_chunk(const Utf8Text& text, const TokenSequence& tokens,
                                          const std::vector<Unit>& sentences, ChatProvider& llm,
                                          double tau, std::size_t max_tokens, std::size_t overlap,
                                          BoundaryCache* cache = nullptr);

enum class LateGranularity { sentence, paragraph, token_span };

// embeds the whole document once at token level and mean-pools per unit; a
// provider without token-level vectors degrades to embedding lead+unit text,
// flagged in the result
ChunkResult late_chunk(const Document& doc, EmbeddingProvider& embedder, LateGranularity g,
                       std::size_t span = 128, std::size_t step = 64);

// re-splits any segment longer than tokens_max into token windows at the
// given stride; shorter segments pass through untouched (idempotent)
std::vector<Chunk> hybrid_normalize(const Utf8Text& text, std::vector<Chunk> segments,
                                    std::size_t tokens_max, std::size_t stride);

// ---- registry and dispatch

std::vector<StrategyConfig> build_registry();
// overrides: json object keyed by strategy abbreviation mapping parameter
// names to new values; unknown strategies or parameters are config errors
std::vector<StrategyConfig> build_registry(const std::filesystem::path& overrides_file);

const StrategyConfig& find_strategy(const std::vector<StrategyConfig>& registry,
                                    const std::string& name);

ChunkResult run_strategy(const StrategyConfig& cfg, const Document& doc,
                         const ChunkerServices& services);

std::string serialize_chunk(const Chunk& c);

}  // namespace chunkbench
