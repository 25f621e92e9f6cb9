#include "chunkbench/chunkers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <numeric>
#include <unordered_set>

#include <spdlog/spdlog.h>
#include "json.hpp"

#include "chunkbench/errors.hpp"
#include "chunkbench/metrics.hpp"
#include "chunkbench/util.hpp"

namespace chunkbench {

std::string family_name(Family f) {
    switch (f) {
        case Family::deterministic: return "deterministic";
        case Family::recursive: return "recursive";
        case Family::semantic: return "semantic";
        case Family::adaptive: return "adaptive";
        case Family::late: return "late";
        case Family::llm: return "llm";
        case Family::hybrid: return "hybrid";
    }
    throw ContractError("unknown family");
}

double StrategyConfig::num(const std::string& key) const {
    auto it = num_params.find(key);
    if (it == num_params.end())
        throw ConfigError("strategy " + name + " lacks numeric parameter \"" + key + "\"");
    return it->second;
}

std::string StrategyConfig::str(const std::string& key) const {
    auto it = str_params.find(key);
    if (it == str_params.end())
        throw ConfigError("strategy " + name + " lacks string parameter \"" + key + "\"");
    return it->second;
}

BoundaryCache::BoundaryCache(std::filesystem::path file) : file_(std::move(file)) {
    ensure_dir(file_.parent_path());
    std::error_code ec;
    if (!std::filesystem::exists(file_, ec)) return;
    for (const auto& line : read_lines(file_)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("key") || !j.contains("p")) {
            spdlog::warn("skipping malformed boundary cache line");
            continue;
        }
        memory_[j["key"].get<std::string>()] = j["p"].get<double>();
    }
}

std::optional<double> BoundaryCache::get(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = memory_.find(key);
    if (it == memory_.end()) return std::nullopt;
    return it->second;
}

void BoundaryCache::put(const std::string& key, double p) {
    {
        std::lock_guard lock(mu_);
        if (!memory_.emplace(key, p).second) return;
    }
    if (!file_.empty()) {
        nlohmann::json row = {{"key", key}, {"p", p}};
        append_line(file_, row.dump());
    }
}

std::size_t BoundaryCache::entries() const {
    std::lock_guard lock(mu_);
    return memory_.size();
}

namespace {

Chunk from_char_span(const Utf8Text& text, Span span) {
    Chunk c;
    c.char_span = span;
    c.text = text.slice_str(span.start, span.end);
    return c;
}

Chunk from_token_range(const Utf8Text& text, const TokenSequence& tokens, std::size_t a,
                       std::size_t b) {
    Chunk c;
    c.token_span = Span{a, b};
    c.char_span = Span{tokens.tokens[a].char_span.start, tokens.tokens[b - 1].char_span.end};
    c.text = text.slice_str(c.char_span.start, c.char_span.end);
    return c;
}

Chunk from_unit_range(const Utf8Text& text, const std::vector<Unit>& units, std::size_t a,
                      std::size_t b) {
    return from_char_span(text,
                          Span{units[a].char_span.start, units[b - 1].char_span.end});
}

// token index range [lo, hi) of tokens starting inside the span; tokens never
// straddle the span kinds used here (unit, separator piece)
std::pair<std::size_t, std::size_t> token_range_in_span(const TokenSequence& tokens, Span span) {
    const auto& ts = tokens.tokens;
    auto by_start = [](const Token& t, std::size_t v) { return t.char_span.start < v; };
    const auto lo = std::lower_bound(ts.begin(), ts.end(), span.start, by_start) - ts.begin();
    const auto hi = std::lower_bound(ts.begin(), ts.end(), span.end, by_start) - ts.begin();
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

std::vector<std::pair<std::size_t, std::size_t>> unit_token_ranges(
    const TokenSequence& tokens, const std::vector<Unit>& units) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(units.size());
    std::size_t t = 0;
    const std::size_t n = tokens.size();
    for (const auto& u : units) {
        while (t < n && tokens.tokens[t].char_span.start < u.char_span.start) ++t;
        const std::size_t a = t;
        while (t < n && tokens.tokens[t].char_span.start < u.char_span.end) ++t;
        out.emplace_back(a, t);
    }
    return out;
}

// maximal runs of units delimited by fired boundaries; boundaries[i] sits
// between unit i and i+1
std::vector<Chunk> chunks_from_boundaries(const Utf8Text& text, const std::vector<Unit>& units,
                                          const std::vector<bool>& boundaries) {
    std::vector<Chunk> out;
    if (units.empty()) return out;
    std::size_t start = 0;
    for (std::size_t i = 0; i + 1 < units.size(); ++i) {
        if (boundaries[i]) {
            out.push_back(from_unit_range(text, units, start, i + 1));
            start = i + 1;
        }
    }
    out.push_back(from_unit_range(text, units, start, units.size()));
    return out;
}

std::vector<Vector> embed_units(const std::vector<Unit>& units, EmbeddingProvider& embedder) {
    std::vector<std::string> texts;
    texts.reserve(units.size());
    for (const auto& u : units) texts.push_back(u.text);
    return embedder.embed(texts);
}

}  // namespace

std::vector<Chunk> window_chunk(const Utf8Text& text, const TokenSequence& tokens,
                                std::size_t window, std::size_t stride) {
    if (stride > window) throw ContractError("stride above window leaves gaps");
    std::vector<Chunk> out;
    for (const auto& w : enumerate_windows(tokens.size(), window, stride))
        out.push_back(from_token_range(text, tokens, w.start, w.end));
    return out;
}

std::vector<Chunk> char_chunk(const Utf8Text& text, std::size_t size, std::size_t overlap) {
    if (size < 1) throw ContractError("char chunk size must be positive");
    if (overlap >= size) throw ContractError("overlap must stay below the chunk size");
    std::vector<Chunk> out;
    for (const auto& w : enumerate_windows(text.size(), size, size - overlap))
        out.push_back(from_char_span(text, w));
    return out;
}

std::vector<Chunk> group_chunk(const Utf8Text& text, const std::vector<Unit>& units,
                               std::size_t group, std::size_t overlap) {
    if (group < 1) throw ContractError("group size must be positive");
    if (overlap >= group) throw ContractError("overlap must stay below the group size");
    std::vector<Chunk> out;
    for (const auto& w : enumerate_windows(units.size(), group, group - overlap))
        out.push_back(from_unit_range(text, units, w.start, w.end));
    return out;
}

std::vector<std::string> recursive_separators() { return {"\n\n", "\n", ". ", " "}; }

std::vector<Chunk> recursive_chunk(const Utf8Text& text, const TokenSequence& tokens,
                                   std::size_t max_tokens, std::size_t overlap,
                                   const std::vector<std::string>& separators) {
    if (max_tokens < 1) throw ContractError("size limit must be positive");
    if (overlap >= max_tokens) throw ContractError("overlap must stay below the size limit");
    if (separators.empty()) throw ContractError("separator list is empty");

    std::vector<Chunk> out;
    std::function<void(Span, std::size_t)> emit = [&](Span span, std::size_t sep_idx) {
        const auto [lo, hi] = token_range_in_span(tokens, span);
        const std::size_t count = hi - lo;
        if (count == 0) return;  // separator-only remainder
        if (count <= max_tokens) {
            out.push_back(from_token_range(text, tokens, lo, hi));
            return;
        }
        for (std::size_t s = sep_idx; s < separators.size(); ++s) {
            const std::string& sep = separators[s];
            const std::size_t sep_len = sep.size();  // ascii: codepoints == bytes
            std::vector<Span> pieces;
            std::size_t cur = span.start;
            std::size_t i = span.start;
            while (i + sep_len <= span.end) {
                if (text.slice(i, i + sep_len) == sep) {
                    pieces.push_back({cur, i + sep_len});  // separator rides with its piece
                    cur = i + sep_len;
                    i += sep_len;
                } else {
                    ++i;
                }
            }
            if (cur < span.end) pieces.push_back({cur, span.end});
            std::erase_if(pieces, [](const Span& p) { return p.length() == 0; });
            if (pieces.size() >= 2) {
                for (const auto& p : pieces) emit(p, s);
                return;
            }
        }
        // no separator made progress: fall back to token windows
        for (const auto& w : enumerate_windows(count, max_tokens, max_tokens - overlap))
            out.push_back(from_token_range(text, tokens, lo + w.start, lo + w.end));
    };
    emit({0, text.size()}, 0);
    return out;
}

std::vector<Chunk> parent_child_chunk(const Utf8Text& text, const TokenSequence& tokens,
                                      std::size_t parent_size, std::size_t child_size) {
    if (child_size < 1 || parent_size <= child_size)
        throw ContractError("parent size must exceed child size");
    std::vector<Chunk> out;
    const auto parents = enumerate_windows(tokens.size(), parent_size, parent_size);
    for (std::size_t j = 0; j < parents.size(); ++j) {
        char tag[16];
        std::snprintf(tag, sizeof(tag), "p%06zu", j);
        const auto& p = parents[j];
        for (const auto& w : enumerate_windows(p.length(), child_size, child_size)) {
            Chunk c = from_token_range(text, tokens, p.start + w.start, p.start + w.end);
            c.parent_id = tag;
            out.push_back(std::move(c));
        }
    }
    return out;
}

std::vector<Chunk> dynamic_size_chunk(const Utf8Text& text, const TokenSequence& tokens,
                                      const std::vector<Unit>& sentences, std::size_t k_min,
                                      std::size_t k_max) {
    if (k_min < 1 || k_min > k_max) throw ContractError("need 1 <= k_min <= k_max");
    std::deque<std::pair<std::size_t, std::size_t>> pieces;
    for (const auto& [a, b] : unit_token_ranges(tokens, sentences))
        if (b > a) pieces.emplace_back(a, b);

    std::vector<Chunk> out;
    std::size_t run_start = 0;
    std::size_t run_end = 0;
    std::size_t cum = 0;
    while (!pieces.empty()) {
        const auto [a, b] = pieces.front();
        const std::size_t plen = b - a;
        if (cum == 0) {
            if (plen > k_max) {  // oversized single sentence: hard split
                out.push_back(from_token_range(text, tokens, a, a + k_max));
                if (a + k_max < b)
                    pieces.front() = {a + k_max, b};
                else
                    pieces.pop_front();
                continue;
            }
            run_start = a;
            run_end = b;
            cum = plen;
            pieces.pop_front();
            continue;
        }
        if (cum + plen > k_max) {
            if (cum >= k_min) {
                out.push_back(from_token_range(text, tokens, run_start, run_end));
            } else {
                // cannot reach k_min on a sentence boundary: absorb and split at k_max
                const std::size_t take = k_max - cum;
                out.push_back(from_token_range(text, tokens, run_start, a + take));
                pieces.front() = {a + take, b};
            }
            cum = 0;
            continue;
        }
        run_end = b;
        cum += plen;
        pieces.pop_front();
    }
    if (cum > 0) out.push_back(from_token_range(text, tokens, run_start, run_end));
    return out;
}

double lexical_density(const TokenSequence& tokens, std::size_t start, std::size_t count) {
    if (count == 0) throw ContractError("density probe is empty");
    if (start + count > tokens.size()) throw ContractError("density probe exceeds token count");
    std::unordered_set<std::string> distinct;
    for (std::size_t i = start; i < start + count; ++i)
        distinct.insert(lowercase_utf8(tokens.tokens[i].text));
    return static_cast<double>(distinct.size()) / static_cast<double>(count);
}

std::vector<Chunk> density_adaptive_chunk(const Utf8Text& text, const TokenSequence& tokens,
                                          std::size_t base_size) {
    if (base_size < 1) throw ContractError("base size must be positive");
    const std::size_t n = tokens.size();
    std::vector<Chunk> out;
    std::size_t cursor = 0;
    while (cursor < n) {
        const std::size_t probe = std::min(kDensityProbeTokens, n - cursor);
        const double rho = lexical_density(tokens, cursor, probe);
        auto len = static_cast<std::size_t>(
            std::llround(static_cast<double>(base_size) * kDensityRhoRef / rho));
        len = std::clamp(len, kDensityMinTokens, 2 * base_size);
        len = std::min(len, n - cursor);
        out.push_back(from_token_range(text, tokens, cursor, cursor + len));
        cursor += len;
    }
    return out;
}

std::vector<double> adjacent_sentence_sims(const std::vector<Unit>& sentences,
                                           EmbeddingProvider& embedder) {
    if (sentences.size() < 2) return {};
    const auto vecs = embed_units(sentences, embedder);
    std::vector<double> sims;
    sims.reserve(sentences.size() - 1);
    for (std::size_t i = 0; i + 1 < vecs.size(); ++i)
        sims.push_back(cosine_sim(vecs[i], vecs[i + 1]));
    return sims;
}

std::vector<Chunk> semantic_boundary_chunk(const Utf8Text& text,
                                           const std::vector<Unit>& sentences,
                                           EmbeddingProvider& embedder, double theta) {
    if (theta < 0 || theta > 1) throw ContractError("threshold must lie in [0,1]");
    if (sentences.size() < 2) return chunks_from_boundaries(text, sentences, {});
    const auto sims = adjacent_sentence_sims(sentences, embedder);
    std::vector<bool> boundaries(sims.size());
    for (std::size_t i = 0; i < sims.size(); ++i) boundaries[i] = sims[i] < theta;
    return chunks_from_boundaries(text, sentences, boundaries);
}

std::vector<Chunk> semantic_adaptive_chunk(const Utf8Text& text,
                                           const std::vector<Unit>& sentences,
                                           EmbeddingProvider& embedder, double sim_percentile) {
    if (sentences.size() < 2) return chunks_from_boundaries(text, sentences, {});
    const auto sims = adjacent_sentence_sims(sentences, embedder);
    const double theta = percentile(sims, sim_percentile);
    std::vector<bool> boundaries(sims.size());
    for (std::size_t i = 0; i < sims.size(); ++i) boundaries[i] = sims[i] < theta;
    return chunks_from_boundaries(text, sentences, boundaries);
}

std::vector<Chunk> variance_adaptive_chunk(const Utf8Text& text,
                                           const std::vector<Unit>& sentences,
                                           EmbeddingProvider& embedder, double delta,
                                           std::size_t window) {
    if (delta < 0) throw ContractError("sensitivity must be non-negative");
    if (window < 1) throw ContractError("rolling window must be positive");
    if (sentences.size() < 2) return chunks_from_boundaries(text, sentences, {});
    const auto sims = adjacent_sentence_sims(sentences, embedder);
    std::vector<bool> boundaries(sims.size(), false);
    std::deque<double> history;
    for (std::size_t i = 0; i < sims.size(); ++i) {
        if (!history.empty()) {
            const double mu = std::accumulate(history.begin(), history.end(), 0.0) /
                              static_cast<double>(history.size());
            boundaries[i] = sims[i] < mu - delta;
        }
        history.push_back(sims[i]);
        if (history.size() > window) history.pop_front();
    }
    return chunks_from_boundaries(text, sentences, boundaries);
}

std::vector<Chunk> topic_chunk(const Utf8Text& text, const std::vector<Unit>& sentences,
                               EmbeddingProvider& embedder, double dist_threshold) {
    if (dist_threshold < 0 || dist_threshold > 1)
        throw ContractError("distance threshold must lie in [0,1]");
    if (sentences.size() < 2) return chunks_from_boundaries(text, sentences, {});
    const auto vecs = embed_units(sentences, embedder);
    const std::size_t dim = vecs[0].dim();

    std::vector<bool> boundaries(sentences.size() - 1, false);
    // centroid kept as an unnormalized running sum; cosine is scale-invariant
    std::vector<double> centroid(vecs[0].values.begin(), vecs[0].values.end());
    for (std::size_t i = 1; i < vecs.size(); ++i) {
        double dot = 0;
        double nc = 0;
        double nv = 0;
        for (std::size_t j = 0; j < dim; ++j) {
            dot += centroid[j] * vecs[i].values[j];
            nc += centroid[j] * centroid[j];
            nv += static_cast<double>(vecs[i].values[j]) * vecs[i].values[j];
        }
        const double dist =
            (nc == 0 || nv == 0) ? 1.0 : 1.0 - dot / (std::sqrt(nc) * std::sqrt(nv));
        if (dist <= dist_threshold) {
            for (std::size_t j = 0; j < dim; ++j) centroid[j] += vecs[i].values[j];
        } else {
            boundaries[i - 1] = true;
            centroid.assign(vecs[i].values.begin(), vecs[i].values.end());
        }
    }
    return chunks_from_boundaries(text, sentences, boundaries);
}

std::string render_boundary_prompt(const std::string& a, const std::string& b) {
    return "You split documents into coherent segments.\n\nSegment A:\n" + a +
           "\n\nSegment B:\n" + b +
           "\n\nEstimate the probability that a new segment should begin at the start of "
           "Segment B.\n\nRespond with JSON only:\n{\n  \"p\": <real between 0 and 1>\n}";
}

namespace {

bool parse_boundary_reply(const std::string& reply, double& p) {
    auto try_parse = [&](const std::string& s) {
        nlohmann::json j = nlohmann::json::parse(s, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("p") || !j["p"].is_number())
            return false;
        const double v = j["p"].get<double>();
        if (v < 0 || v > 1) return false;
        p = v;
        return true;
    };
    if (try_parse(reply)) return true;
    const auto open = reply.find('{');
    const auto close = reply.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close <= open) return false;
    return try_parse(reply.substr(open, close - open + 1));
}

double boundary_probability(ChatProvider& llm, const std::string& a, const std::string& b,
                            BoundaryCache* cache) {
    const std::string key = content_key(llm.model_id(), a + std::string(1, '\x1f') + b);
    if (cache)
        if (const auto hit = cache->get(key)) return *hit;
    double p = 0;
    bool parsed = false;
    for (int attempt = 1; attempt <= 3 && !parsed; ++attempt) {
        const std::string reply = llm.complete(render_boundary_prompt(a, b));
        parsed = parse_boundary_reply(reply, p);
        if (!parsed)
            spdlog::warn("boundary reply unparseable (attempt {}/3): {}", attempt,
                         reply.substr(0, 120));
    }
    if (!parsed) p = 0;  // no boundary on persistent garbage
    if (cache) cache->put(key, p);
    return p;
}

}  // namespace

std::vector<Chunk> llm_boundary_chunk(const Utf8Text& text, const std::vector<Unit>& sentences,
                                      ChatProvider& llm, double tau, BoundaryCache* cache) {
    if (tau <= 0 || tau >= 1) throw ContractError("tau must lie in (0,1)");
    if (sentences.size() < 2) return chunks_from_boundaries(text, sentences, {});
    std::vector<bool> boundaries(sentences.size() - 1, false);
    for (std::size_t i = 0; i + 1 < sentences.size(); ++i)
        boundaries[i] =
            boundary_probability(llm, sentences[i].text, sentences[i + 1].text, cache) > tau;
    return chunks_from_boundaries(text, sentences, boundaries);
}

std::vector<Chunk> llm_segment_then_chunk(const Utf8Text& text, const TokenSequence& tokens,
                                          const std::vector<Unit>& sentences, ChatProvider& llm,
                                          double tau, std::size_t max_tokens, std::size_t overlap,
                                          BoundaryCache* cache) {
    (void)tokens;
    if (overlap >= max_tokens) throw ContractError("overlap must stay below the size limit");
    auto segments = llm_boundary_chunk(text, sentences, llm, tau, cache);
    return hybrid_normalize(text, std::move(segments), max_tokens, max_tokens - overlap);
}

ChunkResult late_chunk(const Document& doc, EmbeddingProvider& embedder, LateGranularity g,
                       std::size_t span, std::size_t step) {
    Utf8Text text{doc.text};
    const TokenSequence tokens = tokenize(text);
    ChunkResult result;
    if (tokens.empty()) return result;

    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    if (g == LateGranularity::token_span) {
        for (const auto& w : enumerate_windows(tokens.size(), span, step)) {
            result.chunks.push_back(from_token_range(text, tokens, w.start, w.end));
            ranges.emplace_back(w.start, w.end);
        }
    } else {
        const auto units =
            g == LateGranularity::sentence ? split_sentences(text) : split_paragraphs(text);
        const auto unit_ranges = unit_token_ranges(tokens, units);
        for (std::size_t i = 0; i < units.size(); ++i) {
            if (unit_ranges[i].second == unit_ranges[i].first) continue;
            Chunk c = from_unit_range(text, units, i, i + 1);
            c.token_span = Span{unit_ranges[i].first, unit_ranges[i].second};
            result.chunks.push_back(std::move(c));
            ranges.push_back(unit_ranges[i]);
        }
    }

    if (embedder.supports_token_level()) {
        std::vector<std::string> token_texts;
        token_texts.reserve(tokens.size());
        for (const auto& t : tokens.tokens) token_texts.push_back(t.text);
        const auto token_vecs = embedder.embed_tokens(token_texts);
        if (token_vecs.size() != tokens.size())
            throw ContractError("token-level embedding count mismatch");
        for (const auto& [a, b] : ranges) {
            const std::size_t dim = token_vecs[a].dim();
            std::vector<double> acc(dim, 0.0);
            for (std::size_t i = a; i < b; ++i)
                for (std::size_t j = 0; j < dim; ++j) acc[j] += token_vecs[i].values[j];
            double norm = 0;
            for (double x : acc) norm += x * x;
            norm = std::sqrt(norm);
            if (norm == 0) throw ContractError("pooled chunk vector has zero norm");
            Vector v;
            v.model_id = embedder.model_id();
            v.values.resize(dim);
            for (std::size_t j = 0; j < dim; ++j)
                v.values[j] = static_cast<float>(acc[j] / norm);
            result.vectors.push_back(std::move(v));
        }
    } else {
        result.used_late_fallback = true;
        const std::size_t lead_tokens = std::min<std::size_t>(256, tokens.size());
        const std::string lead =
            text.slice_str(0, tokens.tokens[lead_tokens - 1].char_span.end);
        std::vector<std::string> inputs;
        inputs.reserve(result.chunks.size());
        for (const auto& c : result.chunks) inputs.push_back(lead + "\n\n" + c.text);
        result.vectors = embedder.embed(inputs);
    }
    return result;
}

std::vector<Chunk> hybrid_normalize(const Utf8Text& text, std::vector<Chunk> segments,
                                    std::size_t tokens_max, std::size_t stride) {
    if (tokens_max < 1) throw ContractError("size limit must be positive");
    if (stride < 1 || stride > tokens_max) throw ContractError("stride must lie in [1, limit]");
    std::vector<Chunk> out;
    for (auto& seg : segments) {
        const TokenSequence local = tokenize(seg.text);
        if (local.size() <= tokens_max) {
            out.push_back(std::move(seg));
            continue;
        }
        for (const auto& w : enumerate_windows(local.size(), tokens_max, stride)) {
            Chunk c;
            c.char_span = Span{seg.char_span.start + local.tokens[w.start].char_span.start,
                               seg.char_span.start + local.tokens[w.end - 1].char_span.end};
            c.text = text.slice_str(c.char_span.start, c.char_span.end);
            out.push_back(std::move(c));
        }
    }
    return out;
}

namespace {

EmbeddingProvider& require_embedder(const ChunkerServices& services, const std::string& name) {
    if (!services.embedder) throw ConfigError("strategy " + name + " needs an embedding provider");
    return *services.embedder;
}

ChatProvider& require_chat(const ChunkerServices& services, const std::string& name) {
    if (!services.chat) throw ConfigError("strategy " + name + " needs a chat provider");
    return *services.chat;
}

struct DocContext {
    const Utf8Text& text;
    const TokenSequence& tokens;
    const std::vector<Unit>& paragraphs;
    const std::vector<Unit>& sentences;
};

std::size_t usize(double v) { return static_cast<std::size_t>(v); }

std::vector<Chunk> mechanism_chunks(const std::string& name, const StrategyConfig& cfg,
                                    const DocContext& ctx, const ChunkerServices& services) {
    if (name == "FCC")
        return char_chunk(ctx.text, usize(cfg.num("char_size")), usize(cfg.num("overlap")));
    if (name == "FC" || name == "OFC") {
        const auto w = usize(cfg.num("token_size"));
        return window_chunk(ctx.text, ctx.tokens, w, w - usize(cfg.num("overlap")));
    }
    if (name == "SWC")
        return window_chunk(ctx.text, ctx.tokens, usize(cfg.num("window")),
                            usize(cfg.num("step")));
    if (name == "LAC") {
        const auto target = usize(cfg.num("target"));
        const auto tol = usize(cfg.num("tolerance"));
        return dynamic_size_chunk(ctx.text, ctx.tokens, ctx.sentences, target - tol,
                                  target + tol);
    }
    if (name == "SBC") return group_chunk(ctx.text, ctx.sentences, 1, 0);
    if (name == "SGC")
        return group_chunk(ctx.text, ctx.sentences, usize(cfg.num("sentences")),
                           usize(cfg.num("overlap")));
    if (name == "PBC") return group_chunk(ctx.text, ctx.paragraphs, 1, 0);
    if (name == "PGC")
        return group_chunk(ctx.text, ctx.paragraphs, usize(cfg.num("paragraphs")),
                           usize(cfg.num("overlap")));
    if (name == "RC")
        return recursive_chunk(ctx.text, ctx.tokens, usize(cfg.num("chunk_size")),
                               usize(cfg.num("overlap")), recursive_separators());
    if (name == "RTF")
        return recursive_chunk(ctx.text, ctx.tokens, usize(cfg.num("token_size")),
                               usize(cfg.num("overlap")), recursive_separators());
    if (name == "PCC")
        return parent_child_chunk(ctx.text, ctx.tokens, usize(cfg.num("parent")),
                                  usize(cfg.num("child")));
    if (name == "SEBC" || name == "SSTC")
        return semantic_boundary_chunk(ctx.text, ctx.sentences, require_embedder(services, name),
                                       cfg.num("threshold"));
    if (name == "TBC")
        return topic_chunk(ctx.text, ctx.sentences, require_embedder(services, name),
                           cfg.num("dist_threshold"));
    if (name == "SBDC")
        return semantic_adaptive_chunk(ctx.text, ctx.sentences, require_embedder(services, name),
                                       cfg.num("percentile"));
    if (name == "DFC")
        return dynamic_size_chunk(ctx.text, ctx.tokens, ctx.sentences, usize(cfg.num("min")),
                                  usize(cfg.num("max")));
    if (name == "CDAC")
        return density_adaptive_chunk(ctx.text, ctx.tokens, usize(cfg.num("base_size")));
    if (name == "SVAC")
        return variance_adaptive_chunk(ctx.text, ctx.sentences, require_embedder(services, name),
                                       cfg.num("sensitivity"), usize(cfg.num("window")));
    if (name == "LBDC")
        return llm_boundary_chunk(ctx.text, ctx.sentences, require_chat(services, name),
                                  cfg.num("tau"), services.boundary_cache);
    if (name == "LSTC")
        return llm_segment_then_chunk(ctx.text, ctx.tokens, ctx.sentences,
                                      require_chat(services, name), cfg.num("tau"),
                                      usize(cfg.num("max_tokens")), usize(cfg.num("overlap")),
                                      services.boundary_cache);
    throw ConfigError("unknown chunking mechanism: " + name);
}

}  // namespace

std::vector<StrategyConfig> build_registry() {
    std::vector<StrategyConfig> r;
    auto add = [&](std::string name, Family f, std::map<std::string, double> nums = {},
                   std::map<std::string, std::string> strs = {}) {
        r.push_back({std::move(name), f, std::move(nums), std::move(strs)});
    };
    add("FCC", Family::deterministic, {{"char_size", 100}, {"overlap", 10}});
    add("FC", Family::deterministic, {{"token_size", 50}, {"overlap", 0}});
    add("OFC", Family::deterministic, {{"token_size", 50}, {"overlap", 10}});
    add("SWC", Family::deterministic, {{"window", 50}, {"step", 25}});
    add("LAC", Family::deterministic, {{"target", 500}, {"tolerance", 100}});
    add("SBC", Family::deterministic);
    add("SGC", Family::deterministic, {{"sentences", 3}, {"overlap", 1}});
    add("PBC", Family::deterministic);
    add("PGC", Family::deterministic, {{"paragraphs", 2}, {"overlap", 1}});
    add("RC", Family::recursive, {{"chunk_size", 500}, {"overlap", 50}});
    add("RTF", Family::recursive, {{"token_size", 100}, {"overlap", 10}});
    add("PCC", Family::recursive, {{"parent", 500}, {"child", 100}});
    add("SEBC", Family::semantic, {{"threshold", 0.5}});
    add("SSTC", Family::semantic, {{"threshold", 0.6}});
    add("TBC", Family::semantic, {{"dist_threshold", 0.4}});
    add("SBDC", Family::semantic, {{"percentile", 25}});
    add("DFC", Family::adaptive, {{"min", 50}, {"max", 200}});
    add("CDAC", Family::adaptive, {{"base_size", 1000}});
    add("SVAC", Family::adaptive, {{"sensitivity", 0.2}, {"window", 5}});
    add("LCSI", Family::late, {}, {{"granularity", "sentence"}});
    add("LCPI", Family::late, {}, {{"granularity", "paragraph"}});
    add("LCTS", Family::late, {{"span", 128}, {"step", 64}}, {{"granularity", "token_span"}});
    add("LBDC", Family::llm, {{"tau", 0.5}});
    add("LSTC", Family::llm, {{"tau", 0.5}, {"max_tokens", 200}, {"overlap", 20}});

    auto hybrid = [&](std::string name, std::string primary, std::map<std::string, double> nums,
                      double norm_window = 200, double norm_stride = 180) {
        nums["norm_window"] = norm_window;
        nums["norm_stride"] = norm_stride;
        add(std::move(name), Family::hybrid, std::move(nums), {{"primary", std::move(primary)}});
    };
    hybrid("HSmFC", "SEBC", {{"threshold", 0.5}});
    hybrid("HSSC", "SEBC", {{"threshold", 0.5}}, 50, 25);
    hybrid("HSVFC", "SVAC", {{"sensitivity", 0.2}, {"window", 5}});
    hybrid("HSnFC", "SBC", {});
    hybrid("HSGC", "SGC", {{"sentences", 3}, {"overlap", 1}});
    hybrid("HPFC", "PBC", {});
    hybrid("HPGC", "PGC", {{"paragraphs", 2}, {"overlap", 1}});
    hybrid("HRC", "RC", {{"chunk_size", 500}, {"overlap", 50}});
    hybrid("HFCF", "FCC", {{"char_size", 100}, {"overlap", 10}});
    hybrid("HOFC", "OFC", {{"token_size", 50}, {"overlap", 10}});
    hybrid("HDFC", "DFC", {{"min", 50}, {"max", 200}});
    hybrid("HCDC", "CDAC", {{"base_size", 1000}});
    return r;
}

std::vector<StrategyConfig> build_registry(const std::filesystem::path& overrides_file) {
    auto registry = build_registry();
    const nlohmann::json overrides = nlohmann::json::parse(read_file(overrides_file));
    if (!overrides.is_object()) throw ConfigError("override file must hold a json object");
    for (const auto& [name, params] : overrides.items()) {
        auto it = std::find_if(registry.begin(), registry.end(),
                               [&](const StrategyConfig& s) { return s.name == name; });
        if (it == registry.end()) throw ConfigError("unknown strategy in overrides: " + name);
        if (!params.is_object())
            throw ConfigError("override for " + name + " must map parameters to values");
        for (const auto& [key, value] : params.items()) {
            if (value.is_number()) {
                if (!it->num_params.count(key))
                    throw ConfigError("strategy " + name + " has no parameter \"" + key + "\"");
                it->num_params[key] = value.get<double>();
            } else if (value.is_string()) {
                if (!it->str_params.count(key))
                    throw ConfigError("strategy " + name + " has no parameter \"" + key + "\"");
                it->str_params[key] = value.get<std::string>();
            } else {
                throw ConfigError("override " + name + "." + key +
                                  " must be a number or string");
            }
        }
    }
    return registry;
}

const StrategyConfig& find_strategy(const std::vector<StrategyConfig>& registry,
                                    const std::string& name) {
    const auto it = std::find_if(registry.begin(), registry.end(),
                                 [&](const StrategyConfig& s) { return s.name == name; });
    if (it == registry.end()) throw ConfigError("unknown strategy: " + name);
    return *it;
}

ChunkResult run_strategy(const StrategyConfig& cfg, const Document& doc,
                         const ChunkerServices& services) {
    const Utf8Text text{doc.text};
    const TokenSequence tokens = tokenize(text);
    const auto paragraphs = split_paragraphs(text);
    const auto sentences = split_sentences(text);
    const DocContext ctx{text, tokens, paragraphs, sentences};

    ChunkResult result;
    if (cfg.family == Family::late) {
        const std::string g = cfg.str("granularity");
        LateGranularity granularity;
        std::size_t span = 0;
        std::size_t step = 0;
        if (g == "sentence") {
            granularity = LateGranularity::sentence;
        } else if (g == "paragraph") {
            granularity = LateGranularity::paragraph;
        } else if (g == "token_span") {
            granularity = LateGranularity::token_span;
            span = usize(cfg.num("span"));
            step = usize(cfg.num("step"));
        } else {
            throw ConfigError("unknown late granularity: " + g);
        }
        result = late_chunk(doc, require_embedder(services, cfg.name), granularity, span, step);
    } else if (cfg.family == Family::hybrid) {
        auto segments = mechanism_chunks(cfg.str("primary"), cfg, ctx, services);
        result.chunks = hybrid_normalize(text, std::move(segments), usize(cfg.num("norm_window")),
                                         usize(cfg.num("norm_stride")));
    } else {
        result.chunks = mechanism_chunks(cfg.name, cfg, ctx, services);
    }

    for (std::size_t i = 0; i < result.chunks.size(); ++i) {
        Chunk& c = result.chunks[i];
        c.doc_id = doc.id;
        c.strategy_id = cfg.name;
        c.seq = static_cast<int>(i);
        char tail[16];
        std::snprintf(tail, sizeof(tail), "%06zu", i);
        c.id = doc.id + ":" + cfg.name + ":" + tail;
        if (c.parent_id) c.parent_id = doc.id + ":" + cfg.name + ":" + *c.parent_id;
    }
    return result;
}

std::string serialize_chunk(const Chunk& c) {
    nlohmann::json j = {
        {"id", c.id},
        {"doc_id", c.doc_id},
        {"strategy", c.strategy_id},
        {"seq", c.seq},
        {"text", c.text},
        {"char_span", {c.char_span.start, c.char_span.end}},
        {"token_span", nullptr},
        {"parent_id", nullptr},
    };
    if (c.token_span) j["token_span"] = {c.token_span->start, c.token_span->end};
    if (c.parent_id) j["parent_id"] = *c.parent_id;
    return j.dump();
}

}  // namespace chunkbench
