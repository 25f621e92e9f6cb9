#include "chunkbench/bench.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include <spdlog/spdlog.h>
#include "json.hpp"

#include "chunkbench/chunkers.hpp"
#include "chunkbench/corpus.hpp"
#include "chunkbench/errors.hpp"
#include "chunkbench/judge.hpp"
#include "chunkbench/profiler.hpp"
#include "chunkbench/util.hpp"
#include "chunkbench/vectorstore.hpp"

namespace chunkbench {

namespace {

namespace fs = std::filesystem;

std::string sanitize_component(const std::string& name) {
    std::string out;
    out.reserve(name.size());
    for (char ch : name) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                        (ch >= '0' && ch <= '9') || ch == '.' || ch == '_' || ch == '-';
        out.push_back(ok ? ch : '_');
    }
    return out.empty() ? std::string("_") : out;
}

fs::path cell_dir(const fs::path& out, const std::string& model, const std::string& domain,
                  const std::string& strategy) {
    return out / "cells" / sanitize_component(model) / sanitize_component(domain) /
           sanitize_component(strategy);
}

nlohmann::json read_json_file(const fs::path& p) {
    nlohmann::json j = nlohmann::json::parse(read_file(p), nullptr, false);
    if (j.is_discarded()) throw Error("malformed json in " + p.string());
    return j;
}

std::vector<std::string> resolve_strategies(const std::vector<StrategyConfig>& registry,
                                            const std::vector<std::string>& requested) {
    std::vector<std::string> names;
    if (requested.empty()) {
        for (const auto& s : registry) names.push_back(s.name);
        return names;
    }
    std::set<std::string> want;
    for (const auto& n : requested) {
        find_strategy(registry, n);  // throws on unknown names
        want.insert(n);
    }
    // canonical report order is registry order regardless of flag order
    for (const auto& s : registry)
        if (want.count(s.name)) names.push_back(s.name);
    return names;
}

struct CellRuntime {
    const RunConfig& config;
    const StrategyConfig& strategy;
    const std::vector<Document>& docs;
    const std::vector<Query>& queries;
    ChunkerServices services;
    Judge& judge;
};

void execute_cell(const CellRuntime& rt, const fs::path& dir) {
    ensure_dir(dir);

    std::vector<Chunk> chunks;
    std::vector<Vector> late_vectors;
    bool used_late_fallback = false;
    auto chunk_all = [&] {
        for (const auto& doc : rt.docs) {
            ChunkResult r = run_strategy(rt.strategy, doc, rt.services);
            used_late_fallback |= r.used_late_fallback;
            std::move(r.chunks.begin(), r.chunks.end(), std::back_inserter(chunks));
            std::move(r.vectors.begin(), r.vectors.end(), std::back_inserter(late_vectors));
        }
    };

    double chunk_time_s = 0;
    double peak_ram_mb = 0;
    if (rt.config.measure_timing) {
        RssSampler sampler;
        chunk_time_s = time_section(chunk_all);
        peak_ram_mb = sampler.stop();
    } else {
        chunk_all();
    }

    VectorIndex index;
    if (rt.strategy.family == Family::late) {
        for (std::size_t i = 0; i < chunks.size(); ++i)
            index.upsert(chunks[i].id, late_vectors[i]);
    } else if (!chunks.empty()) {
        std::vector<std::string> texts;
        texts.reserve(chunks.size());
        for (const auto& c : chunks) texts.push_back(c.text);
        const auto vectors = rt.services.embedder->embed(texts);
        for (std::size_t i = 0; i < chunks.size(); ++i) index.upsert(chunks[i].id, vectors[i]);
    }

    // retrieval sees only the answer-free projection of each query
    std::vector<QueryView> views;
    views.reserve(rt.queries.size());
    for (const auto& q : rt.queries) views.push_back(retrieval_view(q));
    std::vector<std::string> query_texts;
    query_texts.reserve(views.size());
    for (const auto& v : views) query_texts.push_back(v.text);
    const auto query_vectors = rt.services.embedder->embed(query_texts);

    const auto k = static_cast<std::size_t>(rt.config.k);
    std::vector<std::vector<ScoredHit>> hits_per_query(views.size());
    for (std::size_t i = 0; i < views.size(); ++i)
        hits_per_query[i] = index.top_k(query_vectors[i], k);

    std::unordered_map<std::string, const std::string*> text_by_id;
    text_by_id.reserve(chunks.size());
    for (const auto& c : chunks) text_by_id[c.id] = &c.text;

    std::vector<JudgeTask> tasks;
    for (std::size_t i = 0; i < views.size(); ++i)
        for (const auto& hit : hits_per_query[i])
            tasks.push_back({views[i].id, hit.chunk_id, rt.queries[i].golden_answer,
                             *text_by_id.at(hit.chunk_id)});
    const auto judgments =
        judge_batch(rt.judge, tasks, static_cast<std::size_t>(rt.config.judge_workers));

    std::vector<double> latency_samples;
    if (rt.config.measure_timing && index.count() > 0 && !query_vectors.empty())
        latency_samples = latency_trial(index, query_vectors, k, rt.config.warmup_queries);

    // artifacts; cell.json lands last so a crash never leaves an ok marker
    std::string chunk_lines;
    for (const auto& c : chunks) chunk_lines += serialize_chunk(c) + "\n";
    write_file_atomic(dir / "chunks.jsonl", chunk_lines);

    std::string judgment_lines;
    std::size_t degraded = 0;
    for (const auto& j : judgments) {
        degraded += j.degraded ? 1 : 0;
        nlohmann::json row = {{"query_id", j.query_id},   {"chunk_id", j.chunk_id},
                              {"gain", j.gain},           {"reason", j.reason},
                              {"judge_model", j.judge_model}, {"degraded", j.degraded}};
        judgment_lines += row.dump() + "\n";
    }
    write_file_atomic(dir / "judgments.jsonl", judgment_lines);

    std::string gain_lines;
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < views.size(); ++i) {
        nlohmann::json ids = nlohmann::json::array();
        nlohmann::json gains = nlohmann::json::array();
        for (const auto& hit : hits_per_query[i]) {
            ids.push_back(hit.chunk_id);
            gains.push_back(judgments[cursor++].gain);
        }
        nlohmann::json row = {{"query_id", views[i].id}, {"chunk_ids", ids}, {"gains", gains}};
        gain_lines += row.dump() + "\n";
    }
    write_file_atomic(dir / "gains.jsonl", gain_lines);

    const auto stats = index.stats();
    nlohmann::json eff = {
        {"chunk_time_s", chunk_time_s},
        {"peak_ram_mb", peak_ram_mb},
        {"chunk_count", chunks.size()},
        {"index_bytes", stats.size_bytes},
        {"latency_samples_ms", latency_samples},
        {"latency_p50_ms", latency_samples.empty() ? 0.0 : percentile(latency_samples, 50)},
        {"latency_p95_ms", latency_samples.empty() ? 0.0 : percentile(latency_samples, 95)},
        {"degraded_judgments", degraded},
        {"used_late_fallback", used_late_fallback},
    };
    write_file_atomic(dir / "efficiency.json", eff.dump(2) + "\n");
}

}  // namespace

RunSummary run_benchmark(const RunConfig& config) {
    if (config.k < 1 || config.k > 5) throw ConfigError("k must lie in [1,5]");
    if (config.models.empty()) throw ConfigError("at least one embedding model is required");
    if (config.out_dir.empty()) throw ConfigError("output directory is required");

    const auto registry = config.registry_overrides.empty()
                              ? build_registry()
                              : build_registry(config.registry_overrides);
    const auto strategy_names = resolve_strategies(registry, config.strategies);

    const LoadOptions load_opts{config.ultradomain_adapter};
    const auto docs = load_documents(config.docs_file, load_opts);
    const auto queries = load_queries(config.queries_file, load_opts);
    validate_query_domains(queries, docs);

    auto domains = list_domains(docs);
    std::sort(domains.begin(), domains.end());

    std::map<std::string, std::vector<Document>> docs_by_domain;
    for (const auto& d : docs) docs_by_domain[d.domain].push_back(d);
    std::map<std::string, std::vector<Query>> queries_by_domain;
    for (const auto& q : queries) queries_by_domain[q.domain].push_back(q);

    ensure_dir(config.out_dir);
    const fs::path caches = config.out_dir / "caches";

    std::shared_ptr<ChatProvider> boundary_chat;
    const bool needs_chat = std::any_of(
        strategy_names.begin(), strategy_names.end(), [&](const std::string& n) {
            return find_strategy(registry, n).family == Family::llm;
        });
    if (needs_chat)
        boundary_chat = config.chat_kind == "http"
                            ? std::shared_ptr<ChatProvider>(HttpChat::from_env())
                            : std::make_shared<MockBoundaryChat>();
    BoundaryCache boundary_cache(
        caches / ("boundaries-" +
                  sanitize_component(boundary_chat ? boundary_chat->model_id() : "none") +
                  ".jsonl"));

    std::shared_ptr<Judge> judge_core;
    if (config.judge_kind == "http")
        judge_core = std::make_shared<LlmJudge>(std::shared_ptr<ChatProvider>(HttpChat::from_env()));
    else
        judge_core = std::make_shared<MockJudge>();
    CachingJudge judge(judge_core,
                       caches / ("judgments-" + sanitize_component(judge_core->model_id()) +
                                 ".jsonl"));

    nlohmann::json manifest_models = nlohmann::json::array();
    std::vector<std::shared_ptr<EmbeddingProvider>> embedders;
    for (const auto& spec : config.models) {
        std::shared_ptr<EmbeddingProvider> inner;
        if (spec.kind == "mock")
            inner = std::make_shared<MockEmbedder>(spec.dim);
        else if (spec.kind == "http")
            inner = std::shared_ptr<EmbeddingProvider>(HttpEmbedder::from_env(spec.name));
        else
            throw ConfigError("unknown embedder kind: " + spec.kind);
        embedders.push_back(std::make_shared<CachingEmbedder>(inner, caches / "vectors"));
        manifest_models.push_back(
            {{"kind", spec.kind}, {"name", inner->model_id()}, {"dim", spec.dim}});
    }

    nlohmann::json manifest = {
        {"models", manifest_models},
        {"domains", domains},
        {"strategies", strategy_names},
        {"judge", config.judge_kind},
        {"chat", config.chat_kind},
        {"k", config.k},
        {"ultradomain_adapter", config.ultradomain_adapter},
        {"measure_timing", config.measure_timing},
    };
    write_file_atomic(config.out_dir / "run_config.json", manifest.dump(2) + "\n");

    RunSummary summary;
    for (std::size_t mi = 0; mi < embedders.size(); ++mi) {
        const std::string model_id = embedders[mi]->model_id();
        for (const auto& domain : domains) {
            for (const auto& name : strategy_names) {
                const auto& strategy = find_strategy(registry, name);
                const fs::path dir = cell_dir(config.out_dir, model_id, domain, name);
                CellOutcome outcome{model_id, domain, name, "", ""};

                std::error_code ec;
                if (fs::exists(dir / "cell.json", ec)) {
                    const auto marker = read_json_file(dir / "cell.json");
                    if (marker.value("status", "") == "ok") {
                        outcome.status = "skipped";
                        ++summary.skipped;
                        summary.cells.push_back(std::move(outcome));
                        continue;
                    }
                }

                CellRuntime rt{config,
                               strategy,
                               docs_by_domain[domain],
                               queries_by_domain[domain],
                               ChunkerServices{embedders[mi], boundary_chat, &boundary_cache},
                               judge};
                try {
                    execute_cell(rt, dir);
                    nlohmann::json marker = {{"model", model_id},
                                             {"domain", domain},
                                             {"strategy", name},
                                             {"status", "ok"}};
                    write_file_atomic(dir / "cell.json", marker.dump(2) + "\n");
                    outcome.status = "ok";
                    ++summary.completed;
                } catch (const std::exception& e) {
                    spdlog::warn("cell {}/{}/{} failed: {}", model_id, domain, name, e.what());
                    ensure_dir(dir);
                    nlohmann::json marker = {{"model", model_id},
                                             {"domain", domain},
                                             {"strategy", name},
                                             {"status", "failed"},
                                             {"error", e.what()}};
                    write_file_atomic(dir / "cell.json", marker.dump(2) + "\n");
                    outcome.status = "failed";
                    outcome.error = e.what();
                    ++summary.failed;
                }
                summary.cells.push_back(std::move(outcome));
            }
        }
    }
    return summary;
}

namespace {

struct CellData {
    std::vector<GainList> gains;
    EfficiencyStats efficiency;
    std::size_t degraded = 0;
};

CellData load_cell(const fs::path& dir, const IndexKey& key) {
    CellData cell;
    for (const auto& line : read_lines(dir / "gains.jsonl")) {
        if (line.empty()) continue;
        const nlohmann::json row = nlohmann::json::parse(line);
        GainList gl;
        gl.query_id = row.at("query_id").get<std::string>();
        gl.config = key;
        for (const auto& g : row.at("gains")) gl.gains.push_back(g.get<int>());
        cell.gains.push_back(std::move(gl));
    }
    const auto eff = read_json_file(dir / "efficiency.json");
    cell.efficiency.chunk_time_s = eff.at("chunk_time_s").get<double>();
    cell.efficiency.peak_ram_mb = eff.at("peak_ram_mb").get<double>();
    cell.efficiency.chunk_count = eff.at("chunk_count").get<std::size_t>();
    cell.efficiency.index_bytes = eff.at("index_bytes").get<std::size_t>();
    cell.efficiency.latency_p50_ms = eff.at("latency_p50_ms").get<double>();
    cell.efficiency.latency_p95_ms = eff.at("latency_p95_ms").get<double>();
    cell.degraded = eff.at("degraded_judgments").get<std::size_t>();
    return cell;
}

constexpr const char* kResultsHeader =
    "model,domain,strategy,n_queries,ndcg_mean,ndcg_ci_low,ndcg_ci_high,hit_rate,mrr_mean,"
    "p_at_1,p_strict_at_5,zero_hit_fraction,chunk_time_s,peak_ram_mb,chunk_count,index_bytes,"
    "latency_p50_ms,latency_p95_ms,degraded_judgments";

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::string results_row(const MetricsRecord& r) {
    std::ostringstream os;
    os << csv_escape(r.config.model_id) << ',' << csv_escape(r.config.domain) << ','
       << csv_escape(r.config.strategy_id) << ',' << r.n_queries << ','
       << format_real(r.ndcg_mean) << ',' << format_real(r.ndcg_ci_low) << ','
       << format_real(r.ndcg_ci_high) << ',' << format_real(r.hit_rate) << ','
       << format_real(r.mrr_mean) << ',' << format_real(r.p_at_1) << ','
       << format_real(r.p_strict_at_5) << ',' << format_real(r.zero_hit_fraction) << ','
       << format_real(r.efficiency.chunk_time_s) << ',' << format_real(r.efficiency.peak_ram_mb)
       << ',' << r.efficiency.chunk_count << ',' << r.efficiency.index_bytes << ','
       << format_real(r.efficiency.latency_p50_ms) << ','
       << format_real(r.efficiency.latency_p95_ms) << ',' << r.degraded_judgments;
    return os.str();
}

}  // namespace

std::vector<MetricsRecord> evaluate_run(const fs::path& run_dir) {
    const auto manifest = read_json_file(run_dir / "run_config.json");
    std::vector<std::string> models;
    for (const auto& m : manifest.at("models")) models.push_back(m.at("name").get<std::string>());
    const auto domains = manifest.at("domains").get<std::vector<std::string>>();
    const auto strategies = manifest.at("strategies").get<std::vector<std::string>>();

    std::map<std::tuple<std::string, std::string, std::string>, CellData> cells;
    std::vector<nlohmann::json> failed_cells;
    for (const auto& m : models)
        for (const auto& d : domains)
            for (const auto& s : strategies) {
                const fs::path dir = cell_dir(run_dir, m, d, s);
                std::error_code ec;
                if (!fs::exists(dir / "cell.json", ec)) {
                    failed_cells.push_back(
                        {{"model", m}, {"domain", d}, {"strategy", s}, {"error", "missing cell"}});
                    continue;
                }
                const auto marker = read_json_file(dir / "cell.json");
                if (marker.value("status", "") != "ok") {
                    failed_cells.push_back({{"model", m},
                                            {"domain", d},
                                            {"strategy", s},
                                            {"error", marker.value("error", "failed")}});
                    continue;
                }
                cells.emplace(std::make_tuple(m, d, s), load_cell(dir, IndexKey{m, d, s}));
            }

    // pooled ideal per (query, model, domain) over every strategy that ran
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<std::vector<int>>>
        pools;
    for (const auto& [key, cell] : cells) {
        const auto& [m, d, s] = key;
        for (const auto& gl : cell.gains)
            pools[std::make_tuple(m, d, gl.query_id)].push_back(gl.gains);
    }
    std::map<std::tuple<std::string, std::string, std::string>, double> idcg;
    for (const auto& [key, pool] : pools) idcg[key] = pooled_idcg_at_5(pool);

    std::vector<MetricsRecord> records;
    for (const auto& m : models)
        for (const auto& d : domains) {
            std::size_t present = 0;
            for (const auto& s : strategies)
                if (cells.count(std::make_tuple(m, d, s))) ++present;
            if (present > 0 && present < strategies.size())
                spdlog::warn("pool for ({}, {}) covers {}/{} strategies", m, d, present,
                             strategies.size());
            for (const auto& s : strategies) {
                const auto it = cells.find(std::make_tuple(m, d, s));
                if (it == cells.end()) continue;
                const CellData& cell = it->second;
                const IndexKey key{m, d, s};
                MetricsRecord rec;
                if (cell.gains.empty()) {
                    rec.config = key;  // domain without queries
                } else {
                    std::vector<double> idcgs;
                    idcgs.reserve(cell.gains.size());
                    for (const auto& gl : cell.gains)
                        idcgs.push_back(idcg.at(std::make_tuple(m, d, gl.query_id)));
                    rec = aggregate(key, cell.gains, idcgs);
                }
                rec.efficiency = cell.efficiency;
                rec.degraded_judgments = cell.degraded;
                records.push_back(std::move(rec));
            }
        }

    std::string csv = std::string(kResultsHeader) + "\n";
    for (const auto& r : records) csv += results_row(r) + "\n";
    write_file_atomic(run_dir / "results.csv", csv);

    nlohmann::json best = nlohmann::json::array();
    for (const auto& m : models)
        for (const auto& d : domains) {
            const MetricsRecord* top = nullptr;
            for (const auto& r : records)
                if (r.config.model_id == m && r.config.domain == d &&
                    (!top || r.ndcg_mean > top->ndcg_mean))
                    top = &r;
            if (top)
                best.push_back({{"model", m},
                                {"domain", d},
                                {"strategy", top->config.strategy_id},
                                {"ndcg_mean", top->ndcg_mean}});
        }
    nlohmann::json summary = {
        {"rows", records.size()},
        {"models", models},
        {"domains", domains},
        {"strategies", strategies},
        {"failed_cells", failed_cells},
        {"best_by_ndcg", best},
    };
    write_file_atomic(run_dir / "summary.json", summary.dump(2) + "\n");
    return records;
}

namespace {

std::vector<std::string> parse_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

const std::vector<std::string> kNumericColumns = {
    "ndcg_mean",     "hit_rate",    "mrr_mean",       "p_at_1",
    "p_strict_at_5", "zero_hit_fraction", "chunk_time_s", "peak_ram_mb",
    "chunk_count",   "index_bytes", "latency_p50_ms", "latency_p95_ms",
};

struct ResultsTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw Error("results.csv lacks column " + name);
        return static_cast<std::size_t>(it - header.begin());
    }
};

ResultsTable read_results(const fs::path& run_dir) {
    const auto lines = read_lines(run_dir / "results.csv");
    if (lines.empty()) throw Error("results.csv is empty; run evaluate first");
    ResultsTable t;
    t.header = parse_csv_line(lines[0]);
    for (std::size_t i = 1; i < lines.size(); ++i)
        if (!lines[i].empty()) t.rows.push_back(parse_csv_line(lines[i]));
    if (t.rows.empty()) throw Error("results.csv holds no data rows");
    return t;
}

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// mean effectiveness and cost per strategy across all (model, domain) rows
std::vector<ParetoPoint> strategy_points(const ResultsTable& t, const std::string& cost_col) {
    const auto si = t.column("strategy");
    const auto ei = t.column("ndcg_mean");
    const auto ci = t.column(cost_col);
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> acc;
    for (const auto& row : t.rows) {
        acc[row[si]].first.push_back(std::stod(row[ei]));
        acc[row[si]].second.push_back(std::stod(row[ci]));
    }
    std::vector<ParetoPoint> points;
    for (const auto& [name, series] : acc) {
        const auto mean = [](const std::vector<double>& v) {
            double s = 0;
            for (double x : v) s += x;
            return s / static_cast<double>(v.size());
        };
        points.push_back({name, mean(series.first), mean(series.second)});
    }
    return points;
}

nlohmann::json pareto_json(const std::vector<ParetoPoint>& points) {
    auto frontier = pareto_frontier(points);
    nlohmann::json out = nlohmann::json::array();
    for (const auto& label : frontier) {
        const auto it = std::find_if(points.begin(), points.end(),
                                     [&](const ParetoPoint& p) { return p.label == label; });
        out.push_back({{"strategy", label},
                       {"ndcg_mean", it->effectiveness},
                       {"cost", it->cost}});
    }
    return out;
}

nlohmann::json correlation_json(const ResultsTable& t) {
    std::vector<std::vector<double>> columns;
    for (const auto& name : kNumericColumns) {
        const auto idx = t.column(name);
        std::vector<double> col;
        col.reserve(t.rows.size());
        for (const auto& row : t.rows) col.push_back(std::stod(row[idx]));
        columns.push_back(std::move(col));
    }
    nlohmann::json matrix = nlohmann::json::array();
    for (std::size_t i = 0; i < columns.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < columns.size(); ++j) {
            try {
                row.push_back(pearson(columns[i], columns[j]));
            } catch (const Error&) {
                row.push_back(nullptr);  // constant or too-short column
            }
        }
        matrix.push_back(std::move(row));
    }
    return {{"columns", kNumericColumns}, {"matrix", matrix}};
}

std::string svg_panel(const std::string& title, const std::vector<ParetoPoint>& points,
                      const std::vector<std::string>& frontier, double y_offset) {
    constexpr double kW = 760, kH = 460, kM = 70;
    double cmin = points[0].cost, cmax = points[0].cost, emin = points[0].effectiveness,
           emax = points[0].effectiveness;
    for (const auto& p : points) {
        cmin = std::min(cmin, p.cost);
        cmax = std::max(cmax, p.cost);
        emin = std::min(emin, p.effectiveness);
        emax = std::max(emax, p.effectiveness);
    }
    if (cmax == cmin) cmax = cmin + 1;
    if (emax == emin) emax = emin + 1;
    const auto sx = [&](double c) { return kM + (c - cmin) / (cmax - cmin) * (kW - 2 * kM); };
    const auto sy = [&](double e) {
        return y_offset + kH - kM - (e - emin) / (emax - emin) * (kH - 2 * kM);
    };
    std::ostringstream os;
    os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<text x=\"" << kM << "\" y=\"" << y_offset + 24 << "\" font-size=\"14\">" << title
       << "</text>\n";
    os << "<line x1=\"" << kM << "\" y1=\"" << y_offset + kH - kM << "\" x2=\"" << kW - kM
       << "\" y2=\"" << y_offset + kH - kM << "\" stroke=\"#444\"/>\n";
    os << "<line x1=\"" << kM << "\" y1=\"" << y_offset + kM << "\" x2=\"" << kM << "\" y2=\""
       << y_offset + kH - kM << "\" stroke=\"#444\"/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double c = cmin + (cmax - cmin) * tick / 4.0;
        const double e = emin + (emax - emin) * tick / 4.0;
        os << "<text x=\"" << sx(c) << "\" y=\"" << y_offset + kH - kM + 16
           << "\" text-anchor=\"middle\">" << fmt_g(c) << "</text>\n";
        os << "<text x=\"" << kM - 8 << "\" y=\"" << sy(e) + 4 << "\" text-anchor=\"end\">"
           << fmt_g(e) << "</text>\n";
    }
    std::set<std::string> on_frontier(frontier.begin(), frontier.end());
    std::vector<const ParetoPoint*> line;
    for (const auto& label : frontier) {
        const auto it = std::find_if(points.begin(), points.end(),
                                     [&](const ParetoPoint& p) { return p.label == label; });
        line.push_back(&*it);
    }
    if (line.size() > 1) {
        os << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" points=\"";
        for (const auto* p : line) os << sx(p->cost) << "," << sy(p->effectiveness) << " ";
        os << "\"/>\n";
    }
    for (const auto& p : points) {
        const bool hot = on_frontier.count(p.label) > 0;
        os << "<circle cx=\"" << sx(p.cost) << "\" cy=\"" << sy(p.effectiveness)
           << "\" r=\"4\" fill=\"" << (hot ? "#c0392b" : "#2a6fb0") << "\"/>\n";
        os << "<text x=\"" << sx(p.cost) + 6 << "\" y=\"" << sy(p.effectiveness) - 6 << "\">"
           << p.label << "</text>\n";
    }
    os << "</g>\n";
    return os.str();
}

}  // namespace

void write_reports(const fs::path& run_dir, const std::string& format) {
    const auto table = read_results(run_dir);
    const auto by_index = strategy_points(table, "index_bytes");
    const auto by_latency = strategy_points(table, "latency_p95_ms");

    if (format == "csv") {
        const auto corr = correlation_json(table);
        std::string out = "metric";
        for (const auto& name : kNumericColumns) out += "," + name;
        out += "\n";
        const auto& matrix = corr.at("matrix");
        for (std::size_t i = 0; i < kNumericColumns.size(); ++i) {
            out += kNumericColumns[i];
            for (const auto& cell : matrix[i])
                out += "," + (cell.is_null() ? std::string("nan") : format_real(cell.get<double>()));
            out += "\n";
        }
        write_file_atomic(run_dir / "correlations.csv", out);

        std::string pareto = "cost_metric,strategy,ndcg_mean,cost\n";
        for (const auto& [metric, points] :
             {std::pair{std::string("index_bytes"), &by_index},
              std::pair{std::string("latency_p95_ms"), &by_latency}}) {
            for (const auto& row : pareto_json(*points))
                pareto += metric + "," + csv_escape(row.at("strategy").get<std::string>()) + "," +
                          format_real(row.at("ndcg_mean").get<double>()) + "," +
                          format_real(row.at("cost").get<double>()) + "\n";
        }
        write_file_atomic(run_dir / "pareto.csv", pareto);
        return;
    }
    if (format == "json") {
        nlohmann::json report = {
            {"correlations", correlation_json(table)},
            {"pareto",
             {{"index_bytes", pareto_json(by_index)},
              {"latency_p95_ms", pareto_json(by_latency)}}},
        };
        write_file_atomic(run_dir / "report.json", report.dump(2) + "\n");
        return;
    }
    if (format == "svg") {
        std::string svg =
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 760 920\" width=\"760\" "
            "height=\"920\">\n<rect width=\"760\" height=\"920\" fill=\"white\"/>\n";
        svg += svg_panel("mean nDCG@5 vs index bytes", by_index, pareto_frontier(by_index), 0);
        svg += svg_panel("mean nDCG@5 vs p95 latency (ms)", by_latency,
                         pareto_frontier(by_latency), 460);
        svg += "</svg>\n";
        write_file_atomic(run_dir / "scatter.svg", svg);
        return;
    }
    throw ConfigError("unknown report format: " + format);
}

}  // namespace chunkbench
