#include <cstdio>
#include <exception>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "chunkbench/bench.hpp"
#include "chunkbench/chunkers.hpp"
#include "chunkbench/corpus.hpp"
#include "chunkbench/errors.hpp"
#include "chunkbench/util.hpp"

namespace {

using namespace chunkbench;

std::vector<ModelSpec> build_models(const std::string& embedder_kind,
                                    const std::string& embed_models,
                                    const std::string& mock_dims) {
    std::vector<ModelSpec> models;
    if (embedder_kind == "mock") {
        for (const auto& d : split_list(mock_dims)) {
            ModelSpec spec;
            spec.kind = "mock";
            spec.dim = static_cast<std::size_t>(std::stoul(d));
            spec.name = "mock-" + std::to_string(spec.dim);
            models.push_back(spec);
        }
    } else {
        for (const auto& name : split_list(embed_models))
            models.push_back({"http", name, 0});
        if (models.empty())
            throw ConfigError("--embed-models is required with --embedder http");
    }
    if (models.empty()) throw ConfigError("no embedding models configured");
    return models;
}

int run_command(const RunConfig& config) {
    const RunSummary summary = run_benchmark(config);
    std::printf("phase 1: %d completed, %d skipped, %d failed\n", summary.completed,
                summary.skipped, summary.failed);
    for (const auto& cell : summary.cells)
        if (cell.status == "failed")
            std::printf("  failed %s/%s/%s: %s\n", cell.model.c_str(), cell.domain.c_str(),
                        cell.strategy.c_str(), cell.error.c_str());
    const auto records = evaluate_run(config.out_dir);
    std::printf("phase 2: wrote %s with %zu rows\n",
                (config.out_dir / "results.csv").string().c_str(), records.size());
    return summary.failed == 0 ? 0 : 2;
}

int chunk_command(const std::string& strategy_name, const std::string& docs_file,
                  bool ultradomain, const std::string& out_file) {
    const auto registry = build_registry();
    const auto& strategy = find_strategy(registry, strategy_name);
    const auto docs = load_documents(docs_file, LoadOptions{ultradomain});

    ChunkerServices services;
    services.embedder = std::make_shared<MockEmbedder>(64);
    services.chat = std::make_shared<MockBoundaryChat>();

    std::string out;
    for (const auto& doc : docs) {
        const ChunkResult result = run_strategy(strategy, doc, services);
        for (const auto& c : result.chunks) out += serialize_chunk(c) + "\n";
    }
    if (out_file.empty()) {
        std::fputs(out.c_str(), stdout);
    } else {
        write_file_atomic(out_file, out);
        std::printf("wrote %s\n", out_file.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chunking strategy benchmark for dense retrieval"};
    app.set_config("--config", "", "file mirroring the flags; flags win on conflict");
    app.require_subcommand(1);

    std::string docs_file;
    std::string queries_file;
    std::string out_dir;
    std::string strategies;
    std::string embedder_kind = "mock";
    std::string embed_models;
    std::string mock_dims = "64";
    std::string judge_kind = "mock";
    std::string chat_kind = "mock";
    std::string registry_overrides;
    bool ultradomain = false;
    bool no_timing = false;
    int workers = 1;
    int k = 5;
    int warmups = 3;

    auto* run = app.add_subcommand("run", "chunk, embed, retrieve, judge, and score");
    run->add_option("--docs", docs_file, "documents jsonl")->required();
    run->add_option("--queries", queries_file, "queries jsonl")->required();
    run->add_option("--out", out_dir, "run directory")->required();
    run->add_option("--strategies", strategies, "comma-separated names (default: all)");
    run->add_option("--embedder", embedder_kind, "embedding provider")
        ->check(CLI::IsMember({"mock", "http"}));
    run->add_option("--embed-models", embed_models, "remote model names, comma-separated");
    run->add_option("--mock-dims", mock_dims, "mock embedder dimensions, comma-separated");
    run->add_option("--judge", judge_kind, "relevance judge")
        ->check(CLI::IsMember({"mock", "http"}));
    run->add_option("--chat", chat_kind, "boundary scorer for llm strategies")
        ->check(CLI::IsMember({"mock", "http"}));
    run->add_option("--workers", workers, "judge concurrency")->check(CLI::PositiveNumber);
    run->add_option("--k", k, "retrieval depth")->check(CLI::Range(1, 5));
    run->add_option("--warmups", warmups, "latency warm-up queries")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--registry-overrides", registry_overrides, "strategy parameter overrides");
    run->add_flag("--ultradomain-adapter", ultradomain, "map context/input/answers fields");
    run->add_flag("--no-timing", no_timing, "zero timing columns for reproducible output");

    std::string chunk_strategy;
    std::string chunk_out;
    auto* chunk = app.add_subcommand("chunk", "dump one strategy's chunks as jsonl");
    chunk->add_option("--strategy", chunk_strategy, "strategy name")->required();
    chunk->add_option("--docs", docs_file, "documents jsonl")->required();
    chunk->add_option("--out", chunk_out, "output file (default: stdout)");
    chunk->add_flag("--ultradomain-adapter", ultradomain, "map context/input/answers fields");

    std::string run_dir;
    auto* evaluate = app.add_subcommand("evaluate", "recompute metrics from run artifacts");
    evaluate->add_option("--run", run_dir, "run directory")->required();

    std::string format = "csv";
    auto* report = app.add_subcommand("report", "derived reports from results.csv");
    report->add_option("--run", run_dir, "run directory")->required();
    report->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json", "svg"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            RunConfig config;
            config.docs_file = docs_file;
            config.queries_file = queries_file;
            config.out_dir = out_dir;
            config.strategies = split_list(strategies);
            config.models = build_models(embedder_kind, embed_models, mock_dims);
            config.judge_kind = judge_kind;
            config.chat_kind = chat_kind;
            config.ultradomain_adapter = ultradomain;
            config.measure_timing = !no_timing;
            config.k = k;
            config.judge_workers = workers;
            config.warmup_queries = warmups;
            config.registry_overrides = registry_overrides;
            return run_command(config);
        }
        if (chunk->parsed())
            return chunk_command(chunk_strategy, docs_file, ultradomain, chunk_out);
        if (evaluate->parsed()) {
            const auto records = evaluate_run(run_dir);
            std::printf("wrote %s with %zu rows\n",
                        (std::filesystem::path(run_dir) / "results.csv").string().c_str(),
                        records.size());
            return 0;
        }
        if (report->parsed()) {
            write_reports(run_dir, format);
            std::printf("wrote %s report into %s\n", format.c_str(), run_dir.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
