#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "chunkbench/metrics.hpp"

namespace chunkbench {

struct ModelSpec {
    std::string kind = "mock";  // mock | http
    std::string name = "mock-64";
    std::size_t dim = 64;  // mock embedders only
};

struct RunConfig {
    std::filesystem::path docs_file;
    std::filesystem::path queries_file;
    std::filesystem::path out_dir;
    std::vector<std::string> strategies;  // empty selects the whole registry
    std::vector<ModelSpec> models = {ModelSpec{}};
    std::string judge_kind = "mock";  // mock | http
    std::string chat_kind = "mock";   // boundary scorer for llm-family strategies
    bool ultradomain_adapter = false;
    bool measure_timing = true;  // false zeroes timing columns for reproducible output
    int k = 5;
    int judge_workers = 1;
    int warmup_queries = 3;
    std::filesystem::path registry_overrides;  // optional parameter override file
};

struct CellOutcome {
    std::string model;
    std::string domain;
    std::string strategy;
    std::string status;  // ok | skipped | failed
    std::string error;
};

struct RunSummary {
    int completed = 0;
    int skipped = 0;
    int failed = 0;
    std::vector<CellOutcome> cells;
};

// phase 1: for every (model, domain, strategy) cell, chunk (profiled), embed
// (cached), index, retrieve top-k, judge hits (cached), and persist the cell
// directory. Cells already marked ok are skipped, failed cells are retried,
// and a provider outage fails the cell but not the run.
RunSummary run_benchmark(const RunConfig& config);

// phase 2: pool gains per (query, model, domain) across strategies, compute
// pooled-ideal nDCG and companion metrics per cell, and write results.csv
// plus summary.json into the run directory. Returns records in row order.
std::vector<MetricsRecord> evaluate_run(const std::filesystem::path& run_dir);

// derived reports from results.csv: "csv" writes correlations.csv and
// pareto.csv, "json" writes report.json, "svg" writes scatter.svg
void write_reports(const std::filesystem::path& run_dir, const std::string& format);

}  // namespace chunkbench
