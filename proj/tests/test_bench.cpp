#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "json.hpp"

#include "chunkbench/bench.hpp"
#include "chunkbench/corpus.hpp"
#include "chunkbench/errors.hpp"

using namespace chunkbench;

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() / (tag + "-" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

std::string read_whole_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
    std::ofstream out(p, std::ios::binary);
    for (const auto& l : lines) out << l << "\n";
}

// globally unique words keep the mock judge's coverage arithmetic exact: a
// sentence covers 8 of its paragraph's 24 distinct answer tokens (gain 1),
// the whole paragraph covers all 24 (gain 2)
struct CorpusBuilder {
    std::mt19937 rng{7};
    int counter = 0;

    std::string word() {
        std::uniform_int_distribution<int> ch(0, 25);
        std::string w;
        for (int i = 0; i < 5; ++i) w += static_cast<char>('a' + ch(rng));
        return w + std::to_string(counter++);
    }

    std::string sentence() {
        std::string s;
        for (int i = 0; i < 8; ++i) {
            if (i) s += ' ';
            s += word();
        }
        s[0] = static_cast<char>(s[0] - 'a' + 'A');
        return s + ".";
    }

    std::string paragraph() {
        std::string p = sentence();
        for (int i = 1; i < 3; ++i) p += " " + sentence();
        return p;
    }
};

struct ToyCorpus {
    std::filesystem::path docs_file;
    std::filesystem::path queries_file;
};

// one 3-paragraph document per domain; the two queries per domain each target
// one paragraph, asking with that paragraph's first sentence verbatim
ToyCorpus make_corpus(const std::filesystem::path& dir, const std::string& poisoned_answer = "") {
    std::filesystem::create_directories(dir);
    CorpusBuilder builder;
    std::vector<std::string> doc_lines;
    std::vector<std::string> query_lines;
    for (const std::string domain : {"law", "tech"}) {
        std::vector<std::string> paragraphs = {builder.paragraph(), builder.paragraph(),
                                               builder.paragraph()};
        Document doc{domain + "-doc", domain,
                     paragraphs[0] + "\n\n" + paragraphs[1] + "\n\n" + paragraphs[2]};
        doc_lines.push_back(serialize_document(doc));

        for (int i = 0; i < 2; ++i) {
            const std::string& answer = paragraphs[1 + i];
            const std::string first_sentence = answer.substr(0, answer.find('.') + 1);
            Query q{domain + "-q" + std::to_string(i), domain, first_sentence,
                    poisoned_answer.empty() ? answer : poisoned_answer};
            query_lines.push_back(serialize_query(q));
        }
    }
    ToyCorpus corpus{dir / "docs.jsonl", dir / "queries.jsonl"};
    write_lines(corpus.docs_file, doc_lines);
    write_lines(corpus.queries_file, query_lines);
    return corpus;
}

const std::vector<std::string> kStrategies = {"FC", "SBC", "PBC", "LCSI"};

RunConfig base_config(const ToyCorpus& corpus, const std::filesystem::path& out) {
    RunConfig config;
    config.docs_file = corpus.docs_file;
    config.queries_file = corpus.queries_file;
    config.out_dir = out;
    config.strategies = kStrategies;
    config.measure_timing = false;
    return config;
}

std::map<std::string, std::vector<std::string>> gains_chunk_ids(
    const std::filesystem::path& cell_dir) {
    std::map<std::string, std::vector<std::string>> out;
    std::ifstream in(cell_dir / "gains.jsonl");
    REQUIRE(in.good());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        out[j["query_id"].get<std::string>()] =
            j["chunk_ids"].get<std::vector<std::string>>();
    }
    return out;
}

}  // namespace

TEST_CASE("run_benchmark writes one artifact directory per cell") {
    TempDir dir("cb_bench_run");
    const auto corpus = make_corpus(dir.path / "corpus");
    const auto out = dir.path / "run";
    const auto config = base_config(corpus, out);

    const auto summary = run_benchmark(config);
    CHECK(summary.completed == 8);
    CHECK(summary.skipped == 0);
    CHECK(summary.failed == 0);
    REQUIRE(summary.cells.size() == 8);
    CHECK(std::filesystem::exists(out / "run_config.json"));

    for (const std::string domain : {"law", "tech"}) {
        for (const auto& strategy : kStrategies) {
            const auto cell = out / "cells" / "mock-64" / domain / strategy;
            CAPTURE(cell.string());
            CHECK(std::filesystem::exists(cell / "cell.json"));
            CHECK(std::filesystem::exists(cell / "chunks.jsonl"));
            CHECK(std::filesystem::exists(cell / "judgments.jsonl"));
            CHECK(std::filesystem::exists(cell / "gains.jsonl"));
            CHECK(std::filesystem::exists(cell / "efficiency.json"));

            const auto status = nlohmann::json::parse(read_whole_file(cell / "cell.json"));
            CHECK(status["status"] == "ok");

            const auto gains = gains_chunk_ids(cell);
            CHECK(gains.size() == 2);
            for (const auto& [query_id, chunk_ids] : gains) {
                CHECK(!chunk_ids.empty());
                CHECK(chunk_ids.size() <= 5);
            }
        }
    }

    // resuming the same run touches nothing
    const auto resumed = run_benchmark(config);
    CHECK(resumed.completed == 0);
    CHECK(resumed.skipped == 8);
    CHECK(resumed.failed == 0);

    // evaluation emits rows in model x domain x strategy order
    const auto records = evaluate_run(out);
    REQUIRE(records.size() == 8);
    const std::vector<std::pair<std::string, std::string>> expected = {
        {"law", "FC"},  {"law", "SBC"},  {"law", "PBC"},  {"law", "LCSI"},
        {"tech", "FC"}, {"tech", "SBC"}, {"tech", "PBC"}, {"tech", "LCSI"}};
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].config.model_id == "mock-64");
        CHECK(records[i].config.domain == expected[i].first);
        CHECK(records[i].config.strategy_id == expected[i].second);
        CHECK(records[i].n_queries == 2);
        CHECK(records[i].ndcg_mean >= 0.0);
        CHECK(records[i].ndcg_mean <= 1.0);
        CHECK(records[i].efficiency.chunk_count > 0);
        CHECK(records[i].efficiency.index_bytes > 0);
    }

    // the query repeats a sentence verbatim, so sentence chunking retrieves
    // its twin at rank 1 with partial gain; a single sentence covers a third
    // of the answer paragraph, so no strict metric ever fires
    for (const std::size_t sbc_row : {std::size_t{1}, std::size_t{5}}) {
        CHECK(records[sbc_row].ndcg_mean > 0.0);
        CHECK(records[sbc_row].mrr_mean == doctest::Approx(0.0));
        CHECK(records[sbc_row].hit_rate == doctest::Approx(0.0));
        CHECK(records[sbc_row].p_at_1 == doctest::Approx(0.0));
        CHECK(records[sbc_row].p_strict_at_5 == doctest::Approx(0.0));
        CHECK(records[sbc_row].zero_hit_fraction == doctest::Approx(1.0));
    }
    // paragraph chunking serves the full answer: three chunks all fit in the
    // top five, and the answer paragraph itself scores the full gain
    for (const std::size_t pbc_row : {std::size_t{2}, std::size_t{6}}) {
        CHECK(records[pbc_row].hit_rate == doctest::Approx(1.0));
        CHECK(records[pbc_row].zero_hit_fraction == doctest::Approx(0.0));
        CHECK(records[pbc_row].p_strict_at_5 == doctest::Approx(0.2));
        CHECK(records[pbc_row].mrr_mean >= 1.0 / 3);
        CHECK(records[pbc_row].ndcg_mean > 0.0);
    }

    const std::string results = read_whole_file(out / "results.csv");
    const std::string header = results.substr(0, results.find('\n'));
    CHECK(header ==
          "model,domain,strategy,n_queries,ndcg_mean,ndcg_ci_low,ndcg_ci_high,hit_rate,"
          "mrr_mean,p_at_1,p_strict_at_5,zero_hit_fraction,chunk_time_s,peak_ram_mb,"
          "chunk_count,index_bytes,latency_p50_ms,latency_p95_ms,degraded_judgments");
    CHECK(std::count(results.begin(), results.end(), '\n') == 9);

    const auto run_summary = nlohmann::json::parse(read_whole_file(out / "summary.json"));
    CHECK(run_summary["rows"].get<int>() == 8);
    CHECK(run_summary["failed_cells"].empty());

    // reports render from results.csv in every supported format
    write_reports(out, "csv");
    CHECK(std::filesystem::exists(out / "correlations.csv"));
    CHECK(std::filesystem::exists(out / "pareto.csv"));
    write_reports(out, "json");
    const auto report = nlohmann::json::parse(read_whole_file(out / "report.json"));
    CHECK(report.is_object());
    write_reports(out, "svg");
    CHECK(read_whole_file(out / "scatter.svg").find("<svg") != std::string::npos);
    CHECK_THROWS_AS(write_reports(out, "pdf"), ConfigError);
}

TEST_CASE("identical configurations produce byte-identical results") {
    TempDir dir("cb_bench_det");
    const auto corpus = make_corpus(dir.path / "corpus");

    const auto out1 = dir.path / "run1";
    const auto out2 = dir.path / "run2";
    run_benchmark(base_config(corpus, out1));
    run_benchmark(base_config(corpus, out2));
    evaluate_run(out1);
    evaluate_run(out2);

    CHECK(read_whole_file(out1 / "results.csv") == read_whole_file(out2 / "results.csv"));
}

TEST_CASE("retrieval results never depend on the golden answer") {
    TempDir dir("cb_bench_blind");
    const auto clean = make_corpus(dir.path / "clean");
    const auto poisoned = make_corpus(dir.path / "poisoned", "unrelated answer text");

    const auto out1 = dir.path / "run_clean";
    const auto out2 = dir.path / "run_poisoned";
    run_benchmark(base_config(clean, out1));
    run_benchmark(base_config(poisoned, out2));

    for (const std::string domain : {"law", "tech"}) {
        for (const auto& strategy : kStrategies) {
            const auto rel = std::filesystem::path("cells") / "mock-64" / domain / strategy;
            CHECK(gains_chunk_ids(out1 / rel) == gains_chunk_ids(out2 / rel));
        }
    }
}

TEST_CASE("a failing strategy fails its cells without stopping the run") {
    TempDir dir("cb_bench_fail");
    const auto corpus = make_corpus(dir.path / "corpus");
    const auto out = dir.path / "run";

    const auto overrides = dir.path / "overrides.json";
    {
        std::ofstream f(overrides);
        f << R"({"FC": {"token_size": 0}})";
    }

    auto config = base_config(corpus, out);
    config.strategies = {"FC", "SBC"};
    config.registry_overrides = overrides;

    const auto summary = run_benchmark(config);
    CHECK(summary.completed == 2);
    CHECK(summary.failed == 2);

    int failed_cells = 0;
    for (const auto& cell : summary.cells) {
        if (cell.status != "failed") continue;
        failed_cells += 1;
        CHECK(cell.strategy == "FC");
        CHECK(!cell.error.empty());
    }
    CHECK(failed_cells == 2);

    const auto marker = nlohmann::json::parse(
        read_whole_file(out / "cells" / "mock-64" / "law" / "FC" / "cell.json"));
    CHECK(marker["status"] == "failed");

    // evaluation keeps the healthy cells and lists the failures
    const auto records = evaluate_run(out);
    REQUIRE(records.size() == 2);
    CHECK(records[0].config.strategy_id == "SBC");
    CHECK(records[1].config.strategy_id == "SBC");

    const auto run_summary = nlohmann::json::parse(read_whole_file(out / "summary.json"));
    CHECK(run_summary["failed_cells"].size() == 2);
}

TEST_CASE("run configuration is validated before any work") {
    TempDir dir("cb_bench_cfg");
    const auto corpus = make_corpus(dir.path / "corpus");

    auto config = base_config(corpus, dir.path / "run");
    config.k = 0;
    CHECK_THROWS_AS(run_benchmark(config), ConfigError);
    config.k = 6;
    CHECK_THROWS_AS(run_benchmark(config), ConfigError);

    config = base_config(corpus, dir.path / "run");
    config.models.clear();
    CHECK_THROWS_AS(run_benchmark(config), ConfigError);

    config = base_config(corpus, dir.path / "run");
    config.out_dir.clear();
    CHECK_THROWS_AS(run_benchmark(config), ConfigError);

    config = base_config(corpus, dir.path / "run");
    config.strategies = {"NOPE"};
    CHECK_THROWS_AS(run_benchmark(config), ConfigError);

    CHECK_THROWS(evaluate_run(dir.path / "no_such_run"));
}
