#pragma once

#include <string>
#include <vector>

#include "chunkbench/vectorstore.hpp"

namespace chunkbench {

// rank-ordered gains for one query under one configuration; length <= 5
struct GainList {
    std::string query_id;
    IndexKey config;
    std::vector<int> gains;
};

struct EfficiencyStats {
    double chunk_time_s = 0;
    double peak_ram_mb = 0;
    std::size_t chunk_count = 0;
    std::size_t index_bytes = 0;
    double latency_p50_ms = 0;
    double latency_p95_ms = 0;
};

// one results row: effectiveness aggregates plus efficiency for a config
struct MetricsRecord {
    IndexKey config;
    int n_queries = 0;
    double ndcg_mean = 0;
    double ndcg_ci_low = 0;
    double ndcg_ci_high = 0;
    double hit_rate = 0;
    double mrr_mean = 0;
    double p_at_1 = 0;
    double p_strict_at_5 = 0;
    double zero_hit_fraction = 0;
    EfficiencyStats efficiency;
    std::size_t degraded_judgments = 0;
};

// sum of g_i / log2(i+1) over the ranks present; gains each in {0,1,2}
double dcg_at_5(const std::vector<int>& gains);

// ideal DCG from the union of one query's gains across strategies under a
// fixed (model, domain): pooled gains sorted descending, top 5, discounted
double pooled_idcg_at_5(const std::vector<std::vector<int>>& pooled_gains);

double ndcg_at_5(const std::vector<int>& gains, double idcg);  // 0 when idcg == 0

int hit_at_5(const std::vector<int>& gains);        // 1 iff some gain == 2
double mrr_at_5(const std::vector<int>& gains);     // 1/rank of first gain == 2, else 0
int precision_at_1(const std::vector<int>& gains);  // 1 iff first gain == 2
double precision_strict_at_5(const std::vector<int>& gains);  // count(gain==2)/5, fixed denominator

struct AggregateStats {
    std::size_t n = 0;
    double mean = 0;
    double median = 0;
    double variance = 0;  // sample variance, n-1 denominator; 0 when n == 1
    double ci_low = 0;    // mean - 1.96 s/sqrt(n), unclamped
    double ci_high = 0;
};

AggregateStats aggregate_values(const std::vector<double>& values);  // Error on empty

// full per-config aggregation; idcg_per_query aligns with per_query_gains.
// Queries are re-ordered by query_id internally so sums are bit-stable
// regardless of arrival order. The ndcg confidence interval is clamped to
// [0,1]. Efficiency fields are left for the caller.
MetricsRecord aggregate(const IndexKey& config, const std::vector<GainList>& per_query_gains,
                        const std::vector<double>& idcg_per_query);

double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

// nearest-rank percentile: value at index ceil(p*n/100) of the ascending sort
double percentile(const std::vector<double>& samples, double p);

struct ParetoPoint {
    std::string label;
    double effectiveness = 0;
    double cost = 0;
};

// labels of all non-dominated points (another point dominates with
// effectiveness >= and cost <=, at least one strict), sorted by cost
// ascending then label
std::vector<std::string> pareto_frontier(const std::vector<ParetoPoint>& points);

}  // namespace chunkbench
