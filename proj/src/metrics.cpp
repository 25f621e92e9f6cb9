#include "chunkbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chunkbench/errors.hpp"

namespace chunkbench {

namespace {

void check_gains(const std::vector<int>& gains) {
    if (gains.size() > 5) throw ContractError("gain list longer than 5");
    for (int g : gains)
        if (g < 0 || g > 2) throw ContractError("gain outside {0,1,2}");
}

double discounted_sum(const std::vector<int>& gains) {
    double s = 0;
    for (std::size_t i = 0; i < gains.size(); ++i)
        s += static_cast<double>(gains[i]) / std::log2(static_cast<double>(i) + 2.0);
    return s;
}

}  // namespace

double dcg_at_5(const std::vector<int>& gains) {
    check_gains(gains);
    return discounted_sum(gains);
}

double pooled_idcg_at_5(const std::vector<std::vector<int>>& pooled_gains) {
    std::vector<int> pool;
    for (const auto& gains : pooled_gains) {
        check_gains(gains);
        pool.insert(pool.end(), gains.begin(), gains.end());
    }
    std::sort(pool.begin(), pool.end(), std::greater<int>());
    if (pool.size() > 5) pool.resize(5);
    return discounted_sum(pool);
}

double ndcg_at_5(const std::vector<int>& gains, double idcg) {
    if (idcg <= 0) return 0.0;
    return dcg_at_5(gains) / idcg;
}

int hit_at_5(const std::vector<int>& gains) {
    check_gains(gains);
    return std::count(gains.begin(), gains.end(), 2) > 0 ? 1 : 0;
}

double mrr_at_5(const std::vector<int>& gains) {
    check_gains(gains);
    for (std::size_t i = 0; i < gains.size(); ++i)
        if (gains[i] == 2) return 1.0 / static_cast<double>(i + 1);
    return 0.0;
}

int precision_at_1(const std::vector<int>& gains) {
    check_gains(gains);
    return !gains.empty() && gains[0] == 2 ? 1 : 0;
}

double precision_strict_at_5(const std::vector<int>& gains) {
    check_gains(gains);
    return static_cast<double>(std::count(gains.begin(), gains.end(), 2)) / 5.0;
}

AggregateStats aggregate_values(const std::vector<double>& values) {
    if (values.empty()) throw Error("cannot aggregate an empty series");
    AggregateStats s;
    s.n = values.size();
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    s.median = s.n % 2 == 1 ? sorted[s.n / 2] : (sorted[s.n / 2 - 1] + sorted[s.n / 2]) / 2.0;

    if (s.n > 1) {
        double acc = 0;
        for (double v : values) acc += (v - s.mean) * (v - s.mean);
        s.variance = acc / static_cast<double>(s.n - 1);
    }
    const double half = 1.96 * std::sqrt(s.variance) / std::sqrt(static_cast<double>(s.n));
    s.ci_low = s.mean - half;
    s.ci_high = s.mean + half;
    return s;
}

MetricsRecord aggregate(const IndexKey& config, const std::vector<GainList>& per_query_gains,
                        const std::vector<double>& idcg_per_query) {
    if (per_query_gains.empty()) throw Error("cannot aggregate zero queries");
    if (per_query_gains.size() != idcg_per_query.size())
        throw ContractError("idcg series does not align with gain lists");

    std::vector<std::size_t> order(per_query_gains.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return per_query_gains[a].query_id < per_query_gains[b].query_id;
    });

    std::vector<double> ndcg;
    std::vector<double> hit;
    std::vector<double> mrr;
    std::vector<double> p1;
    std::vector<double> p5;
    ndcg.reserve(order.size());
    for (std::size_t i : order) {
        const auto& gains = per_query_gains[i].gains;
        ndcg.push_back(ndcg_at_5(gains, idcg_per_query[i]));
        hit.push_back(hit_at_5(gains));
        mrr.push_back(mrr_at_5(gains));
        p1.push_back(precision_at_1(gains));
        p5.push_back(precision_strict_at_5(gains));
    }

    MetricsRecord r;
    r.config = config;
    r.n_queries = static_cast<int>(order.size());
    const auto nd = aggregate_values(ndcg);
    r.ndcg_mean = nd.mean;
    r.ndcg_ci_low = std::max(0.0, nd.ci_low);
    r.ndcg_ci_high = std::min(1.0, nd.ci_high);
    r.hit_rate = aggregate_values(hit).mean;
    r.mrr_mean = aggregate_values(mrr).mean;
    r.p_at_1 = aggregate_values(p1).mean;
    r.p_strict_at_5 = aggregate_values(p5).mean;
    r.zero_hit_fraction = 1.0 - r.hit_rate;
    return r;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw ContractError("series lengths differ");
    if (xs.size() < 2) throw Error("correlation needs at least two points");
    const auto n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0;
    double sxx = 0;
    double syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0 || syy == 0) throw Error("correlation undefined for a constant series");
    return sxy / std::sqrt(sxx * syy);
}

double percentile(const std::vector<double>& samples, double p) {
    if (samples.empty()) throw Error("percentile of an empty sample set");
    if (p <= 0 || p > 100) throw ContractError("percentile p must lie in (0, 100]");
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    // multiply before dividing so grid points like p=95, n=100 stay exact
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size()) / 100.0));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

std::vector<std::string> pareto_frontier(const std::vector<ParetoPoint>& points) {
    if (points.empty()) throw Error("pareto frontier of an empty set");
    std::vector<const ParetoPoint*> kept;
    for (const auto& p : points) {
        bool dominated = false;
        for (const auto& q : points) {
            if (&q == &p) continue;
            const bool no_worse = q.effectiveness >= p.effectiveness && q.cost <= p.cost;
            const bool strictly = q.effectiveness > p.effectiveness || q.cost < p.cost;
            if (no_worse && strictly) {
                dominated = true;
                break;
            }
        }
        if (!dominated) kept.push_back(&p);
    }
    std::sort(kept.begin(), kept.end(), [](const ParetoPoint* a, const ParetoPoint* b) {
        if (a->cost != b->cost) return a->cost < b->cost;
        return a->label < b->label;
    });
    std::vector<std::string> labels;
    labels.reserve(kept.size());
    for (const auto* p : kept) labels.push_back(p->label);
    return labels;
}

}  // namespace chunkbench
