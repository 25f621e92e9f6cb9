#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "chunkbench/errors.hpp"
#include "chunkbench/metrics.hpp"

using namespace chunkbench;

namespace {

// independent ideal-DCG oracle: enumerate every multiset of at most five
// gains drawable from the pool, and every ordering of each
double brute_force_best_dcg(const std::vector<int>& pooled) {
    int avail[3] = {0, 0, 0};
    for (int g : pooled) avail[g] += 1;
    double best = 0;
    for (int a = 0; a <= std::min(avail[0], 5); ++a)
        for (int b = 0; b <= std::min(avail[1], 5); ++b)
            for (int c = 0; c <= std::min(avail[2], 5); ++c) {
                if (a + b + c > 5) continue;
                std::vector<int> head;
                head.insert(head.end(), a, 0);
                head.insert(head.end(), b, 1);
                head.insert(head.end(), c, 2);
                do {
                    best = std::max(best, dcg_at_5(head));
                } while (std::next_permutation(head.begin(), head.end()));
            }
    return best;
}

}  // namespace

TEST_CASE("dcg fixtures") {
    CHECK(dcg_at_5({2, 1, 0, 0, 0}) == doctest::Approx(2.63093).epsilon(1e-5));
    CHECK(dcg_at_5({2, 2, 2, 2, 2}) ==
          doctest::Approx(2 + 2 / std::log2(3.0) + 1 + 2 / std::log2(5.0) + 2 / std::log2(6.0)));
    CHECK(dcg_at_5({}) == 0.0);
    CHECK(dcg_at_5({0, 0, 0}) == 0.0);
    CHECK(dcg_at_5({0, 2}) == doctest::Approx(2 / std::log2(3.0)));
}

TEST_CASE("dcg validates gains") {
    CHECK_THROWS_AS(dcg_at_5({3}), ContractError);
    CHECK_THROWS_AS(dcg_at_5({-1}), ContractError);
    CHECK_THROWS_AS(dcg_at_5({2, 2, 2, 2, 2, 2}), ContractError);
}

TEST_CASE("pooled ideal uses the union of strategy gains") {
    const double idcg = pooled_idcg_at_5({{2, 0, 0, 0, 0}, {1, 1, 0, 0, 0}});
    CHECK(idcg == doctest::Approx(3.13093).epsilon(1e-5));

    // the pool of one strategy is its own sorted gains
    CHECK(pooled_idcg_at_5({{0, 2, 1}}) == doctest::Approx(dcg_at_5({2, 1, 0})));
    CHECK(pooled_idcg_at_5({{0, 0}, {0}}) == 0.0);
}

TEST_CASE("ndcg against the pooled ideal") {
    const double idcg = pooled_idcg_at_5({{2, 0, 0, 0, 0}, {1, 1, 0, 0, 0}});
    CHECK(ndcg_at_5({2, 0, 0, 0, 0}, idcg) == doctest::Approx(0.63879).epsilon(1e-5));
    CHECK(ndcg_at_5({1, 1, 0, 0, 0}, idcg) == doctest::Approx(0.52091).epsilon(1e-5));
    CHECK(ndcg_at_5({2, 1, 0, 0, 0}, 0.0) == 0.0);  // empty pool convention
}

TEST_CASE("strict binary metrics count only full relevance") {
    CHECK(hit_at_5({1, 1, 1, 1, 1}) == 0);
    CHECK(hit_at_5({0, 0, 2}) == 1);
    CHECK(mrr_at_5({1, 1, 1, 1, 1}) == 0.0);
    CHECK(mrr_at_5({0, 0, 2, 2, 0}) == doctest::Approx(1.0 / 3));
    CHECK(mrr_at_5({2}) == 1.0);
    CHECK(precision_at_1({1, 2, 2, 2, 2}) == 0);
    CHECK(precision_at_1({2, 0, 0, 0, 0}) == 1);
    CHECK(precision_at_1({}) == 0);
    CHECK(precision_strict_at_5({1, 1, 1, 1, 1}) == 0.0);
    CHECK(precision_strict_at_5({2, 2, 0}) == doctest::Approx(0.4));  // fixed denominator 5
    CHECK(precision_strict_at_5({2, 2, 2, 2, 2}) == 1.0);
}

TEST_CASE("pooled idcg equals the brute-force ideal and bounds every member") {
    std::mt19937 rng(123);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n_strategies = 1 + rng() % 6;
        std::vector<std::vector<int>> pool(n_strategies);
        std::vector<int> all;
        for (auto& gains : pool) {
            const std::size_t len = rng() % 6;
            for (std::size_t i = 0; i < len; ++i) {
                gains.push_back(static_cast<int>(rng() % 3));
                all.push_back(gains.back());
            }
        }
        const double idcg = pooled_idcg_at_5(pool);
        CHECK(idcg == doctest::Approx(brute_force_best_dcg(all)).epsilon(1e-12));
        for (const auto& gains : pool) {
            CHECK(idcg >= dcg_at_5(gains) - 1e-12);
            const double ndcg = ndcg_at_5(gains, idcg);
            CHECK(ndcg >= 0.0);
            CHECK(ndcg <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("aggregate_values basics") {
    const auto odd = aggregate_values({3, 1, 2});
    CHECK(odd.mean == doctest::Approx(2.0));
    CHECK(odd.median == doctest::Approx(2.0));

    const auto even = aggregate_values({4, 1, 2, 3});
    CHECK(even.median == doctest::Approx(2.5));

    const auto pair = aggregate_values({0, 1});
    CHECK(pair.variance == doctest::Approx(0.5));  // sample variance, n-1
    const double half_width = 1.96 * std::sqrt(0.5) / std::sqrt(2.0);
    CHECK(pair.ci_low == doctest::Approx(0.5 - half_width));
    CHECK(pair.ci_high == doctest::Approx(0.5 + half_width));

    const auto single = aggregate_values({7});
    CHECK(single.variance == 0.0);
    CHECK(single.ci_low == doctest::Approx(7.0));

    CHECK_THROWS_AS(aggregate_values({}), Error);
}

TEST_CASE("aggregate produces a full record with clamped ndcg interval") {
    const IndexKey key{"m", "d", "s"};
    std::vector<GainList> gains = {
        {"q2", key, {2, 0, 0, 0, 0}},
        {"q1", key, {1, 1, 0, 0, 0}},
    };
    const double idcg = pooled_idcg_at_5({{2, 0, 0, 0, 0}, {1, 1, 0, 0, 0}});
    const auto rec = aggregate(key, gains, {idcg, idcg});
    CHECK(rec.n_queries == 2);
    CHECK(rec.ndcg_mean == doctest::Approx((0.63879 + 0.52091) / 2).epsilon(1e-4));
    CHECK(rec.hit_rate == doctest::Approx(0.5));  // only q2 holds a gain-2
    CHECK(rec.mrr_mean == doctest::Approx(0.5));
    CHECK(rec.p_at_1 == doctest::Approx(0.5));
    CHECK(rec.p_strict_at_5 == doctest::Approx(0.1));
    CHECK(rec.zero_hit_fraction == doctest::Approx(0.5));
    CHECK(rec.ndcg_ci_low >= 0.0);
    CHECK(rec.ndcg_ci_high <= 1.0);

    // arrival order must not change any aggregate
    std::swap(gains[0], gains[1]);
    const auto rec2 = aggregate(key, gains, {idcg, idcg});
    CHECK(rec2.ndcg_mean == rec.ndcg_mean);
    CHECK(rec2.ndcg_ci_low == rec.ndcg_ci_low);

    CHECK_THROWS_AS(aggregate(key, gains, {idcg}), ContractError);
    CHECK_THROWS_AS(aggregate(key, {}, {}), Error);
}

TEST_CASE("pearson fixtures and failure modes") {
    CHECK(pearson({1, 2, 3}, {1, 2, 4}) == doctest::Approx(0.98198).epsilon(1e-5));
    CHECK(pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
    CHECK(pearson({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(pearson({1, 2}, {1}), ContractError);
    CHECK_THROWS_AS(pearson({1}, {1}), Error);
    CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), Error);  // constant series
}

TEST_CASE("nearest-rank percentile") {
    CHECK(percentile({3, 1, 2}, 50) == doctest::Approx(2.0));
    std::vector<double> ladder;
    for (int i = 1; i <= 100; ++i) ladder.push_back(i);
    CHECK(percentile(ladder, 95) == doctest::Approx(95.0));
    CHECK(percentile(ladder, 100) == doctest::Approx(100.0));
    CHECK(percentile(ladder, 1) == doctest::Approx(1.0));
    CHECK(percentile({5}, 25) == doctest::Approx(5.0));
    // ceil(33 * 3 / 100) = 1, so the smallest value
    CHECK(percentile({10, 20, 30}, 33) == doctest::Approx(10.0));
    CHECK(percentile({10, 20, 30}, 34) == doctest::Approx(20.0));
    CHECK_THROWS_AS(percentile({}, 50), Error);
    CHECK_THROWS_AS(percentile({1}, 0), ContractError);
    CHECK_THROWS_AS(percentile({1}, 101), ContractError);
}

TEST_CASE("pareto frontier keeps the non-dominated set sorted by cost") {
    const std::vector<ParetoPoint> points = {
        {"a", 0.5, 100}, {"b", 0.4, 50}, {"c", 0.3, 200}};
    CHECK(pareto_frontier(points) == std::vector<std::string>{"b", "a"});

    // duplicates of the same point do not dominate each other
    const std::vector<ParetoPoint> twins = {{"x", 0.5, 10}, {"y", 0.5, 10}};
    CHECK(pareto_frontier(twins) == std::vector<std::string>{"x", "y"});

    const std::vector<ParetoPoint> chain = {
        {"low", 0.1, 1}, {"mid", 0.2, 2}, {"high", 0.3, 3}};
    CHECK(pareto_frontier(chain).size() == 3);  // strictly improving chain

    CHECK_THROWS_AS(pareto_frontier({}), Error);
}

TEST_CASE("frontier members are never dominated") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> unit(0, 1);
    std::vector<ParetoPoint> points;
    for (int i = 0; i < 60; ++i)
        points.push_back({"p" + std::to_string(i), unit(rng), unit(rng)});
    const auto frontier = pareto_frontier(points);
    for (const auto& label : frontier) {
        const auto& f = *std::find_if(points.begin(), points.end(),
                                      [&](const ParetoPoint& p) { return p.label == label; });
        for (const auto& other : points) {
            const bool dominates = other.effectiveness >= f.effectiveness &&
                                   other.cost <= f.cost &&
                                   (other.effectiveness > f.effectiveness || other.cost < f.cost);
            CHECK_FALSE(dominates);
        }
    }
}
