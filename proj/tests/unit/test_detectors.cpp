// Detector statistics: hand-counted values on tiny degree sequences, exact
// null centering/scaling against the moment formulas, threshold arithmetic,
// and pathwise monotonicity on coupled samples.

#include <cmath>
#include <vector>

#include "betascan/detectors.hpp"
#include "betascan/rng.hpp"
#include "betascan/theory.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace betascan;
using testsupport::mean_of;
using testsupport::rel_close;
using testsupport::variance_of;

namespace {

GraphSample from_degrees(std::vector<std::int32_t> degrees) {
    GraphSample g;
    g.degrees = std::move(degrees);
    return g;
}

} // namespace

TEST_SUITE("detectors") {

TEST_CASE("total degree statistic is the centered degree sum") {
    CHECK(total_degree_stat(from_degrees({0, 0, 0, 0, 0}), {5, 2.0}) == -4.0);
    CHECK(total_degree_stat(from_degrees({3, 3, 3, 3}), {4, 4.0}) == 6.0);
}

TEST_CASE("max degree statistic") {
    CHECK(max_degree_stat(from_degrees({0, 0, 0})) == 0);
    CHECK(max_degree_stat(from_degrees({9, 1, 1, 1, 1, 1, 1, 1, 1, 1})) == 9);
    CHECK_THROWS_AS((void)max_degree_stat(from_degrees({})),
                    std::invalid_argument);
}

TEST_CASE("standardized degrees match plug-in arithmetic") {
    const ModelParams params{5, 2.5};  // theta = 0.25, mean 1, var 0.75
    const std::vector<double> d =
        standardized_degrees(from_degrees({4, 1, 1, 1, 1}), params);
    CHECK(d[0] == doctest::Approx(3.0 / std::sqrt(0.75)).epsilon(1e-14));
    CHECK(d[0] == doctest::Approx(3.4641016151377544).epsilon(1e-12));
    for (int i = 1; i < 5; ++i) CHECK(d[static_cast<std::size_t>(i)] == 0.0);
}

TEST_CASE("null standardized degrees have mean 0 and variance 1") {
    const ModelParams params{100, 25.0};
    std::vector<double> pool;
    pool.reserve(100 * 10'000);
    for (int rep = 0; rep < 10'000; ++rep) {
        const GraphSample g =
            sample_graph(params, null_signal(), seed_mix(31, rep), false);
        for (double v : standardized_degrees(g, params)) pool.push_back(v);
    }
    CHECK(std::fabs(mean_of(pool)) < 0.01);
    CHECK(variance_of(pool) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("scan grid is the documented integer interval") {
    CHECK(t_grid(100).thresholds == std::vector<std::int64_t>{1, 2, 3, 4, 5, 6});
    CHECK(t_grid(3).thresholds == std::vector<std::int64_t>{1, 2, 3});
    for (std::int64_t n : {3, 10, 100, 10'000}) {
        const TGrid g = t_grid(n);
        REQUIRE(!g.thresholds.empty());
        CHECK(g.thresholds.front() == 1);
        const double cap =
            std::floor(std::sqrt(10.0 * std::log(static_cast<double>(n))));
        CHECK(static_cast<double>(g.thresholds.back()) == cap);
    }
    CHECK_THROWS_AS((void)t_grid(2), std::domain_error);
}

TEST_CASE("hc curve centers exactly at the null survival") {
    // all degrees at the null mean: indicators vanish at every t
    const ModelParams params{9, 4.5};  // theta 0.25, null degree mean 2
    const GraphSample g = from_degrees({2, 2, 2, 2, 2, 2, 2, 2, 2});
    const HcCurve curve = hc_curve(g, params);
    REQUIRE(curve.points.size() == t_grid(9).thresholds.size());
    for (const HcPoint& pt : curve.points) {
        const NullHcMoments m = null_hc_moments(params, pt.t);
        CHECK(pt.hc_raw == doctest::Approx(-9.0 * m.a).epsilon(1e-12));
        if (pt.null_sd > 0.0)
            CHECK(pt.ghc ==
                  doctest::Approx(pt.hc_raw / pt.null_sd).epsilon(1e-12));
    }

    // star graph: only the hub crosses every threshold in the grid
    const ModelParams sparse{100, 2.0};
    std::vector<std::int32_t> star(100, 1);
    star[0] = 99;
    const HcCurve sc = hc_curve(from_degrees(star), sparse);
    for (const HcPoint& pt : sc.points) {
        const NullHcMoments m = null_hc_moments(sparse, pt.t);
        CHECK(pt.hc_raw == doctest::Approx(1.0 - 100.0 * m.a).epsilon(1e-12));
    }
}

TEST_CASE("hc curve table overload equals the recomputing overload") {
    const ModelParams params{100, 25.0};
    const std::vector<NullHcMoments> table = null_hc_table(params);
    for (std::uint64_t seed : {5u, 6u}) {
        const GraphSample g =
            sample_graph(params, null_signal(), seed, false);
        const HcCurve a = hc_curve(g, params);
        const HcCurve b = hc_curve(g, params, table);
        REQUIRE(a.points.size() == b.points.size());
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            CHECK(a.points[i].hc_raw == b.points[i].hc_raw);
            CHECK(a.points[i].ghc == b.points[i].ghc);
        }
    }
}

TEST_CASE("hc statistic is the supremum over the scan grid") {
    HcCurve c;
    c.points = {{1, 0.0, 1.0, -1.0}, {2, 0.0, 1.0, 0.5}, {3, 0.0, 1.0, 2.0}};
    CHECK(hc_stat(c) == 2.0);
    c.points.resize(1);
    CHECK(hc_stat(c) == -1.0);
    c.points.clear();
    CHECK_THROWS_AS((void)hc_stat(c), std::invalid_argument);
}

TEST_CASE("null scaled hc count has mean 0 and unit variance") {
    const ModelParams params{100, 25.0};
    const std::vector<NullHcMoments> table = null_hc_table(params);
    std::vector<double> ghc2;
    ghc2.reserve(10'000);
    for (int rep = 0; rep < 10'000; ++rep) {
        const GraphSample g =
            sample_graph(params, null_signal(), seed_mix(47, rep), false);
        const HcCurve c = hc_curve(g, params, table);
        ghc2.push_back(c.points[1].ghc);  // t = 2
    }
    CHECK(std::fabs(mean_of(ghc2)) < 0.05);
    CHECK(variance_of(ghc2) == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("statistics depend on the sample only through degrees") {
    const ModelParams params{100, 25.0};
    const SignalSpec signal = make_signal_from_s(params, 10, 0.8);
    const GraphSample full = sample_graph(params, signal, 2024, true);
    GraphSample degrees_only;
    degrees_only.degrees = full.degrees;
    CHECK(total_degree_stat(full, params) ==
          total_degree_stat(degrees_only, params));
    CHECK(max_degree_stat(full) == max_degree_stat(degrees_only));
    CHECK(hc_stat(hc_curve(full, params)) ==
          hc_stat(hc_curve(degrees_only, params)));
}

TEST_CASE("theoretical thresholds match plug-in arithmetic") {
    const ModelParams params{100, 25.0};
    const double logn = std::log(100.0);

    CHECK(theoretical_threshold(ThresholdSpec::higher_criticism(), params) ==
          doctest::Approx(std::sqrt(logn)).epsilon(1e-14));
    CHECK(theoretical_threshold(ThresholdSpec::higher_criticism(), params) ==
          doctest::Approx(2.146).epsilon(1e-3));

    const SignalSpec hint = make_signal_from_s(params, 10, 1.0);
    CHECK(theoretical_threshold(ThresholdSpec::total_degree(), params, hint) ==
          doctest::Approx(31.25 * std::tanh(0.5)).epsilon(1e-14));
    CHECK(theoretical_threshold(ThresholdSpec::total_degree(), params, hint) ==
          doctest::Approx(14.44).epsilon(1e-3));
    CHECK_THROWS_AS((void)theoretical_threshold(ThresholdSpec::total_degree(),
                                                params),
                    std::invalid_argument);

    CHECK(theoretical_threshold(ThresholdSpec::max_degree(0.0), params) ==
          doctest::Approx(12.5 + std::sqrt(25.0 * 0.875 * logn))
              .epsilon(1e-14));
    CHECK(theoretical_threshold(ThresholdSpec::max_degree(0.0), params) ==
          doctest::Approx(22.537).epsilon(1e-3));
    CHECK_THROWS_AS(
        (void)theoretical_threshold(ThresholdSpec::max_degree(-0.5), params),
        std::domain_error);

    const double p = 0.125, q = 0.875;
    const double delta_star = -std::log(-std::log(1.0 - 0.05));
    const double want =
        100.0 * p +
        std::sqrt(2.0 * 100.0 * p * q * logn) *
            (1.0 -
             (std::log(logn) + std::log(4.0 * std::acos(-1.0))) /
                 (4.0 * logn) +
             delta_star / (2.0 * logn));
    CHECK(theoretical_threshold(ThresholdSpec::max_degree_gumbel(0.05),
                                params) == doctest::Approx(want).epsilon(1e-12));
    CHECK_THROWS_AS((void)theoretical_threshold(
                        ThresholdSpec::max_degree_gumbel(0.0), params),
                    std::domain_error);
    CHECK_THROWS_AS((void)theoretical_threshold(
                        ThresholdSpec::max_degree_gumbel(1.0), params),
                    std::domain_error);
}

TEST_CASE("gumbel calibration regime flag") {
    CHECK_FALSE(gumbel_regime_ok({100, 25.0}));  // log^3(100) ~ 97.7
    CHECK(gumbel_regime_ok({100, 98.0}));
    CHECK(gumbel_regime_ok({1000, 400.0}));  // log^3(1000) ~ 329.7
}

TEST_CASE("all three statistics are monotone on coupled samples") {
    const ModelParams params{80, 16.0};
    const std::vector<NullHcMoments> table = null_hc_table(params);
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        double prev_total = -1e300, prev_hc = -1e300;
        std::int64_t prev_max = -1;
        for (double a : {0.0, 0.5, 1.0, 2.0}) {
            const SignalSpec signal = make_signal_from_s(params, 9, a);
            const GraphSample g =
                sample_graph_coupled(params, signal, seed, false);
            const double total = total_degree_stat(g, params);
            const std::int64_t mx = max_degree_stat(g);
            const double hc = hc_stat(hc_curve(g, params, table));
            CHECK(total >= prev_total);
            CHECK(mx >= prev_max);
            CHECK(hc >= prev_hc);
            prev_total = total;
            prev_max = mx;
            prev_hc = hc;
        }
    }
}

TEST_CASE("null total degree variance: closed form and the 2n*lambda cap") {
    // under beta = 0 the pair-sum formula collapses to (n-1) lambda (1-theta)
    auto pair_variance = [](const ModelParams& params,
                            const std::vector<double>& beta) {
        double v = 0.0;
        const std::int64_t n = params.n;
        for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t j = i + 1; j < n; ++j) {
                const double p = edge_prob(beta[static_cast<std::size_t>(i)],
                                           beta[static_cast<std::size_t>(j)],
                                           params);
                v += 4.0 * p * (1.0 - p);
            }
        return v;
    };
    for (double lambda : {1.0, 5.0, 30.0}) {
        const ModelParams params{30, lambda};
        const std::vector<double> zero(30, 0.0);
        const double closed =
            29.0 * lambda * (1.0 - params.theta());
        CHECK(rel_close(pair_variance(params, zero), closed, 1e-12));

        std::vector<double> ramp(30), alt(30), spike(30, 0.0);
        for (int i = 0; i < 30; ++i) {
            ramp[static_cast<std::size_t>(i)] = -2.0 + 4.0 * i / 29.0;
            alt[static_cast<std::size_t>(i)] = (i % 2) ? 2.0 : 0.0;
        }
        spike[0] = 10.0;
        for (const auto& beta :
             {zero, ramp, alt, spike, std::vector<double>(30, 3.0)})
            CHECK(pair_variance(params, beta) <= 2.0 * 30.0 * lambda);
    }
}

TEST_CASE("null total degree moments match Monte Carlo") {
    const ModelParams params{100, 25.0};
    std::vector<double> stats;
    stats.reserve(10'000);
    for (int rep = 0; rep < 10'000; ++rep) {
        const GraphSample g =
            sample_graph(params, null_signal(), seed_mix(73, rep), false);
        stats.push_back(total_degree_stat(g, params));
    }
    const double var_exact = 99.0 * 25.0 * 0.875;
    CHECK(std::fabs(mean_of(stats)) < 4.0 * std::sqrt(var_exact / 10'000.0));
    CHECK(variance_of(stats) == doctest::Approx(var_exact).epsilon(0.10));
}

TEST_CASE("null hc rarely exceeds the asymptotic cut") {
    const ModelParams params{100, 25.0};
    const std::vector<NullHcMoments> table = null_hc_table(params);
    const double cut = std::sqrt(std::log(100.0));
    int hits = 0;
    const int reps = 2000;
    for (int rep = 0; rep < reps; ++rep) {
        const GraphSample g =
            sample_graph(params, null_signal(), seed_mix(91, rep), false);
        if (hc_stat(hc_curve(g, params, table)) > cut) ++hits;
    }
    const double rate = static_cast<double>(hits) / reps;
    const double bound =
        std::sqrt(10.0 * std::log(100.0)) / std::log(100.0);
    CHECK(rate <= bound);
    CHECK(rate <= 0.2);  // observed ~0.07; the pinned seed freezes this
}

} // TEST_SUITE("detectors")
