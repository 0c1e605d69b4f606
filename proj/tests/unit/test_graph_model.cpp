// Model layer: edge probabilities, signal construction, both samplers, and
// the exact marginal degree laws, checked against hand arithmetic, pathwise
// couplings, and chi-square goodness of fit at 1e5 samples.

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "betascan/graph_model.hpp"
#include "betascan/rng.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace betascan;
using testsupport::gof_pvalue;
using testsupport::rel_close;

namespace {

std::vector<std::int32_t> degrees_from_edges(
    std::int64_t n,
    const std::vector<std::pair<std::int32_t, std::int32_t>>& edges) {
    std::vector<std::int32_t> d(static_cast<std::size_t>(n), 0);
    for (auto [i, j] : edges) {
        ++d[static_cast<std::size_t>(i)];
        ++d[static_cast<std::size_t>(j)];
    }
    return d;
}

double law_mean(const BinomialSumLaw& law) {
    double m = 0.0;
    for (const auto& c : law.components)
        m += static_cast<double>(c.trials) * c.success_prob;
    return m;
}

} // namespace

TEST_SUITE("graph_model") {

TEST_CASE("edge_prob matches hand arithmetic and saturates stably") {
    const ModelParams p4{4, 2.0};
    CHECK(edge_prob(0.0, 0.0, p4) == doctest::Approx(0.25).epsilon(1e-15));
    const ModelParams p100{100, 25.0};
    const double e = std::exp(1.0);
    CHECK(edge_prob(1.0, 0.0, p100) ==
          doctest::Approx(0.25 * e / (1.0 + e)).epsilon(1e-14));
    // large |beta| must neither overflow nor produce NaN
    CHECK(edge_prob(350.0, 350.0, p100) ==
          doctest::Approx(0.25).epsilon(1e-15));
    CHECK(edge_prob(700.0, 0.0, p100) ==
          doctest::Approx(0.25).epsilon(1e-12));
    CHECK(edge_prob(-350.0, -350.0, p100) >= 0.0);
    CHECK(edge_prob(-350.0, -350.0, p100) < 1e-200);
    for (double b : {-5.0, -1.0, 0.0, 2.0, 7.0})
        CHECK(edge_prob(b, -b / 2.0, p100) <= 25.0 / 100.0 + 1e-15);
}

TEST_CASE("model parameters validate their documented ranges") {
    CHECK_NOTHROW(ModelParams{2, 1.0}.validate());
    CHECK_NOTHROW(ModelParams{50, 50.0}.validate());
    CHECK_THROWS_AS((ModelParams{1, 1.0}.validate()), std::domain_error);
    CHECK_THROWS_AS((ModelParams{10, 0.5}.validate()), std::domain_error);
    CHECK_THROWS_AS((ModelParams{10, 11.0}.validate()), std::domain_error);
    CHECK(ModelParams{100, 25.0}.theta() == doctest::Approx(0.125));
}

TEST_CASE("support size from the sparsity exponent rounds half up") {
    const ModelParams params{100, 25.0};
    CHECK(sparsity_from_alpha(params, 0.5) == 10);
    CHECK(sparsity_from_alpha(params, 0.25) == 32);  // 100^0.75 = 31.62...
    CHECK(sparsity_from_alpha(params, 0.999) == 1);
    // rounds to n, which is out of range
    CHECK_THROWS_AS((void)sparsity_from_alpha(params, 0.001),
                    std::domain_error);
    CHECK_THROWS_AS((void)sparsity_from_alpha(params, 0.0), std::domain_error);
    CHECK_THROWS_AS((void)sparsity_from_alpha(params, 1.0), std::domain_error);
    CHECK_THROWS_AS((void)sparsity_from_alpha(params, -0.2),
                    std::domain_error);
}

TEST_CASE("signal construction places support deterministically") {
    const ModelParams params{100, 25.0};
    const SignalSpec first = make_signal_from_alpha(params, 0.5, 1.0);
    CHECK(first.s == 10);
    CHECK(first.A == 1.0);
    REQUIRE(first.support.size() == 10);
    for (std::int32_t v = 0; v < 10; ++v) CHECK(first.support[v] == v);

    const SignalSpec r1 =
        make_signal_from_alpha(params, 0.5, 1.0, Placement::random(77));
    const SignalSpec r2 =
        make_signal_from_alpha(params, 0.5, 1.0, Placement::random(77));
    CHECK(r1.support == r2.support);
    CHECK(std::is_sorted(r1.support.begin(), r1.support.end()));
    CHECK(std::set<std::int32_t>(r1.support.begin(), r1.support.end()).size() ==
          10);
    for (std::int32_t v : r1.support) {
        CHECK(v >= 0);
        CHECK(v < 100);
    }
    // different seeds give a different subset at least once over a few tries
    bool moved = false;
    for (std::uint64_t seed = 1; seed <= 5 && !moved; ++seed)
        moved = make_signal_from_alpha(params, 0.5, 1.0,
                                       Placement::random(seed))
                    .support != r1.support;
    CHECK(moved);

    CHECK_THROWS_AS(
        (void)make_signal_from_s(params, 0, 1.0), std::domain_error);
    CHECK_THROWS_AS(
        (void)make_signal_from_s(params, 100, 1.0), std::domain_error);
    CHECK_THROWS_AS(
        (void)make_signal_from_s(params, 5, -0.5), std::domain_error);
}

TEST_CASE("every sample satisfies the handshake and degree bounds") {
    const ModelParams params{60, 12.0};
    const SignalSpec signal = make_signal_from_s(params, 7, 0.9);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        for (bool keep : {false, true}) {
            const GraphSample g = sample_graph(params, signal, seed, keep);
            std::int64_t total = 0;
            for (std::int32_t d : g.degrees) {
                CHECK(d >= 0);
                CHECK(d <= 59);
                total += d;
            }
            CHECK(total % 2 == 0);
        }
    }
}

TEST_CASE("samplers are deterministic in the seed") {
    const ModelParams params{80, 15.0};
    const SignalSpec signal = make_signal_from_s(params, 9, 0.7);
    const GraphSample a = sample_graph(params, signal, 1234, true);
    const GraphSample b = sample_graph(params, signal, 1234, true);
    CHECK(a.degrees == b.degrees);
    REQUIRE(a.edges.has_value());
    REQUIRE(b.edges.has_value());
    CHECK(*a.edges == *b.edges);
    CHECK(a.seed == 1234);

    const GraphSample c = sample_graph(params, signal, 1235, true);
    CHECK(a.degrees != c.degrees);  // 3160 pairs; a collision would be news
}

TEST_CASE("kept edge lists agree with the degree sequence") {
    const ModelParams params{50, 10.0};
    const SignalSpec signal = make_signal_from_s(params, 6, 1.1);
    for (std::uint64_t seed : {3u, 17u, 99u}) {
        const GraphSample g = sample_graph_coupled(params, signal, seed, true);
        REQUIRE(g.edges.has_value());
        CHECK(degrees_from_edges(params.n, *g.edges) == g.degrees);
        for (auto [i, j] : *g.edges) {
            CHECK(i < j);
            CHECK(i >= 0);
            CHECK(j < 50);
        }
    }
}

TEST_CASE("constant-signal coupled sampler equals the generic beta sampler") {
    const ModelParams params{40, 8.0};
    const SignalSpec signal = make_signal_from_s(params, 6, 0.9);
    std::vector<double> beta(40, 0.0);
    for (std::int32_t v : signal.support)
        beta[static_cast<std::size_t>(v)] = 0.9;
    for (std::uint64_t seed : {1u, 2u, 42u}) {
        const GraphSample a = sample_graph_coupled(params, signal, seed, true);
        const GraphSample b = sample_graph_beta(params, beta, seed, true);
        CHECK(a.degrees == b.degrees);
        CHECK(*a.edges == *b.edges);
    }
}

TEST_CASE("coupled degrees are pathwise non-decreasing in signal strength") {
    const ModelParams params{60, 10.0};
    const double grid[] = {0.0, 0.3, 0.8, 1.5, 3.0};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        std::vector<std::int32_t> prev(60, 0);
        bool first = true;
        for (double a : grid) {
            const SignalSpec signal = make_signal_from_s(params, 8, a);
            const GraphSample g =
                sample_graph_coupled(params, signal, seed, false);
            if (!first)
                for (std::size_t i = 0; i < 60; ++i)
                    CHECK(g.degrees[i] >= prev[i]);
            prev = g.degrees;
            first = false;
        }
    }
}

TEST_CASE("a saturated signal makes the support a clique") {
    const ModelParams params{30, 30.0};  // lambda = n, so p_ss -> 1
    const SignalSpec signal = make_signal_from_s(params, 5, 350.0);
    const GraphSample g = sample_graph(params, signal, 9, true);
    REQUIRE(g.edges.has_value());
    std::set<std::pair<std::int32_t, std::int32_t>> edges(g.edges->begin(),
                                                          g.edges->end());
    for (std::int32_t i = 0; i < 5; ++i)
        for (std::int32_t j = i + 1; j < 5; ++j)
            CHECK(edges.count({i, j}) == 1);
}

TEST_CASE("null total degree matches its closed-form mean") {
    const ModelParams params{4, 4.0};  // every pair at p = 1/2
    const int reps = 100'000;
    double sum = 0.0;
    for (int i = 0; i < reps; ++i) {
        const GraphSample g =
            sample_graph(params, null_signal(), seed_mix(8881, i), false);
        for (std::int32_t d : g.degrees) sum += d;
    }
    const double mean = sum / reps;
    // E = lambda (n-1)/2 = 6; sd of the estimate is sqrt(6/reps) ~ 0.0078
    CHECK(std::fabs(mean - 6.0) < 0.04);
}

TEST_CASE("degree law components follow the documented decomposition") {
    const ModelParams params{100, 25.0};
    const SignalSpec signal = make_signal_from_s(params, 10, 1.0);
    const double f1 = 1.0 / (1.0 + std::exp(-1.0));
    const double f2 = 1.0 / (1.0 + std::exp(-2.0));

    const BinomialSumLaw in = degree_law(VertexClass::in_support, params, signal);
    REQUIRE(in.components.size() == 2);
    CHECK(in.components[0].trials == 9);
    CHECK(in.components[0].success_prob ==
          doctest::Approx(0.25 * f2).epsilon(1e-14));
    CHECK(in.components[1].trials == 90);
    CHECK(in.components[1].success_prob ==
          doctest::Approx(0.25 * f1).epsilon(1e-14));

    const BinomialSumLaw off =
        degree_law(VertexClass::off_support, params, signal);
    REQUIRE(off.components.size() == 2);
    CHECK(off.components[0].trials == 10);
    CHECK(off.components[1].trials == 89);
    CHECK(law_mean(off) ==
          doctest::Approx(10.0 * 0.25 * f1 + 89.0 * 0.125).epsilon(1e-13));

    // null reduction: one Bin(n-1, theta) whichever the class
    const BinomialSumLaw null_off =
        degree_law(VertexClass::off_support, params, null_signal());
    CHECK(null_off.total_trials() == 99);
    for (const auto& c : null_off.components)
        CHECK(c.success_prob == doctest::Approx(0.125).epsilon(1e-15));

    // s = 1: the within-support component has zero trials and is dropped
    const SignalSpec lone = make_signal_from_s(params, 1, 0.8);
    const BinomialSumLaw in1 = degree_law(VertexClass::in_support, params, lone);
    REQUIRE(in1.components.size() == 1);
    CHECK(in1.components[0].trials == 99);
    const double f08 = 1.0 / (1.0 + std::exp(-0.8));
    CHECK(in1.components[0].success_prob ==
          doctest::Approx(0.25 * f08).epsilon(1e-14));

    CHECK_THROWS_AS(
        (void)degree_law(VertexClass::in_support, params, null_signal()),
        std::domain_error);
}

TEST_CASE("sampled degrees match the exact marginal law (chi-square)") {
    const ModelParams params{12, 6.0};
    const SignalSpec signal = make_signal_from_s(params, 3, 0.8);
    const int reps = 100'000;
    std::vector<std::int64_t> obs_in(12, 0), obs_off(12, 0), obs_null(12, 0);
    for (int i = 0; i < reps; ++i) {
        const GraphSample g =
            sample_graph(params, signal, seed_mix(555, i), false);
        ++obs_in[static_cast<std::size_t>(g.degrees[0])];    // in support
        ++obs_off[static_cast<std::size_t>(g.degrees[11])];  // off support
        const GraphSample h =
            sample_graph(params, null_signal(), seed_mix(556, i), false);
        ++obs_null[static_cast<std::size_t>(h.degrees[5])];
    }
    auto probs_of = [](const BinomialSumLaw& law) {
        const std::vector<double> table = log_pmf_table(law);
        std::vector<double> p(12, 0.0);
        for (std::size_t k = 0; k < table.size() && k < 12; ++k)
            p[k] = std::exp(table[k]);
        return p;
    };
    const double p_in = gof_pvalue(
        obs_in, probs_of(degree_law(VertexClass::in_support, params, signal)));
    const double p_off = gof_pvalue(
        obs_off,
        probs_of(degree_law(VertexClass::off_support, params, signal)));
    const double p_null = gof_pvalue(
        obs_null,
        probs_of(degree_law(VertexClass::off_support, params, null_signal())));
    CAPTURE(p_in);
    CAPTURE(p_off);
    CAPTURE(p_null);
    CHECK(p_in > 0.001);
    CHECK(p_off > 0.001);
    CHECK(p_null > 0.001);
}

TEST_CASE("serialization writes the documented CSV shapes") {
    GraphSample g;
    g.degrees = {2, 1, 1};
    g.edges = {{{0, 1}, {0, 2}}};
    std::ostringstream deg;
    write_degrees_csv(g, deg);
    CHECK(deg.str() == "vertex,degree\n0,2\n1,1\n2,1\n");
    std::ostringstream edg;
    write_edges_csv(g, edg);
    CHECK(edg.str() == "0,1\n0,2\n");

    GraphSample bare;
    bare.degrees = {0, 0};
    std::ostringstream sink;
    CHECK_THROWS_AS(write_edges_csv(bare, sink), std::invalid_argument);
}

} // TEST_SUITE("graph_model")
