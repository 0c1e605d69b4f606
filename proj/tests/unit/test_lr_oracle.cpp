// Likelihood-ratio oracle: the closed-form per-support ratio against hand
// arithmetic and change-of-measure identities, and the overlap-count second
// moment against exhaustive enumeration of every graph.

#include <cmath>
#include <utility>
#include <vector>

#include "betascan/error.hpp"
#include "betascan/lr_oracle.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace betascan;
using testsupport::rel_close;

namespace {

using EdgeList = std::vector<std::pair<std::int32_t, std::int32_t>>;

// all unordered pairs of {0..n-1} in lexicographic order
std::vector<std::pair<std::int32_t, std::int32_t>> all_pairs(int n) {
    std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
    for (std::int32_t i = 0; i < n; ++i)
        for (std::int32_t j = i + 1; j < n; ++j) pairs.push_back({i, j});
    return pairs;
}

} // namespace

TEST_SUITE("lr_oracle") {

TEST_CASE("zero strength gives ratio one on every graph") {
    const ModelParams params{5, 2.0};
    const auto pairs = all_pairs(5);
    for (unsigned mask : {0u, 1u, 37u, 1023u}) {
        EdgeList edges;
        for (std::size_t b = 0; b < pairs.size(); ++b)
            if (mask & (1u << b)) edges.push_back(pairs[b]);
        CHECK(likelihood_ratio(edges, {0, 2}, 0.0, params) ==
              doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("empty-graph ratio matches the two-pair closed form") {
    const ModelParams params{3, 1.5};
    const double f1 = 1.0 / (1.0 + std::exp(-1.0));
    const double factor = (1.0 - (1.5 / 3.0) * f1) / (1.0 - 1.5 / 6.0);
    const double want = factor * factor;  // two cross pairs, no edges
    CHECK(likelihood_ratio({}, {0}, 1.0, params) ==
          doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("the ratio integrates to one under the null") {
    for (int n : {3, 4})
        for (std::int64_t s : {1, 2})
            for (double a : {0.7, 1.3})
                for (double lambda : {1.0, 2.0}) {
                    const ModelParams params{n, lambda};
                    const double theta = params.theta();
                    const auto pairs = all_pairs(n);
                    std::vector<std::int32_t> support;
                    for (std::int64_t v = 0; v < s; ++v)
                        support.push_back(static_cast<std::int32_t>(v));
                    double total = 0.0;
                    const unsigned graphs = 1u << pairs.size();
                    for (unsigned mask = 0; mask < graphs; ++mask) {
                        EdgeList edges;
                        for (std::size_t b = 0; b < pairs.size(); ++b)
                            if (mask & (1u << b)) edges.push_back(pairs[b]);
                        double p0 = 1.0;
                        for (std::size_t b = 0; b < pairs.size(); ++b)
                            p0 *= (mask & (1u << b)) ? theta : 1.0 - theta;
                        total +=
                            p0 * likelihood_ratio(edges, support, a, params);
                    }
                    CAPTURE(n);
                    CAPTURE(s);
                    CAPTURE(a);
                    CAPTURE(lambda);
                    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
                }
}

TEST_CASE("likelihood_ratio rejects malformed inputs") {
    const ModelParams params{21, 2.0};
    CHECK_THROWS_AS((void)likelihood_ratio({}, {0}, 1.0, params),
                    capacity_error);
    const ModelParams small{4, 2.0};
    CHECK_THROWS_AS((void)likelihood_ratio({}, {}, 1.0, small),
                    std::domain_error);
    CHECK_THROWS_AS((void)likelihood_ratio({}, {0, 1, 2, 3}, 1.0, small),
                    std::domain_error);
    CHECK_THROWS_AS((void)likelihood_ratio({{0, 9}}, {0}, 1.0, small),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)likelihood_ratio({}, {7}, 1.0, small),
                    std::invalid_argument);
}

TEST_CASE("mixture second moment: zero strength and result plumbing") {
    const SecondMomentResult r = second_moment_formula(50, 5, 0.0, 3.0);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(r.path == SecondMomentResult::Path::formula);
    CHECK(r.n == 50);
    CHECK(r.s == 5);
    CHECK(r.A == 0.0);
    CHECK(r.lambda == 3.0);
}

TEST_CASE("mixture second moment is at least one and grows with strength") {
    for (auto [n, s, lambda] :
         std::vector<std::tuple<std::int64_t, std::int64_t, double>>{
             {30, 5, 3.0}, {12, 7, 2.0}, {100, 10, 25.0}}) {
        double prev = 0.0;
        for (double a = 0.0; a <= 2.0 + 1e-12; a += 0.25) {
            const double v = second_moment_formula(n, s, a, lambda).value;
            CAPTURE(n);
            CAPTURE(s);
            CAPTURE(a);
            CHECK(v >= 1.0 - 1e-9);
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("enumeration is the ground truth for the overlap formula") {
    for (std::int64_t n : {3, 4, 5})
        for (std::int64_t s : {1, 2})
            for (double a : {0.0, 0.7, 1.5})
                for (double lambda : {1.0, 2.0}) {
                    const SecondMomentResult e =
                        moment_enum(n, s, a, lambda, 2);
                    const SecondMomentResult f =
                        second_moment_formula(n, s, a, lambda);
                    CAPTURE(n);
                    CAPTURE(s);
                    CAPTURE(a);
                    CAPTURE(lambda);
                    CHECK(e.path == SecondMomentResult::Path::enumeration);
                    CHECK(rel_close(e.value, f.value, 1e-9));
                    const SecondMomentResult one =
                        moment_enum(n, s, a, lambda, 1);
                    CHECK(one.value == doctest::Approx(1.0).epsilon(1e-12));
                }
    // one heavier spot check at the enumeration size limit
    CHECK(rel_close(moment_enum(6, 2, 0.7, 1.5, 2).value,
                    second_moment_formula(6, 2, 0.7, 1.5).value, 1e-9));
}

TEST_CASE("overlap formula stays exact when supports must intersect") {
    // 2s > n forces a nonzero minimum overlap in the case ledger
    for (auto [n, s] : std::vector<std::pair<std::int64_t, std::int64_t>>{
             {5, 3}, {5, 4}, {6, 4}, {6, 5}}) {
        const SecondMomentResult e = moment_enum(n, s, 0.5, 2.0, 2);
        const SecondMomentResult f = second_moment_formula(n, s, 0.5, 2.0);
        CAPTURE(n);
        CAPTURE(s);
        CHECK(rel_close(e.value, f.value, 1e-9));
    }
}

TEST_CASE("second moment stays bounded at toy scale below the boundary") {
    // lambda far below log n mimics the powerless regime: the second moment
    // must grow slowly and stay near one for moderate strengths
    const double frozen[4] = {1.0, 1.03611623722, 1.12724793731,
                              1.23959048723};
    double prev = 0.0;
    int i = 0;
    for (double a : {0.0, 0.5, 1.0, 1.5}) {
        const double v = second_moment_formula(6, 2, a, 1.0).value;
        CHECK(v >= prev);
        CHECK(v <= 1.5);
        CHECK(v == doctest::Approx(frozen[i]).epsilon(1e-6));
        prev = v;
        ++i;
    }
}

TEST_CASE("capacity and argument errors") {
    CHECK_THROWS_AS((void)moment_enum(7, 2, 0.5, 1.0, 2), capacity_error);
    CHECK_THROWS_AS((void)moment_enum(5, 2, 0.5, 1.0, 3),
                    std::domain_error);
    CHECK_THROWS_AS((void)second_moment_formula(10'001, 2, 0.5, 1.0),
                    capacity_error);
    CHECK_THROWS_AS((void)second_moment_formula(10, 0, 0.5, 1.0),
                    std::domain_error);
    CHECK_THROWS_AS((void)second_moment_formula(10, 10, 0.5, 1.0),
                    std::domain_error);
    CHECK_THROWS_AS((void)second_moment_formula(10, 2, -1.0, 1.0),
                    std::domain_error);
}

} // TEST_SUITE("lr_oracle")
