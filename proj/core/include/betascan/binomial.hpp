#pragma once

#include <cstdint>
#include <vector>

// Exact binomial and binomial-convolution probabilities.
//
// All probability mass is accumulated in natural-log space (streaming
// log-sum-exp with compensated summation); tails at n = 10^6 and beyond
// underflow double precision in linear space.
//
// Real-valued thresholds are resolved to the integer support with a fixed
// project-wide convention:
//   P(X > t)  sums k >= floor(t) + 1   (strict)
//   P(X >= t) sums k >= ceil(t)        (non-strict)

namespace betascan {

struct BinomialLaw {
    std::int64_t trials = 0;     // >= 0
    double success_prob = 0.0;   // in [0, 1]
};

// Sum of independent binomials. Exact computations on the sum enumerate its
// support, so they carry a size budget (see log_pmf_table).
struct BinomialSumLaw {
    std::vector<BinomialLaw> components;  // non-empty, mutually independent

    std::int64_t total_trials() const;
};

// log of the binomial coefficient C(n, k), via log-gamma. Requires
// 0 <= k <= n.
double log_choose(std::int64_t n, std::int64_t k);

// log P(X = k); -inf outside [0, trials]. Computed via log-gamma.
double log_pmf(const BinomialLaw& law, std::int64_t k);

// log P(X > threshold) (strict) or log P(X >= threshold); -inf for an empty
// tail. Relative error of the exponentiated value <= 1e-12 for trials <= 1e7.
double log_upper_tail(const BinomialLaw& law, double threshold, bool strict);

// P(X > threshold) or P(X >= threshold), in [0, 1].
double upper_tail(const BinomialLaw& law, double threshold, bool strict);

// Exact log-space pmf of the independent sum, as a vector over its full
// support {0, .., total trials}, computed by discrete convolution.
// Budget: total trials <= 1e6 and pairwise convolution work <= 2^28;
// beyond either limit a capacity_error is thrown (no silent approximation).
std::vector<double> log_pmf_table(const BinomialSumLaw& law);

// Tail of a distribution given by its log-space pmf table.
double tail_from_log_pmf(const std::vector<double>& table, double threshold,
                         bool strict);

// P(sum > threshold) or P(sum >= threshold) via exact convolution.
// A single-component law delegates to upper_tail exactly.
double sum_upper_tail(const BinomialSumLaw& law, double threshold, bool strict);

// E(a^X 1{X in B}) two ways. The formula path evaluates
//   (a p + 1 - p)^n * P(Bin(n, a p / (a p + 1 - p)) in B);
// the direct path sums a^k P(X = k) over B. Their agreement (to 1e-12
// relative) is the change-of-measure identity and the module's key self-test.
double tilted_restricted_mean(const BinomialLaw& law, double a,
                              const std::vector<std::int64_t>& B);
double tilted_restricted_mean_direct(const BinomialLaw& law, double a,
                                     const std::vector<std::int64_t>& B);

// -log P(X >= np + C sqrt(np(1-p) log n)) / log n for X ~ Bin(n, p).
// In the p_n = log^2(n)/n regime this exponent trends to C^2/2 as n grows;
// callers verify the trend, never a point value.
double tail_rate_exponent(std::int64_t trials, double p, double C);

} // namespace betascan
