#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "betascan/graph_model.hpp"

// Detection-boundary constants, strength parametrizations, and exact finite-n
// moments of the higher-criticism counts HC(t) under the null and under the
// constant-A alternative. theta is always evaluated at finite n as lambda/2n.

namespace betascan {

struct RegimeConstants {
    double alpha = 0.0;
    double theta = 0.0;
    double c_dense = 0.0;   // 1/2 - alpha (meaningful for alpha <= 1/2)
    double c_sparse = 0.0;  // 16(1-theta)(alpha-1/2) on (1/2, 3/4), then c_max
    double c_max = 0.0;     // 16(1-theta)(1 - sqrt(1-alpha))^2
};

// Requires 0 < alpha < 1 and 0 <= theta <= 1/2 (std::domain_error otherwise).
// c_sparse is clamped at 0 for alpha <= 1/2, where the sparse-regime
// constant is not meaningful and would go negative.
RegimeConstants regime_constants(double alpha, double theta);

// "alpha,c_dense,c_sparse,c_max" rows at alpha = step, 2*step, .. < 1.
void write_boundary_csv(std::ostream& out, double theta, double alpha_step);

enum class StrengthMode { dense_r, sparse_C };
enum class StrengthScale { tanh_scale, raw };

// Signal strength A for a boundary-relative target:
//   dense_r(r):   target = n^(-r) / sqrt(lambda)
//   sparse_C(C):  target = sqrt(C log n / lambda)
// raw scale sets A = target (the simulation protocol); tanh scale sets
// A = atanh(target) and throws saturation_error when target >= 1.
double strength(const ModelParams& params, StrengthMode mode, double value,
                StrengthScale scale);

// Exact null moments of HC(t) by conditioning on one edge. With
// p = lambda/2n and tau = (n-1)p + t sqrt((n-1)p(1-p)):
//   a  = P(Bin(n-1, p) > tau)
//   a' = P(Bin(n-2, p) > tau - 1),  a'' = P(Bin(n-2, p) > tau)
//   b  = p a'^2 + (1-p) a''^2
//   Var HC(t) = n a(1-a) + n(n-1) p (1-p) (a' - a'')^2
// a' - a'' equals the Bin(n-2, p) pmf at ceil(tau) - 1 for non-integer tau
// (at tau, in the lattice case); the pmf value is what the variance uses.
struct NullHcMoments {
    std::int64_t t = 0;
    double tau = 0.0;  // raw-degree threshold matching standardized level t
    double a = 0.0;
    double a_prime = 0.0;
    double a_dprime = 0.0;
    double pmf_point = 0.0;  // exact a' - a''
    double b = 0.0;
    double var_hc = 0.0;
};

NullHcMoments null_hc_moments(const ModelParams& params, std::int64_t t);

// Null moments for every t in the scan grid of this n, in grid order.
std::vector<NullHcMoments> null_hc_table(const ModelParams& params);

// Exact alternative moments of HC(t) under the constant-A signal.
// mean_hc = s (a_s - a) + (n-s) (a_c - a); the variance splits into the
// two diagonal terms and three covariance blocks (within-support,
// within-complement, cross), each computed from exact convolution tails of
// the one-edge-conditioned degree laws. var_hc = t1 + t2 + t3 + t4 + t5.
struct AltHcMoments {
    std::int64_t t = 0;
    double mean_hc = 0.0;
    double a_s = 0.0;  // survival P(D_i > t) for i in support
    double a_c = 0.0;  // survival for i off support
    double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0, t5 = 0.0;
    double var_hc = 0.0;
};

AltHcMoments alt_hc_moments(const ModelParams& params, const SignalSpec& signal,
                            std::int64_t t);

} // namespace betascan
