#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "betascan/graph_model.hpp"

// Exact likelihood-ratio computations for tiny graphs: the per-support ratio
// L_S, and the second moment of the uniform-prior mixture L_pi under the
// null, both by the overlap-count formula and by exhaustive enumeration of
// all graphs. The enumeration is the ground truth the formula is checked
// against.

namespace betascan {

struct SecondMomentResult {
    enum class Path { formula, enumeration };
    double value = 0.0;  // >= 1 up to roundoff for order 2 (unit-mean ratio)
    Path path = Path::formula;
    std::int64_t n = 0;
    std::int64_t s = 0;
    double A = 0.0;
    double lambda = 0.0;
};

// dP_{beta,lambda}/dP_{0,lambda} at the given graph, where beta = A on the
// support and 0 elsewhere. Closed form over the edge counts within the
// support and between support and complement. Pairs must be enumerable
// (n <= 20); edges are unordered 0-based pairs.
double likelihood_ratio(
    const std::vector<std::pair<std::int32_t, std::int32_t>>& edges,
    const std::vector<std::int32_t>& support, double A,
    const ModelParams& params);

// E_0 L_pi^2 via the exact case ledger: sum over the support overlap
// Z = |S1 ^ S2| of the hypergeometric pair weight times the per-pair factors
//   T_ss = 2 lambda f(2A)^2 / n + (1 - lambda f(2A)/n)^2 / (1 - lambda/2n)
//   T_sm = 2 lambda f(2A) f(A) / n
//          + (1 - lambda f(2A)/n)(1 - lambda f(A)/n) / (1 - lambda/2n)
//   T_mm = 2 lambda f(A)^2 / n + (1 - lambda f(A)/n)^2 / (1 - lambda/2n)
// raised to the case counts C(Z,2), 2Z(s-Z), (s-Z)^2 + Z(n-2s+Z). The Z-sum
// runs over the hypergeometric support [max(0, 2s-n), s], which keeps every
// count non-negative including when 2s > n. O(s) work; requires n <= 1e4.
SecondMomentResult second_moment_formula(std::int64_t n, std::int64_t s,
                                         double A, double lambda);

// Brute force over all 2^C(n,2) graphs (n <= 6, else capacity_error):
// order 1 gives E_0 L_pi (must be 1), order 2 gives E_0 L_pi^2.
SecondMomentResult moment_enum(std::int64_t n, std::int64_t s, double A,
                               double lambda, int order);

} // namespace betascan
