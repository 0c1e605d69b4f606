#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "betascan/binomial.hpp"

// The sparse beta-model on n vertices: unordered pairs {i, j} are edges
// independently with probability (lambda/n) * expit(beta_i + beta_j), so the
// all-zero beta gives the null edge probability lambda/2n. Signals live on an
// s-subset where beta_i = A (the least-favorable constant-strength shape);
// the generic heterogeneous-beta sampler exists for correctness tests only.

namespace betascan {

struct ModelParams {
    std::int64_t n = 2;    // vertex count, >= 2
    double lambda = 1.0;   // graph sparsity, in [1, n]

    double theta() const { return lambda / (2.0 * static_cast<double>(n)); }

    // Throws std::domain_error when outside n >= 2, 1 <= lambda <= n.
    void validate() const;
};

struct SignalSpec {
    std::int64_t s = 0;                 // support size, in [0, n)
    double A = 0.0;                     // common signal strength, >= 0
    std::vector<std::int32_t> support;  // sorted vertex ids, |support| = s
};

inline SignalSpec null_signal() { return SignalSpec{}; }

struct GraphSample {
    std::vector<std::int32_t> degrees;
    std::optional<std::vector<std::pair<std::int32_t, std::int32_t>>> edges;
    std::uint64_t seed = 0;
};

// Where to put the s support vertices. The model is exchangeable, so the
// first-s placement is canonical; seeded placement exists for sanity checks.
struct Placement {
    enum class Kind { first_s, seeded_random };
    Kind kind = Kind::first_s;
    std::uint64_t seed = 0;

    static Placement first() { return {}; }
    static Placement random(std::uint64_t seed) {
        return {Kind::seeded_random, seed};
    }
};

double edge_prob(double beta_i, double beta_j, const ModelParams& params);

// s = round(n^(1-alpha)), half up. Throws std::domain_error when the rounded
// s falls outside [1, n-1].
std::int64_t sparsity_from_alpha(const ModelParams& params, double alpha);
SignalSpec make_signal_from_alpha(const ModelParams& params, double alpha,
                                  double A, const Placement& placement = {});
SignalSpec make_signal_from_s(const ModelParams& params, std::int64_t s,
                              double A, const Placement& placement = {});

// Samples one graph. With keep_edges the sampler walks every pair with one
// uniform per pair (common-uniform coupling, see sample_graph_coupled);
// without it, it geometrically skips through the three homogeneous pair
// classes (S x S, S x S^c, S^c x S^c) in expected O(n + #edges).
// Deterministic given (params, signal, seed); the two paths consume
// randomness differently and give different graphs for the same seed.
GraphSample sample_graph(const ModelParams& params, const SignalSpec& signal,
                         std::uint64_t seed, bool keep_edges);

// Always uses one uniform per pair, indexed by the canonical pair rank, with
// edge iff u < p_ij. Under this coupling every degree is pathwise
// non-decreasing in A for a fixed seed, which makes monotonicity assertable.
GraphSample sample_graph_coupled(const ModelParams& params,
                                 const SignalSpec& signal, std::uint64_t seed,
                                 bool keep_edges);

// Generic heterogeneous-beta sampler (coupled, O(n^2)); correctness tests
// only. sample_graph_coupled(params, signal, ...) is this applied to the
// expanded beta vector.
GraphSample sample_graph_beta(const ModelParams& params,
                              const std::vector<double>& beta,
                              std::uint64_t seed, bool keep_edges);

enum class VertexClass { in_support, off_support };

// Exact marginal degree law under the constant-A signal shape:
//   in support:  Bin(s-1, (lambda/n) f(2A)) + Bin(n-s,   (lambda/n) f(A))
//   off support: Bin(s,   (lambda/n) f(A))  + Bin(n-s-1, lambda/2n)
// with f = expit; zero-trial components are dropped.
BinomialSumLaw degree_law(VertexClass vertex_class, const ModelParams& params,
                          const SignalSpec& signal);

// Serialization. Edges: one "i,j" line per edge, 0-based, i < j, no header.
// Degrees: header "vertex,degree" then one row per vertex.
void write_edges_csv(const GraphSample& sample, std::ostream& out);
void write_degrees_csv(const GraphSample& sample, std::ostream& out);

} // namespace betascan
