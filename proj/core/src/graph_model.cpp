#include "betascan/graph_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "betascan/rng.hpp"

namespace betascan {

namespace {

// expit(x) = 1/(1+e^-x), evaluated on the non-overflowing branch.
double expit(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

// Rank of the pair {i, j}, i < j, in lexicographic order over all pairs.
// Pins each pair to a fixed RNG stream so edge draws are coupled across
// parameter changes.
std::uint64_t pair_rank(std::int64_t n, std::int64_t i, std::int64_t j) {
    return static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n) -
           static_cast<std::uint64_t>(i * (i + 1) / 2) +
           static_cast<std::uint64_t>(j - i - 1);
}

void check_signal(const ModelParams& params, const SignalSpec& signal) {
    if (signal.s < 0 || signal.s >= params.n)
        throw std::domain_error("signal: support size must lie in [0, n)");
    if (!(signal.A >= 0.0))
        throw std::domain_error("signal: strength A must be >= 0");
    if (static_cast<std::int64_t>(signal.support.size()) != signal.s)
        throw std::invalid_argument("signal: support size disagrees with s");
}

std::vector<std::int32_t> place_support(std::int64_t n, std::int64_t s,
                                        const Placement& placement) {
    std::vector<std::int32_t> support;
    support.reserve(static_cast<std::size_t>(s));
    if (placement.kind == Placement::Kind::first_s) {
        for (std::int64_t v = 0; v < s; ++v)
            support.push_back(static_cast<std::int32_t>(v));
        return support;
    }
    // Partial Fisher-Yates: draw s distinct ids, then sort.
    std::vector<std::int32_t> ids(static_cast<std::size_t>(n));
    std::iota(ids.begin(), ids.end(), 0);
    SplitMix64 gen{placement.seed};
    for (std::int64_t k = 0; k < s; ++k) {
        auto pick = k + static_cast<std::int64_t>(
                            gen.next() % static_cast<std::uint64_t>(n - k));
        std::swap(ids[static_cast<std::size_t>(k)],
                  ids[static_cast<std::size_t>(pick)]);
        support.push_back(ids[static_cast<std::size_t>(k)]);
    }
    std::sort(support.begin(), support.end());
    return support;
}

// Number of unordered pairs within a set of m vertices.
std::int64_t pair_count(std::int64_t m) { return m * (m - 1) / 2; }

// Inverse of the triangular pair rank within one class: index t over the
// lexicographic (a, b), a < b, pairs of m items.
std::pair<std::int64_t, std::int64_t> triangle_decode(std::int64_t t,
                                                      std::int64_t m) {
    auto row_start = [m](std::int64_t a) { return a * (2 * m - a - 1) / 2; };
    const double md = static_cast<double>(2 * m - 1);
    double disc = md * md - 8.0 * static_cast<double>(t);
    auto a = static_cast<std::int64_t>(
        std::floor((md - std::sqrt(std::max(disc, 0.0))) / 2.0));
    a = std::clamp<std::int64_t>(a, 0, m - 2);
    while (a + 1 <= m - 2 && row_start(a + 1) <= t) ++a;
    while (a > 0 && row_start(a) > t) --a;
    return {a, a + 1 + (t - row_start(a))};
}

struct EdgeSink {
    GraphSample& sample;
    void hit(std::int32_t i, std::int32_t j) {
        ++sample.degrees[static_cast<std::size_t>(i)];
        ++sample.degrees[static_cast<std::size_t>(j)];
        if (sample.edges) sample.edges->emplace_back(i, j);
    }
};

// Visits the hits of M independent Bernoulli(p) slots in expected
// O(1 + M p) time by jumping between successes with geometric gaps.
template <typename Visit>
void skip_scan(std::int64_t M, double p, SplitMix64& gen, Visit&& visit) {
    if (M <= 0 || p <= 0.0) return;
    const double log_miss = std::log1p(-p);  // < 0 for p in (0, 1]
    std::int64_t idx = -1;
    while (true) {
        double gap = 0.0;
        if (p < 1.0) {
            gap = std::floor(std::log1p(-gen.next_unit()) / log_miss);
            if (gap >= static_cast<double>(M)) return;
        }
        idx += 1 + static_cast<std::int64_t>(gap);
        if (idx >= M) return;
        visit(idx);
    }
}

} // namespace

void ModelParams::validate() const {
    if (n < 2) throw std::domain_error("model: n must be >= 2");
    if (!(lambda >= 1.0) || !(lambda <= static_cast<double>(n)))
        throw std::domain_error("model: lambda must lie in [1, n]");
}

double edge_prob(double beta_i, double beta_j, const ModelParams& params) {
    return params.lambda / static_cast<double>(params.n) *
           expit(beta_i + beta_j);
}

std::int64_t sparsity_from_alpha(const ModelParams& params, double alpha) {
    params.validate();
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::domain_error("signal: alpha must lie in (0, 1)");
    const double raw = std::pow(static_cast<double>(params.n), 1.0 - alpha);
    const auto s = static_cast<std::int64_t>(std::floor(raw + 0.5));
    if (s < 1 || s >= params.n)
        throw std::domain_error(
            "signal: round(n^(1-alpha)) falls outside [1, n-1]");
    return s;
}

SignalSpec make_signal_from_alpha(const ModelParams& params, double alpha,
                                  double A, const Placement& placement) {
    return make_signal_from_s(params, sparsity_from_alpha(params, alpha), A,
                              placement);
}

SignalSpec make_signal_from_s(const ModelParams& params, std::int64_t s,
                              double A, const Placement& placement) {
    params.validate();
    if (s < 1 || s >= params.n)
        throw std::domain_error("signal: s must lie in [1, n-1]");
    if (!(A >= 0.0)) throw std::domain_error("signal: A must be >= 0");
    return SignalSpec{s, A, place_support(params.n, s, placement)};
}

GraphSample sample_graph(const ModelParams& params, const SignalSpec& signal,
                         std::uint64_t seed, bool keep_edges) {
    params.validate();
    check_signal(params, signal);
    if (keep_edges) return sample_graph_coupled(params, signal, seed, true);

    const std::int64_t n = params.n;
    const std::int64_t s = signal.s;
    GraphSample sample;
    sample.seed = seed;
    sample.degrees.assign(static_cast<std::size_t>(n), 0);
    EdgeSink sink{sample};

    const std::vector<std::int32_t>& sup = signal.support;
    std::vector<std::int32_t> rest;
    rest.reserve(static_cast<std::size_t>(n - s));
    {
        std::size_t k = 0;
        for (std::int32_t v = 0; v < static_cast<std::int32_t>(n); ++v) {
            if (k < sup.size() && sup[k] == v)
                ++k;
            else
                rest.push_back(v);
        }
    }
    const auto m = static_cast<std::int64_t>(rest.size());

    // One independent stream per homogeneous pair class.
    const double p_ss = edge_prob(signal.A, signal.A, params);
    const double p_sc = edge_prob(signal.A, 0.0, params);
    const double p_cc = edge_prob(0.0, 0.0, params);

    SplitMix64 gen_ss{seed_mix(seed, 0)};
    skip_scan(pair_count(s), p_ss, gen_ss, [&](std::int64_t t) {
        auto [a, b] = triangle_decode(t, s);
        sink.hit(sup[static_cast<std::size_t>(a)],
                 sup[static_cast<std::size_t>(b)]);
    });

    SplitMix64 gen_sc{seed_mix(seed, 1)};
    skip_scan(s * m, p_sc, gen_sc, [&](std::int64_t t) {
        std::int32_t u = sup[static_cast<std::size_t>(t / m)];
        std::int32_t v = rest[static_cast<std::size_t>(t % m)];
        sink.hit(std::min(u, v), std::max(u, v));
    });

    SplitMix64 gen_cc{seed_mix(seed, 2)};
    skip_scan(pair_count(m), p_cc, gen_cc, [&](std::int64_t t) {
        auto [a, b] = triangle_decode(t, m);
        sink.hit(rest[static_cast<std::size_t>(a)],
                 rest[static_cast<std::size_t>(b)]);
    });

    return sample;
}

GraphSample sample_graph_coupled(const ModelParams& params,
                                 const SignalSpec& signal, std::uint64_t seed,
                                 bool keep_edges) {
    params.validate();
    check_signal(params, signal);

    const std::int64_t n = params.n;
    std::vector<char> in_support(static_cast<std::size_t>(n), 0);
    for (std::int32_t v : signal.support)
        in_support[static_cast<std::size_t>(v)] = 1;

    // p by the number of support endpoints; identical arithmetic to the
    // generic beta sampler on the expanded vector.
    const double p_by_ends[3] = {edge_prob(0.0, 0.0, params),
                                 edge_prob(signal.A, 0.0, params),
                                 edge_prob(signal.A, signal.A, params)};

    GraphSample sample;
    sample.seed = seed;
    sample.degrees.assign(static_cast<std::size_t>(n), 0);
    if (keep_edges) sample.edges.emplace();
    EdgeSink sink{sample};

    for (std::int64_t i = 0; i < n; ++i) {
        const int ci = in_support[static_cast<std::size_t>(i)];
        for (std::int64_t j = i + 1; j < n; ++j) {
            const double p =
                p_by_ends[ci + in_support[static_cast<std::size_t>(j)]];
            const double u = unit_double(stream_at(seed, pair_rank(n, i, j)));
            if (u < p)
                sink.hit(static_cast<std::int32_t>(i),
                         static_cast<std::int32_t>(j));
        }
    }
    return sample;
}

GraphSample sample_graph_beta(const ModelParams& params,
                              const std::vector<double>& beta,
                              std::uint64_t seed, bool keep_edges) {
    params.validate();
    const std::int64_t n = params.n;
    if (static_cast<std::int64_t>(beta.size()) != n)
        throw std::invalid_argument("sample_graph_beta: beta must have size n");

    GraphSample sample;
    sample.seed = seed;
    sample.degrees.assign(static_cast<std::size_t>(n), 0);
    if (keep_edges) sample.edges.emplace();
    EdgeSink sink{sample};

    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = i + 1; j < n; ++j) {
            const double p =
                edge_prob(beta[static_cast<std::size_t>(i)],
                          beta[static_cast<std::size_t>(j)], params);
            const double u = unit_double(stream_at(seed, pair_rank(n, i, j)));
            if (u < p)
                sink.hit(static_cast<std::int32_t>(i),
                         static_cast<std::int32_t>(j));
        }
    }
    return sample;
}

BinomialSumLaw degree_law(VertexClass vertex_class, const ModelParams& params,
                          const SignalSpec& signal) {
    params.validate();
    check_signal(params, signal);
    const std::int64_t n = params.n;
    const std::int64_t s = signal.s;
    const double p_ss = edge_prob(signal.A, signal.A, params);
    const double p_sc = edge_prob(signal.A, 0.0, params);
    const double p_cc = edge_prob(0.0, 0.0, params);

    BinomialSumLaw law;
    auto push = [&law](std::int64_t trials, double p) {
        if (trials > 0) law.components.push_back({trials, p});
    };
    if (vertex_class == VertexClass::in_support) {
        if (s < 1)
            throw std::domain_error(
                "degree_law: in_support vertex requires s >= 1");
        push(s - 1, p_ss);
        push(n - s, p_sc);
    } else {
        push(s, p_sc);
        push(n - s - 1, p_cc);
    }
    return law;
}

void write_edges_csv(const GraphSample& sample, std::ostream& out) {
    if (!sample.edges)
        throw std::invalid_argument(
            "write_edges_csv: sample carries no edge list");
    for (const auto& [i, j] : *sample.edges)
        out << i << ',' << j << '\n';
}

void write_degrees_csv(const GraphSample& sample, std::ostream& out) {
    out << "vertex,degree\n";
    for (std::size_t v = 0; v < sample.degrees.size(); ++v)
        out << v << ',' << sample.degrees[v] << '\n';
}

} // namespace betascan
