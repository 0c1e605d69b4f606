#include "betascan/lr_oracle.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>

#include "betascan/binomial.hpp"
#include "betascan/error.hpp"

namespace betascan {

namespace {

double expit(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

// Per-edge log factors of L_S, split by pair class and edge presence:
// ss pairs have both ends in the support, sc pairs exactly one. Present
// edges contribute p_alt/p_null = 2 f(kA); absent ones the complement ratio.
struct EdgeFactors {
    double ss_present, ss_absent;
    double sc_present, sc_absent;
};

EdgeFactors edge_factors(double A, const ModelParams& params) {
    const double lam_n = params.lambda / static_cast<double>(params.n);
    const double theta = params.theta();
    const double f2 = expit(2.0 * A);
    const double f1 = expit(A);
    return {std::log(2.0 * f2), std::log((1.0 - lam_n * f2) / (1.0 - theta)),
            std::log(2.0 * f1), std::log((1.0 - lam_n * f1) / (1.0 - theta))};
}

void check_formula_args(std::int64_t n, std::int64_t s, double A,
                        double lambda) {
    ModelParams{n, lambda}.validate();
    if (s < 1 || s >= n)
        throw std::domain_error("second moment: s must lie in [1, n-1]");
    if (!(A >= 0.0)) throw std::domain_error("second moment: A must be >= 0");
}

std::uint32_t pair_rank(std::int64_t n, std::int64_t i, std::int64_t j) {
    return static_cast<std::uint32_t>(i * n - i * (i + 1) / 2 + (j - i - 1));
}

// Next s-subset mask in colex-ish order (Gosper's hack).
std::uint64_t next_subset(std::uint64_t v) {
    std::uint64_t t = v | (v - 1);
    return (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
}

} // namespace

double likelihood_ratio(
    const std::vector<std::pair<std::int32_t, std::int32_t>>& edges,
    const std::vector<std::int32_t>& support, double A,
    const ModelParams& params) {
    params.validate();
    if (params.n > 20)
        throw capacity_error("likelihood_ratio: n exceeds the oracle limit 20");
    const auto s = static_cast<std::int64_t>(support.size());
    if (s < 1 || s >= params.n)
        throw std::domain_error("likelihood_ratio: |support| must lie in [1, n-1]");
    if (!(A >= 0.0))
        throw std::domain_error("likelihood_ratio: A must be >= 0");

    bool in_support[20] = {};
    for (std::int32_t v : support) {
        if (v < 0 || v >= params.n)
            throw std::invalid_argument("likelihood_ratio: support id out of range");
        in_support[v] = true;
    }

    std::int64_t count_ss = 0;
    std::int64_t count_sc = 0;
    for (const auto& [i, j] : edges) {
        if (i < 0 || j <= i || j >= params.n)
            throw std::invalid_argument("likelihood_ratio: bad edge pair");
        const int ends = (in_support[i] ? 1 : 0) + (in_support[j] ? 1 : 0);
        if (ends == 2)
            ++count_ss;
        else if (ends == 1)
            ++count_sc;
    }

    const std::int64_t pairs_ss = s * (s - 1) / 2;
    const std::int64_t pairs_sc = s * (params.n - s);
    const EdgeFactors f = edge_factors(A, params);
    const double log_lr =
        static_cast<double>(count_ss) * f.ss_present +
        static_cast<double>(pairs_ss - count_ss) * f.ss_absent +
        static_cast<double>(count_sc) * f.sc_present +
        static_cast<double>(pairs_sc - count_sc) * f.sc_absent;
    return std::exp(log_lr);
}

SecondMomentResult second_moment_formula(std::int64_t n, std::int64_t s,
                                         double A, double lambda) {
    check_formula_args(n, s, A, lambda);
    if (n > 10'000)
        throw capacity_error("second_moment_formula: n exceeds the limit 1e4");

    const double nd = static_cast<double>(n);
    const double lam_n = lambda / nd;
    const double theta = lambda / (2.0 * nd);
    const double f2 = expit(2.0 * A);
    const double f1 = expit(A);

    // Per-pair second-moment factors by the classes of the pair under the two
    // overlapping supports: both-both, both-one, one-one (ss / sm / mm).
    const double t_ss =
        2.0 * lam_n * f2 * f2 + (1.0 - lam_n * f2) * (1.0 - lam_n * f2) / (1.0 - theta);
    const double t_sm = 2.0 * lam_n * f2 * f1 +
                        (1.0 - lam_n * f2) * (1.0 - lam_n * f1) / (1.0 - theta);
    const double t_mm =
        2.0 * lam_n * f1 * f1 + (1.0 - lam_n * f1) * (1.0 - lam_n * f1) / (1.0 - theta);
    const double l_ss = std::log(t_ss);
    const double l_sm = std::log(t_sm);
    const double l_mm = std::log(t_mm);

    // Hypergeometric average over the overlap Z of two uniform s-subsets.
    double max_log = -std::numeric_limits<double>::infinity();
    std::vector<double> logs;
    const std::int64_t z_lo = std::max<std::int64_t>(0, 2 * s - n);
    for (std::int64_t z = z_lo; z <= s; ++z) {
        const double lw = log_choose(s, z) + log_choose(n - s, s - z) -
                          log_choose(n, s);
        const double c_ss = static_cast<double>(z * (z - 1) / 2);
        const double c_sm = static_cast<double>(2 * z * (s - z));
        const double c_mm =
            static_cast<double>((s - z) * (s - z) + z * (n - 2 * s + z));
        const double term = lw + c_ss * l_ss + c_sm * l_sm + c_mm * l_mm;
        logs.push_back(term);
        max_log = std::max(max_log, term);
    }
    double sum = 0.0;
    for (double l : logs) sum += std::exp(l - max_log);

    SecondMomentResult res;
    res.value = std::exp(max_log) * sum;
    res.path = SecondMomentResult::Path::formula;
    res.n = n;
    res.s = s;
    res.A = A;
    res.lambda = lambda;
    return res;
}

SecondMomentResult moment_enum(std::int64_t n, std::int64_t s, double A,
                               double lambda, int order) {
    check_formula_args(n, s, A, lambda);
    if (n > 6)
        throw capacity_error("moment_enum: n exceeds the enumeration limit 6");
    if (order != 1 && order != 2)
        throw std::domain_error("moment_enum: order must be 1 or 2");

    const ModelParams params{n, lambda};
    const std::int64_t pairs = n * (n - 1) / 2;
    const std::uint64_t graph_count = std::uint64_t{1} << pairs;
    const double theta = params.theta();
    const double log_theta = std::log(theta);
    const double log_comp = std::log1p(-theta);
    const EdgeFactors f = edge_factors(A, params);

    // Every s-subset as (pair mask within support, pair mask crossing it).
    struct SupportMasks {
        std::uint64_t ss;
        std::uint64_t sc;
    };
    std::vector<SupportMasks> supports;
    const std::uint64_t top = std::uint64_t{1} << n;
    for (std::uint64_t sub = (std::uint64_t{1} << s) - 1; sub < top;
         sub = next_subset(sub)) {
        SupportMasks masks{0, 0};
        for (std::int64_t i = 0; i < n; ++i) {
            for (std::int64_t j = i + 1; j < n; ++j) {
                const int ends = ((sub >> i) & 1) + ((sub >> j) & 1);
                if (ends == 2)
                    masks.ss |= std::uint64_t{1} << pair_rank(n, i, j);
                else if (ends == 1)
                    masks.sc |= std::uint64_t{1} << pair_rank(n, i, j);
            }
        }
        supports.push_back(masks);
    }
    const double support_count = static_cast<double>(supports.size());
    const double pairs_ss = static_cast<double>(s * (s - 1) / 2);
    const double pairs_sc = static_cast<double>(s * (n - s));

    // Fixed block split keeps the reduction order independent of thread count.
    const std::size_t blocks = 64;
    std::vector<double> block_sums(blocks, 0.0);
    auto run_block = [&](std::size_t b) {
        const std::uint64_t lo = graph_count / blocks * b;
        const std::uint64_t hi =
            b + 1 == blocks ? graph_count : graph_count / blocks * (b + 1);
        double sum = 0.0, comp = 0.0;
        for (std::uint64_t g = lo; g < hi; ++g) {
            const auto edges = static_cast<double>(std::popcount(g));
            const double log_p0 = edges * log_theta +
                                  (static_cast<double>(pairs) - edges) * log_comp;
            double mix = 0.0;
            for (const SupportMasks& m : supports) {
                const auto e_ss = static_cast<double>(std::popcount(g & m.ss));
                const auto e_sc = static_cast<double>(std::popcount(g & m.sc));
                const double log_lr = e_ss * f.ss_present +
                                      (pairs_ss - e_ss) * f.ss_absent +
                                      e_sc * f.sc_present +
                                      (pairs_sc - e_sc) * f.sc_absent;
                mix += std::exp(log_lr);
            }
            mix /= support_count;
            const double term =
                std::exp(log_p0) * (order == 2 ? mix * mix : mix);
            double y = term - comp;
            double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        block_sums[b] = sum;
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<void>> futures;
    std::atomic<std::size_t> next_block{0};
    for (unsigned w = 0; w < std::min<unsigned>(hw, blocks); ++w) {
        futures.push_back(std::async(std::launch::async, [&] {
            for (std::size_t b = next_block.fetch_add(1); b < blocks;
                 b = next_block.fetch_add(1))
                run_block(b);
        }));
    }
    for (auto& fut : futures) fut.get();

    double total = 0.0, comp = 0.0;
    for (double bs : block_sums) {
        double y = bs - comp;
        double t = total + y;
        comp = (t - total) - y;
        total = t;
    }

    SecondMomentResult res;
    res.value = total;
    res.path = SecondMomentResult::Path::enumeration;
    res.n = n;
    res.s = s;
    res.A = A;
    res.lambda = lambda;
    return res;
}

} // namespace betascan
