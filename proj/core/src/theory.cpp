#include "betascan/theory.hpp"

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <stdexcept>

#include "betascan/detectors.hpp"
#include "betascan/error.hpp"

namespace betascan {

namespace {

// pmf of the summed law at floor(tau), from its exact log-pmf table; this is
// the a' - a'' difference of the two shifted tails, evaluated without
// cancellation. Zero off the support.
double pmf_at_floor(const std::vector<double>& table, double tau) {
    const auto k = static_cast<std::int64_t>(std::floor(tau));
    if (k < 0 || k >= static_cast<std::int64_t>(table.size())) return 0.0;
    return std::exp(table[static_cast<std::size_t>(k)]);
}

BinomialSumLaw drop_empty(std::initializer_list<BinomialLaw> comps) {
    BinomialSumLaw law;
    for (const auto& c : comps)
        if (c.trials > 0) law.components.push_back(c);
    if (law.components.empty()) law.components.push_back({0, 0.0});
    return law;
}

} // namespace

RegimeConstants regime_constants(double alpha, double theta) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::domain_error("regime_constants: alpha must lie in (0, 1)");
    if (!(theta >= 0.0) || !(theta <= 0.5))
        throw std::domain_error("regime_constants: theta must lie in [0, 1/2]");
    RegimeConstants rc;
    rc.alpha = alpha;
    rc.theta = theta;
    rc.c_dense = 0.5 - alpha;
    const double root = 1.0 - std::sqrt(1.0 - alpha);
    rc.c_max = 16.0 * (1.0 - theta) * root * root;
    rc.c_sparse = alpha < 0.75
                      ? 16.0 * (1.0 - theta) * std::max(0.0, alpha - 0.5)
                      : rc.c_max;
    return rc;
}

void write_boundary_csv(std::ostream& out, double theta, double alpha_step) {
    if (!(alpha_step > 0.0) || !(alpha_step < 1.0))
        throw std::domain_error(
            "write_boundary_csv: alpha_step must lie in (0, 1)");
    char buf[128];
    out << "alpha,c_dense,c_sparse,c_max\n";
    for (int k = 1;; ++k) {
        const double alpha = static_cast<double>(k) * alpha_step;
        if (alpha >= 1.0 - 1e-12) break;
        const RegimeConstants rc = regime_constants(alpha, theta);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", rc.alpha,
                      rc.c_dense, rc.c_sparse, rc.c_max);
        out << buf;
    }
}

double strength(const ModelParams& params, StrengthMode mode, double value,
                StrengthScale scale) {
    params.validate();
    const double n = static_cast<double>(params.n);
    double target = 0.0;
    switch (mode) {
        case StrengthMode::dense_r:
            target = std::pow(n, -value) / std::sqrt(params.lambda);
            break;
        case StrengthMode::sparse_C:
            if (!(value >= 0.0))
                throw std::domain_error("strength: C must be >= 0");
            target = std::sqrt(value * std::log(n) / params.lambda);
            break;
    }
    if (scale == StrengthScale::raw) return target;
    if (target >= 1.0)
        throw saturation_error(
            "strength: tanh-scale target >= 1 has no finite A");
    return std::atanh(target);
}

NullHcMoments null_hc_moments(const ModelParams& params, std::int64_t t) {
    params.validate();
    if (t < 1) throw std::domain_error("null_hc_moments: t must be >= 1");
    const double n = static_cast<double>(params.n);
    const double p = params.theta();
    const double q = 1.0 - p;

    NullHcMoments m;
    m.t = t;
    m.tau = (n - 1.0) * p +
            static_cast<double>(t) * std::sqrt((n - 1.0) * p * q);
    const BinomialLaw one_removed{params.n - 1, p};
    const BinomialLaw two_removed{params.n - 2, p};
    m.a = upper_tail(one_removed, m.tau, /*strict=*/true);
    m.a_prime = upper_tail(two_removed, m.tau - 1.0, /*strict=*/true);
    m.a_dprime = upper_tail(two_removed, m.tau, /*strict=*/true);
    m.pmf_point = std::exp(
        log_pmf(two_removed, static_cast<std::int64_t>(std::floor(m.tau))));
    m.b = p * m.a_prime * m.a_prime + q * m.a_dprime * m.a_dprime;
    m.var_hc = n * m.a * (1.0 - m.a) +
               n * (n - 1.0) * p * q * m.pmf_point * m.pmf_point;
    return m;
}

std::vector<NullHcMoments> null_hc_table(const ModelParams& params) {
    std::vector<NullHcMoments> table;
    for (std::int64_t t : t_grid(params.n).thresholds)
        table.push_back(null_hc_moments(params, t));
    return table;
}

AltHcMoments alt_hc_moments(const ModelParams& params, const SignalSpec& signal,
                            std::int64_t t) {
    params.validate();
    if (t < 1) throw std::domain_error("alt_hc_moments: t must be >= 1");
    if (signal.s < 0 || signal.s >= params.n)
        throw std::domain_error("alt_hc_moments: s must lie in [0, n)");
    if (!(signal.A >= 0.0))
        throw std::domain_error("alt_hc_moments: A must be >= 0");

    const std::int64_t n = params.n;
    const std::int64_t s = signal.s;
    const double nd = static_cast<double>(n);
    const double sd = static_cast<double>(s);
    const double A = signal.A;
    const double p0 = params.theta();
    const double p1 = edge_prob(A, 0.0, params);
    const double p2 = edge_prob(A, A, params);

    const NullHcMoments base = null_hc_moments(params, t);
    const double tau = base.tau;

    AltHcMoments m;
    m.t = t;

    // Marginal survivals P(D_i > t) under the alternative.
    m.a_s = s >= 1 ? sum_upper_tail(
                         drop_empty({{s - 1, p2}, {n - s, p1}}), tau, true)
                   : 0.0;
    m.a_c = sum_upper_tail(drop_empty({{s, p1}, {n - s - 1, p0}}), tau, true);
    m.mean_hc = sd * (m.a_s - base.a) + (nd - sd) * (m.a_c - base.a);

    m.t1 = sd * m.a_s * (1.0 - m.a_s);
    m.t2 = (nd - sd) * m.a_c * (1.0 - m.a_c);

    // Covariance blocks: each is (#ordered pairs) p(1-p) times the product of
    // the one-edge-conditioned pmf differences at floor(tau).
    if (s >= 2) {
        const auto rs = log_pmf_table(drop_empty({{s - 2, p2}, {n - s, p1}}));
        const double d = pmf_at_floor(rs, tau);
        m.t3 = sd * (sd - 1.0) * p2 * (1.0 - p2) * d * d;
    }
    if (n - s >= 2) {
        const auto rc = log_pmf_table(drop_empty({{s, p1}, {n - s - 2, p0}}));
        const double d = pmf_at_floor(rc, tau);
        m.t4 = (nd - sd) * (nd - sd - 1.0) * p0 * (1.0 - p0) * d * d;
    }
    if (s >= 1) {
        const auto rs =
            log_pmf_table(drop_empty({{s - 1, p2}, {n - s - 1, p1}}));
        const auto rc =
            log_pmf_table(drop_empty({{s - 1, p1}, {n - s - 1, p0}}));
        m.t5 = 2.0 * sd * (nd - sd) * p1 * (1.0 - p1) * pmf_at_floor(rs, tau) *
               pmf_at_floor(rc, tau);
    }
    m.var_hc = m.t1 + m.t2 + m.t3 + m.t4 + m.t5;
    return m;
}

} // namespace betascan
