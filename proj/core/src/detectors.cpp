#include "betascan/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace betascan {

TGrid t_grid(std::int64_t n) {
    if (n < 3) throw std::domain_error("t_grid: n must be >= 3");
    const auto t_max = static_cast<std::int64_t>(
        std::floor(std::sqrt(10.0 * std::log(static_cast<double>(n)))));
    TGrid grid;
    for (std::int64_t t = 1; t <= t_max; ++t) grid.thresholds.push_back(t);
    return grid;
}

double total_degree_stat(const GraphSample& sample, const ModelParams& params) {
    params.validate();
    std::int64_t total = 0;
    for (std::int32_t d : sample.degrees) total += d;
    return static_cast<double>(total) -
           params.lambda * static_cast<double>(params.n - 1) / 2.0;
}

std::int64_t max_degree_stat(const GraphSample& sample) {
    if (sample.degrees.empty())
        throw std::invalid_argument("max_degree_stat: empty degree sequence");
    return *std::max_element(sample.degrees.begin(), sample.degrees.end());
}

std::vector<double> standardized_degrees(const GraphSample& sample,
                                         const ModelParams& params) {
    params.validate();
    const double p = params.theta();
    const double q = 1.0 - p;
    if (!(p > 0.0) || !(q > 0.0))
        throw std::domain_error(
            "standardized_degrees: degenerate null edge probability");
    const double mean = static_cast<double>(params.n - 1) * p;
    const double sd = std::sqrt(static_cast<double>(params.n - 1) * p * q);
    std::vector<double> out;
    out.reserve(sample.degrees.size());
    for (std::int32_t d : sample.degrees)
        out.push_back((static_cast<double>(d) - mean) / sd);
    return out;
}

HcCurve hc_curve(const GraphSample& sample, const ModelParams& params) {
    return hc_curve(sample, params, null_hc_table(params));
}

HcCurve hc_curve(const GraphSample& sample, const ModelParams& params,
                 const std::vector<NullHcMoments>& null_table) {
    params.validate();
    if (static_cast<std::int64_t>(sample.degrees.size()) != params.n)
        throw std::invalid_argument("hc_curve: degree sequence size != n");

    // d_i > tau(t) over the whole grid via one sort and binary searches.
    std::vector<std::int32_t> sorted = sample.degrees;
    std::sort(sorted.begin(), sorted.end());

    HcCurve curve;
    curve.points.reserve(null_table.size());
    for (const NullHcMoments& m : null_table) {
        // strict exceedance: degrees >= floor(tau) + 1
        const auto cut =
            static_cast<std::int32_t>(std::floor(m.tau)) + std::int32_t{1};
        const auto exceed = static_cast<double>(
            sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), cut));
        HcPoint pt;
        pt.t = m.t;
        pt.hc_raw = exceed - static_cast<double>(params.n) * m.a;
        pt.null_sd = std::sqrt(m.var_hc);
        pt.ghc = pt.null_sd > 0.0 ? pt.hc_raw / pt.null_sd : 0.0;
        curve.points.push_back(pt);
    }
    return curve;
}

double hc_stat(const HcCurve& curve) {
    if (curve.points.empty())
        throw std::invalid_argument("hc_stat: empty curve");
    double best = -std::numeric_limits<double>::infinity();
    for (const HcPoint& pt : curve.points) best = std::max(best, pt.ghc);
    return best;
}

ThresholdSpec ThresholdSpec::total_degree() {
    return {Kind::total_degree, 0.0, 0.0};
}
ThresholdSpec ThresholdSpec::max_degree(double delta) {
    return {Kind::max_degree, delta, 0.0};
}
ThresholdSpec ThresholdSpec::max_degree_gumbel(double level) {
    return {Kind::max_degree_gumbel, 0.0, level};
}
ThresholdSpec ThresholdSpec::higher_criticism() {
    return {Kind::higher_criticism, 0.0, 0.0};
}

double theoretical_threshold(const ThresholdSpec& spec,
                             const ModelParams& params,
                             const std::optional<SignalSpec>& signal_hint) {
    params.validate();
    const double n = static_cast<double>(params.n);
    const double logn = std::log(n);
    switch (spec.kind) {
        case ThresholdSpec::Kind::higher_criticism:
            return std::sqrt(logn);
        case ThresholdSpec::Kind::total_degree: {
            if (!signal_hint)
                throw std::invalid_argument(
                    "theoretical_threshold: total_degree cut needs a signal "
                    "hint (s, A)");
            return params.lambda * static_cast<double>(signal_hint->s) / 8.0 *
                   std::tanh(signal_hint->A / 2.0);
        }
        case ThresholdSpec::Kind::max_degree: {
            if (!(spec.delta >= 0.0))
                throw std::domain_error(
                    "theoretical_threshold: max_degree delta must be >= 0");
            return params.lambda / 2.0 +
                   std::sqrt((1.0 + spec.delta) * params.lambda *
                             (1.0 - params.theta()) * logn);
        }
        case ThresholdSpec::Kind::max_degree_gumbel: {
            if (!(spec.level > 0.0) || !(spec.level < 1.0))
                throw std::domain_error(
                    "theoretical_threshold: gumbel level must lie in (0, 1)");
            const double p = params.theta();
            const double q = 1.0 - p;
            const double delta_star = -std::log(-std::log1p(-spec.level));
            const double correction =
                1.0 -
                (std::log(logn) + std::log(4.0 * std::acos(-1.0))) /
                    (4.0 * logn) +
                delta_star / (2.0 * logn);
            return n * p + std::sqrt(2.0 * n * p * q * logn) * correction;
        }
    }
    throw std::logic_error("theoretical_threshold: unknown kind");
}

bool gumbel_regime_ok(const ModelParams& params) {
    params.validate();
    const double logn = std::log(static_cast<double>(params.n));
    return params.lambda >= logn * logn * logn;
}

} // namespace betascan
