#include "betascan/binomial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "betascan/error.hpp"

namespace betascan {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Exact-convolution budgets. Beyond either limit the sum law is not
// enumerable at acceptable cost and the caller gets a capacity_error.
constexpr std::int64_t kMaxTotalTrials = 1'000'000;
constexpr std::int64_t kMaxConvWork = std::int64_t{1} << 28;

void check_law(const BinomialLaw& law) {
    if (law.trials < 0)
        throw std::domain_error("binomial law: trials must be >= 0");
    if (!(law.success_prob >= 0.0) || !(law.success_prob <= 1.0))
        throw std::domain_error("binomial law: success_prob must lie in [0,1]");
}

// Streaming log-sum-exp: keeps the running maximum and a compensated sum of
// exp(term - max). Adding in any order agrees to a few ulps.
struct LogSumAcc {
    double max_log = kNegInf;
    double sum = 0.0;
    double comp = 0.0;

    void add_scaled(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }

    void add(double log_term) {
        if (log_term == kNegInf) return;
        if (log_term <= max_log) {
            add_scaled(std::exp(log_term - max_log));
        } else {
            if (sum != 0.0) {
                double scale = std::exp(max_log - log_term);
                sum *= scale;
                comp *= scale;
            }
            max_log = log_term;
            add_scaled(1.0);
        }
    }

    double log_total() const {
        return sum > 0.0 ? max_log + std::log(sum) : kNegInf;
    }
};

// Stirling series remainder log m! - log(sqrt(2 pi m) (m/e)^m). Small and
// cancellation-free at every m, which is what keeps log_pmf accurate at
// large trial counts (a log-gamma difference loses ~trials * eps absolute).
double stirlerr(std::int64_t m) {
    constexpr double kS0 = 1.0 / 12, kS1 = 1.0 / 360, kS2 = 1.0 / 1260,
                     kS3 = 1.0 / 1680, kS4 = 1.0 / 1188;
    static const std::array<double, 16> small = [] {
        std::array<double, 16> t{};
        const double log2pi = 0.5 * std::log(2.0 * std::acos(-1.0));
        double log_fact = 0.0;
        t[0] = 0.0;
        for (int i = 1; i < 16; ++i) {
            const double logi = std::log(static_cast<double>(i));
            log_fact += logi;
            t[static_cast<std::size_t>(i)] =
                log_fact + i - log2pi - (0.5 + i) * logi;
        }
        return t;
    }();
    if (m < 16) return small[static_cast<std::size_t>(m)];
    const double m1 = 1.0 / static_cast<double>(m), m2 = m1 * m1;
    if (m > 500) return (kS0 - kS1 * m2) * m1;
    if (m > 80) return (kS0 - (kS1 - kS2 * m2) * m2) * m1;
    if (m > 35) return (kS0 - (kS1 - (kS2 - kS3 * m2) * m2) * m2) * m1;
    return (kS0 - (kS1 - (kS2 - (kS3 - kS4 * m2) * m2) * m2) * m2) * m1;
}

// Binomial deviance x log(x/m) + m - x, evaluated by series when x is close
// to m where the direct form cancels.
double bd0(double x, double m) {
    if (std::fabs(x - m) < 0.1 * (x + m)) {
        const double v = (x - m) / (x + m);
        double s = (x - m) * v;
        double ej = 2 * x * v;
        for (int j = 1;; ++j) {
            ej *= v * v;
            const double s1 = s + ej / (2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
    }
    return x * std::log(x / m) + m - x;
}

// log P(Bin(n, p) = k) for p in (0, 1), by the deviance decomposition.
// Precondition: 0 <= k <= n, n >= 1.
double log_pmf_point(std::int64_t n, double p, std::int64_t k) {
    if (k == 0) return static_cast<double>(n) * std::log1p(-p);
    if (k == n) return static_cast<double>(n) * std::log(p);
    const double nd = static_cast<double>(n), kd = static_cast<double>(k);
    const double lc = stirlerr(n) - stirlerr(k) - stirlerr(n - k) -
                      bd0(kd, nd * p) - bd0(nd - kd, nd * (1.0 - p));
    const double two_pi = 2.0 * std::acos(-1.0);
    return lc + 0.5 * std::log(nd / (two_pi * kd * (nd - kd)));
}

// First support point of the tail under the project-wide convention.
std::int64_t tail_start(double threshold, bool strict) {
    double edge = strict ? std::floor(threshold) + 1.0 : std::ceil(threshold);
    if (edge < -1e18) return std::numeric_limits<std::int64_t>::min() / 4;
    if (edge > 1e18) return std::numeric_limits<std::int64_t>::max() / 4;
    return static_cast<std::int64_t>(edge);
}

// log sum of pmf(k) for k in [k_from, n], walking upward. Valid only when
// the terms are eventually decreasing past k_from (k_from > mode), which
// makes the geometric remainder bound effective.
double log_sum_up(std::int64_t n, double p, std::int64_t k_from) {
    const double logp = std::log(p);
    const double logq = std::log1p(-p);
    LogSumAcc acc;
    double lp = 0.0;
    for (std::int64_t k = k_from; k <= n; ++k) {
        if (k == k_from || ((k - k_from) & 2047) == 0) {
            // re-anchor to kill accumulated ratio drift
            lp = log_pmf_point(n, p, k);
        } else {
            lp += std::log(static_cast<double>(n - k + 1)) -
                  std::log(static_cast<double>(k)) + logp - logq;
        }
        acc.add(lp);
        if (k < n) {
            double r = static_cast<double>(n - k) * p /
                       (static_cast<double>(k + 1) * (1.0 - p));
            if (r < 1.0) {
                double log_rem = lp + std::log(r) - std::log1p(-r);
                if (log_rem < acc.log_total() - 40.0) break;
            }
        }
    }
    return acc.log_total();
}

// log sum of pmf(k) for k in [0, k_to], walking downward (k_to < mode).
double log_sum_down(std::int64_t n, double p, std::int64_t k_to) {
    const double logp = std::log(p);
    const double logq = std::log1p(-p);
    LogSumAcc acc;
    double lp = 0.0;
    for (std::int64_t k = k_to; k >= 0; --k) {
        if (k == k_to || ((k_to - k) & 2047) == 0) {
            lp = log_pmf_point(n, p, k);
        } else {
            // pmf(k)/pmf(k+1) = (k+1) q / ((n-k) p)
            lp += std::log(static_cast<double>(k + 1)) -
                  std::log(static_cast<double>(n - k)) + logq - logp;
        }
        acc.add(lp);
        if (k > 0) {
            double r = static_cast<double>(k) * (1.0 - p) /
                       (static_cast<double>(n - k + 1) * p);
            if (r < 1.0) {
                double log_rem = lp + std::log(r) - std::log1p(-r);
                if (log_rem < acc.log_total() - 40.0) break;
            }
        }
    }
    return acc.log_total();
}

std::vector<double> single_log_pmf_table(const BinomialLaw& law) {
    std::vector<double> table(static_cast<std::size_t>(law.trials) + 1);
    for (std::int64_t k = 0; k <= law.trials; ++k)
        table[static_cast<std::size_t>(k)] = log_pmf(law, k);
    return table;
}

} // namespace

std::int64_t BinomialSumLaw::total_trials() const {
    std::int64_t total = 0;
    for (const auto& c : components) total += c.trials;
    return total;
}

double log_choose(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n)
        throw std::domain_error("log_choose: k must lie in [0, n]");
    return std::lgamma(static_cast<double>(n + 1)) -
           std::lgamma(static_cast<double>(k + 1)) -
           std::lgamma(static_cast<double>(n - k + 1));
}

double log_pmf(const BinomialLaw& law, std::int64_t k) {
    check_law(law);
    const std::int64_t n = law.trials;
    const double p = law.success_prob;
    if (k < 0 || k > n) return kNegInf;
    if (p == 0.0) return k == 0 ? 0.0 : kNegInf;
    if (p == 1.0) return k == n ? 0.0 : kNegInf;
    return log_pmf_point(n, p, k);
}

double log_upper_tail(const BinomialLaw& law, double threshold, bool strict) {
    check_law(law);
    const std::int64_t n = law.trials;
    const double p = law.success_prob;
    const std::int64_t k0 = tail_start(threshold, strict);
    if (k0 <= 0) return 0.0;
    if (k0 > n) return kNegInf;
    if (p == 0.0) return kNegInf;
    if (p == 1.0) return 0.0;

    const auto mode =
        static_cast<std::int64_t>(std::floor((static_cast<double>(n) + 1) * p));
    if (k0 > mode) return log_sum_up(n, p, k0);
    // The tail holds at least half the mass; sum the complement, where the
    // terms decrease away from the mode, and convert.
    double log_lower = log_sum_down(n, p, k0 - 1);
    return std::log1p(-std::exp(log_lower));
}

double upper_tail(const BinomialLaw& law, double threshold, bool strict) {
    return std::exp(log_upper_tail(law, threshold, strict));
}

std::vector<double> log_pmf_table(const BinomialSumLaw& law) {
    if (law.components.empty())
        throw std::invalid_argument("binomial sum law: empty component list");
    for (const auto& c : law.components) check_law(c);
    const std::int64_t total = law.total_trials();
    if (total > kMaxTotalTrials)
        throw capacity_error(
            "binomial sum law: total trials exceed the exact-path budget");

    auto comps = law.components;
    std::sort(comps.begin(), comps.end(),
              [](const BinomialLaw& a, const BinomialLaw& b) {
                  return a.trials < b.trials;
              });

    std::vector<double> acc = single_log_pmf_table(comps.front());
    for (std::size_t c = 1; c < comps.size(); ++c) {
        const std::int64_t na = static_cast<std::int64_t>(acc.size()) - 1;
        const std::int64_t nb = comps[c].trials;
        if ((na + 1) * (nb + 1) > kMaxConvWork)
            throw capacity_error(
                "binomial sum law: convolution work exceeds the exact-path "
                "budget");
        std::vector<double> tb = single_log_pmf_table(comps[c]);
        std::vector<double> out(static_cast<std::size_t>(na + nb) + 1);
        for (std::int64_t k = 0; k <= na + nb; ++k) {
            LogSumAcc cell;
            const std::int64_t lo = std::max<std::int64_t>(0, k - nb);
            const std::int64_t hi = std::min(na, k);
            for (std::int64_t i = lo; i <= hi; ++i)
                cell.add(acc[static_cast<std::size_t>(i)] +
                         tb[static_cast<std::size_t>(k - i)]);
            out[static_cast<std::size_t>(k)] = cell.log_total();
        }
        acc = std::move(out);
    }
    return acc;
}

double tail_from_log_pmf(const std::vector<double>& table, double threshold,
                         bool strict) {
    const auto n = static_cast<std::int64_t>(table.size()) - 1;
    const std::int64_t k0 = tail_start(threshold, strict);
    if (k0 <= 0) return 1.0;
    if (k0 > n) return 0.0;
    LogSumAcc acc;
    for (std::int64_t k = k0; k <= n; ++k)
        acc.add(table[static_cast<std::size_t>(k)]);
    return std::exp(acc.log_total());
}

double sum_upper_tail(const BinomialSumLaw& law, double threshold, bool strict) {
    if (law.components.empty())
        throw std::invalid_argument("binomial sum law: empty component list");
    if (law.components.size() == 1)
        return upper_tail(law.components.front(), threshold, strict);
    return tail_from_log_pmf(log_pmf_table(law), threshold, strict);
}

double tilted_restricted_mean(const BinomialLaw& law, double a,
                              const std::vector<std::int64_t>& B) {
    check_law(law);
    if (!(a > 0.0))
        throw std::domain_error("tilted_restricted_mean: a must be positive");
    const double p = law.success_prob;
    const double denom = a * p + (1.0 - p);
    const BinomialLaw tilted{law.trials, a * p / denom};
    LogSumAcc acc;
    for (std::int64_t k : B) acc.add(log_pmf(tilted, k));
    return std::exp(static_cast<double>(law.trials) * std::log(denom) +
                    acc.log_total());
}

double tilted_restricted_mean_direct(const BinomialLaw& law, double a,
                                     const std::vector<std::int64_t>& B) {
    check_law(law);
    if (!(a > 0.0))
        throw std::domain_error("tilted_restricted_mean: a must be positive");
    const double log_a = std::log(a);
    LogSumAcc acc;
    for (std::int64_t k : B)
        acc.add(static_cast<double>(k) * log_a + log_pmf(law, k));
    return std::exp(acc.log_total());
}

double tail_rate_exponent(std::int64_t trials, double p, double C) {
    if (trials < 2)
        throw std::domain_error("tail_rate_exponent: trials must be >= 2");
    const double n = static_cast<double>(trials);
    const double threshold =
        n * p + C * std::sqrt(n * p * (1.0 - p) * std::log(n));
    const double lt =
        log_upper_tail(BinomialLaw{trials, p}, threshold, /*strict=*/false);
    return -lt / std::log(n);
}

} // namespace betascan
