#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "betascan/graph_model.hpp"
#include "betascan/theory.hpp"

// The three degree-based detectors. All statistics are functions of the
// degree sequence only. Operational calibration is by empirical null
// quantiles (see simlab); the theoretical cuts live here for
// theory-replication runs.

namespace betascan {

// Integer scan thresholds {1, .., floor(sqrt(10 log n))}: the interval
// (0, sqrt(10 log n)) intersected with the naturals. Requires n >= 3.
struct TGrid {
    std::vector<std::int64_t> thresholds;
};

TGrid t_grid(std::int64_t n);

// Sum of degrees centered at its null mean lambda(n-1)/2.
double total_degree_stat(const GraphSample& sample, const ModelParams& params);

std::int64_t max_degree_stat(const GraphSample& sample);

// D_i = (d_i - (n-1) lambda/2n) / sqrt((n-1) (lambda/2n) (1 - lambda/2n)).
// Throws std::domain_error when the null edge probability is degenerate
// (cannot occur under lambda <= n).
std::vector<double> standardized_degrees(const GraphSample& sample,
                                         const ModelParams& params);

struct HcPoint {
    std::int64_t t = 0;
    double hc_raw = 0.0;   // #{i: D_i > t} - n a(t), strict inequality
    double null_sd = 0.0;  // sqrt(Var HC(t)) under the null
    double ghc = 0.0;      // hc_raw / null_sd; 0 when the tail is empty
};

struct HcCurve {
    std::vector<HcPoint> points;
};

// Evaluates HC(t) over the scan grid with exact null centering and scaling.
// The overload taking a moment table avoids recomputing the (sample
// independent) null moments per call; the table must be null_hc_table(params).
HcCurve hc_curve(const GraphSample& sample, const ModelParams& params);
HcCurve hc_curve(const GraphSample& sample, const ModelParams& params,
                 const std::vector<NullHcMoments>& null_table);

// sup over the grid of GHC(t).
double hc_stat(const HcCurve& curve);

// Theoretical rejection cuts.
//   higher_criticism:   sqrt(log n)
//   total_degree:       K = (lambda s / 8) tanh(A/2), needs the signal hint
//   max_degree(delta):  lambda/2 + sqrt((1+delta) lambda (1-lambda/2n) log n)
//   max_degree_gumbel(level): the extreme-value calibration
//       np + sqrt(2 n p q log n) (1 - (log log n + log 4pi)/(4 log n)
//                                   + delta*/(2 log n)),
//       p = lambda/2n, delta* = -log(-log(1-level));
//       its null limit needs lambda >> log^3 n, see gumbel_regime_ok.
struct ThresholdSpec {
    enum class Kind {
        total_degree,
        max_degree,
        max_degree_gumbel,
        higher_criticism
    };
    Kind kind = Kind::higher_criticism;
    double delta = 0.0;  // max_degree
    double level = 0.0;  // max_degree_gumbel

    static ThresholdSpec total_degree();
    static ThresholdSpec max_degree(double delta);
    static ThresholdSpec max_degree_gumbel(double level);
    static ThresholdSpec higher_criticism();
};

double theoretical_threshold(const ThresholdSpec& spec,
                             const ModelParams& params,
                             const std::optional<SignalSpec>& signal_hint = {});

// True when lambda >= log^3 n, the regime where the Gumbel calibration's
// null limit is valid. Callers should warn when false.
bool gumbel_regime_ok(const ModelParams& params);

} // namespace betascan
