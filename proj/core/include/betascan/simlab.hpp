#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "betascan/detectors.hpp"
#include "betascan/graph_model.hpp"
#include "betascan/theory.hpp"

// Monte Carlo experiment engine: null calibration by empirical quantile,
// power/risk estimation, and (alpha, strength) power grids with a
// theoretical-boundary overlay.
//
// Seeding is fully documented so results are reproducible bit-for-bit across
// runs, platforms, and worker counts:
//   calibrate / estimate_power    replicate seed = seed_mix({seed, rep})
//   estimate_risk                 null stream uses seed_mix({seed, 0}),
//                                 alternative stream seed_mix({seed, 1})
//   run_grid calibration          seed_mix({master_seed, test_code, 0xca11b})
//   run_grid cell replicate       seed_mix({master_seed, test_code,
//                                           alpha_index, strength_index, rep})
// test_code is the wire value of TestId below (stable across refactors).
// seed_mix folds left, so a single grid cell is reproducible standalone:
// estimate_power(..., seed_mix({master_seed, test_code, ai, si})) recomputes
// cell (ai, si) exactly.

namespace betascan {

enum class TestId : std::uint64_t {
    total_degree = 1,
    max_degree = 2,
    higher_criticism = 3,
};

const char* test_name(TestId test);
TestId test_from_name(const std::string& name);

struct SimConfig {
    ModelParams params;
    TestId test = TestId::total_degree;
    double level = 0.05;
    int calib_reps = 100;   // paper protocol; acceptance runs use 1000
    int power_reps = 100;
    std::uint64_t master_seed = 0;
    std::vector<double> alpha_grid;
    std::vector<double> strength_grid;
    StrengthMode mode = StrengthMode::dense_r;
    StrengthScale scale = StrengthScale::raw;
    int workers = 0;  // run-local execution budget, 0 = hardware; never
                      // persisted and never part of grid identity
};

struct PowerCell {
    double alpha = 0.0;
    double strength = 0.0;  // the r or C grid value
    std::int64_t s = 0;
    double A = 0.0;         // NaN marks a saturated (unreachable) cell
    double power = 0.0;     // NaN marks a saturated cell
    double ci = 0.0;        // 1.96 sqrt(p(1-p)/reps); NaN when saturated
};

struct BoundaryPoint {
    double alpha = 0.0;
    double c = 0.0;
};

struct PowerGrid {
    SimConfig config;
    double threshold = 0.0;
    std::vector<PowerCell> cells;       // row-major: alpha outer, strength inner
    std::vector<BoundaryPoint> boundary;
};

bool operator==(const PowerCell& a, const PowerCell& b);   // NaN == NaN here
bool operator==(const PowerGrid& a, const PowerGrid& b);

// The test statistic of one sample (max degree cast to double for max_degree).
double evaluate_statistic(TestId test, const GraphSample& sample,
                          const ModelParams& params,
                          const std::vector<NullHcMoments>& hc_table);

// `reps` statistics under (params, signal), replicate i seeded with
// seed_mix({seed, i}). Replicates are independent, so the worker count only
// partitions the index range; the returned vector is identical for any
// worker count.
std::vector<double> simulate_statistics(TestId test, const ModelParams& params,
                                        const SignalSpec& signal, int reps,
                                        std::uint64_t seed, int workers = 1);

// Smallest order statistic with at least (1 - level) mass at or below it
// (conservative under discreteness). Requires a non-empty sample.
double empirical_upper_quantile(std::vector<double> values, double level);

// Empirical (1 - level)-quantile of the null statistic over `reps` samples.
double calibrate(TestId test, const ModelParams& params, double level,
                 int reps, std::uint64_t seed, int workers = 1);

struct PowerEstimate {
    double power = 0.0;
    double ci_halfwidth = 0.0;
};

// Fraction of alternative samples with statistic strictly above threshold.
PowerEstimate estimate_power(TestId test, const ModelParams& params,
                             const SignalSpec& signal, double threshold,
                             int reps, std::uint64_t seed, int workers = 1);

// Type-I estimate plus (1 - power) at the given constant-A signal.
double estimate_risk(TestId test, const ModelParams& params,
                     const SignalSpec& signal, double threshold, int reps,
                     std::uint64_t seed, int workers = 1);

// Calibrates once, then fills every (alpha, strength) cell. Cells whose
// strength saturates (tanh scale, target >= 1) are emitted with NaN power,
// not dropped. Deterministic for a given config regardless of workers.
PowerGrid run_grid(const SimConfig& config);

enum class GridFormat { csv, json };

// CSV: header exactly "alpha,strength,s,A,power,ci", one row per cell,
// UTF-8, LF line endings; carries the cells only (the schema has no room for
// config/threshold/boundary). JSON: object with top-level keys
// {"config","cells","threshold","boundary"}; full fidelity. All numbers are
// written with 17 significant digits; NaN serializes as "nan" in CSV and
// null in JSON.
void persist_grid(const PowerGrid& grid, const std::string& path,
                  GridFormat format);
PowerGrid load_grid(const std::string& path);

} // namespace betascan
