// Command-line front door: thin adapters from subcommands to the library.
// Exit codes: 0 success, 2 usage error, 1 runtime error. stdout carries data
// (CSV or key/value lines, JSON with --json); stderr carries the resolved
// config echo and diagnostics. Every run is deterministic in argv: seeds are
// explicit flags with fixed defaults, never clocks.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "betascan/binomial.hpp"
#include "betascan/error.hpp"
#include "betascan/graph_model.hpp"
#include "betascan/lr_oracle.hpp"
#include "betascan/rng.hpp"
#include "betascan/simlab.hpp"
#include "betascan/theory.hpp"

namespace {

using namespace betascan;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt17_json(double x) {
    if (std::isnan(x)) return "null";
    return fmt17(x);
}

// Grid spec: either a comma list "0.1,0.2,0.3" or a range "start:step:stop"
// (stop inclusive up to 1e-9 slack). Returns false on malformed input.
bool parse_grid_spec(const std::string& spec, std::vector<double>& out) {
    out.clear();
    auto to_double = [](const std::string& tok, double& v) {
        char* end = nullptr;
        v = std::strtod(tok.c_str(), &end);
        return end && *end == '\0' && end != tok.c_str();
    };
    if (spec.find(':') != std::string::npos) {
        std::istringstream in(spec);
        std::string a, b, c;
        if (!std::getline(in, a, ':') || !std::getline(in, b, ':') ||
            !std::getline(in, c))
            return false;
        double start = 0, step = 0, stop = 0;
        if (!to_double(a, start) || !to_double(b, step) || !to_double(c, stop))
            return false;
        if (step <= 0 || stop < start) return false;
        for (double x = start; x <= stop + 1e-9; x += step) out.push_back(x);
        return !out.empty();
    }
    std::istringstream in(spec);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        double v = 0;
        if (!to_double(tok, v)) return false;
        out.push_back(v);
    }
    return !out.empty();
}

std::string describe_grid(const std::vector<double>& grid) {
    std::string s = "[";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i == 3 && grid.size() > 4) {
            s += "...," + fmt17(grid.back());
            break;
        }
        if (i) s += ",";
        s += fmt17(grid[i]);
    }
    s += "] (" + std::to_string(grid.size()) + ")";
    return s;
}

GridFormat format_from_name(const std::string& name) {
    return name == "json" ? GridFormat::json : GridFormat::csv;
}

StrengthScale scale_from_flag(const std::string& name) {
    return name == "tanh" ? StrengthScale::tanh_scale : StrengthScale::raw;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error(path, "cannot open for writing");
    return out;
}

// ---- sample ----------------------------------------------------------

struct SampleArgs {
    std::int64_t n = 100;
    double lambda = 25.0;
    double alpha = 0.0;
    double big_a = 0.0;
    std::string placement = "first";
    std::uint64_t seed = 1;
    std::string edges_out;
};

int run_sample(const SampleArgs& a) {
    ModelParams params{a.n, a.lambda};
    SignalSpec signal;
    if (a.big_a != 0.0) {
        Placement placement = a.placement == "random"
                                  ? Placement::random(seed_mix({a.seed, 0x97ace}))
                                  : Placement::first();
        signal = make_signal_from_alpha(params, a.alpha, a.big_a, placement);
    }
    std::cerr << "config: subcommand=sample n=" << a.n
              << " lambda=" << fmt17(a.lambda) << " alpha=" << fmt17(a.alpha)
              << " A=" << fmt17(a.big_a) << " s=" << signal.s
              << " placement=" << a.placement << " seed=" << a.seed
              << (a.edges_out.empty() ? "" : " edges_out=" + a.edges_out)
              << "\n";
    bool keep_edges = !a.edges_out.empty();
    GraphSample sample = sample_graph(params, signal, a.seed, keep_edges);
    write_degrees_csv(sample, std::cout);
    if (keep_edges) {
        auto out = open_out(a.edges_out);
        write_edges_csv(sample, out);
        out.flush();
        if (!out) throw io_error(a.edges_out, "write failed");
    }
    return 0;
}

// ---- calibrate -------------------------------------------------------

struct CalibrateArgs {
    std::string test = "total_degree";
    std::int64_t n = 100;
    double lambda = 25.0;
    double level = 0.05;
    int reps = 100;
    std::uint64_t seed = 1;
    int workers = 0;
    bool json = false;
};

int run_calibrate(const CalibrateArgs& a) {
    ModelParams params{a.n, a.lambda};
    TestId test = test_from_name(a.test);
    std::cerr << "config: subcommand=calibrate test=" << a.test << " n=" << a.n
              << " lambda=" << fmt17(a.lambda) << " level=" << fmt17(a.level)
              << " reps=" << a.reps << " seed=" << a.seed
              << " workers=" << a.workers << "\n";
    double threshold =
        calibrate(test, params, a.level, a.reps, a.seed, a.workers);
    if (a.json)
        std::cout << "{\"threshold\":" << fmt17_json(threshold) << "}\n";
    else
        std::cout << "threshold " << fmt17(threshold) << "\n";
    return 0;
}

// ---- power -----------------------------------------------------------

struct PowerArgs {
    std::string test = "total_degree";
    std::int64_t n = 100;
    double lambda = 25.0;
    double alpha = 0.0;
    double big_a = 0.0;
    double r = 0.0;
    double c = 0.0;
    bool has_a = false, has_r = false, has_c = false;
    std::string scale = "raw";
    std::string placement = "first";
    double level = 0.05;
    int calib_reps = 100;
    int power_reps = 100;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string out;
    std::string format = "csv";
    bool json = false;
};

void print_power_cell(const PowerArgs& a, double threshold,
                      const PowerCell& cell) {
    if (a.json) {
        std::cout << "{\"threshold\":" << fmt17_json(threshold)
                  << ",\"s\":" << cell.s << ",\"A\":" << fmt17_json(cell.A)
                  << ",\"power\":" << fmt17_json(cell.power)
                  << ",\"ci\":" << fmt17_json(cell.ci) << "}\n";
        return;
    }
    std::cout << "threshold " << fmt17(threshold) << "\n"
              << "s " << cell.s << "\n"
              << "A " << fmt17(cell.A) << "\n"
              << "power " << fmt17(cell.power) << "\n"
              << "ci " << fmt17(cell.ci) << "\n";
}

int run_power(const PowerArgs& a) {
    ModelParams params{a.n, a.lambda};
    TestId test = test_from_name(a.test);
    const char* strength_kind = a.has_a ? "A" : (a.has_r ? "r" : "C");
    double strength_value = a.has_a ? a.big_a : (a.has_r ? a.r : a.c);
    std::cerr << "config: subcommand=power test=" << a.test << " n=" << a.n
              << " lambda=" << fmt17(a.lambda) << " alpha=" << fmt17(a.alpha)
              << " " << strength_kind << "=" << fmt17(strength_value)
              << " scale=" << a.scale << " level=" << fmt17(a.level)
              << " calib_reps=" << a.calib_reps
              << " power_reps=" << a.power_reps << " seed=" << a.seed
              << " workers=" << a.workers << "\n";

    if (!a.has_a) {
        // Boundary-relative strength: run a 1x1 grid so the result is the
        // same cell a full grid would produce at indices (0, 0).
        SimConfig cfg;
        cfg.params = params;
        cfg.test = test;
        cfg.level = a.level;
        cfg.calib_reps = a.calib_reps;
        cfg.power_reps = a.power_reps;
        cfg.master_seed = a.seed;
        cfg.alpha_grid = {a.alpha};
        cfg.strength_grid = {strength_value};
        cfg.mode = a.has_r ? StrengthMode::dense_r : StrengthMode::sparse_C;
        cfg.scale = scale_from_flag(a.scale);
        cfg.workers = a.workers;
        PowerGrid grid = run_grid(cfg);
        print_power_cell(a, grid.threshold, grid.cells.at(0));
        if (!a.out.empty()) persist_grid(grid, a.out, format_from_name(a.format));
        return 0;
    }

    // Direct A: calibrate and estimate with the same seed chains a 1x1 grid
    // would use, so both paths of this subcommand agree.
    auto code = static_cast<std::uint64_t>(test);
    double threshold = calibrate(test, params, a.level, a.calib_reps,
                                 seed_mix({a.seed, code, 0xca11b}), a.workers);
    Placement placement = a.placement == "random"
                              ? Placement::random(seed_mix({a.seed, 0x97ace}))
                              : Placement::first();
    SignalSpec signal =
        make_signal_from_alpha(params, a.alpha, a.big_a, placement);
    PowerEstimate est =
        estimate_power(test, params, signal, threshold, a.power_reps,
                       seed_mix({a.seed, code, 0, 0}), a.workers);
    PowerCell cell{a.alpha, std::numeric_limits<double>::quiet_NaN(), signal.s,
                   a.big_a, est.power, est.ci_halfwidth};
    print_power_cell(a, threshold, cell);
    if (!a.out.empty()) {
        SimConfig cfg;
        cfg.params = params;
        cfg.test = test;
        cfg.level = a.level;
        cfg.calib_reps = a.calib_reps;
        cfg.power_reps = a.power_reps;
        cfg.master_seed = a.seed;
        cfg.alpha_grid = {a.alpha};
        cfg.strength_grid = {cell.strength};
        cfg.workers = a.workers;
        PowerGrid grid{cfg, threshold, {cell}, {}};
        persist_grid(grid, a.out, format_from_name(a.format));
    }
    return 0;
}

// ---- grid ------------------------------------------------------------

struct GridArgs {
    std::string test = "total_degree";
    std::string preset;
    std::int64_t n = 100;
    double lambda = 25.0;
    std::string alpha_spec;
    std::string strength_spec;
    std::string mode;
    std::string scale = "raw";
    double level = 0.05;
    int calib_reps = 100;
    int power_reps = 100;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string out;
    std::string format = "csv";
};

int run_grid_cmd(const GridArgs& a) {
    SimConfig cfg;
    cfg.params = ModelParams{a.n, a.lambda};
    cfg.test = test_from_name(a.test);
    cfg.level = a.level;
    cfg.calib_reps = a.calib_reps;
    cfg.power_reps = a.power_reps;
    cfg.master_seed = a.seed;
    cfg.scale = scale_from_flag(a.scale);
    cfg.workers = a.workers;

    std::string mode = a.mode;
    if (a.preset == "dense") {
        parse_grid_spec("0.025:0.025:0.475", cfg.alpha_grid);
        parse_grid_spec("0.025:0.025:0.475", cfg.strength_grid);
        if (mode.empty()) mode = "dense_r";
    } else if (a.preset == "sparse") {
        parse_grid_spec("0.525:0.025:0.975", cfg.alpha_grid);
        parse_grid_spec("0.8:0.8:16", cfg.strength_grid);
        if (mode.empty()) mode = "sparse_C";
    }
    if (!a.alpha_spec.empty() && !parse_grid_spec(a.alpha_spec, cfg.alpha_grid)) {
        std::cerr << "error: --alpha-grid: bad grid spec '" << a.alpha_spec
                  << "'\n";
        return 2;
    }
    if (!a.strength_spec.empty() &&
        !parse_grid_spec(a.strength_spec, cfg.strength_grid)) {
        std::cerr << "error: --strength-grid: bad grid spec '"
                  << a.strength_spec << "'\n";
        return 2;
    }
    if (cfg.alpha_grid.empty() || cfg.strength_grid.empty() || mode.empty()) {
        std::cerr << "error: grid needs --preset or all of --alpha-grid, "
                     "--strength-grid, --mode\n";
        return 2;
    }
    cfg.mode = mode == "dense_r" ? StrengthMode::dense_r : StrengthMode::sparse_C;

    std::cerr << "config: subcommand=grid test=" << a.test << " n=" << a.n
              << " lambda=" << fmt17(a.lambda)
              << " alpha_grid=" << describe_grid(cfg.alpha_grid)
              << " strength_grid=" << describe_grid(cfg.strength_grid)
              << " mode=" << mode << " scale=" << a.scale
              << " level=" << fmt17(a.level) << " calib_reps=" << a.calib_reps
              << " power_reps=" << a.power_reps << " seed=" << a.seed
              << " workers=" << a.workers << " out=" << a.out
              << " format=" << a.format << "\n";

    PowerGrid grid = run_grid(cfg);
    persist_grid(grid, a.out, format_from_name(a.format));
    std::cerr << "wrote " << grid.cells.size() << " cells to " << a.out
              << "\n";
    return 0;
}

// ---- boundary --------------------------------------------------------

struct BoundaryArgs {
    double theta = 0.0;
    double alpha_step = 0.025;
    std::string out;
};

int run_boundary(const BoundaryArgs& a) {
    std::cerr << "config: subcommand=boundary theta=" << fmt17(a.theta)
              << " alpha_step=" << fmt17(a.alpha_step)
              << (a.out.empty() ? "" : " out=" + a.out) << "\n";
    if (a.out.empty()) {
        write_boundary_csv(std::cout, a.theta, a.alpha_step);
    } else {
        auto out = open_out(a.out);
        write_boundary_csv(out, a.theta, a.alpha_step);
        out.flush();
        if (!out) throw io_error(a.out, "write failed");
    }
    return 0;
}

// ---- oracle ----------------------------------------------------------

struct OracleArgs {
    std::int64_t n = 4;
    std::int64_t s = 1;
    double big_a = 0.0;
    double lambda = 1.0;
    bool json = false;
};

int run_oracle(const OracleArgs& a) {
    std::cerr << "config: subcommand=oracle n=" << a.n << " s=" << a.s
              << " A=" << fmt17(a.big_a) << " lambda=" << fmt17(a.lambda)
              << "\n";
    auto formula = second_moment_formula(a.n, a.s, a.big_a, a.lambda);
    bool enumerable = a.n <= 6;
    double e1 = 0, e2 = 0;
    if (enumerable) {
        e1 = moment_enum(a.n, a.s, a.big_a, a.lambda, 1).value;
        e2 = moment_enum(a.n, a.s, a.big_a, a.lambda, 2).value;
    } else {
        std::cerr << "enumeration skipped: n > 6\n";
    }
    if (a.json) {
        std::cout << "{\"formula_second_moment\":" << fmt17_json(formula.value);
        if (enumerable)
            std::cout << ",\"enum_first_moment\":" << fmt17_json(e1)
                      << ",\"enum_second_moment\":" << fmt17_json(e2);
        else
            std::cout << ",\"enum_first_moment\":null"
                      << ",\"enum_second_moment\":null";
        std::cout << "}\n";
        return 0;
    }
    std::cout << "formula_second_moment " << fmt17(formula.value) << "\n";
    if (enumerable) {
        std::cout << "enum_first_moment " << fmt17(e1) << "\n"
                  << "enum_second_moment " << fmt17(e2) << "\n";
    }
    return 0;
}

// ---- rates -----------------------------------------------------------

struct RatesArgs {
    double c = 1.0;
    std::string n_list = "1000,1000000";
    bool json = false;
};

int run_rates(const RatesArgs& a) {
    std::vector<double> ns;
    if (!parse_grid_spec(a.n_list, ns)) {
        std::cerr << "error: --n-list: bad list '" << a.n_list << "'\n";
        return 2;
    }
    std::cerr << "config: subcommand=rates C=" << fmt17(a.c)
              << " n_list=" << describe_grid(ns) << "\n";
    double target = a.c * a.c / 2.0;
    if (a.json) std::cout << "[";
    else std::cout << "n,exponent,target,gap\n";
    for (std::size_t i = 0; i < ns.size(); ++i) {
        auto n = static_cast<std::int64_t>(ns[i]);
        double logn = std::log(static_cast<double>(n));
        double p = logn * logn / static_cast<double>(n);
        double exponent = tail_rate_exponent(n, p, a.c);
        double gap = std::fabs(exponent - target);
        if (a.json) {
            std::cout << (i ? "," : "") << "{\"n\":" << n
                      << ",\"exponent\":" << fmt17_json(exponent)
                      << ",\"target\":" << fmt17_json(target)
                      << ",\"gap\":" << fmt17_json(gap) << "}";
        } else {
            std::cout << n << "," << fmt17(exponent) << "," << fmt17(target)
                      << "," << fmt17(gap) << "\n";
        }
    }
    if (a.json) std::cout << "]\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"betascan: sparse beta-model signal detection toolkit"};
    app.require_subcommand(1);

    const std::vector<std::string> test_names{"total_degree", "max_degree",
                                              "higher_criticism"};

    SampleArgs sample_args;
    auto* sample = app.add_subcommand(
        "sample", "sample one graph, degree CSV to stdout");
    sample->add_option("--n", sample_args.n, "vertex count")->required();
    sample->add_option("--lambda", sample_args.lambda, "graph sparsity")
        ->required();
    sample->add_option("--alpha", sample_args.alpha,
                       "sparsity exponent, s = round(n^(1-alpha))");
    sample->add_option("--A", sample_args.big_a, "signal strength (0 = null)");
    sample->add_option("--placement", sample_args.placement,
                       "support placement")
        ->check(CLI::IsMember({"first", "random"}));
    sample->add_option("--seed", sample_args.seed, "sampler seed");
    sample->add_option("--edges-out", sample_args.edges_out,
                       "also write edge list CSV to this path");

    CalibrateArgs calibrate_args;
    auto* calib = app.add_subcommand(
        "calibrate", "empirical null quantile threshold");
    calib->add_option("--test", calibrate_args.test, "test statistic")
        ->required()
        ->check(CLI::IsMember(test_names));
    calib->add_option("--n", calibrate_args.n, "vertex count")->required();
    calib->add_option("--lambda", calibrate_args.lambda, "graph sparsity")
        ->required();
    calib->add_option("--level", calibrate_args.level, "test level");
    calib->add_option("--reps", calibrate_args.reps, "null replicates");
    calib->add_option("--seed", calibrate_args.seed, "seed");
    calib->add_option("--workers", calibrate_args.workers,
                      "worker threads (0 = auto)");
    calib->add_flag("--json", calibrate_args.json, "JSON output");

    PowerArgs power_args;
    auto* power = app.add_subcommand("power", "power at one (alpha, strength)");
    power->add_option("--test", power_args.test, "test statistic")
        ->required()
        ->check(CLI::IsMember(test_names));
    power->add_option("--n", power_args.n, "vertex count")->required();
    power->add_option("--lambda", power_args.lambda, "graph sparsity")
        ->required();
    power->add_option("--alpha", power_args.alpha, "sparsity exponent")
        ->required();
    auto* opt_a = power->add_option("--A", power_args.big_a,
                                    "signal strength directly");
    auto* opt_r = power->add_option("--r", power_args.r,
                                    "dense strength target n^(-r)/sqrt(lambda)");
    auto* opt_c = power->add_option(
        "--C", power_args.c, "sparse strength target sqrt(C log n / lambda)");
    power->add_option("--scale", power_args.scale, "strength scale for --r/--C")
        ->check(CLI::IsMember({"raw", "tanh"}));
    power->add_option("--placement", power_args.placement,
                      "support placement (--A only)")
        ->check(CLI::IsMember({"first", "random"}));
    power->add_option("--level", power_args.level, "test level");
    power->add_option("--calib-reps", power_args.calib_reps,
                      "null replicates for calibration");
    power->add_option("--power-reps", power_args.power_reps,
                      "alternative replicates");
    power->add_option("--seed", power_args.seed, "master seed");
    power->add_option("--workers", power_args.workers,
                      "worker threads (0 = auto)");
    power->add_option("--out", power_args.out, "persist single-cell grid");
    power->add_option("--format", power_args.format, "output file format")
        ->check(CLI::IsMember({"csv", "json"}));
    power->add_flag("--json", power_args.json, "JSON output");

    GridArgs grid_args;
    auto* grid = app.add_subcommand("grid", "(alpha, strength) power grid");
    grid->add_option("--test", grid_args.test, "test statistic")
        ->required()
        ->check(CLI::IsMember(test_names));
    grid->add_option("--preset", grid_args.preset,
                     "dense: alpha,r in 0.025:0.025:0.475; sparse: alpha in "
                     "0.525:0.025:0.975, C in 0.8:0.8:16")
        ->check(CLI::IsMember({"dense", "sparse"}));
    grid->add_option("--n", grid_args.n, "vertex count");
    grid->add_option("--lambda", grid_args.lambda, "graph sparsity");
    grid->add_option("--alpha-grid", grid_args.alpha_spec,
                     "comma list or start:step:stop");
    grid->add_option("--strength-grid", grid_args.strength_spec,
                     "comma list or start:step:stop");
    grid->add_option("--mode", grid_args.mode, "strength mode")
        ->check(CLI::IsMember({"dense_r", "sparse_C"}));
    grid->add_option("--scale", grid_args.scale, "strength scale")
        ->check(CLI::IsMember({"raw", "tanh"}));
    grid->add_option("--level", grid_args.level, "test level");
    grid->add_option("--calib-reps", grid_args.calib_reps,
                     "null replicates for calibration");
    grid->add_option("--power-reps", grid_args.power_reps,
                     "alternative replicates per cell");
    grid->add_option("--seed", grid_args.seed, "master seed");
    grid->add_option("--workers", grid_args.workers,
                     "worker threads (0 = auto)");
    grid->add_option("--out", grid_args.out, "output path")->required();
    grid->add_option("--format", grid_args.format, "output file format")
        ->check(CLI::IsMember({"csv", "json"}));

    BoundaryArgs boundary_args;
    auto* boundary = app.add_subcommand(
        "boundary", "detection boundary curves CSV");
    boundary->add_option("--theta", boundary_args.theta,
                         "null edge probability scale");
    boundary->add_option("--alpha-step", boundary_args.alpha_step,
                         "alpha grid step");
    boundary->add_option("--out", boundary_args.out,
                         "output path (default stdout)");

    OracleArgs oracle_args;
    auto* oracle = app.add_subcommand(
        "oracle", "likelihood-ratio second moment, formula vs enumeration");
    oracle->add_option("--n", oracle_args.n, "vertex count")->required();
    oracle->add_option("--s", oracle_args.s, "support size")->required();
    oracle->add_option("--A", oracle_args.big_a, "signal strength")->required();
    oracle->add_option("--lambda", oracle_args.lambda, "graph sparsity")
        ->required();
    oracle->add_flag("--json", oracle_args.json, "JSON output");

    RatesArgs rates_args;
    auto* rates = app.add_subcommand(
        "rates", "binomial tail rate exponents vs C^2/2");
    rates->add_option("--C", rates_args.c, "tail offset multiplier")
        ->required();
    rates->add_option("--n-list", rates_args.n_list, "comma list of n")
        ->required();
    rates->add_flag("--json", rates_args.json, "JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (power->parsed()) {
        int given = (opt_a->count() ? 1 : 0) + (opt_r->count() ? 1 : 0) +
                    (opt_c->count() ? 1 : 0);
        if (given != 1) {
            std::cerr << "error: power: exactly one of --A, --r, --C is "
                         "required\n";
            return 2;
        }
        power_args.has_a = opt_a->count() > 0;
        power_args.has_r = opt_r->count() > 0;
        power_args.has_c = opt_c->count() > 0;
    }

    try {
        if (sample->parsed()) return run_sample(sample_args);
        if (calib->parsed()) return run_calibrate(calibrate_args);
        if (power->parsed()) return run_power(power_args);
        if (grid->parsed()) return run_grid_cmd(grid_args);
        if (boundary->parsed()) return run_boundary(boundary_args);
        if (oracle->parsed()) return run_oracle(oracle_args);
        if (rates->parsed()) return run_rates(rates_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
