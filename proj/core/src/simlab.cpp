#include "betascan/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "betascan/error.hpp"
#include "betascan/rng.hpp"

namespace betascan {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int resolve_workers(int workers, std::int64_t jobs) {
    int w = workers;
    if (w <= 0) w = static_cast<int>(std::thread::hardware_concurrency());
    w = std::clamp(w, 1, 256);
    return static_cast<int>(
        std::min<std::int64_t>(w, std::max<std::int64_t>(jobs, 1)));
}

// Runs job(i) for i in [0, count) across `workers` threads. Jobs write to
// disjoint slots, so the partition never affects results.
template <typename Job>
void parallel_for(std::int64_t count, int workers, Job&& job) {
    if (workers <= 1) {
        for (std::int64_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (std::int64_t i = next.fetch_add(1); i < count;
             i = next.fetch_add(1))
            job(i);
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

bool nan_eq(double a, double b) {
    return (std::isnan(a) && std::isnan(b)) || a == b;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt17_json(double x) {
    if (std::isnan(x)) return "null";
    return fmt17(x);
}

const char* mode_name(StrengthMode mode) {
    return mode == StrengthMode::dense_r ? "dense_r" : "sparse_C";
}

StrengthMode mode_from_name(const std::string& name) {
    if (name == "dense_r") return StrengthMode::dense_r;
    if (name == "sparse_C") return StrengthMode::sparse_C;
    throw std::invalid_argument("unknown strength mode: " + name);
}

const char* scale_name(StrengthScale scale) {
    return scale == StrengthScale::raw ? "raw" : "tanh";
}

StrengthScale scale_from_name(const std::string& name) {
    if (name == "raw") return StrengthScale::raw;
    if (name == "tanh") return StrengthScale::tanh_scale;
    throw std::invalid_argument("unknown strength scale: " + name);
}

void append_json_doubles(std::string& out, const std::vector<double>& xs) {
    out += '[';
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += fmt17_json(xs[i]);
    }
    out += ']';
}

PowerGrid grid_from_json(const nlohmann::json& j) {
    PowerGrid grid;
    const auto& jc = j.at("config");
    grid.config.params.n = jc.at("n").get<std::int64_t>();
    grid.config.params.lambda = jc.at("lambda").get<double>();
    grid.config.test = test_from_name(jc.at("test").get<std::string>());
    grid.config.level = jc.at("level").get<double>();
    grid.config.calib_reps = jc.at("calib_reps").get<int>();
    grid.config.power_reps = jc.at("power_reps").get<int>();
    grid.config.master_seed = jc.at("master_seed").get<std::uint64_t>();
    grid.config.alpha_grid = jc.at("alpha_grid").get<std::vector<double>>();
    grid.config.strength_grid =
        jc.at("strength_grid").get<std::vector<double>>();
    grid.config.mode = mode_from_name(jc.at("mode").get<std::string>());
    grid.config.scale = scale_from_name(jc.at("scale").get<std::string>());
    grid.threshold = j.at("threshold").get<double>();
    for (const auto& jcell : j.at("cells")) {
        PowerCell cell;
        cell.alpha = jcell.at("alpha").get<double>();
        cell.strength = jcell.at("strength").get<double>();
        cell.s = jcell.at("s").get<std::int64_t>();
        auto opt = [&jcell](const char* key) {
            const auto& v = jcell.at(key);
            return v.is_null() ? kNaN : v.get<double>();
        };
        cell.A = opt("A");
        cell.power = opt("power");
        cell.ci = opt("ci");
        grid.cells.push_back(cell);
    }
    for (const auto& jb : j.at("boundary"))
        grid.boundary.push_back(
            {jb.at("alpha").get<double>(), jb.at("c").get<double>()});
    return grid;
}

PowerGrid grid_from_csv(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line) || line != "alpha,strength,s,A,power,ci")
        throw io_error(path, "grid csv: unexpected header");
    PowerGrid grid;
    grid.threshold = kNaN;  // csv carries cells only
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        double vals[6];
        for (int f = 0; f < 6; ++f) {
            if (!std::getline(row, field, ','))
                throw io_error(path, "grid csv: short row");
            vals[f] = std::strtod(field.c_str(), nullptr);
        }
        PowerCell cell;
        cell.alpha = vals[0];
        cell.strength = vals[1];
        cell.s = static_cast<std::int64_t>(vals[2]);
        cell.A = vals[3];
        cell.power = vals[4];
        cell.ci = vals[5];
        grid.cells.push_back(cell);
    }
    return grid;
}

} // namespace

const char* test_name(TestId test) {
    switch (test) {
        case TestId::total_degree: return "total_degree";
        case TestId::max_degree: return "max_degree";
        case TestId::higher_criticism: return "higher_criticism";
    }
    throw std::logic_error("test_name: unknown test id");
}

TestId test_from_name(const std::string& name) {
    if (name == "total_degree") return TestId::total_degree;
    if (name == "max_degree") return TestId::max_degree;
    if (name == "higher_criticism") return TestId::higher_criticism;
    throw std::invalid_argument("unknown test: " + name);
}

bool operator==(const PowerCell& a, const PowerCell& b) {
    return nan_eq(a.alpha, b.alpha) && nan_eq(a.strength, b.strength) &&
           a.s == b.s && nan_eq(a.A, b.A) && nan_eq(a.power, b.power) &&
           nan_eq(a.ci, b.ci);
}

bool operator==(const PowerGrid& a, const PowerGrid& b) {
    const SimConfig& ca = a.config;
    const SimConfig& cb = b.config;
    // workers is a run-local budget, not part of grid identity
    if (ca.params.n != cb.params.n || ca.params.lambda != cb.params.lambda ||
        ca.test != cb.test || ca.level != cb.level ||
        ca.calib_reps != cb.calib_reps || ca.power_reps != cb.power_reps ||
        ca.master_seed != cb.master_seed || ca.alpha_grid != cb.alpha_grid ||
        ca.strength_grid != cb.strength_grid || ca.mode != cb.mode ||
        ca.scale != cb.scale)
        return false;
    if (!nan_eq(a.threshold, b.threshold)) return false;
    if (a.cells != b.cells) return false;
    if (a.boundary.size() != b.boundary.size()) return false;
    for (std::size_t i = 0; i < a.boundary.size(); ++i)
        if (!nan_eq(a.boundary[i].alpha, b.boundary[i].alpha) ||
            !nan_eq(a.boundary[i].c, b.boundary[i].c))
            return false;
    return true;
}

double evaluate_statistic(TestId test, const GraphSample& sample,
                          const ModelParams& params,
                          const std::vector<NullHcMoments>& hc_table) {
    switch (test) {
        case TestId::total_degree:
            return total_degree_stat(sample, params);
        case TestId::max_degree:
            return static_cast<double>(max_degree_stat(sample));
        case TestId::higher_criticism:
            return hc_stat(hc_curve(sample, params, hc_table));
    }
    throw std::logic_error("evaluate_statistic: unknown test id");
}

std::vector<double> simulate_statistics(TestId test, const ModelParams& params,
                                        const SignalSpec& signal, int reps,
                                        std::uint64_t seed, int workers) {
    params.validate();
    if (reps < 1)
        throw std::domain_error("simulate_statistics: reps must be >= 1");
    const std::vector<NullHcMoments> hc_table =
        test == TestId::higher_criticism ? null_hc_table(params)
                                         : std::vector<NullHcMoments>{};
    std::vector<double> stats(static_cast<std::size_t>(reps));
    parallel_for(reps, resolve_workers(workers, reps), [&](std::int64_t i) {
        const std::uint64_t rep_seed =
            seed_mix({seed, static_cast<std::uint64_t>(i)});
        const GraphSample sample =
            sample_graph(params, signal, rep_seed, /*keep_edges=*/false);
        stats[static_cast<std::size_t>(i)] =
            evaluate_statistic(test, sample, params, hc_table);
    });
    return stats;
}

double empirical_upper_quantile(std::vector<double> values, double level) {
    if (values.empty())
        throw std::invalid_argument("empirical_upper_quantile: empty sample");
    if (!(level > 0.0) || !(level < 1.0))
        throw std::domain_error(
            "empirical_upper_quantile: level must lie in (0, 1)");
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    // smallest 1-based rank i with i/n >= 1 - level; the epsilon absorbs
    // roundoff when n (1 - level) is an exact integer
    auto rank = static_cast<std::int64_t>(std::ceil(n * (1.0 - level) - 1e-9));
    rank = std::clamp<std::int64_t>(rank, 1,
                                    static_cast<std::int64_t>(values.size()));
    return values[static_cast<std::size_t>(rank - 1)];
}

double calibrate(TestId test, const ModelParams& params, double level,
                 int reps, std::uint64_t seed, int workers) {
    if (reps < 20)
        throw std::domain_error(
            "calibrate: need at least 20 null replicates for a usable "
            "quantile");
    return empirical_upper_quantile(
        simulate_statistics(test, params, null_signal(), reps, seed, workers),
        level);
}

PowerEstimate estimate_power(TestId test, const ModelParams& params,
                             const SignalSpec& signal, double threshold,
                             int reps, std::uint64_t seed, int workers) {
    const std::vector<double> stats =
        simulate_statistics(test, params, signal, reps, seed, workers);
    std::int64_t hits = 0;
    for (double s : stats)
        if (s > threshold) ++hits;
    const double p =
        static_cast<double>(hits) / static_cast<double>(stats.size());
    PowerEstimate est;
    est.power = p;
    est.ci_halfwidth =
        1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(stats.size()));
    return est;
}

double estimate_risk(TestId test, const ModelParams& params,
                     const SignalSpec& signal, double threshold, int reps,
                     std::uint64_t seed, int workers) {
    const double type_one =
        estimate_power(test, params, null_signal(), threshold, reps,
                       seed_mix(seed, 0), workers)
            .power;
    const double power = estimate_power(test, params, signal, threshold, reps,
                                        seed_mix(seed, 1), workers)
                             .power;
    return type_one + (1.0 - power);
}

PowerGrid run_grid(const SimConfig& config) {
    config.params.validate();
    if (!(config.level > 0.0) || !(config.level < 1.0))
        throw std::domain_error("run_grid: level must lie in (0, 1)");
    if (config.power_reps < 1)
        throw std::domain_error("run_grid: power_reps must be >= 1");
    if (config.alpha_grid.empty() || config.strength_grid.empty())
        throw std::domain_error("run_grid: empty alpha or strength grid");

    const auto test_code = static_cast<std::uint64_t>(config.test);
    const int workers = resolve_workers(config.workers,
                                        std::numeric_limits<std::int64_t>::max());

    PowerGrid grid;
    grid.config = config;
    grid.threshold =
        calibrate(config.test, config.params, config.level, config.calib_reps,
                  seed_mix({config.master_seed, test_code, 0xca11b}), workers);

    const std::vector<NullHcMoments> hc_table =
        config.test == TestId::higher_criticism
            ? null_hc_table(config.params)
            : std::vector<NullHcMoments>{};

    const auto n_alpha = static_cast<std::int64_t>(config.alpha_grid.size());
    const auto n_strength =
        static_cast<std::int64_t>(config.strength_grid.size());
    grid.cells.assign(static_cast<std::size_t>(n_alpha * n_strength),
                      PowerCell{});

    parallel_for(n_alpha * n_strength, workers, [&](std::int64_t idx) {
        const std::int64_t ia = idx / n_strength;
        const std::int64_t is = idx % n_strength;
        PowerCell& cell = grid.cells[static_cast<std::size_t>(idx)];
        cell.alpha = config.alpha_grid[static_cast<std::size_t>(ia)];
        cell.strength = config.strength_grid[static_cast<std::size_t>(is)];
        cell.s = sparsity_from_alpha(config.params, cell.alpha);
        double A = 0.0;
        try {
            A = strength(config.params, config.mode, cell.strength,
                         config.scale);
        } catch (const saturation_error&) {
            cell.A = kNaN;
            cell.power = kNaN;
            cell.ci = kNaN;
            return;
        }
        cell.A = A;
        const SignalSpec signal =
            make_signal_from_s(config.params, cell.s, A, Placement::first());
        std::int64_t hits = 0;
        for (int rep = 0; rep < config.power_reps; ++rep) {
            const std::uint64_t rep_seed = seed_mix(
                {config.master_seed, test_code, static_cast<std::uint64_t>(ia),
                 static_cast<std::uint64_t>(is),
                 static_cast<std::uint64_t>(rep)});
            const GraphSample sample = sample_graph(config.params, signal,
                                                    rep_seed, false);
            if (evaluate_statistic(config.test, sample, config.params,
                                   hc_table) > grid.threshold)
                ++hits;
        }
        const double p = static_cast<double>(hits) /
                         static_cast<double>(config.power_reps);
        cell.power = p;
        cell.ci = 1.96 * std::sqrt(p * (1.0 - p) /
                                   static_cast<double>(config.power_reps));
    });

    const double theta = config.params.theta();
    for (double alpha : config.alpha_grid) {
        const RegimeConstants rc = regime_constants(alpha, theta);
        double c = 0.0;
        if (config.mode == StrengthMode::dense_r)
            c = rc.c_dense;
        else
            c = config.test == TestId::max_degree ? rc.c_max : rc.c_sparse;
        grid.boundary.push_back({alpha, c});
    }
    return grid;
}

void persist_grid(const PowerGrid& grid, const std::string& path,
                  GridFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error(path, "cannot open grid file for writing");

    if (format == GridFormat::csv) {
        out << "alpha,strength,s,A,power,ci\n";
        for (const PowerCell& cell : grid.cells)
            out << fmt17(cell.alpha) << ',' << fmt17(cell.strength) << ','
                << cell.s << ',' << fmt17(cell.A) << ',' << fmt17(cell.power)
                << ',' << fmt17(cell.ci) << '\n';
    } else {
        const SimConfig& c = grid.config;
        std::string j;
        j.reserve(grid.cells.size() * 96 + 1024);
        j += "{\"config\":{\"n\":" + std::to_string(c.params.n);
        j += ",\"lambda\":" + fmt17_json(c.params.lambda);
        j += ",\"test\":\"" + std::string(test_name(c.test)) + "\"";
        j += ",\"level\":" + fmt17_json(c.level);
        j += ",\"calib_reps\":" + std::to_string(c.calib_reps);
        j += ",\"power_reps\":" + std::to_string(c.power_reps);
        j += ",\"master_seed\":" + std::to_string(c.master_seed);
        j += ",\"alpha_grid\":";
        append_json_doubles(j, c.alpha_grid);
        j += ",\"strength_grid\":";
        append_json_doubles(j, c.strength_grid);
        j += ",\"mode\":\"" + std::string(mode_name(c.mode)) + "\"";
        j += ",\"scale\":\"" + std::string(scale_name(c.scale)) + "\"}";
        j += ",\"threshold\":" + fmt17_json(grid.threshold);
        j += ",\"cells\":[";
        for (std::size_t i = 0; i < grid.cells.size(); ++i) {
            const PowerCell& cell = grid.cells[i];
            if (i) j += ',';
            j += "{\"alpha\":" + fmt17_json(cell.alpha);
            j += ",\"strength\":" + fmt17_json(cell.strength);
            j += ",\"s\":" + std::to_string(cell.s);
            j += ",\"A\":" + fmt17_json(cell.A);
            j += ",\"power\":" + fmt17_json(cell.power);
            j += ",\"ci\":" + fmt17_json(cell.ci) + "}";
        }
        j += "],\"boundary\":[";
        for (std::size_t i = 0; i < grid.boundary.size(); ++i) {
            if (i) j += ',';
            j += "{\"alpha\":" + fmt17_json(grid.boundary[i].alpha);
            j += ",\"c\":" + fmt17_json(grid.boundary[i].c) + "}";
        }
        j += "]}\n";
        out << j;
    }
    out.flush();
    if (!out) throw io_error(path, "short write on grid file");
}

PowerGrid load_grid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error(path, "cannot open grid file");
    int ch;
    while ((ch = in.peek()) != std::char_traits<char>::eof() &&
           std::isspace(ch))
        in.get();
    if (in.peek() == '{') {
        try {
            nlohmann::json j;
            in >> j;
            return grid_from_json(j);
        } catch (const nlohmann::json::exception& e) {
            throw io_error(path,
                           std::string("malformed grid json: ") + e.what());
        }
    }
    return grid_from_csv(in, path);
}

} // namespace betascan
