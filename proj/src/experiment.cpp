#include "aircomp/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

namespace aircomp {

std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

std::string axis_label(ExperimentSpec::Axis axis, double value) {
    switch (axis) {
        case ExperimentSpec::Axis::noise_dbm: return "noise" + csv_num(value) + "dBm";
        case ExperimentSpec::Axis::power_dbm: return "P" + csv_num(value) + "dBm";
        default: return "T" + csv_num(value);
    }
}

Scenario scenario_at(const ExperimentSpec& spec, const Scenario* base, double value, std::uint64_t seed) {
    if (spec.paper_default) {
        PaperDefaultOptions opt = spec.defaults;
        switch (spec.axis) {
            case ExperimentSpec::Axis::mission_t: opt.duration_s = value; break;
            case ExperimentSpec::Axis::noise_dbm: opt.noise_dbm = value; break;
            case ExperimentSpec::Axis::power_dbm: opt.p_a_dbm = opt.p_b_dbm = value; break;
            case ExperimentSpec::Axis::none: break;
        }
        return paper_default_scenario(seed, opt);
    }
    Scenario s = *base;
    s.rng_seed = seed;
    switch (spec.axis) {
        case ExperimentSpec::Axis::mission_t:
            s.mission = make_mission(value, s.mission.slot_s);
            break;
        case ExperimentSpec::Axis::noise_dbm:
            s.channel.sigma2_w = dbm_to_watts(value);
            break;
        case ExperimentSpec::Axis::power_dbm:
            for (std::size_t i = 0; i < s.sensors.count(); ++i) {
                s.sensors.peak_power_w[i] = dbm_to_watts(value);
                s.sensors.avg_power_w[i] = 0.5 * s.sensors.peak_power_w[i];
            }
            break;
        case ExperimentSpec::Axis::none:
            break;
    }
    return s;
}

struct RunTask {
    Scheme scheme;
    double sweep_value;
    std::uint64_t seed;
    std::string label;
};

struct RunResult {
    double final_mse = 0.0;
    int iterations = 0;
    bool failed = false;
    std::string error;
};

void write_trace_csv(const std::string& path, const BcdTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "iter,mse,wall_ms\n";
    out << "0," << csv_num(trace.initial_mse) << ",0\n";
    for (std::size_t r = 0; r < trace.iters.size(); ++r) {
        out << r + 1 << ',' << csv_num(trace.iters[r].mse) << ',' << csv_num(trace.iters[r].wall_ms) << '\n';
    }
}

void write_traj_csv(const std::string& path, const BcdTrace& trace, const Scenario& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "n,t_s,x_m,y_m\n";
    for (std::size_t n = 0; n < trace.trajectory.q.size(); ++n) {
        out << n << ',' << csv_num(double(n) * s.mission.slot_s) << ','
            << csv_num(trace.trajectory.q[n].x) << ',' << csv_num(trace.trajectory.q[n].y) << '\n';
    }
}

}  // namespace

int cmd_run(const ExperimentSpec& spec) {
    if (spec.schemes.empty()) {
        std::cerr << "error: scheme list is empty\n";
        return 2;
    }
    if (spec.seeds.empty()) {
        std::cerr << "error: seed list is empty\n";
        return 2;
    }
    for (double v : spec.sweep_values) {
        if (!std::isfinite(v)) {
            std::cerr << "error: sweep values must be finite\n";
            return 2;
        }
    }

    Scenario base;
    if (!spec.paper_default) {
        try {
            base = load_scenario_file(spec.config_path);
        } catch (const ConfigError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }

    std::vector<double> points = spec.sweep_values;
    if (points.empty()) {
        points.push_back(spec.axis == ExperimentSpec::Axis::none
                             ? (spec.paper_default ? spec.defaults.duration_s : base.mission.duration_s)
                             : 0.0);
        if (spec.axis != ExperimentSpec::Axis::none) {
            std::cerr << "error: sweep axis given without sweep values\n";
            return 2;
        }
    }

    // Validate every scenario the sweep will touch before writing anything.
    for (double v : points) {
        for (std::uint64_t seed : spec.seeds) {
            const Scenario s = scenario_at(spec, &base, v, seed);
            const ValidationReport r = validate(s);
            if (!r.ok()) {
                std::cerr << "error: invalid scenario at " << axis_label(spec.axis, v) << " seed " << seed << ":\n";
                for (const std::string& m : r.violations) std::cerr << "  " << m << "\n";
                return 2;
            }
        }
    }

    std::error_code ec;
    std::filesystem::create_directories(spec.out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory " << spec.out_dir << "\n";
        return 3;
    }

    std::vector<RunTask> tasks;
    for (Scheme scheme : spec.schemes) {
        for (double v : points) {
            for (std::uint64_t seed : spec.seeds) {
                tasks.push_back({scheme, v, seed,
                                 std::string(scheme_name(scheme)) + "_" + axis_label(spec.axis, v) + "_s" +
                                     std::to_string(seed)});
            }
        }
    }

    std::vector<RunResult> results(tasks.size());
    std::atomic<std::size_t> next{0};
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(tasks.size(), spec.jobs > 0 ? unsigned(spec.jobs) : hw);

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const RunTask& t = tasks[i];
            try {
                const Scenario s = scenario_at(spec, &base, t.sweep_value, t.seed);
                const BcdTrace trace = run_scheme(s, t.scheme, spec.bcd);
                write_trace_csv(spec.out_dir + "/trace_" + t.label + ".csv", trace);
                write_traj_csv(spec.out_dir + "/traj_" + t.label + ".csv", trace, s);
                results[i].final_mse = trace.final_mse;
                results[i].iterations = trace.iterations;
            } catch (const std::exception& e) {
                results[i].failed = true;
                results[i].error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(worker);
    worker();
    for (std::thread& th : pool) th.join();

    bool any_failed = false;
    {
        std::ofstream out(spec.out_dir + "/summary.csv", std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write summary.csv\n";
            return 3;
        }
        out << "scheme,sweep_value,seed,final_mse,iters\n";
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            if (results[i].failed) {
                any_failed = true;
                std::cerr << "error: run " << tasks[i].label << " failed: " << results[i].error << "\n";
                continue;
            }
            out << scheme_name(tasks[i].scheme) << ',' << csv_num(tasks[i].sweep_value) << ','
                << tasks[i].seed << ',' << csv_num(results[i].final_mse) << ',' << results[i].iterations
                << '\n';
        }
    }
    return any_failed ? 3 : 0;
}

int cmd_validate(const std::string& path) {
    Scenario s;
    try {
        s = load_scenario_file(path);
    } catch (const ConfigError& e) {
        std::cout << "FAIL: " << e.what() << "\n";
        return 2;
    }
    const ValidationReport r = validate(s);
    if (!r.ok()) {
        std::cout << "FAIL: " << r.violations.size() << " violation(s)\n";
        for (const std::string& m : r.violations) std::cout << "  " << m << "\n";
        return 2;
    }
    std::cout << "PASS: " << s.sensors.count() << " sensors, " << s.mission.num_slots << " slots\n";
    return 0;
}

namespace {

std::vector<double> parse_sweep_values(const std::string& text) {
    std::vector<double> vals;
    if (text.find(':') != std::string::npos) {
        double start = 0, stop = 0, step = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(text);
        if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0) {
            throw CLI::ValidationError("sweep", "expected start:stop:step");
        }
        for (double v = start; v <= stop + 1e-9 * step; v += step) vals.push_back(v);
        return vals;
    }
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (!tok.empty()) vals.push_back(std::stod(tok));
    }
    return vals;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    const std::size_t dots = text.find("..");
    if (dots != std::string::npos) {
        const std::uint64_t a = std::stoull(text.substr(0, dots));
        const std::uint64_t b = std::stoull(text.substr(dots + 2));
        for (std::uint64_t v = a; v <= b; ++v) seeds.push_back(v);
        return seeds;
    }
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (!tok.empty()) seeds.push_back(std::stoull(tok));
    }
    return seeds;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"UAV-assisted over-the-air aggregation optimizer"};
    app.require_subcommand(1);

    ExperimentSpec spec;
    std::string schemes_arg = "proposed";
    std::string seeds_arg = "1";
    std::string sweep_t, sweep_noise, sweep_power;

    CLI::App* run = app.add_subcommand("run", "run schemes/sweeps and write CSV results");
    run->add_option("--config", spec.config_path, "scenario config file (TOML)");
    run->add_flag("--paper-default", spec.paper_default, "use the built-in two-cluster scenario");
    run->add_option("--schemes", schemes_arg, "comma list: proposed,to-no-pc,init-traj-pc,static");
    run->add_option("--sweep-t", sweep_t, "mission durations, start:stop:step or comma list (s)");
    run->add_option("--sweep-noise-dbm", sweep_noise, "noise powers, start:stop:step or comma list (dBm)");
    run->add_option("--sweep-power-dbm", sweep_power, "peak powers (avg = peak/2), start:stop:step or comma list (dBm)");
    run->add_option("--seeds", seeds_arg, "a..b range or comma list");
    run->add_option("--out", spec.out_dir, "output directory");
    run->add_option("--t", spec.defaults.duration_s, "base mission duration for --paper-default (s)");
    run->add_option("--pa-dbm", spec.defaults.p_a_dbm, "cluster A peak power (dBm)");
    run->add_option("--pb-dbm", spec.defaults.p_b_dbm, "cluster B peak power (dBm)");
    run->add_option("--noise-dbm", spec.defaults.noise_dbm, "noise power (dBm)");
    run->add_option("--alpha", spec.defaults.alpha, "path-loss exponent");
    run->add_option("--epsilon", spec.bcd.epsilon, "relative stopping threshold");
    run->add_option("--max-iters", spec.bcd.max_iters, "iteration cap");
    run->add_option("--jobs", spec.jobs, "worker threads (default: hardware)");

    std::string validate_path;
    CLI::App* val = app.add_subcommand("validate", "check a scenario config file");
    val->add_option("file", validate_path, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (val->parsed()) return cmd_validate(validate_path);

    if (spec.paper_default == !spec.config_path.empty()) {
        std::cerr << "error: pass exactly one of --config or --paper-default\n";
        return 2;
    }
    spec.schemes.clear();
    {
        std::istringstream in(schemes_arg);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            auto s = scheme_from_name(tok);
            if (!s) {
                std::cerr << "error: unknown scheme '" << tok << "'\n";
                return 2;
            }
            spec.schemes.push_back(*s);
        }
    }
    int sweeps = 0;
    try {
        if (!sweep_t.empty()) {
            spec.axis = ExperimentSpec::Axis::mission_t;
            spec.sweep_values = parse_sweep_values(sweep_t);
            ++sweeps;
        }
        if (!sweep_noise.empty()) {
            spec.axis = ExperimentSpec::Axis::noise_dbm;
            spec.sweep_values = parse_sweep_values(sweep_noise);
            ++sweeps;
        }
        if (!sweep_power.empty()) {
            spec.axis = ExperimentSpec::Axis::power_dbm;
            spec.sweep_values = parse_sweep_values(sweep_power);
            ++sweeps;
        }
        spec.seeds = parse_seeds(seeds_arg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (sweeps > 1) {
        std::cerr << "error: at most one sweep axis\n";
        return 2;
    }
    return cmd_run(spec);
}

}  // namespace aircomp
