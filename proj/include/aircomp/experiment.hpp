#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aircomp/optimizer.hpp"
#include "aircomp/scenario.hpp"

namespace aircomp {

/// Batch experiment: (scheme x sweep point x seed) runs, CSV outputs.
struct ExperimentSpec {
    enum class Axis { none, mission_t, noise_dbm, power_dbm };

    bool paper_default = false;
    std::string config_path;        // used when !paper_default
    PaperDefaultOptions defaults;   // base parameters for paper_default
    std::vector<Scheme> schemes;
    Axis axis = Axis::none;
    std::vector<double> sweep_values;  // empty + Axis::none -> single base point
    std::vector<std::uint64_t> seeds{1};
    std::string out_dir = "out";
    BcdConfig bcd;
    int jobs = 0;  // 0: hardware concurrency
};

/// Runs every (scheme, point, seed) combination and writes, per run,
/// trace_<scheme>_<point>_s<seed>.csv and traj_<scheme>_<point>_s<seed>.csv,
/// plus one summary.csv. Returns 0 on success, 2 on invalid spec/config
/// (nothing written), 3 on solver/i-o failure (partial outputs retained).
int cmd_run(const ExperimentSpec& spec);

/// Prints the validation report for a config file; 0 = pass, 2 = fail.
int cmd_validate(const std::string& path);

/// Full command-line entry point (argv[0] is the program name).
int cli_main(int argc, const char* const* argv);

/// 12-significant-digit value formatting shared by all CSV writers.
std::string csv_num(double v);

}  // namespace aircomp
