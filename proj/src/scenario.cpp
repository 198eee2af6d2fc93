#include "aircomp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace aircomp {

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
double watts_to_dbm(double w) { return 10.0 * std::log10(w * 1e3); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

Mission make_mission(double duration_s, double slot_s) {
    Mission m;
    m.duration_s = duration_s;
    m.slot_s = slot_s;
    m.num_slots = (slot_s > 0.0 && std::isfinite(duration_s / slot_s))
                      ? int(std::llround(duration_s / slot_s))
                      : 0;
    return m;
}

namespace {

void require(std::vector<std::string>& out, bool cond, const std::string& msg) {
    if (!cond) out.push_back(msg);
}

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

ValidationReport validate(const Scenario& s) {
    ValidationReport r;
    auto& v = r.violations;

    const std::size_t k = s.sensors.count();
    require(v, k >= 2, "sensors: K = " + num(double(k)) + " but at least 2 sensors are required (K > 1)");
    require(v, s.sensors.peak_power_w.size() == k && s.sensors.avg_power_w.size() == k,
            "sensors: positions/peak/avg arrays must all have length K");
    if (s.sensors.peak_power_w.size() == k && s.sensors.avg_power_w.size() == k) {
        for (std::size_t i = 0; i < k; ++i) {
            const double p = s.sensors.peak_power_w[i];
            const double pb = s.sensors.avg_power_w[i];
            if (!(std::isfinite(p) && p > 0.0)) {
                v.push_back("sensors.peak_power_w[" + num(double(i)) + "] = " + num(p) + " must be > 0");
            }
            if (!(std::isfinite(pb) && pb > 0.0 && pb <= p)) {
                v.push_back("sensors.avg_power_w[" + num(double(i)) + "] = " + num(pb) +
                            " must satisfy 0 < avg <= peak = " + num(p));
            }
            if (!(std::isfinite(s.sensors.positions[i].x) && std::isfinite(s.sensors.positions[i].y))) {
                v.push_back("sensors.positions[" + num(double(i)) + "] must be finite");
            }
        }
    }

    require(v, std::isfinite(s.uav.altitude_m) && s.uav.altitude_m > 0.0,
            "uav.altitude_m = " + num(s.uav.altitude_m) + " must be > 0");
    require(v, std::isfinite(s.uav.v_max_mps) && s.uav.v_max_mps > 0.0,
            "uav.v_max_mps = " + num(s.uav.v_max_mps) + " must be > 0");
    require(v, std::isfinite(s.uav.start.x) && std::isfinite(s.uav.start.y), "uav.start must be finite");

    require(v, std::isfinite(s.channel.beta0) && s.channel.beta0 > 0.0,
            "channel.beta0 = " + num(s.channel.beta0) + " must be > 0");
    require(v, std::isfinite(s.channel.alpha) && s.channel.alpha >= 2.0,
            "channel.alpha = " + num(s.channel.alpha) + " must be >= 2");
    require(v, std::isfinite(s.channel.sigma2_w) && s.channel.sigma2_w > 0.0,
            "channel.sigma2_w = " + num(s.channel.sigma2_w) + " must be > 0");

    require(v, std::isfinite(s.mission.slot_s) && s.mission.slot_s > 0.0,
            "mission.slot_s = " + num(s.mission.slot_s) + " must be > 0");
    require(v, s.mission.num_slots >= 2,
            "mission.num_slots = " + num(double(s.mission.num_slots)) + " must be >= 2");
    if (s.mission.slot_s > 0.0 && s.mission.num_slots >= 1) {
        const double t = double(s.mission.num_slots) * s.mission.slot_s;
        require(v, std::abs(t - s.mission.duration_s) <= 1e-9 * std::max(1.0, s.mission.duration_s),
                "mission.duration_s = " + num(s.mission.duration_s) +
                    " is not num_slots * slot_s = " + num(t));
    }
    // slot short enough that the geometry is approximately constant per slot
    if (s.uav.v_max_mps > 0.0 && s.mission.slot_s > 0.0 && s.uav.altitude_m > 0.0) {
        const double travel = s.mission.slot_s * s.uav.v_max_mps;
        require(v, travel < s.uav.altitude_m / 10.0,
                "mission.slot_s * uav.v_max_mps = " + num(travel) +
                    " must be < altitude/10 = " + num(s.uav.altitude_m / 10.0));
    }
    return r;
}

namespace {

Vec2 uniform_in_disk(std::mt19937_64& g, Vec2 center, double radius) {
    const double r = radius * std::sqrt(uniform(g));
    const double th = 2.0 * M_PI * uniform(g);
    return {center.x + r * std::cos(th), center.y + r * std::sin(th)};
}

}  // namespace

Scenario paper_default_scenario(std::uint64_t seed, const PaperDefaultOptions& opt) {
    Scenario s;
    s.rng_seed = seed;
    s.uav.altitude_m = 100.0;
    s.uav.v_max_mps = 30.0;
    s.uav.start = {400.0, 0.0};
    s.channel.beta0 = db_to_linear(-40.0);
    s.channel.alpha = opt.alpha;
    s.channel.sigma2_w = dbm_to_watts(opt.noise_dbm);
    s.mission = make_mission(opt.duration_s, opt.slot_s);

    std::mt19937_64 g(seed);
    const Vec2 center_a{200.0, 80.0};
    const Vec2 center_b{400.0, 200.0};
    const double radius = 50.0;
    const int k_a = 13, k_b = 27;
    const double p_a = dbm_to_watts(opt.p_a_dbm);
    const double p_b = dbm_to_watts(opt.p_b_dbm);
    for (int i = 0; i < k_a; ++i) {
        s.sensors.positions.push_back(uniform_in_disk(g, center_a, radius));
        s.sensors.peak_power_w.push_back(p_a);
        s.sensors.avg_power_w.push_back(opt.avg_power_ratio * p_a);
    }
    for (int i = 0; i < k_b; ++i) {
        s.sensors.positions.push_back(uniform_in_disk(g, center_b, radius));
        s.sensors.peak_power_w.push_back(p_b);
        s.sensors.avg_power_w.push_back(opt.avg_power_ratio * p_b);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Config file parsing: a TOML-compatible subset. Sections, `key = value`,
// numeric scalars and flat numeric arrays, `#` comments. Nothing else is
// needed for scenario files.

namespace {

struct ConfigValue {
    std::vector<double> nums;
    bool is_array = false;
};

using Section = std::map<std::string, ConfigValue>;
using Config = std::map<std::string, Section>;

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok, const std::string& where) {
    std::size_t pos = 0;
    double val = 0.0;
    try {
        val = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: value '" + tok + "' for " + where + " is not a number");
    }
    if (pos != tok.size()) {
        throw ConfigError("config: value '" + tok + "' for " + where + " is not a number");
    }
    return val;
}

Config parse_config(std::istream& in) {
    Config cfg;
    std::string section;  // top-level keys live under ""
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            cfg[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string where = section.empty() ? key : section + "." + key;
        ConfigValue out;
        if (val.front() == '[') {
            if (val.back() != ']') {
                throw ConfigError("config line " + std::to_string(lineno) + ": unterminated array for " + where);
            }
            out.is_array = true;
            std::string body = val.substr(1, val.size() - 2);
            std::string tok;
            std::istringstream toks(body);
            while (std::getline(toks, tok, ',')) {
                tok = trim(tok);
                if (tok.empty()) continue;
                out.nums.push_back(parse_number(tok, where));
            }
        } else {
            out.nums.push_back(parse_number(val, where));
        }
        cfg[section][key] = out;
    }
    return cfg;
}

const ConfigValue* find(const Config& cfg, const std::string& section, const std::string& key) {
    auto s = cfg.find(section);
    if (s == cfg.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
}

double get_scalar(const Config& cfg, const std::string& section, const std::string& key) {
    const ConfigValue* v = find(cfg, section, key);
    if (!v) throw ConfigError("config: missing key " + section + "." + key);
    if (v->is_array && v->nums.size() != 1) {
        throw ConfigError("config: key " + section + "." + key + " must be a scalar");
    }
    return v->nums.at(0);
}

double get_scalar_or(const Config& cfg, const std::string& section, const std::string& key, double dflt) {
    const ConfigValue* v = find(cfg, section, key);
    if (!v) return dflt;
    if (v->is_array && v->nums.size() != 1) {
        throw ConfigError("config: key " + section + "." + key + " must be a scalar");
    }
    return v->nums.at(0);
}

// Scalar broadcasts to all K sensors; an array must have length K.
std::vector<double> get_per_sensor(const Config& cfg, const std::string& key, std::size_t k) {
    const ConfigValue* v = find(cfg, "sensors", key);
    if (!v) throw ConfigError("config: missing key sensors." + key);
    if (!v->is_array || v->nums.size() == 1) {
        return std::vector<double>(k, v->nums.at(0));
    }
    if (v->nums.size() != k) {
        throw ConfigError("config: sensors." + key + " has length " + std::to_string(v->nums.size()) +
                          ", expected " + std::to_string(k));
    }
    return v->nums;
}

Scenario build_scenario(const Config& cfg) {
    Scenario s;

    const ConfigValue* xs = find(cfg, "sensors", "x");
    const ConfigValue* ys = find(cfg, "sensors", "y");
    if (!xs) throw ConfigError("config: missing key sensors.x");
    if (!ys) throw ConfigError("config: missing key sensors.y");
    if (xs->nums.size() != ys->nums.size()) {
        throw ConfigError("config: sensors.x and sensors.y must have the same length");
    }
    const std::size_t k = xs->nums.size();
    for (std::size_t i = 0; i < k; ++i) {
        s.sensors.positions.push_back({xs->nums[i], ys->nums[i]});
    }

    const bool has_p_dbm = find(cfg, "sensors", "p_dbm") != nullptr;
    const bool has_p_w = find(cfg, "sensors", "p_watts") != nullptr;
    if (has_p_dbm == has_p_w) {
        throw ConfigError("config: sensors must set exactly one of p_dbm or p_watts");
    }
    if (has_p_dbm) {
        for (double d : get_per_sensor(cfg, "p_dbm", k)) s.sensors.peak_power_w.push_back(dbm_to_watts(d));
    } else {
        s.sensors.peak_power_w = get_per_sensor(cfg, "p_watts", k);
    }

    const bool has_avg_dbm = find(cfg, "sensors", "p_avg_dbm") != nullptr;
    const bool has_avg_w = find(cfg, "sensors", "p_avg_watts") != nullptr;
    if (has_avg_dbm && has_avg_w) {
        throw ConfigError("config: sensors must set at most one of p_avg_dbm or p_avg_watts");
    }
    if (has_avg_dbm) {
        for (double d : get_per_sensor(cfg, "p_avg_dbm", k)) s.sensors.avg_power_w.push_back(dbm_to_watts(d));
    } else if (has_avg_w) {
        s.sensors.avg_power_w = get_per_sensor(cfg, "p_avg_watts", k);
    } else {
        for (double p : s.sensors.peak_power_w) s.sensors.avg_power_w.push_back(0.5 * p);
    }

    s.uav.altitude_m = get_scalar(cfg, "uav", "altitude_m");
    s.uav.v_max_mps = get_scalar(cfg, "uav", "v_max_mps");
    s.uav.start = {get_scalar(cfg, "uav", "start_x_m"), get_scalar(cfg, "uav", "start_y_m")};

    const bool has_b_db = find(cfg, "channel", "beta0_db") != nullptr;
    const bool has_b_lin = find(cfg, "channel", "beta0_linear") != nullptr;
    if (has_b_db == has_b_lin) {
        throw ConfigError("config: channel must set exactly one of beta0_db or beta0_linear");
    }
    s.channel.beta0 = has_b_db ? db_to_linear(get_scalar(cfg, "channel", "beta0_db"))
                               : get_scalar(cfg, "channel", "beta0_linear");
    s.channel.alpha = get_scalar_or(cfg, "channel", "alpha", 2.0);
    const bool has_n_dbm = find(cfg, "channel", "noise_dbm") != nullptr;
    const bool has_n_w = find(cfg, "channel", "noise_watts") != nullptr;
    if (has_n_dbm == has_n_w) {
        throw ConfigError("config: channel must set exactly one of noise_dbm or noise_watts");
    }
    s.channel.sigma2_w = has_n_dbm ? dbm_to_watts(get_scalar(cfg, "channel", "noise_dbm"))
                                   : get_scalar(cfg, "channel", "noise_watts");

    s.mission = make_mission(get_scalar(cfg, "mission", "duration_s"), get_scalar(cfg, "mission", "slot_s"));
    s.rng_seed = std::uint64_t(get_scalar_or(cfg, "", "seed", 0.0));
    return s;
}

}  // namespace

Scenario load_scenario_string(const std::string& text) {
    std::istringstream in(text);
    return build_scenario(parse_config(in));
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read file " + path);
    return build_scenario(parse_config(in));
}

}  // namespace aircomp
