#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "doslab/dos.hpp"
#include "doslab/lattice.hpp"
#include "doslab/potential.hpp"

namespace doslab {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> cmds = {"build",     "count",   "dos-sweep", "translate-sup",
                                                  "construct", "ucp-probe", "carleman", "fit"};
    return cmds;
}

// ---- JSON codecs for the domain parameter blocks -------------------------

inline Json to_json(const PotentialSpec& s, int d) {
    Json j;
    j["variant"] = to_string(s.kind);
    switch (s.kind) {
        case PotentialKind::Constant: j["value"] = s.constant_value; break;
        case PotentialKind::Periodic: {
            Json p = Json::array();
            for (int k = 0; k < d; ++k) p.push_back(s.period[static_cast<std::size_t>(k)]);
            j["period"] = p;
            j["values"] = s.table;
            break;
        }
        case PotentialKind::Quasiperiodic: {
            j["amplitude"] = s.amplitude;
            Json f = Json::array();
            for (int k = 0; k < d; ++k) f.push_back(s.frequency[static_cast<std::size_t>(k)]);
            j["frequency"] = f;
            j["phase"] = s.phase;
            break;
        }
        case PotentialKind::AndersonUniform:
            j["coupling"] = s.coupling;
            j["lo"] = s.lo;
            j["hi"] = s.hi;
            j["seed"] = s.seed;
            break;
        case PotentialKind::AndersonBernoulli:
            j["coupling"] = s.coupling;
            j["prob"] = s.prob;
            j["seed"] = s.seed;
            break;
    }
    return j;
}

struct BoxParams {
    int d = 1;
    double L = 1.0;
    Coord center{0, 0, 0};
    Bc bc = Bc::Dirichlet;

    BoxSpec make() const { return make_box(d, L, center, bc); }
};

inline Json to_json(const BoxParams& b) {
    Json j;
    j["d"] = b.d;
    j["L"] = b.L;
    Json c = Json::array();
    for (int k = 0; k < b.d; ++k) c.push_back(b.center[static_cast<std::size_t>(k)]);
    j["center"] = c;
    j["bc"] = b.bc == Bc::Dirichlet ? "dirichlet" : "periodic";
    return j;
}

struct ProbeSpec {
    bool fundamental_domain = false;
    std::vector<std::uint64_t> seeds;
    std::vector<Coord> centers;
    bool empty() const { return !fundamental_domain && seeds.empty() && centers.empty(); }
};

inline Json to_json(const ProbeSpec& p, int d) {
    if (p.fundamental_domain) return Json("fundamental-domain");
    Json j;
    if (!p.seeds.empty()) {
        j["seeds"] = p.seeds;
    } else {
        Json cs = Json::array();
        for (const Coord& c : p.centers) {
            Json one = Json::array();
            for (int k = 0; k < d; ++k) one.push_back(c[static_cast<std::size_t>(k)]);
            cs.push_back(one);
        }
        j["centers"] = cs;
    }
    return j;
}

struct ThetaSpec {
    bool halfspace = false;
    int axis = 0;
    std::int64_t min = 0;            // halfspace: sites with y[axis] >= min
    std::vector<Coord> sites;        // explicit list otherwise
};

inline Json to_json(const ThetaSpec& t, int d) {
    Json j;
    if (t.halfspace) {
        j["halfspace"] = Json{{"axis", t.axis}, {"min", t.min}};
    } else {
        Json ss = Json::array();
        for (const Coord& c : t.sites) {
            Json one = Json::array();
            for (int k = 0; k < d; ++k) one.push_back(c[static_cast<std::size_t>(k)]);
            ss.push_back(one);
        }
        j["sites"] = ss;
    }
    return j;
}

// ---- RunConfig ------------------------------------------------------------

struct RunConfig {
    std::string command;
    std::optional<PotentialSpec> potential;
    std::optional<BoxParams> box;
    std::optional<SpectralWindow> window;
    std::optional<double> energy;
    std::vector<double> eps_grid;  // filled with the default grid for dos-sweep
    ProbeSpec probes;
    std::optional<int> R;
    int eig_index = 0;
    std::optional<ThetaSpec> theta;
    std::optional<Coord> x0;
    std::optional<double> delta;
    double s_max = 10.0;
    int samples = 201;
    std::string input_csv;

    std::string output_path;
    std::string cache_dir = ".doslab-cache";
    int thread_count = 1;
    bool no_cache = false;

    std::vector<Probe> probe_list() const {
        std::vector<Probe> list;
        if (probes.fundamental_domain && potential && potential->kind == PotentialKind::Periodic && box) {
            Coord t{0, 0, 0};
            const auto& p = potential->period;
            for (;;) {
                Coord c = box->center;
                for (int k = 0; k < box->d; ++k) c[static_cast<std::size_t>(k)] += t[static_cast<std::size_t>(k)];
                list.push_back(Probe::of_center(c));
                int k = box->d - 1;
                while (k >= 0 && ++t[static_cast<std::size_t>(k)] == p[static_cast<std::size_t>(k)]) {
                    t[static_cast<std::size_t>(k)] = 0;
                    --k;
                }
                if (k < 0) break;
            }
            return list;
        }
        for (std::uint64_t s : probes.seeds) list.push_back(Probe::of_seed(s));
        for (const Coord& c : probes.centers) list.push_back(Probe::of_center(c));
        return list;
    }
};

inline std::vector<double> default_eps_grid() {
    std::vector<double> g;
    for (int k = 1; k <= 20; ++k) g.push_back(std::ldexp(1.0, -k));
    return g;
}

// ---- parsing with full error collection ------------------------------------

namespace detail {

struct ConfigReader {
    const Json& j;
    std::vector<std::string>& errors;

    bool has(const char* key) const { return j.contains(key); }

    template <typename T>
    std::optional<T> get(const char* key, const char* what) {
        if (!j.contains(key)) return std::nullopt;
        try {
            return j.at(key).get<T>();
        } catch (const Json::exception&) {
            errors.push_back(std::string(key) + ": expected " + what);
            return std::nullopt;
        }
    }
};

inline std::optional<Coord> parse_coord(const Json& j, int d, std::vector<std::string>& errors,
                                        const std::string& label) {
    if (d < 1 || d > 3 || !j.is_array() || static_cast<int>(j.size()) != d) {
        errors.push_back(label + ": expected an array of " + std::to_string(d) + " integer coordinates");
        return std::nullopt;
    }
    Coord c{0, 0, 0};
    for (int k = 0; k < d; ++k) {
        if (!j[static_cast<std::size_t>(k)].is_number_integer()) {
            errors.push_back(label + ": coordinates must be integers");
            return std::nullopt;
        }
        c[static_cast<std::size_t>(k)] = j[static_cast<std::size_t>(k)].get<std::int64_t>();
    }
    return c;
}

inline std::optional<PotentialSpec> parse_potential(const Json& j, int d,
                                                    std::vector<std::string>& errors) {
    if (!j.is_object()) {
        errors.push_back("potential: expected an object");
        return std::nullopt;
    }
    std::string variant = j.value("variant", std::string{});
    std::size_t before = errors.size();
    PotentialSpec s;
    auto need_number = [&](const char* key) -> double {
        if (!j.contains(key) || !j.at(key).is_number()) {
            errors.push_back(std::string("potential.") + key + ": required number for variant " + variant);
            return 0.0;
        }
        return j.at(key).get<double>();
    };
    auto need_seed = [&]() {
        if (!j.contains("seed") || !j.at("seed").is_number_unsigned()) {
            errors.push_back("potential.seed: stochastic variants require an explicit unsigned seed");
            return std::uint64_t{0};
        }
        return j.at("seed").get<std::uint64_t>();
    };
    if (variant == "constant") {
        s = constant_potential(need_number("value"));
    } else if (variant == "periodic") {
        std::array<std::int64_t, 3> period{1, 1, 1};
        if (!j.contains("period") || !j.at("period").is_array() ||
            static_cast<int>(j.at("period").size()) != d) {
            errors.push_back("potential.period: expected an array of " + std::to_string(d) + " integers");
        } else {
            for (int k = 0; k < d; ++k) period[static_cast<std::size_t>(k)] = j.at("period")[static_cast<std::size_t>(k)].get<std::int64_t>();
        }
        std::vector<double> table;
        if (!j.contains("values") || !j.at("values").is_array()) {
            errors.push_back("potential.values: required array for variant periodic");
        } else {
            table = j.at("values").get<std::vector<double>>();
        }
        if (errors.size() == before) {
            try {
                s = periodic_potential(period, std::move(table), d);
            } catch (const std::invalid_argument& e) {
                errors.push_back(std::string("potential: ") + e.what());
            }
        }
    } else if (variant == "quasiperiodic") {
        double amp = need_number("amplitude");
        double phase = need_number("phase");
        std::array<double, 3> freq{0, 0, 0};
        if (!j.contains("frequency") || !j.at("frequency").is_array() ||
            static_cast<int>(j.at("frequency").size()) != d) {
            errors.push_back("potential.frequency: expected an array of " + std::to_string(d) + " numbers");
        } else {
            for (int k = 0; k < d; ++k) freq[static_cast<std::size_t>(k)] = j.at("frequency")[static_cast<std::size_t>(k)].get<double>();
        }
        if (errors.size() == before) s = quasiperiodic_potential(amp, freq, phase);
    } else if (variant == "anderson_uniform") {
        double coupling = need_number("coupling");
        double lo = need_number("lo");
        double hi = need_number("hi");
        std::uint64_t seed = need_seed();
        if (errors.size() == before) {
            try {
                s = anderson_uniform(coupling, lo, hi, seed);
            } catch (const std::invalid_argument& e) {
                errors.push_back(std::string("potential: ") + e.what());
            }
        }
    } else if (variant == "anderson_bernoulli") {
        double coupling = need_number("coupling");
        double prob = need_number("prob");
        std::uint64_t seed = need_seed();
        if (errors.size() == before) {
            try {
                s = anderson_bernoulli(coupling, prob, seed);
            } catch (const std::invalid_argument& e) {
                errors.push_back(std::string("potential: ") + e.what());
            }
        }
    } else {
        errors.push_back("potential.variant: unknown variant '" + variant + "'");
        return std::nullopt;
    }
    if (errors.size() != before) return std::nullopt;
    return s;
}

inline std::optional<BoxParams> parse_box(const Json& j, std::vector<std::string>& errors) {
    if (!j.is_object()) {
        errors.push_back("box: expected an object");
        return std::nullopt;
    }
    std::size_t before = errors.size();
    BoxParams b;
    if (!j.contains("d") || !j.at("d").is_number_integer()) {
        errors.push_back("box.d: required integer dimension");
    } else {
        b.d = j.at("d").get<int>();
        if (b.d < 1 || b.d > 3) {
            errors.push_back("box.d: dimension must be 1, 2 or 3");
            b.d = 1;  // coordinate tuples hold at most 3 entries
        }
    }
    if (!j.contains("L") || !j.at("L").is_number()) {
        errors.push_back("box.L: required number");
    } else {
        b.L = j.at("L").get<double>();
        if (!(b.L >= 1.0)) errors.push_back("box.L: side length must satisfy L >= 1");
    }
    if (j.contains("center")) {
        if (auto c = parse_coord(j.at("center"), b.d, errors, "box.center")) b.center = *c;
    }
    std::string bc = j.value("bc", "dirichlet");
    if (bc == "dirichlet") {
        b.bc = Bc::Dirichlet;
    } else if (bc == "periodic") {
        b.bc = Bc::Periodic;
        if (errors.size() == before && 2 * std::floor(b.L / 2.0) + 1 < 3)
            errors.push_back("box.bc: periodic boundary condition needs at least 3 sites per axis");
    } else {
        errors.push_back("box.bc: expected 'dirichlet' or 'periodic'");
    }
    if (errors.size() != before) return std::nullopt;
    return b;
}

}  // namespace detail

struct ParseResult {
    std::optional<RunConfig> config;
    std::vector<std::string> errors;
    bool ok() const { return config.has_value() && errors.empty(); }
};

namespace detail {
ParseResult parse_config_checked(const Json& j);
}

inline ParseResult parse_config(const std::string& text) {
    ParseResult res;
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        res.errors.push_back(std::string("document is not valid JSON: ") + e.what());
        return res;
    }
    if (!j.is_object()) {
        res.errors.push_back("document root must be an object");
        return res;
    }
    try {
        return detail::parse_config_checked(j);
    } catch (const Json::exception& e) {
        res.errors.push_back(std::string("malformed field: ") + e.what());
        return res;
    }
}

inline ParseResult detail::parse_config_checked(const Json& j) {
    ParseResult res;
    auto& errors = res.errors;

    static const std::vector<std::string> allowed = {
        "schema_version", "command", "potential", "box",    "window",  "energy",     "eps_grid",
        "probes",         "R",       "eig_index", "theta",  "x0",      "delta",      "s_max",
        "samples",        "input_csv", "output_path", "cache_dir", "thread_count"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            errors.push_back("unknown field '" + it.key() + "'");

    int version = j.value("schema_version", kSchemaVersion);
    if (version != kSchemaVersion)
        errors.push_back("schema_version: expected " + std::to_string(kSchemaVersion));

    RunConfig cfg;
    cfg.command = j.value("command", std::string{});
    if (std::find(known_commands().begin(), known_commands().end(), cfg.command) ==
        known_commands().end())
        errors.push_back("command: unknown command '" + cfg.command + "'");

    if (j.contains("box")) cfg.box = detail::parse_box(j.at("box"), errors);
    int d = cfg.box ? cfg.box->d : 1;
    if (j.contains("potential")) cfg.potential = detail::parse_potential(j.at("potential"), d, errors);

    if (j.contains("window")) {
        const Json& w = j.at("window");
        if (!w.is_object() || !w.contains("E") || !w.contains("eps") || !w.at("E").is_number() ||
            !w.at("eps").is_number()) {
            errors.push_back("window: expected {E: number, eps: number}");
        } else {
            cfg.window = SpectralWindow{w.at("E").get<double>(), w.at("eps").get<double>()};
            if (!(cfg.window->eps > 0.0)) errors.push_back("window.eps: width must be positive");
        }
    }
    if (j.contains("energy")) {
        if (!j.at("energy").is_number()) errors.push_back("energy: expected a number");
        else cfg.energy = j.at("energy").get<double>();
    }
    if (j.contains("eps_grid")) {
        if (!j.at("eps_grid").is_array()) {
            errors.push_back("eps_grid: expected an array of numbers");
        } else {
            cfg.eps_grid = j.at("eps_grid").get<std::vector<double>>();
            for (std::size_t k = 0; k < cfg.eps_grid.size(); ++k) {
                if (!(cfg.eps_grid[k] > 0.0 && cfg.eps_grid[k] <= 0.5)) {
                    errors.push_back("eps_grid[" + std::to_string(k) + "]: eps must lie in (0, 1/2]");
                    break;
                }
                if (k > 0 && !(cfg.eps_grid[k] < cfg.eps_grid[k - 1])) {
                    errors.push_back("eps_grid: entries must be strictly decreasing");
                    break;
                }
            }
        }
    }
    if (j.contains("probes")) {
        const Json& p = j.at("probes");
        if (p.is_string() && p.get<std::string>() == "fundamental-domain") {
            cfg.probes.fundamental_domain = true;
        } else if (p.is_object() && p.contains("seeds") && p.at("seeds").is_array()) {
            try {
                cfg.probes.seeds = p.at("seeds").get<std::vector<std::uint64_t>>();
            } catch (const Json::exception&) {
                errors.push_back("probes.seeds: expected an array of unsigned integers");
            }
        } else if (p.is_object() && p.contains("centers") && p.at("centers").is_array()) {
            for (const Json& c : p.at("centers"))
                if (auto coord = detail::parse_coord(c, d, errors, "probes.centers"))
                    cfg.probes.centers.push_back(*coord);
        } else {
            errors.push_back("probes: expected {seeds: [...]}, {centers: [...]}, or \"fundamental-domain\"");
        }
    }
    if (j.contains("R")) {
        if (!j.at("R").is_number_integer()) errors.push_back("R: expected an even integer");
        else {
            cfg.R = j.at("R").get<int>();
            if (*cfg.R < 2 || *cfg.R % 2 != 0) errors.push_back("R: must be an even integer >= 2");
        }
    }
    if (j.contains("eig_index")) {
        if (!j.at("eig_index").is_number_integer() || j.at("eig_index").get<int>() < 0)
            errors.push_back("eig_index: expected a nonnegative integer");
        else cfg.eig_index = j.at("eig_index").get<int>();
    }
    if (j.contains("theta")) {
        const Json& t = j.at("theta");
        ThetaSpec theta;
        if (t.is_object() && t.contains("halfspace") && t.at("halfspace").is_object()) {
            theta.halfspace = true;
            theta.axis = t.at("halfspace").value("axis", 0);
            theta.min = t.at("halfspace").value("min", std::int64_t{0});
            if (theta.axis < 0 || theta.axis >= d) errors.push_back("theta.halfspace.axis: out of range");
        } else if (t.is_object() && t.contains("sites") && t.at("sites").is_array()) {
            for (const Json& c : t.at("sites"))
                if (auto coord = detail::parse_coord(c, d, errors, "theta.sites"))
                    theta.sites.push_back(*coord);
        } else {
            errors.push_back("theta: expected {halfspace: {axis, min}} or {sites: [...]}");
        }
        cfg.theta = theta;
    }
    if (j.contains("x0")) {
        if (auto c = detail::parse_coord(j.at("x0"), d, errors, "x0")) cfg.x0 = *c;
    }
    if (j.contains("delta")) {
        if (!j.at("delta").is_number()) errors.push_back("delta: expected a number");
        else {
            cfg.delta = j.at("delta").get<double>();
            if (!(*cfg.delta > 0.0 && *cfg.delta <= 1.0 / 24.0))
                errors.push_back("delta: must lie in (0, 1/24]");
        }
    }
    if (j.contains("s_max")) {
        if (!j.at("s_max").is_number() || !(j.at("s_max").get<double>() > 0.0) ||
            j.at("s_max").get<double>() > 1e4)
            errors.push_back("s_max: expected a positive number <= 1e4");
        else cfg.s_max = j.at("s_max").get<double>();
    }
    if (j.contains("samples")) {
        if (!j.at("samples").is_number_integer() || j.at("samples").get<int>() < 2)
            errors.push_back("samples: expected an integer >= 2");
        else cfg.samples = j.at("samples").get<int>();
    }
    if (j.contains("input_csv")) {
        if (!j.at("input_csv").is_string()) errors.push_back("input_csv: expected a string path");
        else cfg.input_csv = j.at("input_csv").get<std::string>();
    }
    if (j.contains("output_path")) {
        if (!j.at("output_path").is_string()) errors.push_back("output_path: expected a string path");
        else cfg.output_path = j.at("output_path").get<std::string>();
    }
    if (j.contains("cache_dir")) {
        if (!j.at("cache_dir").is_string()) errors.push_back("cache_dir: expected a string path");
        else cfg.cache_dir = j.at("cache_dir").get<std::string>();
    }
    if (j.contains("thread_count")) {
        if (!j.at("thread_count").is_number_integer() || j.at("thread_count").get<int>() < 1)
            errors.push_back("thread_count: expected an integer >= 1");
        else cfg.thread_count = j.at("thread_count").get<int>();
    }

    // per-command requirements
    auto require = [&](bool present, const char* what) {
        if (!present) errors.push_back(std::string(what) + ": required for command '" + cfg.command + "'");
    };
    const std::string& c = cfg.command;
    if (c == "build") {
        require(cfg.potential.has_value(), "potential");
        require(cfg.box.has_value(), "box");
    } else if (c == "count") {
        require(cfg.potential.has_value(), "potential");
        require(cfg.box.has_value(), "box");
        require(cfg.window.has_value(), "window");
    } else if (c == "dos-sweep") {
        require(cfg.potential.has_value(), "potential");
        require(cfg.box.has_value(), "box");
        require(cfg.energy.has_value(), "energy");
        require(!cfg.probes.empty(), "probes");
        if (cfg.eps_grid.empty()) cfg.eps_grid = default_eps_grid();
    } else if (c == "translate-sup") {
        require(cfg.potential.has_value(), "potential");
        require(cfg.box.has_value(), "box");
        require(cfg.window.has_value(), "window");
        require(!cfg.probes.empty(), "probes");
    } else if (c == "construct") {
        require(cfg.potential.has_value(), "potential");
        require(cfg.box.has_value(), "box");
        require(cfg.window.has_value(), "window");
        if (cfg.window && !(cfg.window->eps <= 0.5))
            errors.push_back("window.eps: construct requires eps <= 1/2");
    } else if (c == "ucp-probe") {
        require(cfg.potential.has_value(), "potential");
        require(cfg.box.has_value(), "box");
        require(cfg.window.has_value(), "window");
        require(cfg.theta.has_value(), "theta");
        require(cfg.x0.has_value(), "x0");
        require(cfg.delta.has_value(), "delta");
    } else if (c == "fit") {
        require(!cfg.input_csv.empty(), "input_csv");
    }

    if (cfg.potential && !cfg.probes.empty()) {
        bool stochastic = cfg.potential->stochastic();
        if (stochastic && (!cfg.probes.centers.empty() || cfg.probes.fundamental_domain))
            errors.push_back("probes: stochastic potentials are probed by seeds, not translates");
        if (!stochastic && !cfg.probes.seeds.empty())
            errors.push_back("probes: deterministic potentials are probed by translates, not seeds");
        if (cfg.probes.fundamental_domain && cfg.potential->kind != PotentialKind::Periodic)
            errors.push_back("probes: 'fundamental-domain' applies to periodic potentials only");
    }

    if (cfg.output_path.empty()) {
        bool csv = c == "dos-sweep" || c == "carleman";
        cfg.output_path = "doslab-" + c + (csv ? ".csv" : ".json");
    }

    if (!errors.empty()) return res;
    res.config = std::move(cfg);
    return res;
}

// Effective config with all defaults filled; parse(serialize(cfg)) == cfg.
inline Json serialize_config(const RunConfig& cfg) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = cfg.command;
    int d = cfg.box ? cfg.box->d : 1;
    if (cfg.potential) j["potential"] = to_json(*cfg.potential, d);
    if (cfg.box) j["box"] = to_json(*cfg.box);
    if (cfg.window) j["window"] = Json{{"E", cfg.window->E}, {"eps", cfg.window->eps}};
    if (cfg.energy) j["energy"] = *cfg.energy;
    if (!cfg.eps_grid.empty()) j["eps_grid"] = cfg.eps_grid;
    if (!cfg.probes.empty()) j["probes"] = to_json(cfg.probes, d);
    if (cfg.R) j["R"] = *cfg.R;
    if (cfg.command == "ucp-probe") j["eig_index"] = cfg.eig_index;
    if (cfg.theta) j["theta"] = to_json(*cfg.theta, d);
    if (cfg.x0) {
        Json c = Json::array();
        for (int k = 0; k < d; ++k) c.push_back((*cfg.x0)[static_cast<std::size_t>(k)]);
        j["x0"] = c;
    }
    if (cfg.delta) j["delta"] = *cfg.delta;
    if (cfg.command == "carleman") {
        j["s_max"] = cfg.s_max;
        j["samples"] = cfg.samples;
    }
    if (!cfg.input_csv.empty()) j["input_csv"] = cfg.input_csv;
    j["output_path"] = cfg.output_path;
    j["cache_dir"] = cfg.cache_dir;
    j["thread_count"] = cfg.thread_count;
    return j;
}

// The inputs that determine the result; presentation fields (paths, thread
// count) are excluded so the cache key survives relocation.
inline std::string defining_inputs(const RunConfig& cfg) {
    Json j = serialize_config(cfg);
    j.erase("output_path");
    j.erase("cache_dir");
    j.erase("thread_count");
    return j.dump();
}

}  // namespace doslab
