#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "doslab/cache.hpp"
#include "doslab/carleman.hpp"
#include "doslab/config.hpp"
#include "doslab/constructions.hpp"
#include "doslab/dense_spectrum.hpp"
#include "doslab/dos.hpp"
#include "doslab/format.hpp"
#include "doslab/ucp_probe.hpp"

namespace doslab {

struct RunOutcome {
    int exit_code = 0;
    bool cache_hit = false;
    std::vector<std::string> artifacts;  // paths written
    std::string error_json;              // set when exit_code != 0
};

namespace detail {

inline std::string csv_header() { return "d,L,bc,E,eps,probe,count,eta\n"; }

inline void append_csv_row(std::string& csv, int d, const DosPoint& p) {
    csv += format_int(d);
    csv += ',';
    csv += format_double(p.L);
    csv += ',';
    csv += to_string(p.bc);
    csv += ',';
    csv += format_double(p.E);
    csv += ',';
    csv += format_double(p.eps);
    csv += ',';
    csv += p.probe;
    csv += ',';
    csv += format_int(p.count);
    csv += ',';
    csv += format_double(p.eta);
    csv += '\n';
}

inline Json fit_to_json(const FitResult& fit, int d) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["C_hat"] = fit.C_hat;
    j["kappa_hat"] = fit.kappa_hat;
    j["residual"] = fit.residual;
    j["points_used"] = fit.points_used;
    j["points_zero"] = fit.points_zero;
    if (d >= 1 && d <= 3) j["kappa_reference"] = kappa_reference(d);
    return j;
}

inline Json error_json(const std::string& message, const std::vector<std::string>& details = {}) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["error"] = Json{{"message", message}};
    if (!details.empty()) j["error"]["details"] = details;
    return j;
}

// artifact set produced by one command, as (role -> bytes); role "main" goes
// to output_path, every other role to output_path + "." + role
using ArtifactSet = std::map<std::string, std::string>;

inline ArtifactSet run_build(const RunConfig& cfg) {
    BoxSpec box = cfg.box->make();
    PotentialField field = sample_potential(*cfg.potential, box);
    BandMatrix H = assemble_hamiltonian(field);
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["box"] = Json{{"d", box.d}, {"L", box.L}, {"side", box.side}, {"sites", box.n},
                    {"bc", to_string(box.bc)}};
    j["potential"] = to_json(*cfg.potential, box.d);
    j["matrix"] = Json{{"order", H.n},
                       {"half_bandwidth", H.half_bandwidth},
                       {"realized_sup", field.realized_sup},
                       {"declared_sup", cfg.potential->sup_bound()},
                       {"gershgorin", Json::array({-2.0 * box.d - field.realized_sup,
                                                   2.0 * box.d + field.realized_sup})}};
    return {{"main", j.dump(2) + "\n"}};
}

inline ArtifactSet run_count(const RunConfig& cfg) {
    BoxSpec box = cfg.box->make();
    BandMatrix H = assemble_hamiltonian(sample_potential(*cfg.potential, box));
    DosPoint p = eta_interval(H, *cfg.window);
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["window"] = Json{{"E", cfg.window->E}, {"eps", cfg.window->eps}};
    j["sites"] = box.n;
    j["count"] = p.count;
    j["eta"] = p.eta;
    j["ids_at_E"] = ids(H, cfg.window->E);
    return {{"main", j.dump(2) + "\n"}};
}

inline ArtifactSet run_dos_sweep(const RunConfig& cfg, const ResultCache* cache) {
    BoxSpec box = cfg.box->make();
    std::vector<Probe> probes = cfg.probe_list();

    SweepHooks hooks;
    std::string prefix;
    if (cache) {
        Json base;
        base["schema_version"] = kSchemaVersion;
        base["kind"] = "dos-point";
        base["potential"] = to_json(*cfg.potential, box.d);
        base["box"] = to_json(*cfg.box);
        base["E"] = *cfg.energy;
        prefix = base.dump();
        hooks.try_load = [&, prefix](const Probe& p, double eps) -> std::optional<std::int64_t> {
            std::string key = ResultCache::key_for(prefix + "|eps=" + format_double(eps) +
                                                   "|probe=" + p.token(box.d));
            if (auto bytes = cache->load(key)) {
                try {
                    Json j = Json::parse(*bytes);
                    return j.at("count").get<std::int64_t>();
                } catch (const Json::exception&) {
                    return std::nullopt;  // unreadable entry: recompute
                }
            }
            return std::nullopt;
        };
        hooks.store = [&, prefix](const Probe& p, double eps, std::int64_t count) {
            std::string key = ResultCache::key_for(prefix + "|eps=" + format_double(eps) +
                                                   "|probe=" + p.token(box.d));
            Json j;
            j["count"] = count;
            cache->store(key, j.dump());
        };
    }

    SweepResult sweep = dos_sweep(*cfg.potential, box, *cfg.energy, cfg.eps_grid, probes,
                                  cfg.thread_count, cache ? &hooks : nullptr);

    std::string csv = csv_header();
    for (const auto& curve : sweep.per_probe)
        for (const DosPoint& p : curve) append_csv_row(csv, box.d, p);

    Json fit;
    if (sweep.sup_curve.fit) {
        fit = fit_to_json(*sweep.sup_curve.fit, box.d);
    } else {
        fit = Json{{"schema_version", kSchemaVersion},
                   {"fit", nullptr},
                   {"reason", "fewer than 3 points with eta > 0"}};
    }
    Json sup = Json::array();
    for (const DosPoint& p : sweep.sup_curve.points)
        sup.push_back(Json{{"eps", p.eps}, {"eta", p.eta}, {"count", p.count}, {"probe", p.probe}});
    fit["sup_curve"] = sup;

    return {{"main", csv}, {"fit.json", fit.dump(2) + "\n"}};
}

inline ArtifactSet run_translate_sup(const RunConfig& cfg) {
    BoxSpec box = cfg.box->make();
    OuterEstimate est =
        translate_sup(*cfg.potential, box, *cfg.window, cfg.probe_list(), cfg.thread_count);
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["window"] = Json{{"E", cfg.window->E}, {"eps", cfg.window->eps}};
    j["value"] = est.value;
    j["argmax"] = est.argmax;
    j["probes"] = est.probes;
    return {{"main", j.dump(2) + "\n"}};
}

inline ArtifactSet run_construct(const RunConfig& cfg) {
    BoxSpec box = cfg.box->make();
    PotentialField field = sample_potential(*cfg.potential, box);
    BandMatrix H = assemble_hamiltonian(field);
    const SpectralWindow& w = *cfg.window;

    Json j;
    j["schema_version"] = kSchemaVersion;
    j["window"] = Json{{"E", w.E}, {"eps", w.eps}};
    j["sites"] = box.n;

    EigenBasis P = eigenpairs_in_window(H, w);
    double rho = static_cast<double>(P.count) / static_cast<double>(box.n);
    j["dim_P"] = P.count;
    j["rho"] = rho;
    if (P.count == 0) {
        j["note"] = "window contains no spectrum; nothing to constrain";
        return {{"main", j.dump(2) + "\n"}};
    }

    RSelection sel;
    if (cfg.R) {
        sel.R = *cfg.R;
        sel.policy_target = 0.0;
        sel.clamped = false;
    } else {
        sel = select_R(box.d, rho, box);
    }
    j["R"] = Json{{"value", sel.R},
                  {"source", cfg.R ? "config" : "policy"},
                  {"policy_target", sel.policy_target},
                  {"clamped", sel.clamped}};

    GridCover cover = build_grid(box, sel.R);
    double volume_ratio = static_cast<double>(box.n) / std::pow(static_cast<double>(cover.R + 1), box.d);
    j["grid"] = Json{{"centers", cover.centers.size()},
                     {"per_center_layer", cover.per_center_layer},
                     {"layer_sites", cover.layer.size()},
                     {"cardinality_bounds",
                      Json::array({volume_ratio, std::pow(2.0, box.d) * volume_ratio})},
                     {"layer_constant", layer_constant(box.d)}};

    ConstrainedSubspace F = constrained_subspace(P, cover.layer);
    j["dim_F"] = F.dim;
    j["dim_F_lower_bound"] = P.count - static_cast<std::int64_t>(cover.layer.size());

    PropagationReport rep = propagation_check(F, H, w, cover);
    j["propagation"] = Json{{"A", rep.A},
                            {"bound", rep.bound},
                            {"checked", rep.checked},
                            {"max_inf_norm", rep.max_inf_norm},
                            {"max_ratio", rep.max_ratio},
                            {"pass", rep.pass}};

    if (F.dim > 0) {
        ExtremalResult ext = linf_extremal(F.basis);
        j["extremal"] = Json{{"attained", ext.attained},
                             {"lower_bound",
                              std::sqrt(static_cast<double>(F.dim) / static_cast<double>(box.n))}};
    }
    return {{"main", j.dump(2) + "\n"}};
}

inline ArtifactSet run_ucp_probe(const RunConfig& cfg) {
    BoxSpec box = cfg.box->make();
    BandMatrix H = assemble_hamiltonian(sample_potential(*cfg.potential, box));
    EigenBasis P = eigenpairs_in_window(H, *cfg.window);
    if (cfg.eig_index >= P.count)
        throw std::runtime_error("ucp-probe: window holds " + std::to_string(P.count) +
                                 " eigenvectors, eig_index " + std::to_string(cfg.eig_index) +
                                 " unavailable");
    Eigen::VectorXd psi = P.vectors.col(cfg.eig_index);
    double E = P.values[static_cast<std::size_t>(cfg.eig_index)];

    std::vector<std::int64_t> theta;
    if (cfg.theta->halfspace) {
        for (std::int64_t i = 0; i < box.n; ++i)
            if (box.site(i)[static_cast<std::size_t>(cfg.theta->axis)] >= cfg.theta->min)
                theta.push_back(i);
    } else {
        for (const Coord& c : cfg.theta->sites) theta.push_back(box.index_of(c));
    }

    UcpReport rep = ucp_probe(std::span<const double>(psi.data(), static_cast<std::size_t>(psi.size())),
                              H, box, E, theta, box.index_of(*cfg.x0), *cfg.delta);
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["eigenvalue"] = E;
    j["theta_sites"] = theta.size();
    j["Q"] = rep.Q;
    j["delta"] = rep.delta;
    j["dist_x0_theta"] = rep.dist_x0_theta;
    j["norm_theta"] = rep.norm_theta;
    j["norm_local"] = rep.norm_local;
    j["norm_zeta"] = rep.norm_zeta;
    j["norm_total"] = rep.norm_total;
    j["K"] = rep.K;
    if (rep.empirical_exponent) j["empirical_exponent"] = *rep.empirical_exponent;
    else j["empirical_exponent"] = nullptr;
    return {{"main", j.dump(2) + "\n"}};
}

inline ArtifactSet run_carleman(const RunConfig& cfg) {
    std::string csv = "s,phi\n";
    for (int i = 0; i < cfg.samples; ++i) {
        double s = cfg.s_max * static_cast<double>(i) / static_cast<double>(cfg.samples - 1);
        csv += format_double(s);
        csv += ',';
        csv += format_double(carleman_phi(s));
        csv += '\n';
    }
    return {{"main", csv}};
}

inline ArtifactSet run_fit(const RunConfig& cfg) {
    std::ifstream in(cfg.input_csv);
    if (!in) throw std::runtime_error("fit: cannot open input CSV " + cfg.input_csv);
    std::string header;
    std::getline(in, header);
    bool full = header == "d,L,bc,E,eps,probe,count,eta";
    bool bare = header == "eps,eta";
    if (!full && !bare)
        throw std::runtime_error("fit: unrecognized CSV header '" + header + "'");

    std::map<double, DosPoint, std::greater<double>> sup;  // eps -> best point
    std::string line;
    int d = 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        DosPoint p;
        if (full) {
            if (cells.size() != 8) throw std::runtime_error("fit: malformed CSV row '" + line + "'");
            d = std::stoi(cells[0]);
            p.L = std::stod(cells[1]);
            p.bc = cells[2] == "P" ? Bc::Periodic : Bc::Dirichlet;
            p.E = std::stod(cells[3]);
            p.eps = std::stod(cells[4]);
            p.probe = cells[5];
            p.count = std::stoll(cells[6]);
            p.eta = std::stod(cells[7]);
        } else {
            if (cells.size() != 2) throw std::runtime_error("fit: malformed CSV row '" + line + "'");
            p.eps = std::stod(cells[0]);
            p.eta = std::stod(cells[1]);
        }
        auto it = sup.find(p.eps);
        if (it == sup.end() || p.eta > it->second.eta) sup[p.eps] = p;
    }
    std::vector<DosPoint> curve;
    for (const auto& [eps, p] : sup) curve.push_back(p);
    FitResult fit = fit_log_holder(curve);
    return {{"main", fit_to_json(fit, d).dump(2) + "\n"}};
}

}  // namespace detail

// Execute a validated config: consult the cache, compute if needed, write all
// artifacts atomically. All file I/O happens on this thread.
inline RunOutcome run(const RunConfig& cfg, std::ostream* log = nullptr) {
    RunOutcome out;
    auto say = [&](const std::string& msg) {
        if (log) *log << msg << '\n';
    };
    try {
        std::optional<ResultCache> cache;
        if (!cfg.no_cache) cache.emplace(cfg.cache_dir);

        std::string key = ResultCache::key_for(defining_inputs(cfg));
        detail::ArtifactSet artifacts;
        bool hit = false;
        if (cache) {
            if (auto bytes = cache->load(key)) {
                try {
                    Json bundle = Json::parse(*bytes);
                    for (auto it = bundle.begin(); it != bundle.end(); ++it)
                        artifacts[it.key()] = it.value().get<std::string>();
                    hit = !artifacts.empty();
                } catch (const Json::exception&) {
                    artifacts.clear();  // unreadable bundle: recompute
                }
            }
        }
        if (!hit) {
            const std::string& c = cfg.command;
            if (c == "build") artifacts = detail::run_build(cfg);
            else if (c == "count") artifacts = detail::run_count(cfg);
            else if (c == "dos-sweep") artifacts = detail::run_dos_sweep(cfg, cache ? &*cache : nullptr);
            else if (c == "translate-sup") artifacts = detail::run_translate_sup(cfg);
            else if (c == "construct") artifacts = detail::run_construct(cfg);
            else if (c == "ucp-probe") artifacts = detail::run_ucp_probe(cfg);
            else if (c == "carleman") artifacts = detail::run_carleman(cfg);
            else if (c == "fit") artifacts = detail::run_fit(cfg);
            else throw std::runtime_error("unknown command " + c);
            if (cache) {
                Json bundle;
                for (const auto& [role, bytes] : artifacts) bundle[role] = bytes;
                cache->store(key, bundle.dump());
            }
        }
        out.cache_hit = hit;
        say(std::string("cache ") + (hit ? "hit" : (cache ? "miss" : "off")) + " key=" + key);

        for (const auto& [role, bytes] : artifacts) {
            std::filesystem::path path = cfg.output_path;
            if (role != "main") path += "." + role;
            atomic_write_file(path, bytes);
            out.artifacts.push_back(path.string());
            say("wrote " + path.string());
        }
        return out;
    } catch (const std::invalid_argument& e) {
        out.exit_code = 1;
        out.error_json = detail::error_json(e.what()).dump(2) + "\n";
        return out;
    } catch (const std::exception& e) {
        out.exit_code = 2;
        out.error_json = detail::error_json(e.what()).dump(2) + "\n";
        return out;
    }
}

}  // namespace doslab
