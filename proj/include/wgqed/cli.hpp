#pragma once

// Command-line front end. Every subcommand writes one CSV plus a JSON
// manifest next to it; feeding the manifest back through --config reproduces
// the CSV byte for byte.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wgqed/dynamics.hpp"
#include "wgqed/output.hpp"
#include "wgqed/scattering.hpp"
#include "wgqed/spectrum.hpp"

#ifndef WGQED_VERSION
#define WGQED_VERSION "1.0.0"
#endif

namespace wgqed::cli {

using ordered_json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kIoFailure = 1, kUsage = 2, kNumerical = 3 };

// ---------------------------------------------------------------- parsing

inline double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("--" + key + ": expected a finite number, got '" + text + "'");
    }
}

inline long parse_integer(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const long v = std::stol(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("--" + key + ": expected an integer, got '" + text + "'");
    }
}

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

inline double parse_chi(const std::string& text) {
    if (text == "inf" || text == "infinity" || text == "hard-core") return kHardCore;
    const double v = parse_double("chi", text);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("--chi must be a positive number or 'inf'");
    return v;
}

// "a:b" inclusive integer range
inline std::vector<int> parse_int_range(const std::string& key, const std::string& text) {
    const auto p = split(text, ':');
    if (p.size() != 2) throw ConfigError("--" + key + ": expected 'first:last'");
    const long a = parse_integer(key, p[0]);
    const long b = parse_integer(key, p[1]);
    if (b < a) throw ConfigError("--" + key + ": last must be >= first");
    if (b - a > 10000) throw ConfigError("--" + key + ": range too long");
    std::vector<int> v;
    for (long k = a; k <= b; ++k) v.push_back(static_cast<int>(k));
    return v;
}

struct GridSpec {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 1;
};

// "lower:upper:count"
inline GridSpec parse_grid(const std::string& key, const std::string& text) {
    const auto p = split(text, ':');
    if (p.size() != 3) throw ConfigError("--" + key + ": expected 'lower:upper:count'");
    GridSpec g{parse_double(key, p[0]), parse_double(key, p[1]), 0};
    const long c = parse_integer(key, p[2]);
    if (c < 1) throw ConfigError("--" + key + ": count must be >= 1");
    if (!std::isfinite(g.lower) || !std::isfinite(g.upper) || g.upper < g.lower)
        throw ConfigError("--" + key + ": need finite lower <= upper");
    if (c > 1 && !(g.upper > g.lower)) throw ConfigError("--" + key + ": need lower < upper for count > 1");
    g.count = static_cast<std::size_t>(c);
    return g;
}

inline std::vector<double> grid_values(const GridSpec& g) { return linspace(g.lower, g.upper, g.count); }

// Flat key/value settings from a JSON object (or a manifest's "args") or from
// "key = value" lines.
inline std::vector<std::pair<std::string, std::string>> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::vector<std::pair<std::string, std::string>> out;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        ordered_json j;
        try {
            j = ordered_json::parse(text);
        } catch (const std::exception& e) {
            throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
        }
        const ordered_json& flat = j.contains("args") ? j.at("args") : j;
        if (!flat.is_object()) throw ConfigError("config file " + path + ": expected a flat object");
        for (const auto& [k, v] : flat.items()) {
            if (v.is_string()) out.emplace_back(k, v.get<std::string>());
            else if (v.is_boolean()) out.emplace_back(k, v.get<bool>() ? "true" : "false");
            else if (v.is_number()) out.emplace_back(k, v.dump());
            else throw ConfigError("config key '" + k + "' must be a scalar");
        }
        return out;
    }
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        if (trim(line).empty()) continue;
        if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

// ---------------------------------------------------------------- commands

// String-valued options of one subcommand; every effective value lands in
// the manifest, which is what makes replay exact.
class Options {
public:
    void add(CLI::App* app, const std::string& name, std::string def, const std::string& help) {
        order_.push_back(name);
        values_[name] = std::move(def);
        app->add_option("--" + name, values_[name], help)
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)
            ->capture_default_str();
    }

    void add_flag(CLI::App* app, const std::string& name, const std::string& help) {
        order_.push_back(name);
        flags_[name] = false;
        app->add_flag("--" + name, flags_[name], help)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }

    const std::string& str(const std::string& k) const { return values_.at(k); }
    double num(const std::string& k) const { return parse_double(k, str(k)); }
    long integer(const std::string& k) const { return parse_integer(k, str(k)); }
    bool flag(const std::string& k) const { return flags_.at(k); }
    bool is_flag(const std::string& k) const { return flags_.count(k) > 0; }
    bool known(const std::string& k) const { return values_.count(k) > 0 || flags_.count(k) > 0; }

    ordered_json to_json() const {
        ordered_json j = ordered_json::object();
        for (const auto& k : order_) {
            if (k == "config") continue;
            if (flags_.count(k)) j[k] = flags_.at(k);
            else j[k] = values_.at(k);
        }
        return j;
    }

private:
    std::vector<std::string> order_;
    std::map<std::string, std::string> values_;
    std::map<std::string, bool> flags_;
};

struct Output {
    std::string csv;
    ordered_json grids = ordered_json::object();
    ordered_json extra = ordered_json::object();
    std::string summary;
};

struct Command {
    std::string name;
    std::string description;
    CLI::App* app = nullptr;
    Options opts;
    std::function<Output(const Options&, const ArrayConfig&)> run;
};

inline ArrayConfig config_from(const Options& o) {
    ArrayConfig c;
    const long n = o.integer("n");
    if (n < 1 || n > 400) throw ConfigError("--n must be in [1, 400]");
    c.n_qubits = static_cast<int>(n);
    c.phi = o.num("phi");
    c.chi = parse_chi(o.str("chi"));
    c.gamma0 = o.num("gamma0");
    if (!o.str("positions").empty()) {
        std::vector<double> xs;
        for (const auto& p : split(o.str("positions"), ',')) xs.push_back(parse_double("positions", p));
        c.positions = xs;
    }
    c.validate();
    return c;
}

inline ordered_json config_json(const ArrayConfig& c) {
    ordered_json j;
    j["n_qubits"] = c.n_qubits;
    j["phi"] = c.phi;
    if (c.hard_core()) j["chi"] = "inf";
    else j["chi"] = c.chi;
    j["gamma0"] = c.gamma0;
    if (c.positions) j["positions"] = *c.positions;
    else j["positions"] = "periodic, x_j = phi * j";
    return j;
}

inline unsigned jobs_from(const Options& o) {
    const long j = o.integer("jobs");
    if (j < 1 || j > 256) throw ConfigError("--jobs must be in [1, 256]");
    return static_cast<unsigned>(j);
}

inline double tol_from(const Options& o) {
    const double t = o.num("tol");
    if (!(t > 0.0) || !(t < 1.0)) throw ConfigError("--tol must be in (0, 1)");
    return t;
}

inline std::string fmt(double v) { return format_number(v); }

inline Output run_modes(const Options& o, const ArrayConfig& config) {
    Output out;
    const std::string sweep = o.str("sweep-n");
    if (!sweep.empty()) {
        const auto ns = parse_int_range("sweep-n", sweep);
        if (ns.front() < 2) throw ConfigError("--sweep-n: N must be >= 2 for the double sector");
        CsvTable t({"n", "min_gamma21", "superradiant_gamma21", "superradiant_ratio", "n_superradiant",
                    "n_twilight", "n_subradiant"});
        std::vector<std::vector<std::string>> rows(ns.size());
        parallel_for(ns.size(), jobs_from(o), [&](std::size_t k) {
            const int nq = ns[k];
            const auto modes = double_modes(config.with_n(nq));
            double gmin = std::numeric_limits<double>::infinity();
            double gsup = std::numeric_limits<double>::quiet_NaN();
            for (const auto& m : modes) {
                gmin = std::min(gmin, m.gamma21);
                if (m.label == ModeClass::superradiant) gsup = m.gamma21;
            }
            const auto c = census(modes);
            rows[k] = {std::to_string(nq), fmt(gmin), fmt(gsup), fmt(gsup / ((nq - 1) * config.gamma0)),
                       std::to_string(c.superradiant), std::to_string(c.twilight), std::to_string(c.subradiant)};
        });
        for (const auto& r : rows) t.add(r);
        out.csv = t.str();
        out.grids["sweep_n"] = ns;
        out.summary = "swept N = " + sweep;
        return out;
    }

    CsvTable t({"sector", "index", "re_detuning", "im", "gamma", "class", "sum_abs_d2", "abs_sum_d2"});
    std::vector<int> sectors;
    for (const auto& s : split(o.str("sectors"), ',')) {
        const long m = parse_integer("sectors", s);
        if (m != 1 && m != 2) throw ConfigError("--sectors accepts 1 and/or 2");
        sectors.push_back(static_cast<int>(m));
    }
    std::ostringstream summary;
    for (int sector : sectors) {
        if (sector == 1) {
            const auto modes = single_modes(config);
            for (std::size_t k = 0; k < modes.size(); ++k)
                t.add({"1", std::to_string(k), fmt(modes[k].energy.real()), fmt(modes[k].energy.imag()),
                       fmt(modes[k].decay_rate), "single", "nan", "nan"});
        } else {
            if (config.n_qubits < 2 && config.hard_core()) continue;
            const auto modes = double_modes(config);
            for (std::size_t k = 0; k < modes.size(); ++k) {
                const auto& m = modes[k];
                t.add({"2", std::to_string(k), fmt(m.energy.real()), fmt(m.energy.imag()), fmt(m.gamma21),
                       to_string(m.label), fmt(m.sum_abs_d2), fmt(m.abs_sum_d2)});
            }
            const auto c = census(modes);
            summary << "census superradiant=" << c.superradiant << " twilight=" << c.twilight
                    << " subradiant=" << c.subradiant;
            out.extra["census"] = {{"superradiant", c.superradiant}, {"twilight", c.twilight},
                                   {"subradiant", c.subradiant}};
        }
    }
    out.extra["classification"] = {{"subradiant", "sum|d|^2 < 0.25 (N-2)"},
                                   {"superradiant", "sum|d|^2 > 0.5 N"},
                                   {"energies", "per-photon eigenvalue for sector 2 (total / 2)"}};
    out.csv = t.str();
    out.summary = summary.str();
    return out;
}

inline QMethod q_method_from(const std::string& s) {
    if (s == "closed") return QMethod::markovian_closed_form;
    if (s == "quadrature") return QMethod::quadrature;
    if (s == "resonant") return QMethod::resonant_approx;
    throw ConfigError("--q-method must be closed, quadrature or resonant");
}

inline Output run_scatter(const Options& o, const ArrayConfig& config) {
    IntensityRequest req;
    req.integration.rel_tol = tol_from(o);
    req.integration.window = o.num("window");
    req.method = q_method_from(o.str("q-method"));
    req.normalize = o.flag("normalize");
    req.jobs = jobs_from(o);
    const long cap = o.integer("max-points");
    if (cap < 1) throw ConfigError("--max-points must be >= 1");
    req.grid_cap = static_cast<std::size_t>(cap);

    const std::string kind = o.str("kind");
    SpectrumGrid g;
    Output out;
    if (kind == "cut") {
        const auto eps = parse_grid("eps-range", o.str("eps-range"));
        out.grids["eps"] = o.str("eps-range");
        out.grids["w2_minus_w1"] = o.num("dw");
        g = intensity_cut(config, grid_values(eps), o.num("dw"), req);
    } else if (kind == "w1w2") {
        const auto a = parse_grid("w1-range", o.str("w1-range"));
        const auto b = parse_grid("w2-range", o.str("w2-range"));
        out.grids["w1"] = o.str("w1-range");
        out.grids["w2"] = o.str("w2-range");
        if (a.count * b.count > req.grid_cap) throw ConfigError("grid exceeds --max-points");
        g = intensity_map_w1w2(config, grid_values(a), grid_values(b), req);
    } else if (kind == "phi-eps") {
        const auto p = parse_grid("phi-range", o.str("phi-range"));
        const auto e = parse_grid("eps-range", o.str("eps-range"));
        out.grids["phi"] = o.str("phi-range");
        out.grids["eps"] = o.str("eps-range");
        out.grids["w2_minus_w1"] = o.num("dw");
        if (p.count * e.count > req.grid_cap) throw ConfigError("grid exceeds --max-points");
        g = intensity_map_phi_eps(config, grid_values(p), grid_values(e), o.num("dw"), req);
    } else {
        throw ConfigError("--kind must be cut, w1w2 or phi-eps");
    }

    std::vector<std::string> header;
    for (const auto& a : g.axes) header.push_back(a.name);
    header.push_back(req.normalize ? "normalized_intensity" : "intensity");
    CsvTable t(header);
    if (g.axes.size() == 1) {
        for (std::size_t i = 0; i < g.axes[0].values.size(); ++i) t.add({fmt(g.axes[0].values[i]), fmt(g.at(i))});
    } else {
        for (std::size_t i = 0; i < g.axes[0].values.size(); ++i)
            for (std::size_t j = 0; j < g.axes[1].values.size(); ++j)
                t.add({fmt(g.axes[0].values[i]), fmt(g.axes[1].values[j]), fmt(g.at(i, j))});
    }
    out.csv = t.str();
    out.extra["normalization"] = g.normalization;
    out.extra["normalization_value"] = g.normalization_value;
    out.extra["q_method"] = to_string(req.method);
    out.summary = std::to_string(g.size()) + " intensity points";
    return out;
}

inline Output run_threshold(const Options& o, const ArrayConfig& config) {
    const auto ms = parse_int_range("m-range", o.str("m-range"));
    const auto ns = parse_int_range("n-range", o.str("n-range"));
    if (config.positions) throw ConfigError("threshold scans need a periodic array (no --positions)");
    const auto map = min_decay_map(ns, ms, config, jobs_from(o));
    CsvTable t({"m", "n", "min_gamma", "defined", "below_phi2", "boundary"});
    for (std::size_t im = 0; im < ms.size(); ++im) {
        const int b = map.boundary(im);
        for (std::size_t in = 0; in < ns.size(); ++in) {
            const bool def = map.defined(im, in);
            t.add({std::to_string(ms[im]), std::to_string(ns[in]), fmt(map.rate[im][in]), def ? "1" : "0",
                   def ? (map.below(im, in) ? "1" : "0") : "nan", ns[in] == b ? "1" : "0"});
        }
    }
    Output out;
    out.csv = t.str();
    out.grids["m"] = ms;
    out.grids["n"] = ns;
    out.extra["basis"] = "hard-core for every sector (chi ignored)";
    out.extra["rate"] = "per-excitation first-order rate min(-Im E_total)/M";
    out.extra["threshold"] = map.threshold;
    std::ostringstream s;
    for (std::size_t im = 0; im < ms.size(); ++im) s << "M=" << ms[im] << " boundary N=" << map.boundary(im) << "; ";
    out.summary = s.str();
    return out;
}

inline Output run_decay(const Options& o, const ArrayConfig& config) {
    const auto tg = parse_grid("t-range", o.str("t-range"));
    const auto ts = logspace(tg.lower, tg.upper, tg.count);
    const auto singles = single_modes(config);
    const auto modes = double_modes(config);
    const std::string sel = o.str("mode");
    std::vector<std::size_t> chosen;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        if (sel == "all" || sel == to_string(modes[k].label)) chosen.push_back(k);
    }
    if (sel != "all" && sel != "superradiant" && sel != "twilight" && sel != "subradiant") {
        const long k = parse_integer("mode", sel);
        if (k < 0 || k >= static_cast<long>(modes.size())) throw ConfigError("--mode index out of range");
        chosen = {static_cast<std::size_t>(k)};
    }
    if (chosen.empty()) throw ConfigError("--mode selects no double-excited mode");

    std::vector<std::string> header = {"mode", "class", "t", "p2"};
    for (std::size_t mu = 0; mu < singles.size(); ++mu) header.push_back("p1_" + std::to_string(mu));
    header.insert(header.end(), {"gamma_tot", "photons"});
    CsvTable t(header);
    ordered_json limits = ordered_json::array();
    for (std::size_t k : chosen) {
        const auto tr = cascade(modes[k], singles, config, ts);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            std::vector<std::string> row = {std::to_string(k), to_string(modes[k].label), fmt(ts[i]), fmt(tr.p2[i])};
            for (std::size_t mu = 0; mu < singles.size(); ++mu) row.push_back(fmt(tr.p1[mu][i]));
            row.push_back(fmt(tr.gamma_tot[i]));
            row.push_back(fmt(tr.photons[i]));
            t.add(row);
        }
        limits.push_back({{"mode", k}, {"class", to_string(modes[k].label)}, {"gamma21", tr.gamma21},
                          {"photons_limit", tr.photons_limit}, {"t_half", time_to_photons(tr, 1.5)}});
    }
    Output out;
    out.csv = t.str();
    out.grids["t"] = {{"scale", "log"}, {"range", o.str("t-range")}};
    out.extra["modes"] = limits;
    out.extra["branching"] = "raw D = |<d|c_mu>|^2 / sum|d|^2, not renormalized";
    out.summary = std::to_string(chosen.size()) + " mode trace(s)";
    return out;
}

inline std::vector<double> time_grid_from(const Options& o) {
    const auto tg = parse_grid("t-range", o.str("t-range"));
    const std::string scale = o.str("t-scale");
    if (scale == "log") {
        auto v = logspace(tg.lower, tg.upper, tg.count);
        v.insert(v.begin(), 0.0);
        return v;
    }
    if (scale == "lin") {
        if (tg.lower < 0.0) throw ConfigError("--t-range: times must be >= 0");
        return grid_values(tg);
    }
    throw ConfigError("--t-scale must be log or lin");
}

inline Output run_g2(const Options& o, const ArrayConfig& config) {
    const auto ts = time_grid_from(o);
    const auto es = grid_values(parse_grid("eps-range", o.str("eps-range")));
    const double delta = o.num("delta");
    const auto tr = g2_map(config, ts, es, delta, jobs_from(o));
    CsvTable t({"eps", "t", "g2"});
    for (std::size_t ie = 0; ie < es.size(); ++ie)
        for (std::size_t it = 0; it < ts.size(); ++it) t.add({fmt(es[ie]), fmt(ts[it]), fmt(tr.g2[ie][it])});
    Output out;
    out.csv = t.str();
    out.grids["t"] = {{"scale", o.str("t-scale")}, {"range", o.str("t-range")},
                      {"note", "log scale prepends t = 0"}};
    out.grids["eps"] = o.str("eps-range");
    double worst = 0.0;
    for (double d : tr.tail_deviation) worst = std::max(worst, d);
    out.extra["delta"] = delta;
    out.extra["max_tail_deviation"] = worst;
    out.extra["geometry"] = "backscattering, same kernel M as forward scattering";
    out.summary = "max |g2(t_last) - 1| = " + format_number(worst);
    return out;
}

inline Output run_xy(const Options& o, const ArrayConfig& config) {
    const std::string es = o.str("eps");
    double eps = 0.0;
    if (es.rfind("re_eps", 0) == 0) {
        const long k = parse_integer("eps", es.substr(6));
        const auto modes = double_modes(config);
        if (k < 1 || k > static_cast<long>(modes.size())) throw ConfigError("--eps re_epsK: K out of range");
        eps = modes[static_cast<std::size_t>(k - 1)].energy.real();
    } else {
        eps = parse_double("eps", es);
    }
    const double dw = o.num("dw");
    const auto g = parse_grid("xy-range", o.str("xy-range"));
    if (g.count < 2) throw ConfigError("--xy-range needs at least 2 points");
    const auto grid = spatial_wavefunction(config, eps - 0.5 * dw, eps + 0.5 * dw, {g.lower, g.upper, g.count},
                                           QMethod::markovian_closed_form, jobs_from(o));
    CsvTable t({"x", "y", "pair_density"});
    const auto& xs = grid.axes[0].values;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j) t.add({fmt(xs[i]), fmt(xs[j]), fmt(grid.at(i, j))});
    Output out;
    out.csv = t.str();
    out.grids["xy"] = {{"range", o.str("xy-range")}, {"unit", "c/gamma0"}};
    out.extra["eps"] = eps;
    out.extra["w1"] = eps - 0.5 * dw;
    out.extra["w2"] = eps + 0.5 * dw;
    out.summary = "pair energy " + format_number(eps);
    return out;
}

inline void add_shared(Command& c) {
    c.opts.add(c.app, "n", "4", "number of qubits N");
    c.opts.add(c.app, "phi", "0.1", "spacing phase omega0 d / c");
    c.opts.add(c.app, "chi", "1e4", "anharmonicity in gamma0 units, or 'inf' for two-level qubits");
    c.opts.add(c.app, "gamma0", "1", "radiative decay unit");
    c.opts.add(c.app, "positions", "", "comma-separated positions omega0 z_j / c (overrides phi)");
    c.opts.add(c.app, "out", c.name + ".csv", "output CSV path; the manifest goes to <out>.manifest.json");
    c.opts.add(c.app, "config", "", "JSON or key=value file with default flag values");
    c.opts.add(c.app, "tol", "1e-9", "relative tolerance of frequency integrals");
    c.opts.add(c.app, "jobs", "1", "worker threads");
}

inline std::vector<Command> make_commands(CLI::App& app) {
    std::vector<Command> cmds;
    auto make = [&](std::string name, std::string desc, auto run) {
        Command c;
        c.name = std::move(name);
        c.description = std::move(desc);
        c.app = app.add_subcommand(c.name, c.description);
        c.run = run;
        cmds.push_back(std::move(c));
        add_shared(cmds.back());
        return &cmds.back();
    };
    cmds.reserve(6);
    {
        auto* c = make("modes", "eigenmodes, decay rates and classification", run_modes);
        c->opts.add(c->app, "sectors", "1,2", "excitation sectors to list");
        c->opts.add(c->app, "sweep-n", "", "N range 'a:b' for the minimal/superradiant decay-rate sweep");
    }
    {
        auto* c = make("scatter", "forward incoherent two-photon intensity", run_scatter);
        c->opts.add(c->app, "kind", "cut", "cut | w1w2 | phi-eps");
        c->opts.add(c->app, "eps-range", "-1:1:201", "pair-energy grid lower:upper:count");
        c->opts.add(c->app, "dw", "0", "w2 - w1 for cut and phi-eps maps");
        c->opts.add(c->app, "w1-range", "-1:1:101", "w1 grid for w1w2 maps");
        c->opts.add(c->app, "w2-range", "-1:1:101", "w2 grid for w1w2 maps");
        c->opts.add(c->app, "phi-range", "0.001:0.3:60", "phi grid for phi-eps maps");
        c->opts.add(c->app, "q-method", "closed", "closed | quadrature | resonant");
        c->opts.add(c->app, "window", "300", "half-width of the outgoing-frequency integral");
        c->opts.add(c->app, "max-points", "1000000", "grid size cap");
        c->opts.add_flag(c->app, "normalize", "divide by the single-qubit maximum over the same grid");
    }
    {
        auto* c = make("threshold", "minimal M-excitation decay rate map", run_threshold);
        c->opts.add(c->app, "m-range", "1:3", "excitation numbers first:last");
        c->opts.add(c->app, "n-range", "1:8", "qubit numbers first:last");
    }
    {
        auto* c = make("decay", "cascade emission kinetics of double-excited modes", run_decay);
        c->opts.add(c->app, "mode", "all", "all | superradiant | twilight | subradiant | <index>");
        c->opts.add(c->app, "t-range", "1e-2:1e3:501", "log-spaced time grid lower:upper:count");
    }
    {
        auto* c = make("g2", "smoothed photon-photon correlation map", run_g2);
        c->opts.add(c->app, "delta", "20", "half splitting of the incoming pair, w1,2 = eps +- delta");
        c->opts.add(c->app, "eps-range", "-3:3:61", "pair-energy grid lower:upper:count");
        c->opts.add(c->app, "t-range", "1e-2:1e3:121", "time grid lower:upper:count");
        c->opts.add(c->app, "t-scale", "log", "log (t = 0 prepended) | lin");
    }
    {
        auto* c = make("xy", "spatial pair density of the scattered photons", run_xy);
        c->opts.add(c->app, "eps", "re_eps1", "pair energy, or re_epsK for the K-th most subradiant pair mode");
        c->opts.add(c->app, "dw", "0", "w2 - w1 of the incoming pair");
        c->opts.add(c->app, "xy-range", "0:50:201", "coordinate grid lower:upper:count in c/gamma0");
    }
    return cmds;
}

// Injects config-file values right after the subcommand name so that flags
// given on the command line (parsed later, last value wins) override them.
inline std::vector<std::string> expand_config(const std::vector<std::string>& args, const std::vector<Command>& cmds) {
    std::size_t sub = 0;
    for (std::size_t k = 1; k < args.size(); ++k) {
        if (!args[k].empty() && args[k][0] != '-') {
            sub = k;
            break;
        }
    }
    if (sub == 0) return args;
    const Command* cmd = nullptr;
    for (const auto& c : cmds)
        if (c.name == args[sub]) cmd = &c;
    if (!cmd) return args;
    std::string path;
    for (std::size_t k = sub + 1; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
        else if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
    }
    if (path.empty()) return args;
    std::vector<std::string> out(args.begin(), args.begin() + static_cast<long>(sub) + 1);
    for (const auto& [k, v] : load_config_file(path)) {
        if (k == "config") continue;
        if (!cmd->opts.known(k)) throw ConfigError("config file: unknown key '" + k + "' for " + cmd->name);
        if (cmd->opts.is_flag(k)) {
            if (v == "true" || v == "1") out.push_back("--" + k);
            else if (v != "false" && v != "0") throw ConfigError("config file: '" + k + "' must be true or false");
        } else {
            out.push_back("--" + k);
            out.push_back(v);
        }
    }
    out.insert(out.end(), args.begin() + static_cast<long>(sub) + 1, args.end());
    return out;
}

inline std::string command_line(const std::vector<std::string>& args) {
    std::string s;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (k) s += ' ';
        s += args[k];
    }
    return s;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"wgqed: waveguide QED simulator for qubit arrays"};
    app.require_subcommand(1);
    app.set_version_flag("--version", WGQED_VERSION);
    auto cmds = make_commands(app);
    std::vector<std::string> original(argv, argv + argc);
    try {
        const auto expanded = expand_config(original, cmds);
        std::vector<std::string> rest(expanded.rbegin(), expanded.rend() - 1);
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    for (auto& c : cmds) {
        if (!c.app->parsed()) continue;
        const auto start = std::chrono::steady_clock::now();
        try {
            const ArrayConfig config = config_from(c.opts);
            const Output result = c.run(c.opts, config);
            const double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            ordered_json m;
            m["tool"] = "wgqed";
            m["version"] = WGQED_VERSION;
            m["command"] = c.name;
            m["command_line"] = command_line(original);
            m["args"] = c.opts.to_json();
            m["config"] = config_json(config);
            m["grids"] = result.grids;
            m["tolerances"] = {{"integral_rel_tol", tol_from(c.opts)},
                               {"integral_abs_tol", IntegrationOptions{}.abs_tol},
                               {"eig_backward_error", 1e-10},
                               {"solve_residual", 1e-10}};
            m["units"] = {{"energy", ScatteringUnits::frequency},
                          {"time", "1/gamma0"},
                          {"amplitude", ScatteringUnits::amplitude},
                          {"phases", ScatteringUnits::phases},
                          {"csv_numbers", "%.11e (12 significant digits), nan for undefined"}};
            m["results"] = result.extra;
            m["wall_clock_seconds"] = seconds;
            const std::string path = c.opts.str("out");
            atomic_write(path, result.csv);
            atomic_write(path + ".manifest.json", m.dump(2) + "\n");
            out << "wrote " << path;
            if (!result.summary.empty()) out << " (" << result.summary << ")";
            out << '\n';
            return kOk;
        } catch (const ConfigError& e) {
            err << "error: " << e.what() << '\n';
            return kUsage;
        } catch (const NumericalError& e) {
            err << "numerical failure: " << e.what() << '\n';
            return kNumerical;
        } catch (const IoError& e) {
            err << "i/o failure: " << e.what() << '\n';
            return kIoFailure;
        }
    }
    err << app.help();
    return kUsage;
}

}  // namespace wgqed::cli
