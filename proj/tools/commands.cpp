#include "commands.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <set>
#include <sstream>

#include "tra/asymptotics.hpp"
#include "tra/errors.hpp"
#include "tra/spectra.hpp"

namespace tra::cli {

namespace {

[[noreturn]] void invalid(const std::string& code, const std::string& msg) { throw ValidationError(code, msg); }

const std::map<std::string, std::set<std::string>>& model_keys() {
    static const std::map<std::string, std::set<std::string>> k = {
        {"coulomb", {"Z", "ell", "lambda"}},
        {"oscillator", {"omega", "ell", "lambda"}},
        {"morse", {"V0", "V1", "alpha"}},
        {"poschl-teller", {"V0", "V1", "lambda"}},
        {"trig-scarf", {"V0", "Vplus", "Vminus", "lambda"}},
        {"eckart", {"V0", "V1", "lambda"}},
        {"rosen-morse", {"A", "B", "lambda"}},
        {"log-spectrum", {"mu", "lambda"}},
        {"table1", {"row", "V0", "V1", "Vplus", "Vminus", "lambda", "E"}},
    };
    return k;
}

const std::map<std::string, std::set<std::string>>& family_keys() {
    static const std::map<std::string, std::set<std::string>> k = {
        {"meixner-pollaczek", {"mu", "theta"}},
        {"meixner", {"mu", "beta"}},
        {"krawtchouk", {"N", "gamma"}},
        {"continuous-dual-hahn", {"mu", "a", "b"}},
        {"dual-hahn", {"N", "alpha", "beta"}},
        {"wilson", {"mu", "nu", "a", "b"}},
        {"racah", {"N", "alpha", "beta", "gamma"}},
        {"h-poly", {"mu", "nu", "alpha", "theta"}},
    };
    return k;
}

// Route options ride along with model parameters.
const std::set<std::string> kRouteKeys = {"a", "nu"};

const std::map<std::string, double> kDefaultTol = {
    {"quad", 1e-10}, {"oracle", 1e-6}, {"tridiag", 1e-7}, {"control", 1e-2}, {"phase", 1e-3}, {"amplitude", 5e-3},
};

void check_keys(const std::string& what, const std::map<std::string, double>& params, const std::set<std::string>& ok,
                bool routeKeys) {
    for (const auto& [k, v] : params)
        if (!ok.count(k) && !(routeKeys && kRouteKeys.count(k)))
            invalid("unknown_key", what + ": unknown parameter '" + k + "'");
}

double get(const std::map<std::string, double>& p, const std::string& k, double dflt) {
    auto it = p.find(k);
    return it == p.end() ? dflt : it->second;
}

int get_int(const std::map<std::string, double>& p, const std::string& k, int dflt) {
    const double v = get(p, k, dflt);
    if (v != std::floor(v) || std::abs(v) > 1e6) invalid("domain", "parameter '" + k + "' must be an integer");
    return static_cast<int>(v);
}

RouteOptions route_options(const JobConfig& c) {
    RouteOptions o;
    o.a = get(c.params, "a", o.a);
    if (c.params.count("nu")) o.nu = c.params.at("nu");
    if (c.kmax >= 0) o.kmax = c.kmax + 1;
    return o;
}

bool mixed(const FamilyParams& p) {
    if (auto* f = std::get_if<ContinuousDualHahn>(&p.v)) return f->mu < 0.0;
    if (auto* f = std::get_if<Wilson>(&p.v)) return f->mu.real() < 0.0;
    return false;
}

// z from the family's natural argument at a scattering energy.
double scattering_z(const PolynomialMap& pm) {
    return std::holds_alternative<MeixnerPollaczek>(pm.family.v) ? pm.argument : std::sqrt(pm.argument);
}

void add_fit(json& row, const FamilyParams& p, double z, double phase, double amplitude, json& notes) {
    try {
        const ScatteringResult f = fit_scattering(p, z);
        row["fit_phase"] = f.phase;
        row["fit_amplitude"] = f.amplitude;
        row["fit_residual"] = f.residual;
        row["phase_delta"] = std::abs(wrap_phase(f.phase - phase));
        row["amplitude_rel_delta"] = std::abs(f.amplitude - amplitude) / amplitude;
    } catch (const ValidationError& e) {
        for (const char* k : {"fit_phase", "fit_amplitude", "fit_residual", "phase_delta", "amplitude_rel_delta"})
            row[k] = nullptr;
        notes.push_back("z=" + dump_json(z) + ": fit skipped (" + e.what() + ")");
    }
}

json cmd_spectrum(const JobConfig& c, json& notes) {
    json res;
    json rows = json::array();
    if (!c.family.empty()) {
        const FamilyParams p = make_family(c.family, c.params);
        const SpectrumResult s = spectrum_points(p, c.kmax + 1);
        res["source_formula"] = s.sourceFormula;
        res["finite"] = s.finite;
        res["N"] = s.N;
        for (const auto& e : s.energies) rows.push_back(json{{"k", e.k}, {"z2", e.value}});
        res["rows"] = rows;
        return res;
    }
    const PotentialModel m = make_model(c.model, c.params);
    const Route r = parse_route(c.route);
    const RouteOptions o = route_options(c);
    const SpectrumResult s = bound_spectrum(m, r, o);
    res["source_formula"] = s.sourceFormula;
    res["finite"] = s.finite;
    res["N"] = s.N;
    res["boundary"] = s.boundary;
    if (auto* l = std::get_if<LogSpectrum>(&m)) {
        const int N = log_spectrum_size(l->mu);
        json ls{{"N", N}, {"states", N + 1}};
        ls["mu_threshold_next"] = log_spectrum_threshold(N + 1);
        if (N >= 1) ls["mu_threshold_this"] = log_spectrum_threshold(N);
        res["log_spectrum"] = ls;
    }

    std::optional<OracleResult> orc;
    try {
        orc = eigen_oracle_spectrum(m, r, c.M, static_cast<int>(s.energies.size()), o);
        res["oracle_M"] = orc->M;
    } catch (const ValidationError& e) {
        notes.push_back(std::string("oracle unavailable: ") + e.what());
    }
    double worst = 0.0;
    for (size_t i = 0; i < s.energies.size(); ++i) {
        const auto& e = s.energies[i];
        json row{{"k", e.k}, {"E", e.value}};
        if (i < s.eps.size()) row["eps"] = s.eps[i];
        if (orc && i < orc->levels.size()) {
            const auto& L = orc->levels[i];
            const double d = std::abs(L.value - e.value);
            const double rel = d / std::max(std::abs(e.value), 1e-300);
            row["E_oracle"] = L.value;
            row["abs_delta"] = d;
            row["rel_delta"] = rel;
            row["convergence_delta"] = L.convergenceDelta;
            worst = std::max(worst, rel);
        } else {
            for (const char* k : {"E_oracle", "abs_delta", "rel_delta", "convergence_delta"}) row[k] = nullptr;
        }
        rows.push_back(row);
    }
    if (orc) {
        res["max_rel_delta"] = worst;
        res["oracle_within_tol"] = worst <= c.tol.at("oracle");
    }
    res["rows"] = rows;
    return res;
}

json cmd_phaseshift(const JobConfig& c, json& notes) {
    json rows = json::array();
    const auto pts = grid_points(*c.grid);
    if (!c.family.empty()) {
        const FamilyParams p = make_family(c.family, c.params);
        for (double z : pts) {
            const ScatteringResult r = closed_form_scattering(p, z);
            json row{{"z", z}, {"phase", r.phase}, {"amplitude", r.amplitude}, {"formula_amplitude", r.formulaAmplitude}};
            if (c.fit) add_fit(row, p, z, r.phase, r.amplitude, notes);
            rows.push_back(row);
        }
        return json{{"rows", rows}};
    }
    const PotentialModel m = make_model(c.model, c.params);
    const Route r = parse_route(c.route);
    const RouteOptions o = route_options(c);
    if (r == Route::Wilson && !c.params.count("a")) notes.push_back("wilson route: a = b defaulted to 0.5");
    for (double E : pts) {
        const ScatteringResult s = phase_shift(m, r, E, o);
        json row{{"E", E}, {"phase", s.phase}, {"amplitude", s.amplitude}, {"formula_amplitude", s.formulaAmplitude}};
        if (c.fit) {
            const PolynomialMap pm = map_to_polynomial(m, r, E, o);
            add_fit(row, pm.family, scattering_z(pm), s.phase, s.amplitude, notes);
        }
        rows.push_back(row);
    }
    return json{{"rows", rows}};
}

json cmd_orthocheck(const JobConfig& c, json&) {
    const FamilyParams p = make_family(c.family, c.params);
    QuadOptions q;
    q.tol = c.tol.at("quad");
    const bool gen = mixed(p);
    const auto G = gen ? generalized_orthogonality_gram(p, c.nmax, q) : orthogonality_gram(p, c.nmax, q);
    json rows = json::array(), D = json::array();
    double worst = 0.0;
    for (int n = 0; n <= c.nmax; ++n) {
        json line = json::array();
        for (int m = 0; m <= c.nmax; ++m) {
            const double d = std::abs(G[n][m] - (n == m ? 1.0 : 0.0));
            worst = std::max(worst, d);
            line.push_back(d);
            rows.push_back(json{{"n", n}, {"m", m}, {"gram", G[n][m]}, {"defect", d}});
        }
        D.push_back(line);
    }
    return json{{"relation", gen ? "generalized" : "standard"},
                {"max_defect", worst},
                {"defect_matrix", D},
                {"rows", rows}};
}

json tridiag_row(const std::string& model, const std::string& route, const BasisSpec& b, int M, const JobConfig& c) {
    const TridiagReport t = tridiagonality_defect(b, M);
    const TridiagReport ctl = tridiagonality_defect(perturbed_basis(b), M);
    return json{{"label", t.label},
                {"model", model},
                {"route", route},
                {"defect", t.defect},
                {"control_defect", ctl.defect},
                {"pass", t.defect <= c.tol.at("tridiag")},
                {"control_pass", M < 3 || ctl.defect > c.tol.at("control")}};
}

json cmd_tridiag(const JobConfig& c, json&) {
    json rows = json::array();
    if (!c.model.empty()) {
        const PotentialModel m = make_model(c.model, c.params);
        const Route r = parse_route(c.route);
        rows.push_back(tridiag_row(model_name(m), c.route, basis_spec(m, r, route_options(c)), c.M, c));
    } else {
        for (const AuditCase& a : audit_catalog())
            rows.push_back(tridiag_row(model_name(a.model), route_name(a.route),
                                       basis_spec(a.model, a.route, a.options), c.M, c));
    }
    bool all = true;
    for (const auto& row : rows) all = all && row["pass"].get<bool>() && row["control_pass"].get<bool>();
    return json{{"all_pass", all}, {"rows", rows}};
}

json cmd_wavefunction(const JobConfig& c, json&) {
    const PotentialModel m = make_model(c.model, c.params);
    const Route r = parse_route(c.route);
    const WavefunctionSample w = reconstruct_wavefunction(m, r, c.level, grid_points(*c.grid), c.M, route_options(c));
    json rows = json::array();
    for (size_t i = 0; i < w.x.size(); ++i) rows.push_back(json{{"x", w.x[i]}, {"psi", w.values[i]}});
    return json{{"energy_label", w.energyLabel},
                {"truncation", w.truncation},
                {"tail_estimate", w.tailEstimate},
                {"rows", rows}};
}

json cmd_poly_eval(const JobConfig& c, json& notes) {
    const FamilyParams p = make_family(c.family, c.params);
    json rows = json::array();
    bool closedOk = true;
    for (double x : grid_points(*c.grid)) {
        const auto P = poly_eval_all(p, c.nmax, x);
        for (int n = 0; n <= c.nmax; ++n) {
            json row{{"arg", x}, {"n", n}, {"recursion", P[n]}};
            try {
                const double v = std::holds_alternative<HPoly>(p.v) ? h_poly_eval(std::get<HPoly>(p.v), n, x)
                                                                   : poly_eval_closed(p, n, x);
                row["closed"] = v;
                row["abs_delta"] = std::abs(v - P[n]);
            } catch (const ValidationError& e) {
                row["closed"] = row["abs_delta"] = nullptr;
                if (closedOk) notes.push_back(std::string("closed form unavailable: ") + e.what());
                closedOk = false;
            }
            rows.push_back(row);
        }
    }
    return json{{"variable_map", recurrence_coeffs(p).variableMap()}, {"rows", rows}};
}

void dump_rec(const json& j, std::string& out, int indent) {
    const std::string pad(indent, ' ');
    switch (j.type()) {
        case json::value_t::null: out += "null"; return;
        case json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; return;
        case json::value_t::number_integer: out += std::to_string(j.get<long long>()); return;
        case json::value_t::number_unsigned: out += std::to_string(j.get<unsigned long long>()); return;
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += buf;
            return;
        }
        case json::value_t::string: out += j.dump(); return;
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Flat arrays of scalars stay on one line.
            const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
            out += "[";
            bool first = true;
            for (const auto& e : j) {
                out += first ? "" : ",";
                if (flat) out += first ? "" : " ";
                else out += "\n" + pad + "  ";
                dump_rec(e, out, indent + 2);
                first = false;
            }
            if (!flat) out += "\n" + pad;
            out += "]";
            return;
        }
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{";
            bool first = true;
            for (const auto& [k, v] : j.items()) {
                out += first ? "\n" : ",\n";
                out += pad + "  " + json(k).dump() + ": ";
                dump_rec(v, out, indent + 2);
                first = false;
            }
            out += "\n" + pad + "}";
            return;
        }
        default: out += "null";
    }
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }
    return dump_json(v);
}

}  // namespace

Grid parse_grid(const std::string& s) {
    Grid g;
    char extra = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &g.start, &g.stop, &g.count, &extra) != 3)
        invalid("bad_grid", "grid must be start:stop:count, got '" + s + "'");
    if (!std::isfinite(g.start) || !std::isfinite(g.stop) || g.count < 1)
        invalid("bad_grid", "grid needs finite bounds and count >= 1");
    return g;
}

std::vector<double> grid_points(const Grid& g) {
    std::vector<double> v;
    for (int i = 0; i < g.count; ++i)
        v.push_back(g.count == 1 ? g.start : g.start + (g.stop - g.start) * i / (g.count - 1));
    return v;
}

std::pair<std::string, double> parse_param(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) invalid("bad_param", "parameter must be key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    double v = 0.0;
    try {
        size_t pos = 0;
        v = std::stod(val, &pos);
        if (pos != val.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        invalid("bad_param", "parameter '" + key + "' needs a numeric value, got '" + val + "'");
    }
    if (!std::isfinite(v)) invalid("bad_param", "parameter '" + key + "' must be finite");
    return {key, v};
}

PotentialModel make_model(const std::string& name, const std::map<std::string, double>& p) {
    auto it = model_keys().find(name);
    if (it == model_keys().end()) invalid("unknown_model", "unknown model '" + name + "'");
    check_keys(name, p, it->second, true);
    PotentialModel m;
    if (name == "coulomb") {
        Coulomb d;
        m = Coulomb{get(p, "Z", d.Z), get_int(p, "ell", d.ell), get(p, "lambda", d.lambda)};
    } else if (name == "oscillator") {
        Oscillator d;
        m = Oscillator{get(p, "omega", d.omega), get_int(p, "ell", d.ell), get(p, "lambda", d.lambda)};
    } else if (name == "morse") {
        Morse d;
        m = Morse{get(p, "V0", d.V0), get(p, "V1", d.V1), get(p, "alpha", d.alpha)};
    } else if (name == "poschl-teller") {
        PoschlTeller d;
        m = PoschlTeller{get(p, "V0", d.V0), get(p, "V1", d.V1), get(p, "lambda", d.lambda)};
    } else if (name == "trig-scarf") {
        TrigScarf d;
        m = TrigScarf{get(p, "V0", d.V0), get(p, "Vplus", d.Vplus), get(p, "Vminus", d.Vminus),
                      get(p, "lambda", d.lambda)};
    } else if (name == "eckart") {
        Eckart d;
        m = Eckart{get(p, "V0", d.V0), get(p, "V1", d.V1), get(p, "lambda", d.lambda)};
    } else if (name == "rosen-morse") {
        RosenMorse d;
        m = RosenMorse{get(p, "A", d.A), get(p, "B", d.B), get(p, "lambda", d.lambda)};
    } else if (name == "log-spectrum") {
        LogSpectrum d;
        m = LogSpectrum{get(p, "mu", d.mu), get(p, "lambda", d.lambda)};
    } else {
        Table1Entry d;
        m = Table1Entry{get_int(p, "row", d.row), get(p, "V0", d.V0),     get(p, "V1", d.V1),
                        get(p, "Vplus", d.Vplus), get(p, "Vminus", d.Vminus), get(p, "lambda", d.lambda),
                        get(p, "E", d.E)};
    }
    validate_model(m);
    return m;
}

FamilyParams make_family(const std::string& name, const std::map<std::string, double>& p) {
    auto it = family_keys().find(name);
    if (it == family_keys().end()) invalid("unknown_family", "unknown family '" + name + "'");
    check_keys(name, p, it->second, false);
    FamilyParams f;
    if (name == "meixner-pollaczek") {
        MeixnerPollaczek d;
        f = MeixnerPollaczek{get(p, "mu", d.mu), get(p, "theta", d.theta)};
    } else if (name == "meixner") {
        Meixner d;
        f = Meixner{get(p, "mu", d.mu), get(p, "beta", d.beta)};
    } else if (name == "krawtchouk") {
        Krawtchouk d;
        f = Krawtchouk{get_int(p, "N", d.N), get(p, "gamma", d.gamma)};
    } else if (name == "continuous-dual-hahn") {
        ContinuousDualHahn d;
        f = ContinuousDualHahn{get(p, "mu", d.mu), get(p, "a", d.a.real()), get(p, "b", d.b.real())};
    } else if (name == "dual-hahn") {
        DualHahn d;
        f = DualHahn{get_int(p, "N", d.N), get(p, "alpha", d.alpha), get(p, "beta", d.beta)};
    } else if (name == "wilson") {
        Wilson d;
        f = Wilson{get(p, "mu", d.mu.real()), get(p, "nu", d.nu.real()), get(p, "a", d.a.real()),
                   get(p, "b", d.b.real())};
    } else if (name == "racah") {
        Racah d;
        f = Racah{get_int(p, "N", d.N), get(p, "alpha", d.alpha), get(p, "beta", d.beta), get(p, "gamma", d.gamma)};
    } else {
        HPoly d;
        f = HPoly{get(p, "mu", d.mu), get(p, "nu", d.nu), get(p, "alpha", d.alpha), get(p, "theta", d.theta)};
    }
    validate(f);
    return f;
}

JobConfig resolve(JobConfig c) {
    static const std::set<std::string> commands = {"spectrum", "phaseshift", "orthocheck",
                                                   "tridiag",  "wavefunction", "poly-eval"};
    if (!commands.count(c.command)) invalid("unknown_command", "unknown command '" + c.command + "'");
    if (!c.model.empty() && !c.family.empty()) invalid("conflicting_inputs", "give --model or --family, not both");
    const bool wantsModel = c.command == "wavefunction";
    const bool wantsFamily = c.command == "orthocheck" || c.command == "poly-eval";
    if (wantsModel && c.model.empty()) invalid("missing_input", c.command + " needs --model");
    if (wantsFamily && c.family.empty()) invalid("missing_input", c.command + " needs --family");
    if ((c.command == "spectrum" || c.command == "phaseshift") && c.model.empty() && c.family.empty())
        invalid("missing_input", c.command + " needs --model or --family");
    if (c.command == "tridiag" && !c.family.empty()) invalid("conflicting_inputs", "tridiag takes --model only");
    if ((c.command == "phaseshift" || c.command == "wavefunction" || c.command == "poly-eval") && !c.grid)
        invalid("missing_input", c.command + " needs --grid");
    if (c.command == "wavefunction" && c.level.empty()) invalid("missing_input", "wavefunction needs --level");
    if (c.command != "wavefunction" && !c.level.empty()) invalid("conflicting_inputs", "--level is for wavefunction");
    if (c.fit && c.command != "phaseshift") invalid("conflicting_inputs", "--fit is for phaseshift");
    if (c.format != "json" && c.format != "csv") invalid("bad_format", "format must be json or csv");

    if (!c.model.empty()) {
        const PotentialModel m = make_model(c.model, c.params);
        const Route r = c.route.empty() ? default_route(m) : parse_route(c.route);
        check_route(m, r);
        c.route = route_name(r);
    } else {
        if (!c.route.empty()) invalid("conflicting_inputs", "--route applies to models");
        if (!c.family.empty()) make_family(c.family, c.params);
    }

    if (c.M == 0) c.M = c.command == "spectrum" ? 100 : c.command == "wavefunction" ? 80 : 20;
    if (c.M < 1 || c.M > 2000) invalid("domain", "M must be in 1..2000");
    if (c.command == "spectrum" && c.M < 2) invalid("domain", "spectrum needs M >= 2");
    if (c.kmax < 0) c.kmax = 4;
    if (c.kmax > 10000) invalid("domain", "kmax must be <= 10000");
    if (c.nmax < 0) c.nmax = c.command == "orthocheck" ? 5 : 10;
    if (c.nmax > 200) invalid("domain", "nmax must be <= 200");
    for (const auto& [k, v] : c.tol) {
        if (!kDefaultTol.count(k)) invalid("unknown_key", "unknown tolerance '--tol-" + k + "'");
        if (!(v > 0.0) || !std::isfinite(v)) invalid("domain", "tolerance '" + k + "' must be positive");
    }
    for (const auto& [k, v] : kDefaultTol) c.tol.emplace(k, v);
    return c;
}

json config_to_json(const JobConfig& c) {
    json j;
    j["command"] = c.command;
    j["model"] = c.model;
    j["family"] = c.family;
    j["route"] = c.route;
    json p = json::object();
    for (const auto& [k, v] : c.params) p[k] = v;
    j["params"] = p;
    j["M"] = c.M;
    j["kmax"] = c.kmax;
    j["nmax"] = c.nmax;
    j["grid"] = c.grid ? json{{"start", c.grid->start}, {"stop", c.grid->stop}, {"count", c.grid->count}} : json();
    j["level"] = c.level;
    j["fit"] = c.fit;
    json t = json::object();
    for (const auto& [k, v] : c.tol) t[k] = v;
    j["tolerances"] = t;
    j["format"] = c.format;
    j["out"] = c.out;
    j["reproducible"] = c.reproducible;
    j["seed"] = c.seed;
    return j;
}

JobConfig config_from_json(const json& j) {
    static const std::set<std::string> keys = {"command", "model", "family", "route",  "params", "M",
                                               "kmax",    "nmax",  "grid",   "level",  "fit",    "tolerances",
                                               "format",  "out",   "reproducible", "seed"};
    if (!j.is_object()) invalid("bad_config", "config must be a JSON object");
    for (const auto& [k, v] : j.items())
        if (!keys.count(k)) invalid("unknown_key", "unknown config key '" + k + "'");
    JobConfig c;
    try {
        c.command = j.value("command", "");
        c.model = j.value("model", "");
        c.family = j.value("family", "");
        c.route = j.value("route", "");
        if (j.contains("params"))
            for (const auto& [k, v] : j["params"].items()) c.params[k] = v.get<double>();
        c.M = j.value("M", 0);
        c.kmax = j.value("kmax", -1);
        c.nmax = j.value("nmax", -1);
        if (j.contains("grid") && !j["grid"].is_null())
            c.grid = Grid{j["grid"]["start"].get<double>(), j["grid"]["stop"].get<double>(),
                          j["grid"]["count"].get<int>()};
        c.level = j.value("level", "");
        c.fit = j.value("fit", false);
        if (j.contains("tolerances"))
            for (const auto& [k, v] : j["tolerances"].items()) c.tol[k] = v.get<double>();
        c.format = j.value("format", "json");
        c.out = j.value("out", "");
        c.reproducible = j.value("reproducible", false);
        c.seed = j.value("seed", std::uint64_t{0});
    } catch (const json::exception& e) {
        invalid("bad_config", e.what());
    }
    return c;
}

json run_job(const JobConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    json notes = json::array();
    json results;
    if (c.command == "spectrum") results = cmd_spectrum(c, notes);
    else if (c.command == "phaseshift") results = cmd_phaseshift(c, notes);
    else if (c.command == "orthocheck") results = cmd_orthocheck(c, notes);
    else if (c.command == "tridiag") results = cmd_tridiag(c, notes);
    else if (c.command == "wavefunction") results = cmd_wavefunction(c, notes);
    else if (c.command == "poly-eval") results = cmd_poly_eval(c, notes);
    else invalid("unknown_command", "unknown command '" + c.command + "'");

    json diag;
    diag["notes"] = notes;
    if (!c.model.empty()) {
        const PotentialModel m = make_model(c.model, c.params);
        const RouteOptions o = route_options(c);
        json ro{{"a", o.a}};
        if (c.route == "cdh") ro["nu"] = route_nu(m, o);
        diag["route_options"] = ro;
    }
    if (!c.reproducible) {
        const std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        diag["timestamp"] = buf;
        diag["elapsed_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        diag["threads"] = omp_get_max_threads();
    }
    return json{{"schema_version", kSchemaVersion},
                {"command", c.command},
                {"inputs", config_to_json(c)},
                {"results", results},
                {"diagnostics", diag}};
}

std::string dump_json(const json& j) {
    std::string out;
    dump_rec(j, out, 0);
    return out;
}

std::string to_csv(const json& report) {
    const json& rows = report.at("results").at("rows");
    std::vector<std::string> cols;
    for (const auto& row : rows)
        for (const auto& [k, v] : row.items())
            if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    std::ostringstream os;
    for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << (row.contains(cols[i]) ? csv_cell(row[cols[i]]) : "");
        os << "\n";
    }
    return os.str();
}

json error_object(const std::string& code, const std::string& message, int exitCode) {
    return json{{"error", {{"code", code}, {"message", message}, {"exit_code", exitCode}}}};
}

}  // namespace tra::cli
