#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fanstate/fanstate.hpp"

namespace fanstate::cli {

using json = nlohmann::ordered_json;

enum class Command { moments, squeeze, polar, scan, variance, critical, directions, iontrap, verify };
enum class Format { csv, json };

inline const std::map<std::string, Command>& command_names() {
    static const std::map<std::string, Command> names{
        {"moments", Command::moments},     {"squeeze", Command::squeeze},
        {"polar", Command::polar},         {"scan", Command::scan},
        {"variance", Command::variance},   {"critical", Command::critical},
        {"directions", Command::directions}, {"iontrap", Command::iontrap},
        {"verify", Command::verify}};
    return names;
}

inline std::string to_string(Command c) {
    for (const auto& [name, cmd] : command_names())
        if (cmd == c) return name;
    return "unknown";
}

/// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitConvergence = 3;
inline constexpr int kExitSingular = 4;
inline constexpr int kExitVerification = 5;

inline constexpr const char* kOutputDirEnv = "FANSTATE_OUTPUT_DIR";

struct RunConfig {
    Command command = Command::squeeze;
    int k = 1;
    int n_power = 2;
    double xi = 0.0;
    bool xi_given = false;
    double xi_min = 0.0;
    double xi_max = 2.0;
    int xi_steps = 101;
    double phi = 0.0;
    int phi_steps = 0;  // 0 selects the per-command default
    std::string f_model = "unity";
    double eta2 = 0.05;
    double lambda = 0.0;
    int m_add = 1;
    double omega0 = 1.0;
    double omega1 = 1.0;
    double phi0 = 0.0;
    double phi1 = 0.0;
    int l = -1;
    int m = -1;
    int levels = 40;
    double tol = 1e-6;
    int nmax = 200;
    double rel_tol = 1e-15;
    int jobs = 1;
    std::string out;
    Format format = Format::csv;
    bool degrees = false;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline json to_json(const RunConfig& c) {
    return json{{"command", to_string(c.command)},
                {"k", c.k},
                {"n_power", c.n_power},
                {"xi", c.xi},
                {"xi_given", c.xi_given},
                {"xi_min", c.xi_min},
                {"xi_max", c.xi_max},
                {"xi_steps", c.xi_steps},
                {"phi", c.phi},
                {"phi_steps", c.phi_steps},
                {"f_model", c.f_model},
                {"eta2", c.eta2},
                {"lambda", c.lambda},
                {"m_add", c.m_add},
                {"omega0", c.omega0},
                {"omega1", c.omega1},
                {"phi0", c.phi0},
                {"phi1", c.phi1},
                {"l", c.l},
                {"m", c.m},
                {"levels", c.levels},
                {"tol", c.tol},
                {"nmax", c.nmax},
                {"rel_tol", c.rel_tol},
                {"jobs", c.jobs},
                {"out", c.out},
                {"format", c.format == Format::csv ? "csv" : "json"},
                {"degrees", c.degrees}};
}

inline RunConfig config_from_json(const json& j) {
    RunConfig c;
    c.command = command_names().at(j.at("command").get<std::string>());
    j.at("k").get_to(c.k);
    j.at("n_power").get_to(c.n_power);
    j.at("xi").get_to(c.xi);
    j.at("xi_given").get_to(c.xi_given);
    j.at("xi_min").get_to(c.xi_min);
    j.at("xi_max").get_to(c.xi_max);
    j.at("xi_steps").get_to(c.xi_steps);
    j.at("phi").get_to(c.phi);
    j.at("phi_steps").get_to(c.phi_steps);
    j.at("f_model").get_to(c.f_model);
    j.at("eta2").get_to(c.eta2);
    j.at("lambda").get_to(c.lambda);
    j.at("m_add").get_to(c.m_add);
    j.at("omega0").get_to(c.omega0);
    j.at("omega1").get_to(c.omega1);
    j.at("phi0").get_to(c.phi0);
    j.at("phi1").get_to(c.phi1);
    j.at("l").get_to(c.l);
    j.at("m").get_to(c.m);
    j.at("levels").get_to(c.levels);
    j.at("tol").get_to(c.tol);
    j.at("nmax").get_to(c.nmax);
    j.at("rel_tol").get_to(c.rel_tol);
    j.at("jobs").get_to(c.jobs);
    j.at("out").get_to(c.out);
    c.format = j.at("format").get<std::string>() == "json" ? Format::json : Format::csv;
    j.at("degrees").get_to(c.degrees);
    return c;
}

// ---------------------------------------------------------------------------
// Tabular output

using Cell = std::variant<double, long, bool, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_cell(const Cell& c) {
    struct {
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(long v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& v) const {
            if (v.find_first_of(",\"\n") == std::string::npos) return v;
            std::string q = "\"";
            for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            return q + '"';
        }
    } visitor;
    return std::visit(visitor, c);
}

inline void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << '\n';
    }
}

inline json table_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < row.size(); ++i)
            std::visit([&](const auto& v) { obj[t.columns[i]] = v; }, row[i]);
        rows.push_back(std::move(obj));
    }
    return json{{"columns", t.columns}, {"rows", rows}};
}

// ---------------------------------------------------------------------------

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Each index is
/// written by exactly one thread, so callers store results by index.
inline void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
    const int workers = std::max(1, std::min(jobs, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (int i = w; i < count; i += workers) fn(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline NonlinearityModel model_from(const RunConfig& c) {
    if (c.f_model == "unity") return model::Unity{};
    if (c.f_model == "iontrap") return model::IonTrap{c.eta2};
    if (c.f_model == "qdeformed") return model::QDeformed{c.lambda};
    if (c.f_model == "photon-added") return model::PhotonAdded{c.m_add};
    throw ConfigError("unknown f-model '" + c.f_model + "'");
}

inline void validate(const RunConfig& c) {
    if (c.k < 1) throw ConfigError("--k must be >= 1");
    if (c.n_power < 1) throw ConfigError("--n-power must be >= 1");
    if (!(c.xi >= 0.0)) throw ConfigError("--xi must be >= 0");
    if (c.xi_steps < 1 || c.phi_steps < 0) throw ConfigError("step counts must be positive");
    if (!(c.xi_min >= 0.0) || !(c.xi_max >= c.xi_min)) throw ConfigError("need 0 <= xi-min <= xi-max");
    if (c.jobs < 1) throw ConfigError("--jobs must be >= 1");
    if (c.levels < 0) throw ConfigError("--levels must be >= 0");
    if (!(c.tol > 0.0)) throw ConfigError("--tol must be positive");
    if ((c.l < 0) != (c.m < 0)) throw ConfigError("--l and --m must be given together");
    try {
        fanstate::validate(model_from(c));
        SeriesControl{c.nmax, c.rel_tol}.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

class Runner {
public:
    explicit Runner(const RunConfig& c) : cfg_(c) {}

    Table run() {
        switch (cfg_.command) {
            case Command::moments: return moments();
            case Command::squeeze: return squeeze();
            case Command::polar: return polar();
            case Command::scan: return scan();
            case Command::variance: return variance();
            case Command::critical: return critical();
            case Command::directions: return directions();
            case Command::iontrap: return iontrap();
            case Command::verify: return verify();
        }
        throw ConfigError("unknown command");
    }

    bool verification_failed() const { return verification_failed_; }

private:
    double angle_in(double a) const { return cfg_.degrees ? a * std::numbers::pi / 180.0 : a; }
    double angle_out(double a) const { return cfg_.degrees ? a * 180.0 / std::numbers::pi : a; }
    SeriesControl control() const { return {cfg_.nmax, cfg_.rel_tol}; }
    FanStateSpec spec(double xi) const { return {cfg_.k, xi, 0.0, model_from(cfg_)}; }
    int phi_steps(int fallback) const { return cfg_.phi_steps > 0 ? cfg_.phi_steps : fallback; }

    Table moments() {
        MomentEngine engine(spec(cfg_.xi), control());
        const int n = cfg_.n_power;
        Table t{{"name", "l", "m", "value", "terms_used", "converged"}, {}};
        auto add = [&](const std::string& name, int l, int m, const MomentValue& v) {
            t.rows.push_back({name, long{l}, long{m}, v.value, long{v.terms_used}, v.converged});
        };
        add("D_k", 0, 0, engine.normalization());
        add("a^N", 0, n, engine.moment(0, n));
        add("a^2N", 0, 2 * n, engine.moment(0, 2 * n));
        add("adag^N a^N", n, n, engine.moment(n, n));
        add("F_N", n, n, MomentValue{f_n_expectation(engine, n), 0, true, 0.0});
        if (cfg_.l >= 0) add("moment", cfg_.l, cfg_.m, engine.moment(cfg_.l, cfg_.m));
        return t;
    }

    Table squeeze() {
        const auto r = squeezing_degree(spec(cfg_.xi), {cfg_.n_power, angle_in(cfg_.phi)}, control());
        Table t{{"k", "n_power", "xi", "phi", "s", "variance", "circle", "f_n", "squeezed",
                 "admissible", "classification"},
                {}};
        t.rows.push_back({long{cfg_.k}, long{cfg_.n_power}, cfg_.xi, angle_out(r.phi), r.s_value,
                          r.variance, r.circle, r.f_n, r.squeezed, r.admissible_power,
                          std::string(to_string(r.classification))});
        return t;
    }

    // phi_j = j pi / steps on [0, pi)
    std::vector<double> half_open_phi_grid(int steps) const {
        std::vector<double> g;
        for (int j = 0; j < steps; ++j) g.push_back(j * std::numbers::pi / steps);
        return g;
    }

    Table polar() {
        const auto sm = squeezing_moments(spec(cfg_.xi), cfg_.n_power, control());
        Table t{{"phi", "s"}, {}};
        for (double phi : half_open_phi_grid(phi_steps(720)))
            t.rows.push_back({angle_out(phi), sm.s_at(phi)});
        return t;
    }

    Table variance() {
        const auto sm = squeezing_moments(spec(cfg_.xi), cfg_.n_power, control());
        Table t{{"phi", "variance", "circle"}, {}};
        for (double phi : half_open_phi_grid(phi_steps(720))) {
            const auto r = make_report(sm, phi);
            t.rows.push_back({angle_out(phi), r.variance, r.circle});
        }
        return t;
    }

    Table scan() {
        const int nx = cfg_.xi_steps;
        const int np = phi_steps(181);
        std::vector<SqueezingMoments> per_xi(static_cast<std::size_t>(nx));
        auto xi_at = [&](int i) {
            return nx == 1 ? cfg_.xi_min : cfg_.xi_min + (cfg_.xi_max - cfg_.xi_min) * i / (nx - 1);
        };
        parallel_for(nx, cfg_.jobs, [&](int i) {
            per_xi[static_cast<std::size_t>(i)] = squeezing_moments(spec(xi_at(i)), cfg_.n_power, control());
        });
        Table t{{"xi", "phi", "s"}, {}};
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < np; ++j) {
                const double phi = np == 1 ? 0.0 : j * std::numbers::pi / (np - 1);
                t.rows.push_back({xi_at(i), angle_out(phi), per_xi[static_cast<std::size_t>(i)].s_at(phi)});
            }
        }
        return t;
    }

    Table critical() {
        CriticalOptions opts;
        opts.tol = cfg_.tol;
        const auto r = critical_xi(cfg_.k, model_from(cfg_), cfg_.n_power, control(), opts);
        Table t{{"xi_c", "iterations", "bracket_lo", "bracket_hi"}, {}};
        t.rows.push_back({r.xi_c, long{r.iterations}, r.bracket_lo, r.bracket_hi});
        return t;
    }

    Table directions() {
        const auto sets = direction_sets(cfg_.k);
        Table t{{"family", "j", "phi"}, {}};
        for (std::size_t j = 0; j < sets.phi1.size(); ++j)
            t.rows.push_back({std::string("phi1"), static_cast<long>(j), angle_out(sets.phi1[j])});
        for (std::size_t j = 0; j < sets.phi2.size(); ++j)
            t.rows.push_back({std::string("phi2"), static_cast<long>(j), angle_out(sets.phi2[j])});
        if (cfg_.xi_given) {
            const auto sm = squeezing_moments(spec(cfg_.xi), cfg_.n_power, control());
            const auto minima = minimizing_angles(sm);
            for (std::size_t j = 0; j < minima.size(); ++j)
                t.rows.push_back({std::string("argmin"), static_cast<long>(j), angle_out(minima[j])});
        }
        return t;
    }

    Table iontrap() {
        const IonTrapDrive drive{std::sqrt(cfg_.eta2), cfg_.omega0, cfg_.omega1, angle_in(cfg_.phi0),
                                 angle_in(cfg_.phi1), cfg_.k};
        const auto amp = xi_from_drive(drive);
        const NonlinearityModel ion = model::IonTrap{cfg_.eta2};
        SuperFactorialTable table(ion, cfg_.k);
        Table t{{"n", "f", "superfactorial", "xi_abs", "xi_arg", "rotation"}, {}};
        for (int n = 0; n <= cfg_.levels; ++n) {
            t.rows.push_back({long{n}, f_value(ion, n, cfg_.k), table.at(n), amp.magnitude,
                              angle_out(std::arg(amp.xi)), angle_out(amp.rotation)});
        }
        return t;
    }

    Table verify();

    RunConfig cfg_;
    bool verification_failed_ = false;
};

// Oracle and closed-form conformance suites. Tolerances are fixed.
inline Table Runner::verify() {
    Table t{{"check", "max_deviation", "tolerance", "status", "detail"}, {}};
    auto record = [&](const std::string& name, double dev, double tol, const std::string& detail) {
        const bool ok = dev <= tol;
        if (!ok) verification_failed_ = true;
        t.rows.push_back({name, dev, tol, std::string(ok ? "pass" : "fail"), detail});
    };
    const SeriesControl ctrl = control();

    {
        // deviation measured against max(1, |moment|): moments of order 8
        // reach ~1e9 for the ion trap, beyond what an absolute 1e-9 can resolve
        double worst = 0.0, worst_abs = 0.0;
        std::string where;
        const std::vector<NonlinearityModel> models{model::Unity{}, model::IonTrap{0.05}};
        for (int k : {1, 2}) {
            for (double xi : {0.2, 0.8, 1.25, 2.0}) {
                for (const auto& m : models) {
                    const FanStateSpec s{k, xi, 0.0, m};
                    const auto state = oracle::build_fan_state(s, oracle::kDefaultCutoff);
                    MomentEngine engine(s, ctrl);
                    for (int l = 0; l <= 8; ++l) {
                        for (int mm = 0; mm <= 8; ++mm) {
                            const double o = oracle::ladder_moment(state, l, mm);
                            const double abs_dev = std::fabs(engine.moment(l, mm).value - o);
                            const double dev = abs_dev / std::max(1.0, std::fabs(o));
                            worst_abs = std::max(worst_abs, abs_dev);
                            if (dev > worst) {
                                worst = dev;
                                std::ostringstream os;
                                os << model_name(m) << " k=" << k << " xi=" << xi << " l=" << l << " m=" << mm;
                                where = os.str();
                            }
                        }
                    }
                }
            }
        }
        record("oracle_equivalence", worst, 1e-9,
               "scaled by max(1,|moment|), worst at " + where + "; max absolute " + format_number(worst_abs));
    }

    {
        double worst = 0.0;
        for (int i = 0; i <= 80; ++i) {
            const double x = 4.0 * i / 80.0;
            const auto sm = squeezing_moments(FanStateSpec{1, std::sqrt(x), 0.0, model::Unity{}}, 2, ctrl);
            for (int j = 0; j < 64; ++j) {
                const double phi = j * std::numbers::pi / 64.0;
                worst = std::max(worst, std::fabs(closed_form::s_k1n2(x, phi) - sm.s_at(phi)));
            }
        }
        record("closed_form_k1n2", worst, 1e-9, "x in [0,4], 64 angles");
    }

    {
        double worst = 0.0;
        for (int i = 0; i <= 80; ++i) {
            const double x = 4.0 * i / 80.0;
            const auto sm = squeezing_moments(FanStateSpec{2, std::sqrt(x), 0.0, model::Unity{}}, 4, ctrl);
            for (int j = 0; j < 64; ++j) {
                const double phi = j * std::numbers::pi / 64.0;
                worst = std::max(worst, std::fabs(closed_form::s_k2n4(x, phi) - sm.s_at(phi)));
            }
        }
        record("closed_form_k2n4", worst, 1e-9,
               "printed k=2 N=4 expression against the series engine (ground truth)");
    }

    {
        const auto r = critical_xi(1, model::Unity{}, 2, ctrl);
        record("critical_unity_k1n2", std::fabs(r.xi_c - std::sqrt(std::numbers::pi / 2.0)), 1e-6,
               "xi_c = " + format_number(r.xi_c) + " vs sqrt(pi/2)");
    }

    {
        // Ion-trap reference 1.0099 at eta^2 = 0.05; (k=1, N=2) is tried
        // before (k=2, N=4). Informational only.
        const double reference = 1.0099;
        std::string detail;
        std::string matched = "none";
        double best = std::numeric_limits<double>::infinity();
        for (auto [k, n] : {std::pair{1, 2}, std::pair{2, 4}}) {
            const auto r = critical_xi(k, model::IonTrap{0.05}, n, ctrl);
            const double dev = std::fabs(r.xi_c - reference);
            best = std::min(best, dev);
            detail += "k=" + std::to_string(k) + " N=" + std::to_string(n) + ": xi_c=" +
                      format_number(r.xi_c) + "; ";
            if (dev <= 1e-2 && matched == "none")
                matched = "k=" + std::to_string(k) + " N=" + std::to_string(n);
        }
        t.rows.push_back({std::string("iontrap_critical_pairing"), best, 1e-2,
                          std::string(matched == "none" ? "mismatch" : "match"),
                          detail + "matched pairing: " + matched});
    }
    return t;
}

// ---------------------------------------------------------------------------
// Entry points

inline int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::invalid_argument:
        case ErrorCode::guard_band_violation: return kExitConfig;
        case ErrorCode::laguerre_zero:
        case ErrorCode::nonlinearity_singular: return kExitSingular;
        case ErrorCode::non_convergence:
        case ErrorCode::cutoff_too_small:
        case ErrorCode::no_sign_change: return kExitConvergence;
    }
    return kExitConfig;
}

struct ParseResult {
    std::optional<RunConfig> config;
    int exit_code = kExitOk;
};

inline ParseResult parse(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Amplitude squeezing of fan-states"};
    app.fallthrough();
    app.require_subcommand(1);
    RunConfig c;
    std::string format = "csv";

    app.add_option("--k", c.k, "fan order k");
    app.add_option("--n-power", c.n_power, "power N of the quadrature Q_N");
    auto* xi_opt = app.add_option("--xi", c.xi, "fan amplitude |xi|");
    app.add_option("--xi-min", c.xi_min, "scan: smallest xi");
    app.add_option("--xi-max", c.xi_max, "scan: largest xi");
    app.add_option("--xi-steps", c.xi_steps, "scan: number of xi points");
    app.add_option("--phi", c.phi, "quadrature angle");
    app.add_option("--phi-steps", c.phi_steps, "number of phi grid points");
    app.add_option("--f-model", c.f_model, "nonlinearity")
        ->check(CLI::IsMember({"unity", "iontrap", "qdeformed", "photon-added"}));
    app.add_option("--eta2", c.eta2, "squared Lamb-Dicke parameter");
    app.add_option("--lambda", c.lambda, "q-deformation parameter");
    app.add_option("--m-add", c.m_add, "photon-added m");
    app.add_option("--omega0", c.omega0, "Rabi frequency of the resonant drive");
    app.add_option("--omega1", c.omega1, "Rabi frequency of the sideband drive");
    app.add_option("--phi0", c.phi0, "phase of the resonant drive");
    app.add_option("--phi1", c.phi1, "phase of the sideband drive");
    app.add_option("--l", c.l, "moments: creation power of an extra moment");
    app.add_option("--m", c.m, "moments: annihilation power of an extra moment");
    app.add_option("--levels", c.levels, "iontrap: highest level in the f table");
    app.add_option("--tol", c.tol, "critical: bisection tolerance on xi");
    app.add_option("--nmax", c.nmax, "series index cutoff");
    app.add_option("--rel-tol", c.rel_tol, "series relative tail tolerance");
    app.add_option("--jobs", c.jobs, "worker threads for grid evaluation");
    app.add_option("--out", c.out, "output file (relative paths resolve against $FANSTATE_OUTPUT_DIR)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--degrees", c.degrees, "angles in degrees instead of radians");

    std::vector<std::pair<CLI::App*, Command>> subs;
    for (const auto& [name, cmd] : command_names()) subs.emplace_back(app.add_subcommand(name), cmd);

    try {
        std::vector<std::string> args;
        for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return {std::nullopt, rc == 0 ? kExitOk : kExitConfig};
    }
    for (const auto& [sub, cmd] : subs)
        if (sub->parsed()) c.command = cmd;
    c.xi_given = xi_opt->count() > 0;
    c.format = format == "json" ? Format::json : Format::csv;
    return {c, kExitOk};
}

inline std::filesystem::path resolve_output(const std::string& out) {
    std::filesystem::path p(out);
    if (p.is_relative()) {
        if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) p = std::filesystem::path(dir) / p;
    }
    return p;
}

/// Runs one configured command and writes its artifact to `out` (or to the
/// --out file). Returns the process exit status.
inline int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
    std::ofstream file;
    std::ostream* sink = &out;
    if (!c.out.empty()) {
        file.open(resolve_output(c.out));
        if (!file) {
            err << "error: cannot open output file " << resolve_output(c.out) << '\n';
            return kExitConfig;
        }
        sink = &file;
    }

    auto fail = [&](int code, const std::string& kind, const std::string& message) {
        err << "error: " << message << '\n';
        if (c.format == Format::json) {
            *sink << json{{"command", to_string(c.command)},
                          {"config", to_json(c)},
                          {"error", {{"code", kind}, {"exit_code", code}, {"message", message}}}}
                         .dump(2)
                  << '\n';
        }
        return code;
    };

    Table table;
    bool verification_failed = false;
    try {
        validate(c);
        Runner runner(c);
        table = runner.run();
        verification_failed = runner.verification_failed();
    } catch (const ConfigError& e) {
        return fail(kExitConfig, "config", e.what());
    } catch (const Error& e) {
        return fail(exit_code_for(e), std::string(fanstate::to_string(e.code())), e.what());
    }

    if (c.format == Format::json) {
        json doc{{"command", to_string(c.command)}, {"config", to_json(c)}};
        doc["result"] = table_json(table);
        *sink << doc.dump(2) << '\n';
    } else {
        write_csv(*sink, table);
    }
    if (verification_failed) {
        err << "verification failed\n";
        return kExitVerification;
    }
    return kExitOk;
}

inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    const auto parsed = parse(argc, argv, out, err);
    if (!parsed.config) return parsed.exit_code;
    return execute(*parsed.config, out, err);
}

}  // namespace fanstate::cli
