// Command-line front end: coefficient conversion, trace evaluation,
// convergence and slope reports, and the brute-force check suite.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "otoc/errors.hpp"
#include "otoc/io.hpp"
#include "otoc/oracle.hpp"
#include "otoc/reaction_trace.hpp"
#include "otoc/stability.hpp"
#include "otoc/trace.hpp"
#include "otoc/version.hpp"

namespace {

using namespace otoc;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitEmptySum = 2;
constexpr int kExitCheckFailed = 3;

struct TraceOptions {
    std::string preset;
    std::string coeffs_path;
    std::string poly_path;
    std::string mode = "resonant";
    std::string butterfly = "asymptotic";
    double energy = std::numeric_limits<double>::quiet_NaN();
    double hbar = 0.05;
    int m_max = 5;
    double t_min = 2.0;
    double t_max = 6.0;
    int t_points = 81;
    double q_max = 1.5;
    bool log_space = false;
    int threads = 1;
    double solver_tol = 1e-10;
    int solver_max_iter = 50;
    double solver_damping = 0.5;
    double solver_j_cap = 50.0;
    std::string output = "otoc";
};

void add_trace_options(CLI::App* cmd, TraceOptions& o)
{
    cmd->set_config("--config");
    cmd->add_option("--preset", o.preset, "named parameter preset (eckart-morse)")
        ->check(CLI::IsMember({"eckart-morse"}));
    cmd->add_option("--coeffs", o.coeffs_path, "complex monomial table (.nf)");
    cmd->add_option("--poly", o.poly_path, "action polynomial file (.ap)");
    cmd->add_option("--mode", o.mode, "resonant | general")
        ->check(CLI::IsMember({"resonant", "general"}));
    cmd->add_option("--butterfly", o.butterfly, "growth form in general mode: asymptotic | exact")
        ->check(CLI::IsMember({"asymptotic", "exact"}));
    cmd->add_option("--energy", o.energy, "microcanonical energy shell E");
    cmd->add_option("--hbar", o.hbar, "effective Planck constant");
    cmd->add_option("--m-max", o.m_max, "winding depth cutoff");
    cmd->add_option("--t-min", o.t_min, "observation window start");
    cmd->add_option("--t-max", o.t_max, "observation window end");
    cmd->add_option("--t-points", o.t_points, "grid points across the window");
    cmd->add_option("--q-max", o.q_max, "reaction coordinate cutoff");
    cmd->add_flag("--log-space", o.log_space, "sum in log-magnitude/sign form");
    cmd->add_option("--threads", o.threads, "worker threads over the time grid");
    cmd->add_option("--solver-tol", o.solver_tol, "resonance residual bound");
    cmd->add_option("--solver-max-iter", o.solver_max_iter, "Newton iteration cap");
    cmd->add_option("--solver-damping", o.solver_damping, "backtracking shrink factor");
    cmd->add_option("--j-cap", o.solver_j_cap, "action trust-region upper bound");
    cmd->add_option("--output,-o", o.output, "output file prefix");
}

/// The eckart-morse preset pins the benchmark parameters; explicit flags win.
void apply_preset(const CLI::App* cmd, TraceOptions& o)
{
    if (o.preset.empty())
        return;
    if (cmd->count("--energy") == 0)
        o.energy = -0.5;
    if (cmd->count("--hbar") == 0)
        o.hbar = 0.05;
    if (cmd->count("--m-max") == 0)
        o.m_max = 5;
    if (cmd->count("--t-min") == 0)
        o.t_min = 2.0;
    if (cmd->count("--t-max") == 0)
        o.t_max = 6.0;
    if (cmd->count("--t-points") == 0)
        o.t_points = 81;
    if (cmd->count("--q-max") == 0)
        o.q_max = 1.5;
}

ActionPolynomial resolve_polynomial(const TraceOptions& o)
{
    const int sources = (!o.preset.empty()) + (!o.coeffs_path.empty()) + (!o.poly_path.empty());
    if (sources != 1)
        throw Error("exactly one of --preset, --coeffs, --poly is required");
    if (!o.preset.empty())
        return eckart_morse_polynomial();
    if (!o.coeffs_path.empty())
        return convert_to_action_polynomial(load_monomial_table(o.coeffs_path));
    return load_action_polynomial(o.poly_path);
}

std::vector<double> build_grid(const TraceOptions& o)
{
    if (o.t_points < 1)
        throw Error("--t-points must be at least 1");
    if (o.t_points > 1 && o.t_max <= o.t_min)
        throw Error("--t-max must exceed --t-min");
    std::vector<double> grid(o.t_points);
    for (int i = 0; i < o.t_points; ++i)
        grid[i] = o.t_points == 1
                      ? o.t_min
                      : o.t_min + (o.t_max - o.t_min) * i / double(o.t_points - 1);
    return grid;
}

TraceConfig build_trace_config(const TraceOptions& o)
{
    TraceConfig cfg;
    cfg.E = o.energy;
    cfg.hbar = o.hbar;
    cfg.m_max = o.m_max;
    cfg.t_grid = build_grid(o);
    cfg.mode = o.mode == "general" ? TraceMode::general : TraceMode::resonant;
    cfg.log_space = o.log_space;
    cfg.butterfly_form =
        o.butterfly == "exact" ? GrowthForm::exact : GrowthForm::asymptotic;
    cfg.threads = o.threads;
    if (cfg.mode == TraceMode::general && !std::isfinite(cfg.E))
        throw Error("--energy is required in general mode");
    return cfg;
}

SolverConfig build_solver_config(const TraceOptions& o)
{
    SolverConfig cfg;
    cfg.tol = o.solver_tol;
    cfg.max_iter = o.solver_max_iter;
    cfg.damping = o.solver_damping;
    cfg.j_cap = o.solver_j_cap;
    return cfg;
}

/// Full resolved configuration, echoed at the top of every output file.
/// Execution details that cannot change the numbers (thread count) are
/// deliberately left out so runs stay byte-comparable.
std::vector<std::string> config_echo(const std::string& command, const TraceOptions& o,
                                     const ActionPolynomial& poly)
{
    std::vector<std::string> lines;
    lines.push_back(std::string("otoc_trace ") + version);
    lines.push_back("command = " + command);
    lines.push_back("preset = " + (o.preset.empty() ? std::string("none") : o.preset));
    if (!o.coeffs_path.empty())
        lines.push_back("coeffs = " + o.coeffs_path);
    if (!o.poly_path.empty())
        lines.push_back("poly = " + o.poly_path);
    lines.push_back("mode = " + o.mode);
    lines.push_back("butterfly = " + o.butterfly);
    lines.push_back("energy = " + format_full(o.energy));
    lines.push_back("hbar = " + format_full(o.hbar));
    lines.push_back("m_max = " + std::to_string(o.m_max));
    lines.push_back("t_min = " + format_full(o.t_min));
    lines.push_back("t_max = " + format_full(o.t_max));
    lines.push_back("t_points = " + std::to_string(o.t_points));
    lines.push_back("q_max = " + format_full(o.q_max));
    lines.push_back("log_space = " + std::string(o.log_space ? "true" : "false"));
    lines.push_back("solver_tol = " + format_full(o.solver_tol));
    lines.push_back("solver_max_iter = " + std::to_string(o.solver_max_iter));
    lines.push_back("solver_damping = " + format_full(o.solver_damping));
    lines.push_back("solver_j_cap = " + format_full(o.solver_j_cap));
    std::string terms = "polynomial =";
    for (const auto& [key, c] : poly.terms()) {
        terms += " [";
        for (std::size_t i = 0; i < key.size(); ++i)
            terms += (i ? "," : "") + std::to_string(key[i]);
        terms += "]=" + format_full(c);
    }
    lines.push_back(terms);
    return lines;
}

void report_sum_warnings(const TraceSeries& series)
{
    for (std::size_t idx : series.empty_times)
        std::cerr << "warning: empty sum at t = " << format_full(series.t[idx]) << "\n";
    if (!series.skips.empty())
        std::cerr << "note: " << series.skips.size()
                  << " winding/time pairs produced no orbit (see solver log)\n";
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
    if (!out)
        throw Error("cannot open output file '" + path + "'");
    return out;
}

int cmd_convert(const std::string& input, const std::string& output, double tol)
{
    const ComplexMonomialTable table = load_monomial_table(input);
    const ActionPolynomial poly = convert_to_action_polynomial(table, tol);
    std::ofstream out = open_output(output);
    std::vector<std::string> header;
    header.push_back(std::string("otoc_trace ") + version);
    header.push_back("command = convert");
    header.push_back("input = " + input);
    header.push_back("tol = " + format_full(tol));
    header.push_back("columns: n_I n_J1 .. n_Jf coefficient");
    write_action_polynomial(out, poly, header);
    return kExitOk;
}

int cmd_eval(const CLI::App* cmd, TraceOptions& o, bool residuals_only)
{
    apply_preset(cmd, o);
    const ActionPolynomial poly = resolve_polynomial(o);
    const TraceSeries series =
        assemble_trace(poly, build_trace_config(o), build_solver_config(o));
    report_sum_warnings(series);

    const std::vector<std::string> echo =
        config_echo(residuals_only ? "residuals" : "eval", o, poly);
    {
        std::ofstream out = open_output(o.output + "_residuals.csv");
        write_residuals_csv(out, series, echo);
    }
    if (!residuals_only) {
        std::ofstream series_out = open_output(o.output + "_series.csv");
        write_series_csv(series_out, series, echo);
        std::ofstream orbit_out = open_output(o.output + "_orbits.csv");
        write_orbits_csv(orbit_out, series, echo);
    }
    return series.empty_sum() ? kExitEmptySum : kExitOk;
}

int cmd_slope(const CLI::App* cmd, TraceOptions& o, double fit_min, double fit_max,
              bool dominant_only)
{
    apply_preset(cmd, o);
    const ActionPolynomial poly = resolve_polynomial(o);
    const TraceConfig cfg = build_trace_config(o);
    const TraceSeries series = assemble_trace(poly, cfg, build_solver_config(o));
    report_sum_warnings(series);
    if (series.empty_sum())
        return kExitEmptySum;

    const double lo = std::isfinite(fit_min) ? fit_min : cfg.t_grid.front();
    const double hi = std::isfinite(fit_max) ? fit_max : cfg.t_grid.back();

    std::vector<std::string> echo = config_echo("slope", o, poly);
    echo.push_back("fit_min = " + format_full(lo));
    echo.push_back("fit_max = " + format_full(hi));

    std::ofstream out = open_output(o.output + "_slope.csv");
    for (const std::string& line : echo)
        out << "# " << line << "\n";
    out << "quantity,value\n";

    if (dominant_only) {
        const WeightedOrbit& dom = dominant_contribution(series);
        const std::vector<double> restricted =
            single_orbit_series(dom.contribution, cfg.t_grid, cfg.hbar);
        const double slope = fit_growth_exponent(cfg.t_grid, restricted, lo, hi);
        const double expected = 1.5 * dom.contribution.torus.lambda_val;
        out << "slope," << format_full(slope) << "\n";
        out << "target_1.5_lambda," << format_full(expected) << "\n";
        std::string mstr;
        for (std::size_t i = 0; i < dom.contribution.torus.m.m.size(); ++i)
            mstr += (i ? ";" : "") + std::to_string(dom.contribution.torus.m.m[i]);
        out << "dominant_m," << mstr << "\n";
        out << "dominant_lambda," << format_full(dom.contribution.torus.lambda_val) << "\n";
        std::cout << "dominant-orbit slope " << format_full(slope) << " (1.5 Lambda = "
                  << format_full(expected) << ")\n";
    } else {
        const double slope = fit_growth_exponent(series, lo, hi);
        out << "slope," << format_full(slope) << "\n";
        std::cout << "series slope " << format_full(slope) << " over [" << format_full(lo)
                  << ", " << format_full(hi) << "]\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// check: brute-force verification suite

struct CheckRow {
    std::string name;
    double measured;
    double bound;
    bool pass;
};

void add_row(std::vector<CheckRow>& rows, const std::string& name, double measured,
             double bound)
{
    rows.push_back({name, measured, bound, measured <= bound});
}

void check_dictionary(std::vector<CheckRow>& rows)
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    const double b2 = poly.coefficient({1, 1, 0});
    const double w3 = poly.coefficient({0, 0, 1});
    const double a = 2.0 * poly.coefficient({2, 0, 0});
    double err = std::abs(b2 - (-0.0123));
    err = std::max(err, std::abs(w3 - 1.2673));
    err = std::max(err, std::abs(a - 0.2361));
    add_row(rows, "conversion dictionary (4 dp)", err, 0.5e-4);
}

void check_gradients(std::vector<CheckRow>& rows)
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    std::mt19937 rng(20240811u);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        ActionPoint pt{u(rng), {u(rng), u(rng)}};
        worst = std::max(worst, finite_difference_check(poly, pt, 1e-5).max_error());
    }
    add_row(rows, "gradients vs finite differences", worst, 1e-6);
}

void check_monodromy(std::vector<CheckRow>& rows)
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    std::mt19937 rng(777u);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    const Matrix omega = standard_symplectic_form(2);
    double worst_block = 0.0, worst_cross = 0.0, worst_sympl = 0.0;
    for (int i = 0; i < 5; ++i) {
        PhaseState z0{0.0, 0.0, {u(rng), u(rng)}, {u(rng), u(rng)}};
        const double t = 6.0;
        const FlowResult flow = integrate_flow_and_variations(poly, z0, t, 1e-3);
        const ActionPoint pt{0.0, z0.J};
        const Matrix reac = reaction_monodromy(lyapunov_exponent(poly, pt), t);
        const Matrix bath = bath_monodromy(frequency_jacobian(poly, pt), t);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                worst_block = std::max(worst_block,
                                       std::abs(flow.monodromy(r, c) - reac(r, c)) /
                                           std::max(1.0, std::abs(reac(r, c))));
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                worst_block = std::max(worst_block,
                                       std::abs(flow.monodromy(2 + r, 2 + c) - bath(r, c)) /
                                           std::max(1.0, std::abs(bath(r, c))));
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 6; ++c)
                if ((r < 2) != (c < 2))
                    worst_cross = std::max(worst_cross, std::abs(flow.monodromy(r, c)));
        worst_sympl = std::max(worst_sympl, symplectic_defect(flow.monodromy, omega));
    }
    add_row(rows, "monodromy blocks vs ODE oracle", worst_block, 1e-6);
    add_row(rows, "monodromy cross-block entries", worst_cross, 1e-8);
    add_row(rows, "monodromy symplecticity defect", worst_sympl, 1e-8);
}

void check_determinants(std::vector<CheckRow>& rows)
{
    // The direct 2x2 determinant runs in long double: the identity is
    // conditioned like cosh(lambda tau), which exhausts double precision
    // near the top of the range.
    double worst_sinh = 0.0;
    for (double x = 0.1; x <= 20.0; x += 0.1) {
        const long double c = std::cosh(static_cast<long double>(x));
        const long double s = std::sinh(static_cast<long double>(x));
        const long double det = (c - 1.0L) * (c - 1.0L) - s * s;
        const long double sh = std::sinh(0.5L * static_cast<long double>(x));
        const long double target = 4.0L * sh * sh;
        worst_sinh = std::max(worst_sinh,
                              static_cast<double>(std::abs(std::abs(det) - target) / target));
    }
    add_row(rows, "det(M_reac - I) = 4 sinh^2", worst_sinh, 1e-10);

    std::mt19937 rng(4242u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst_schur = 0.0;
    for (int f = 1; f <= 3; ++f)
        for (int rep = 0; rep < 200; ++rep) {
            ResonantTorus torus;
            torus.tau = 0.5 + std::abs(u(rng)) * 3.0;
            torus.m.m.assign(f, 1);
            torus.J.assign(f, 0.0);
            torus.active.assign(f, 1);
            torus.omega_val.resize(f);
            for (int k = 0; k < f; ++k)
                torus.omega_val[k] = 0.5 + std::abs(u(rng));
            Matrix jac(f, f);
            for (int r = 0; r < f; ++r) {
                for (int c = r; c < f; ++c)
                    jac(r, c) = jac(c, r) = 0.3 * u(rng);
                jac(r, r) += 1.5;  // keep it well away from singular
            }
            torus.jacobian = jac;
            const BorderedHessian h = bordered_hessian(torus);
            worst_schur = std::max(worst_schur, std::abs(h.det_direct - h.det_schur) /
                                                    std::max(1.0, std::abs(h.det_direct)));
        }
    add_row(rows, "Schur vs direct bordered det", worst_schur, 1e-10);
}

void check_reaction_trace(std::vector<CheckRow>& rows)
{
    const double lambda_rate = 0.7350;
    ReactionTraceConfig cfg;
    cfg.hbar = 0.05;
    cfg.apodize = true;

    double worst = 0.0;
    std::vector<double> taus, ln15, ln30;
    for (double tau = 4.0; tau <= 6.0 + 1e-9; tau += 0.1) {
        cfg.q_max = 1.5;
        const double t15 = std::abs(reaction_trace_quadrature(lambda_rate, tau, cfg));
        cfg.q_max = 3.0;
        const double t30 = std::abs(reaction_trace_quadrature(lambda_rate, tau, cfg));
        const double ana = reaction_trace_analytic(lambda_rate, tau);
        worst = std::max(worst, std::abs(t15 / ana - 1.0));
        taus.push_back(tau);
        ln15.push_back(t15);
        ln30.push_back(t30);
    }
    add_row(rows, "reaction trace quadrature vs analytic", worst, 0.05);

    const double s15 = fit_log_slope(taus, ln15);
    const double s30 = fit_log_slope(taus, ln30);
    add_row(rows, "reaction trace cutoff slope sensitivity",
            std::abs(s15 - s30) / std::abs(s30), 0.02);
}

void check_remark_consistency(std::vector<CheckRow>& rows)
{
    // Synthetic f=1 torus with lambda*tau >= 8 under both pairings.
    ResonantTorus torus;
    torus.m.m = {1};
    torus.J = {1.0};
    torus.tau = 11.0;
    torus.lambda_val = 0.8;
    torus.omega_val = {0.6};
    torus.jacobian = Matrix(1, 1);
    torus.jacobian(0, 0) = 0.2;
    torus.active = {1};

    ActionPolynomial poly(1);
    poly.add_term({0, 0}, -1.0);
    poly.add_term({1, 0}, 0.8);
    poly.add_term({0, 1}, 0.6);
    poly.add_term({0, 2}, 0.1);

    torus.mode = SolveMode::fixed_energy;
    OrbitContribution cg = make_contribution(torus, poly, 0.05);
    const double wg = orbit_weight_general(cg, torus.tau, 0.05);

    torus.mode = SolveMode::fixed_time;
    OrbitContribution cr = make_contribution(torus, poly, 0.05);
    const double wr = orbit_weight_resonant(cr, torus.tau, 0.05);

    add_row(rows, "general vs resonant weight at t = tau", std::abs(wg / wr - 1.0), 0.002);
}

void check_quantum(std::vector<CheckRow>& rows)
{
    QuantumGridConfig cfg;
    cfg.leak_tol = 1.0;  // the packet legitimately reaches the box by 0.8 t_E
    const double t_e = ehrenfest_time(cfg.lambda, cfg.L, cfg.hbar);
    const double lo = 1.0 / cfg.lambda, hi = 0.8 * t_e;
    for (int i = 0; i < 25; ++i)
        cfg.t_grid.push_back(lo + (hi - lo) * i / 24.0);
    const std::vector<double> c = quantum_otoc_inverted_oscillator(cfg);
    const double slope = fit_log_slope(cfg.t_grid, c);
    add_row(rows, "quantum OTOC slope vs 2 lambda",
            std::abs(slope - 2.0 * cfg.lambda) / (2.0 * cfg.lambda), 0.15);

    QuantumGridConfig c0 = cfg;
    c0.t_grid = {0.0};
    const double c_at_0 = quantum_otoc_inverted_oscillator(c0).front();
    add_row(rows, "quantum OTOC C(0) = hbar^2", std::abs(c_at_0 - cfg.hbar * cfg.hbar), 1e-8);
}

int cmd_check(bool with_quantum)
{
    std::vector<CheckRow> rows;
    check_dictionary(rows);
    check_gradients(rows);
    check_monodromy(rows);
    check_determinants(rows);
    check_reaction_trace(rows);
    check_remark_consistency(rows);
    if (with_quantum)
        check_quantum(rows);

    bool all_pass = true;
    std::printf("%-42s %-14s %-10s %s\n", "check", "measured", "bound", "status");
    for (const CheckRow& r : rows) {
        std::printf("%-42s %-14.3e %-10.1e %s\n", r.name.c_str(), r.measured, r.bound,
                    r.pass ? "PASS" : "FAIL");
        all_pass = all_pass && r.pass;
    }
    return all_pass ? kExitOk : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Semiclassical orbit-sum engine for saddle-point scrambling"};
    app.require_subcommand(1);

    // convert
    std::string conv_in, conv_out = "converted.ap";
    double conv_tol = 1e-10;
    CLI::App* conv = app.add_subcommand("convert", "monomial table -> action polynomial");
    conv->add_option("--input,-i", conv_in, "input .nf file")->required();
    conv->add_option("--output,-o", conv_out, "output .ap file");
    conv->add_option("--tol", conv_tol, "resonance / residue tolerance");

    // eval / residuals / slope
    TraceOptions eval_opts, resid_opts, slope_opts;
    CLI::App* eval = app.add_subcommand("eval", "evaluate the coherent orbit sum");
    add_trace_options(eval, eval_opts);
    CLI::App* resid = app.add_subcommand("residuals", "per-depth convergence residuals");
    add_trace_options(resid, resid_opts);
    CLI::App* slope = app.add_subcommand("slope", "fitted growth exponent");
    add_trace_options(slope, slope_opts);
    double fit_min = std::numeric_limits<double>::quiet_NaN();
    double fit_max = std::numeric_limits<double>::quiet_NaN();
    bool dominant_only = false;
    slope->add_option("--fit-min", fit_min, "fit window start (default: grid start)");
    slope->add_option("--fit-max", fit_max, "fit window end (default: grid end)");
    slope->add_flag("--dominant-only", dominant_only,
                    "restrict to the dominant orbit, frozen over the window");

    // check
    bool with_quantum = false;
    CLI::App* check = app.add_subcommand("check", "run the brute-force oracle suite");
    check->add_flag("--quantum", with_quantum, "include the grid quantum OTOC oracle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitFailure;
    }

    try {
        if (conv->parsed())
            return cmd_convert(conv_in, conv_out, conv_tol);
        if (eval->parsed())
            return cmd_eval(eval, eval_opts, false);
        if (resid->parsed())
            return cmd_eval(resid, resid_opts, true);
        if (slope->parsed())
            return cmd_slope(slope, slope_opts, fit_min, fit_max, dominant_only);
        if (check->parsed())
            return cmd_check(with_quantum);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
