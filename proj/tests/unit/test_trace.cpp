#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "otoc/errors.hpp"
#include "otoc/io.hpp"
#include "otoc/trace.hpp"

using namespace otoc;

namespace {

constexpr double kPi = std::numbers::pi;

OrbitContribution synthetic_contribution(SolveMode mode, double lambda_val, double tau,
                                         double amplitude, double action, int maslov)
{
    OrbitContribution c;
    c.torus.m.m = {maslov / 2, 0};
    c.torus.J = {1.0, 1.0};
    c.torus.tau = tau;
    c.torus.lambda_val = lambda_val;
    c.torus.omega_val = {1.0, 1.0};
    c.torus.jacobian = Matrix::identity(2);
    c.torus.mode = mode;
    c.torus.active = {1, 1};
    c.action = action;
    c.maslov = maslov;
    c.amplitude = amplitude;
    c.stability_factor = gutzwiller_stability_factor(lambda_val, tau);
    c.phase = action / 0.05 - 0.5 * kPi * maslov;
    return c;
}

TraceConfig preset_config()
{
    TraceConfig cfg;
    cfg.E = -0.5;
    cfg.hbar = 0.05;
    cfg.m_max = 5;
    for (int i = 0; i < 81; ++i)
        cfg.t_grid.push_back(2.0 + 4.0 * i / 80.0);
    cfg.mode = TraceMode::resonant;
    return cfg;
}

} // namespace

TEST_CASE("resonant orbit weight")
{
    const double hbar = 0.05, t = 3.0;
    // mu = 2, S = 0: cos(-pi) = -1
    auto c = synthetic_contribution(SolveMode::fixed_time, 0.8, t, 0.7, 0.0, 2);
    const double w = orbit_weight_resonant(c, t, hbar);
    CHECK(w == doctest::Approx(-0.7 * std::exp(1.5 * 0.8 * t)).epsilon(1e-12));

    // period must equal the observation time
    CHECK_THROWS_AS(orbit_weight_resonant(c, t + 0.5, hbar), ModeMismatch);
    auto g = synthetic_contribution(SolveMode::fixed_energy, 0.8, t, 0.7, 0.0, 2);
    CHECK_THROWS_AS(orbit_weight_resonant(g, t, hbar), ModeMismatch);
}

TEST_CASE("single-orbit series grows like exp(1.5 Lambda t)")
{
    const double hbar = 0.05, lam = 0.7350;
    auto c = synthetic_contribution(SolveMode::fixed_time, lam, 4.0, 0.3, 0.731, 2);
    std::vector<double> grid;
    for (int i = 0; i <= 80; ++i)
        grid.push_back(2.0 + 0.05 * i);
    const std::vector<double> series = single_orbit_series(c, grid, hbar);
    // pure exponential times a fixed cosine
    CHECK(series[40] / series[0] ==
          doctest::Approx(std::exp(1.5 * lam * (grid[40] - grid[0]))).epsilon(1e-12));
    const double slope = fit_growth_exponent(grid, series, 2.0, 6.0);
    CHECK(std::abs(slope - 1.5 * lam) / (1.5 * lam) < 1e-3);
}

TEST_CASE("general orbit weight")
{
    const double hbar = 0.05;
    const double lam = 0.8, tau = 11.0;  // lambda*tau = 8.8
    auto c = synthetic_contribution(SolveMode::fixed_energy, lam, tau, 0.4, 0.2, 2);

    // t_otoc = 0: asymptotic growth factor is exactly 1
    const double w0 = orbit_weight_general(c, 0.0, hbar);
    CHECK(std::abs(w0) ==
          doctest::Approx(0.4 * gutzwiller_stability_factor(lam, tau) *
                          std::abs(std::cos(0.2 / hbar - kPi)))
              .epsilon(1e-12));

    // Maslov shift by 2 flips the sign at equal action
    auto c2 = synthetic_contribution(SolveMode::fixed_energy, lam, tau, 0.4, 0.2, 4);
    CHECK(orbit_weight_general(c2, 1.0, hbar) ==
          doctest::Approx(-orbit_weight_general(c, 1.0, hbar)).epsilon(1e-12));

    // general weight at t_otoc = tau agrees with the resonant weight to 0.2%
    auto cr = synthetic_contribution(SolveMode::fixed_time, lam, tau, 0.4, 0.2, 2);
    const double wg = orbit_weight_general(c, tau, hbar);
    const double wr = orbit_weight_resonant(cr, tau, hbar);
    CHECK(std::abs(wg / wr - 1.0) < 0.002);

    auto cm = synthetic_contribution(SolveMode::fixed_time, lam, tau, 0.4, 0.2, 2);
    CHECK_THROWS_AS(orbit_weight_general(cm, 1.0, hbar), ModeMismatch);
}

TEST_CASE("assemble_trace on the benchmark preset")
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    const TraceConfig cfg = preset_config();
    const TraceSeries series = assemble_trace(poly, cfg, SolverConfig{});

    CHECK(series.t.size() == 81);
    CHECK_FALSE(series.empty_sum());
    CHECK(series.orbit_count > 100);

    // audit-file linearity: C_E is exactly the scaled sum of emitted weights
    std::vector<double> recon(series.t.size(), 0.0);
    for (const WeightedOrbit& wo : series.contributions)
        recon[wo.t_index] += wo.weight;
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        recon[i] *= 0.25 * cfg.hbar * cfg.hbar;
        CHECK(std::abs(recon[i] - series.c_e[i]) <=
              1e-10 * std::max(1.0, std::abs(series.c_e[i])));
    }

    // residuals are recomputable bitwise from the partials
    for (int k = 1; k <= cfg.m_max; ++k) {
        const std::vector<double> r = convergence_residual(series, k);
        for (std::size_t i = 0; i < r.size(); ++i)
            CHECK(r[i] == series.residuals[k - 1][i]);
    }
    CHECK_THROWS_AS(convergence_residual(series, 0), DepthOutOfRange);
    CHECK_THROWS_AS(convergence_residual(series, 6), DepthOutOfRange);

    // no depth-1 orbit is feasible here: the residual at k = 1 vanishes
    for (double r1 : series.residuals[0])
        CHECK(r1 == 0.0);

    // interference: at least one interior local extremum
    int extrema = 0;
    for (std::size_t i = 1; i + 1 < series.c_e.size(); ++i)
        if ((series.c_e[i] - series.c_e[i - 1]) * (series.c_e[i + 1] - series.c_e[i]) < 0.0)
            ++extrema;
    CHECK(extrema >= 1);

    // the dominant orbit is a known torus of this preset
    const WeightedOrbit& dom = dominant_contribution(series);
    CHECK(dom.contribution.torus.m.m == std::vector<int>{2, 3});
}

TEST_CASE("assemble_trace determinism and threading")
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    TraceConfig cfg = preset_config();

    const TraceSeries s1 = assemble_trace(poly, cfg, SolverConfig{});
    const TraceSeries s2 = assemble_trace(poly, cfg, SolverConfig{});
    cfg.threads = 4;
    const TraceSeries s4 = assemble_trace(poly, cfg, SolverConfig{});

    REQUIRE(s1.c_e.size() == s2.c_e.size());
    REQUIRE(s1.c_e.size() == s4.c_e.size());
    for (std::size_t i = 0; i < s1.c_e.size(); ++i) {
        CHECK(s1.c_e[i] == s2.c_e[i]);
        CHECK(s1.c_e[i] == s4.c_e[i]);
    }
    CHECK(s1.orbit_count == s4.orbit_count);

    // log-space accumulation agrees with compensated summation
    cfg.threads = 1;
    cfg.log_space = true;
    const TraceSeries sl = assemble_trace(poly, cfg, SolverConfig{});
    for (std::size_t i = 0; i < s1.c_e.size(); ++i)
        CHECK(sl.c_e[i] ==
              doctest::Approx(s1.c_e[i]).epsilon(1e-12).scale(std::abs(s1.c_e[i]) + 1e-30));
}

TEST_CASE("empty enumeration")
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    TraceConfig cfg = preset_config();
    cfg.m_max = 0;
    const TraceSeries series = assemble_trace(poly, cfg, SolverConfig{});
    CHECK(series.empty_sum());
    CHECK(series.empty_times.size() == series.t.size());
    for (double v : series.c_e)
        CHECK(v == 0.0);
}

TEST_CASE("general mode on the energy shell")
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    TraceConfig cfg = preset_config();
    cfg.mode = TraceMode::general;
    const TraceSeries series = assemble_trace(poly, cfg, SolverConfig{});
    CHECK_FALSE(series.empty_sum());
    // single-mode tori only at this energy: 5 + 5 orbits per time point
    CHECK(series.orbit_count == 10 * series.t.size());

    TraceConfig low = cfg;
    low.E = -2.0;  // below the saddle
    CHECK_THROWS_AS(assemble_trace(poly, low, SolverConfig{}), BelowSaddle);
}

TEST_CASE("growth exponent fits")
{
    const double lam15 = 1.5 * 0.7350;
    std::vector<double> t, pure, constant, beat;
    for (int i = 0; i <= 80; ++i) {
        const double x = 2.0 + 0.05 * i;
        t.push_back(x);
        pure.push_back(std::exp(lam15 * x));
        constant.push_back(2.5);
        beat.push_back(std::exp(lam15 * x) *
                       (std::cos(11.0 * x + 0.3) + std::cos(29.0 * x + 1.1)));
    }
    CHECK(std::abs(fit_growth_exponent(t, pure, 2.0, 6.0) - 1.1025) < 1e-6);
    CHECK(fit_growth_exponent(t, constant, 2.0, 6.0) == doctest::Approx(0.0));

    // sign changes switch to the envelope fit
    const double slope_beat = fit_growth_exponent(t, beat, 2.0, 6.0);
    CHECK(slope_beat == doctest::Approx(fit_envelope_slope(t, beat)));
    CHECK(std::abs(slope_beat - lam15) / lam15 < 0.02);

    CHECK_THROWS_AS(fit_growth_exponent(t, pure, 2.0, 2.2), InsufficientData);
}

TEST_CASE("phase sensitivity to hbar")
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    const auto torus =
        solve_resonance_fixed_energy(poly, WindingVector{{1, 0}}, -0.5, SolverConfig{});
    REQUIRE(torus.has_value());
    const double hbar = 0.05, eps = 1e-6;
    const OrbitContribution a = make_contribution(*torus, poly, hbar);
    const OrbitContribution b = make_contribution(*torus, poly, hbar * (1.0 + eps));
    const double measured = b.phase - a.phase;
    const double first_order = -a.action / (hbar * hbar) * (hbar * eps);
    CHECK(std::abs(measured - first_order) <=
          2.0 * std::abs(a.action / hbar) * eps * eps + 1e-9);
}
