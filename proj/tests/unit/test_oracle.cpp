#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "otoc/errors.hpp"
#include "otoc/io.hpp"
#include "otoc/oracle.hpp"
#include "otoc/stability.hpp"

using namespace otoc;

TEST_CASE("flow integration basics")
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    PhaseState z0{0.0, 0.0, {0.2, 1.1}, {0.8, 1.4}};

    const FlowResult id = integrate_flow_and_variations(poly, z0, 0.0, 1e-3);
    CHECK((id.monodromy - Matrix::identity(6)).max_abs() == 0.0);

    const FlowResult flow = integrate_flow_and_variations(poly, z0, 4.0, 1e-3);
    // actions are exact invariants; energy is conserved
    for (int k = 0; k < 2; ++k)
        CHECK(std::abs(flow.state.J[k] - z0.J[k]) <=
              1e-9 * std::max(1.0, std::abs(z0.J[k])));
    const double e0 = eval_hamiltonian(poly, ActionPoint{0.0, z0.J});
    const double e1 = eval_hamiltonian(poly, ActionPoint{0.0, flow.state.J});
    CHECK(std::abs(e1 - e0) <= 1e-9 * std::max(1.0, std::abs(e0)));
    // angles advance by Omega t
    const std::vector<double> omega = bath_frequencies(poly, ActionPoint{0.0, z0.J});
    for (int k = 0; k < 2; ++k)
        CHECK(flow.state.theta[k] ==
              doctest::Approx(z0.theta[k] + omega[k] * 4.0).epsilon(1e-9));
}

TEST_CASE("monodromy blocks on the invariant manifold")
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    std::mt19937 rng(11u);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    PhaseState z0{0.0, 0.0, {u(rng), u(rng)}, {u(rng), u(rng)}};
    const double t = 5.0;
    const FlowResult flow = integrate_flow_and_variations(poly, z0, t, 1e-3);

    const ActionPoint pt{0.0, z0.J};
    const Matrix reac = reaction_monodromy(lyapunov_exponent(poly, pt), t);
    const Matrix bath = bath_monodromy(frequency_jacobian(poly, pt), t);

    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            CHECK(std::abs(flow.monodromy(r, c) - reac(r, c)) <=
                  1e-6 * std::max(1.0, std::abs(reac(r, c))));
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            CHECK(std::abs(flow.monodromy(2 + r, 2 + c) - bath(r, c)) <=
                  1e-6 * std::max(1.0, std::abs(bath(r, c))));
    // cross blocks vanish on the manifold
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
            if ((r < 2) != (c < 2))
                CHECK(std::abs(flow.monodromy(r, c)) < 1e-8);

    CHECK(symplectic_defect(flow.monodromy, standard_symplectic_form(2)) < 1e-8);
}

TEST_CASE("off-manifold flow does couple the blocks")
{
    // negative control: with q_u != 0 the cross entries are genuinely nonzero
    const ActionPolynomial poly = eckart_morse_polynomial();
    PhaseState z0{0.3, 0.1, {0.5, 0.9}, {1.0, 1.5}};
    const FlowResult flow = integrate_flow_and_variations(poly, z0, 5.0, 1e-3);
    double cross = 0.0;
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
            if ((r < 2) != (c < 2))
                cross = std::max(cross, std::abs(flow.monodromy(r, c)));
    CHECK(cross > 1e-8);
    // still symplectic
    CHECK(symplectic_defect(flow.monodromy, standard_symplectic_form(2)) < 1e-7);
}

TEST_CASE("constant-rate reaction block matches the matrix exponential")
{
    // H = lambda I + omega J: Lambda is constant everywhere
    ActionPolynomial poly(1);
    poly.add_term({1, 0}, 0.7350);
    poly.add_term({0, 1}, 1.1);
    PhaseState z0{0.0, 0.0, {0.0}, {0.5}};
    const FlowResult flow = integrate_flow_and_variations(poly, z0, 1.0, 1e-3);
    const Matrix reac = reaction_monodromy(0.7350, 1.0);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            CHECK(std::abs(flow.monodromy(r, c) - reac(r, c)) < 1e-8);
}

TEST_CASE("finite-difference report")
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    std::mt19937 rng(3u);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        ActionPoint pt{u(rng), {u(rng), u(rng)}};
        CHECK(finite_difference_check(poly, pt, 1e-5).max_error() < 1e-6);
    }

    // linear polynomial: no truncation error at any step, so a wide step
    // leaves only round-off
    ActionPolynomial lin(1);
    lin.add_term({1, 0}, 0.3);
    lin.add_term({0, 1}, 0.9);
    CHECK(finite_difference_check(lin, ActionPoint{0.1, {0.4}}, 1e-3).max_error() < 1e-12);
}

TEST_CASE("finite-difference error curve dips at moderate step")
{
    // needs cubic terms: for a quadratic the central difference is exact
    ActionPolynomial poly(2);
    poly.add_term({1, 0, 0}, 0.7);
    poly.add_term({0, 1, 0}, 1.1);
    poly.add_term({0, 0, 1}, 0.6);
    poly.add_term({3, 0, 0}, 0.4);
    poly.add_term({0, 3, 0}, -0.3);
    poly.add_term({1, 0, 2}, 0.25);
    const ActionPoint pt{0.7, {1.3, 0.4}};
    const double e3 = finite_difference_check(poly, pt, 1e-3).max_error();
    const double e5 = finite_difference_check(poly, pt, 1e-5).max_error();
    const double e7 = finite_difference_check(poly, pt, 1e-7).max_error();
    CHECK(e5 < e3);
    CHECK(e5 < e7);
}

TEST_CASE("fft against a direct DFT")
{
    std::mt19937 rng(17u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 64;
    std::vector<std::complex<double>> a(n);
    for (auto& z : a)
        z = {u(rng), u(rng)};

    std::vector<std::complex<double>> dft(n, 0.0);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            const double ang = -2.0 * std::numbers::pi * k * j / n;
            dft[k] += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }

    std::vector<std::complex<double>> fftd = a;
    detail::fft(fftd, false);
    for (int k = 0; k < n; ++k)
        CHECK(std::abs(fftd[k] - dft[k]) < 1e-12);

    detail::fft(fftd, true);
    for (int k = 0; k < n; ++k)
        CHECK(std::abs(fftd[k] - a[k]) < 1e-13);

    std::vector<std::complex<double>> bad(10);
    CHECK_THROWS_AS(detail::fft(bad, false), Error);
}

TEST_CASE("quantum oracle commutator at t = 0 and unitarity")
{
    QuantumGridConfig cfg;
    cfg.L = 15.0;
    cfg.n_points = 512;
    cfg.t_grid = {0.0, 1.0, 2.0};
    QuantumLeakReport report;
    const std::vector<double> c = quantum_otoc_inverted_oscillator(cfg, &report);
    REQUIRE(c.size() == 3);
    CHECK(std::abs(c[0] - cfg.hbar * cfg.hbar) < 1e-8);
    // growth matches hbar^2 cosh^2 while the packet is clean
    for (int i = 1; i < 3; ++i) {
        const double exact = cfg.hbar * cfg.hbar *
                             std::cosh(cfg.lambda * cfg.t_grid[i]) *
                             std::cosh(cfg.lambda * cfg.t_grid[i]);
        CHECK(c[i] == doctest::Approx(exact).epsilon(1e-6));
    }
    for (double m : report.position_edge_mass)
        CHECK(m < 1e-8);
    CHECK(report.norm_drift < 1e-10);  // split-step unitarity
}

TEST_CASE("quantum oracle flags an undersized grid")
{
    QuantumGridConfig cfg;
    cfg.L = 6.0;
    cfg.n_points = 256;
    cfg.t_grid = {0.5, 3.5};
    CHECK_THROWS_AS(quantum_otoc_inverted_oscillator(cfg), GridTooSmall);

    QuantumGridConfig bad = cfg;
    bad.n_points = 300;  // not a power of two
    CHECK_THROWS_AS(quantum_otoc_inverted_oscillator(bad), Error);

    QuantumGridConfig late = cfg;
    late.t_grid = {10.0};  // beyond the Ehrenfest time for this box
    CHECK_THROWS_AS(quantum_otoc_inverted_oscillator(late), Error);
}

TEST_CASE("ehrenfest time")
{
    CHECK(ehrenfest_time(0.7350, 20.0, 0.05) ==
          doctest::Approx(std::log(400.0) / 0.7350).epsilon(1e-14));
    CHECK_THROWS_AS(ehrenfest_time(0.0, 20.0, 0.05), Error);
}
