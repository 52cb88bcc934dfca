#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "otoc/errors.hpp"
#include "otoc/reaction_trace.hpp"
#include "otoc/stability.hpp"
#include "otoc/trace.hpp"

using namespace otoc;

TEST_CASE("diagonal propagator is a unit-modulus chirp")
{
    const double lam = 0.7350, tau = 3.0, hbar = 0.05;
    const std::complex<double> k0 = kreac_diagonal(0.0, tau, lam, hbar);
    // prefactor magnitude at q = 0
    const double mag = std::sqrt(lam / (2.0 * std::numbers::pi * hbar * std::sinh(lam * tau)));
    CHECK(std::abs(k0) == doctest::Approx(mag).epsilon(1e-13));

    for (double q : {0.3, 0.7, 1.0, 1.4})
        CHECK(std::abs(kreac_diagonal(q, tau, lam, hbar)) ==
              doctest::Approx(std::abs(k0)).epsilon(1e-12));

    // phase argument via an independent expression: (cosh-1)/sinh = tanh(x/2)
    const std::complex<double> k1 = kreac_diagonal(1.0, tau, lam, hbar);
    const double measured = std::arg(k1 / k0);
    const double expected = lam * std::tanh(0.5 * lam * tau) / hbar;
    const double wrapped = std::remainder(expected - measured, 2.0 * std::numbers::pi);
    CHECK(std::abs(wrapped) < 1e-9);

    CHECK_THROWS_AS(kreac_diagonal(0.0, 1e-12, lam, hbar), DegenerateOrbit);
}

TEST_CASE("quadrature magnitude near the analytic trace")
{
    const double lam = 0.7350;
    ReactionTraceConfig cfg;
    cfg.hbar = 0.05;
    cfg.q_max = 1.5;

    // regularized boundary: within 5% of 1/(2 sinh) at the quoted point
    cfg.apodize = true;
    const double tau = 5.0;
    const double ana = reaction_trace_analytic(lam, tau);
    const double apod = std::abs(reaction_trace_quadrature(lam, tau, cfg));
    CHECK(std::abs(apod / ana - 1.0) < 0.05);

    // the hard cutoff keeps the boundary Fresnel ring: a known, stable
    // deviation of several percent at these parameters
    cfg.apodize = false;
    const double hard = std::abs(reaction_trace_quadrature(lam, tau, cfg));
    const double ring = std::abs(hard / ana - 1.0);
    CHECK(ring > 0.02);
    CHECK(ring < 0.12);

    CHECK_THROWS_AS(reaction_trace_quadrature(lam, 1e-12, cfg), DegenerateOrbit);
}

TEST_CASE("quadrature is converged under point doubling")
{
    const double lam = 0.7350, tau = 4.5;
    ReactionTraceConfig cfg;
    cfg.hbar = 0.05;
    cfg.apodize = true;
    const std::complex<double> a = reaction_trace_quadrature(lam, tau, cfg);
    cfg.quadrature_points = 4 * (cfg.quadrature_points - 1) + 1;
    const std::complex<double> b = reaction_trace_quadrature(lam, tau, cfg);
    CHECK(std::abs(a - b) <= 2e-8 * std::abs(b));
}

TEST_CASE("cutoff robustness at fixed large lambda*tau")
{
    const double lam = 0.7350;
    const double tau = 5.0 / lam;
    ReactionTraceConfig cfg;
    cfg.hbar = 0.05;
    cfg.apodize = true;
    cfg.q_max = 1.5;
    const double t15 = std::abs(reaction_trace_quadrature(lam, tau, cfg));
    cfg.q_max = 3.0;
    const double t30 = std::abs(reaction_trace_quadrature(lam, tau, cfg));
    CHECK(std::abs(t30 / t15 - 1.0) < 0.01);
}

TEST_CASE("log-magnitude slope is insensitive to the cutoff")
{
    const double lam = 0.7350;
    ReactionTraceConfig cfg;
    cfg.hbar = 0.05;
    cfg.apodize = true;
    std::vector<double> taus, v15, v30;
    for (double tau = 4.0; tau <= 6.0 + 1e-9; tau += 0.1) {
        taus.push_back(tau);
        cfg.q_max = 1.5;
        v15.push_back(std::abs(reaction_trace_quadrature(lam, tau, cfg)));
        cfg.q_max = 3.0;
        v30.push_back(std::abs(reaction_trace_quadrature(lam, tau, cfg)));
    }
    const double s15 = fit_log_slope(taus, v15);
    const double s30 = fit_log_slope(taus, v30);
    CHECK(std::abs(s15 - s30) / std::abs(s30) < 0.02);
}

TEST_CASE("regularized quadrature tracks the analytic trace across the window")
{
    const double lam = 0.7350;
    ReactionTraceConfig cfg;
    cfg.hbar = 0.05;
    cfg.apodize = true;
    std::vector<double> devs;
    for (double x = 3.0; x <= 6.0 + 1e-9; x += 0.25) {
        const double tau = x / lam;
        const double ana = reaction_trace_analytic(lam, tau);
        const double quad = std::abs(reaction_trace_quadrature(lam, tau, cfg));
        devs.push_back(std::abs(quad / ana - 1.0));
        CHECK(devs.back() < 0.05);
    }
    // agreement improves with lambda*tau on average across the sweep
    double head = 0.0, tail = 0.0;
    const std::size_t half = devs.size() / 2;
    for (std::size_t i = 0; i < devs.size(); ++i)
        (i < half ? head : tail) += devs[i];
    CHECK(head / half > tail / (devs.size() - half));
}

TEST_CASE("analytic trace forms")
{
    const double lam = 0.7350;
    // shares the stability-factor definition bit for bit
    for (double tau : {1.0, 3.0, 6.0})
        CHECK(reaction_trace_analytic(lam, tau) == gutzwiller_stability_factor(lam, tau));

    const double tau1 = 2.0 * std::asinh(0.5) / lam;
    CHECK(reaction_trace_analytic(lam, tau1) == doctest::Approx(1.0).epsilon(1e-13));

    const double tau8 = 8.0 / lam;
    const double exact = reaction_trace_analytic(lam, tau8);
    const double asym = reaction_trace_analytic(lam, tau8, GrowthForm::asymptotic);
    CHECK(std::abs(exact / asym - 1.0) < 0.002);
}
