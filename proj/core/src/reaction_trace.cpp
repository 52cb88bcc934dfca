#include "otoc/reaction_trace.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "otoc/errors.hpp"

namespace otoc {

namespace {

constexpr double kPi = std::numbers::pi;

void check_chirp_args(double lambda_rate, double tau, double hbar)
{
    if (hbar <= 0.0)
        throw Error("reaction trace: hbar must be positive");
    const double x = lambda_rate * tau;
    if (x <= 0.0)
        throw Error("reaction trace: lambda*tau must be positive");
    if (x < 1e-8)
        throw DegenerateOrbit("reaction trace diverges as the period vanishes");
    if (x > 700.0)
        throw InfOverflow("reaction trace: lambda*tau overflows sinh");
}

double taper_weight(double q, double q_max, double fraction)
{
    const double width = fraction * 2.0 * q_max;  // per side
    const double edge = q_max - width;
    const double a = std::abs(q);
    if (a <= edge)
        return 1.0;
    return std::max(0.0, 1.0 - (a - edge) / width);
}

std::complex<double> simpson_trace(double lambda_rate, double tau,
                                   const ReactionTraceConfig& cfg, int n)
{
    const double x = lambda_rate * tau;
    const double s = std::sinh(x);
    const double chirp = lambda_rate * (std::cosh(x) - 1.0) / (cfg.hbar * s);
    const double h = 2.0 * cfg.q_max / (n - 1);
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double q = -cfg.q_max + h * i;
        const double w = cfg.apodize ? taper_weight(q, cfg.q_max, cfg.apodize_fraction) : 1.0;
        const double phase = chirp * q * q;
        std::complex<double> f = w * std::complex<double>(std::cos(phase), std::sin(phase));
        const double coeff = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += coeff * f;
    }
    acc *= h / 3.0;
    // prefactor sqrt(Lambda / (2 pi i hbar sinh)): 1/sqrt(i) = e^{-i pi/4}
    const double mag = std::sqrt(lambda_rate / (2.0 * kPi * cfg.hbar * s));
    const std::complex<double> root_inv_i(std::cos(-kPi / 4.0), std::sin(-kPi / 4.0));
    return acc * mag * root_inv_i;
}

} // namespace

std::complex<double> kreac_diagonal(double q_u, double tau, double lambda_rate, double hbar)
{
    check_chirp_args(lambda_rate, tau, hbar);
    const double x = lambda_rate * tau;
    const double s = std::sinh(x);
    const double mag = std::sqrt(lambda_rate / (2.0 * kPi * hbar * s));
    const std::complex<double> root_inv_i(std::cos(-kPi / 4.0), std::sin(-kPi / 4.0));
    const double phase = lambda_rate * (std::cosh(x) - 1.0) * q_u * q_u / (hbar * s);
    return mag * root_inv_i * std::complex<double>(std::cos(phase), std::sin(phase));
}

std::complex<double> reaction_trace_quadrature(double lambda_rate, double tau,
                                               const ReactionTraceConfig& cfg)
{
    check_chirp_args(lambda_rate, tau, cfg.hbar);
    if (cfg.q_max <= 0.0)
        throw Error("reaction trace: q_max must be positive");
    if (cfg.quadrature_points < 3 || cfg.quadrature_points % 2 == 0)
        throw Error("reaction trace: quadrature_points must be odd and >= 3");

    int n = cfg.quadrature_points;
    std::complex<double> prev = simpson_trace(lambda_rate, tau, cfg, n);
    for (int r = 0; r < cfg.max_refinements; ++r) {
        n = 2 * n - 1;
        const std::complex<double> cur = simpson_trace(lambda_rate, tau, cfg, n);
        if (std::abs(cur - prev) <= cfg.quad_tol * std::max(1.0, std::abs(cur)))
            return cur;
        prev = cur;
    }
    throw QuadratureNotConverged("reaction trace quadrature did not converge after " +
                                 std::to_string(cfg.max_refinements) + " refinements");
}

double reaction_trace_analytic(double lambda_rate, double tau, GrowthForm form)
{
    const double x = lambda_rate * tau;
    if (x <= 0.0)
        throw Error("reaction trace: lambda*tau must be positive");
    if (x < 1e-8)
        throw DegenerateOrbit("reaction trace diverges as the period vanishes");
    if (form == GrowthForm::asymptotic)
        return std::exp(-0.5 * x);
    return gutzwiller_stability_factor(lambda_rate, tau);
}

} // namespace otoc
