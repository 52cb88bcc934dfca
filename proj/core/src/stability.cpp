#include "otoc/stability.hpp"

#include <cmath>
#include <string>

#include "otoc/errors.hpp"

namespace otoc {

namespace {

// exp(700) is already within 1e4 of the double overflow threshold.
constexpr double kOverflowArg = 700.0;

// log(cosh x) without overflow: |x| + log1p(e^{-2|x|}) - log 2.
double log_cosh(double x)
{
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// log(sinh x) for x > 0: x + log1p(-e^{-2x}) - log 2.
double log_sinh(double x)
{
    return x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0);
}

} // namespace

ReactionBlock reaction_monodromy(double lambda_rate, double t)
{
    if (!std::isfinite(lambda_rate) || !std::isfinite(t))
        throw Error("reaction_monodromy: non-finite argument");
    const double x = lambda_rate * t;
    if (std::abs(x) > kOverflowArg)
        throw InfOverflow("reaction_monodromy: |lambda t| = " + std::to_string(std::abs(x)) +
                          " overflows cosh");
    Matrix m(2, 2);
    m(0, 0) = m(1, 1) = std::cosh(x);
    m(0, 1) = m(1, 0) = std::sinh(x);
    return m;
}

BathBlock bath_monodromy(const Matrix& dOmega_dJ, double t)
{
    const std::size_t f = dOmega_dJ.rows();
    if (dOmega_dJ.cols() != f)
        throw DimensionMismatch("bath_monodromy: dOmega/dJ must be square");
    if ((dOmega_dJ - dOmega_dJ.transpose()).max_abs() >
        1e-12 * std::max(1.0, dOmega_dJ.max_abs()))
        throw DimensionMismatch("bath_monodromy: dOmega/dJ must be symmetric");
    Matrix m = Matrix::identity(2 * f);
    for (std::size_t i = 0; i < f; ++i)
        for (std::size_t j = 0; j < f; ++j)
            m(i, f + j) = dOmega_dJ(i, j) * t;
    return m;
}

double gutzwiller_stability_factor(double lambda_rate, double period)
{
    const double x = lambda_rate * period;
    if (x <= 0.0)
        throw Error("gutzwiller_stability_factor: lambda*tau must be positive");
    if (x < 1e-8)
        throw DegenerateOrbit("stability factor diverges as the period vanishes");
    return 1.0 / (2.0 * std::sinh(0.5 * x));
}

double log_gutzwiller_stability_factor(double lambda_rate, double period)
{
    const double x = lambda_rate * period;
    if (x <= 0.0)
        throw Error("log_gutzwiller_stability_factor: lambda*tau must be positive");
    if (x < 1e-8)
        throw DegenerateOrbit("stability factor diverges as the period vanishes");
    return -std::log(2.0) - log_sinh(0.5 * x);
}

double butterfly_weight(double lambda_rate, double t_otoc, double hbar, GrowthForm form)
{
    if (hbar <= 0.0)
        throw Error("butterfly_weight: hbar must be positive");
    const double x = lambda_rate * t_otoc;
    if (std::abs(x) > 0.5 * kOverflowArg)
        throw InfOverflow("butterfly_weight: |lambda t| = " + std::to_string(std::abs(x)) +
                          " overflows cosh^2; use the log variant");
    if (form == GrowthForm::asymptotic)
        return 0.25 * hbar * hbar * std::exp(2.0 * x);
    const double c = std::cosh(x);
    return hbar * hbar * c * c;
}

double log_butterfly_weight(double lambda_rate, double t_otoc, double hbar, GrowthForm form)
{
    if (hbar <= 0.0)
        throw Error("log_butterfly_weight: hbar must be positive");
    const double x = lambda_rate * t_otoc;
    if (form == GrowthForm::asymptotic)
        return 2.0 * std::log(hbar) - std::log(4.0) + 2.0 * x;
    return 2.0 * std::log(hbar) + 2.0 * log_cosh(x);
}

} // namespace otoc
