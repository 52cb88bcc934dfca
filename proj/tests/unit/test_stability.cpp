#include <doctest.h>

#include <cmath>
#include <vector>

#include "otoc/errors.hpp"
#include "otoc/stability.hpp"
#include "otoc/trace.hpp"

using namespace otoc;

TEST_CASE("reaction monodromy basics")
{
    const Matrix id = reaction_monodromy(0.9, 0.0);
    CHECK(id(0, 0) == 1.0);
    CHECK(id(0, 1) == 0.0);

    const double lam = 0.7350, t = 2.3;
    const Matrix m = reaction_monodromy(lam, t);
    CHECK(m(0, 0) == doctest::Approx(std::cosh(lam * t)).epsilon(1e-15));
    CHECK(m(0, 1) == m(1, 0));
    CHECK(m(0, 0) == m(1, 1));
    CHECK(std::abs(determinant(m) - 1.0) < 1e-12);

    // one-parameter group property
    const Matrix a = reaction_monodromy(lam, 1.1);
    const Matrix b = reaction_monodromy(lam, 2.2);
    const Matrix ab = a * b;
    const Matrix c = reaction_monodromy(lam, 3.3);
    CHECK((ab - c).max_abs() < 1e-12 * c.max_abs());

    CHECK_THROWS_AS(reaction_monodromy(100.0, 10.0), InfOverflow);
}

TEST_CASE("bath monodromy shear")
{
    Matrix d(2, 2);
    d(0, 0) = 0.05;
    d(1, 1) = 0.05;
    d(0, 1) = d(1, 0) = 0.01;

    const Matrix id = bath_monodromy(d, 0.0);
    CHECK((id - Matrix::identity(4)).max_abs() == 0.0);

    const Matrix flat = bath_monodromy(Matrix(2, 2), 5.0);
    CHECK((flat - Matrix::identity(4)).max_abs() == 0.0);

    const double t = 2.0;
    const Matrix m = bath_monodromy(d, t);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(m(i, 2 + j) == d(i, j) * t);  // shear block is exact
    // nilpotent-exponential structure
    const Matrix n = m - Matrix::identity(4);
    CHECK((n * n).max_abs() == 0.0);

    Matrix skew(2, 2);
    skew(0, 1) = 0.2;
    CHECK_THROWS_AS(bath_monodromy(skew, 1.0), DimensionMismatch);

    // the shear preserves the symplectic form on (theta, J)
    Matrix form(4, 4);
    for (int k = 0; k < 2; ++k) {
        form(k, 2 + k) = 1.0;
        form(2 + k, k) = -1.0;
    }
    CHECK(symplectic_defect(m, form) < 1e-10);
}

TEST_CASE("stability factor identities")
{
    const double lam = 0.7350;
    // sinh inverse point
    const double tau1 = 2.0 * std::asinh(0.5) / lam;
    CHECK(gutzwiller_stability_factor(lam, tau1) == doctest::Approx(1.0).epsilon(1e-13));

    // det identity over a range of lambda*tau
    for (double x = 0.1; x <= 10.0; x += 0.37) {
        const double tau = x / lam;
        const Matrix m = reaction_monodromy(lam, tau) - Matrix::identity(2);
        const double det = std::abs(determinant(m));
        const double target = 4.0 * std::sinh(0.5 * x) * std::sinh(0.5 * x);
        CHECK(std::abs(det - target) / target < 1e-10);
        const double g = gutzwiller_stability_factor(lam, tau);
        CHECK(std::abs(g - 1.0 / std::sqrt(det)) / g < 1e-10);
    }

    // asymptotic form within 0.2% for lambda*tau >= 8
    for (double x : {8.0, 10.0, 14.0}) {
        const double tau = x / lam;
        const double exact = gutzwiller_stability_factor(lam, tau);
        const double asym = std::exp(-0.5 * x);
        CHECK(std::abs(exact / asym - 1.0) < 0.002);
    }

    CHECK_THROWS_AS(gutzwiller_stability_factor(lam, 1e-12), DegenerateOrbit);
    CHECK(std::abs(log_gutzwiller_stability_factor(lam, 3.0) -
                   std::log(gutzwiller_stability_factor(lam, 3.0))) < 1e-13);
    // log variant keeps working far beyond double range: 1/(2 sinh(x/2))
    // collapses to e^{-x/2} there
    CHECK(log_gutzwiller_stability_factor(lam, 3000.0) ==
          doctest::Approx(-0.5 * lam * 3000.0).epsilon(1e-12));
}

TEST_CASE("butterfly weight")
{
    const double lam = 0.7350, hbar = 0.05;
    CHECK(butterfly_weight(lam, 0.0, hbar) == hbar * hbar);

    // exact/asymptotic ratio bound at lambda*t = 10
    const double t10 = 10.0 / lam;
    const double ratio =
        butterfly_weight(lam, t10, hbar) / butterfly_weight(lam, t10, hbar, GrowthForm::asymptotic);
    CHECK(ratio >= 1.0);
    CHECK(ratio <= 1.0 + 1e-8);

    // log-weight slope over [3, 5] tracks 2 lambda to 1%
    std::vector<double> ts, w;
    for (int i = 0; i <= 20; ++i) {
        const double t = 3.0 + 0.1 * i;
        ts.push_back(t);
        w.push_back(butterfly_weight(lam, t, hbar));
    }
    const double slope_w = fit_log_slope(ts, w);
    CHECK(std::abs(slope_w - 2.0 * lam) / (2.0 * lam) < 0.01);

    CHECK_THROWS_AS(butterfly_weight(lam, 1000.0, hbar), InfOverflow);
    CHECK(std::abs(log_butterfly_weight(lam, 4.0, hbar) -
                   std::log(butterfly_weight(lam, 4.0, hbar))) < 1e-12);
    CHECK(log_butterfly_weight(lam, 1000.0, hbar, GrowthForm::asymptotic) ==
          doctest::Approx(2.0 * std::log(hbar) - std::log(4.0) + 2.0 * lam * 1000.0));
}
