#include <doctest.h>

#include <cmath>
#include <random>

#include "otoc/errors.hpp"
#include "otoc/linalg.hpp"

using namespace otoc;

TEST_CASE("determinant of small matrices")
{
    Matrix a(2, 2);
    a(0, 0) = 3.0;
    a(0, 1) = 1.5;
    a(1, 0) = -2.0;
    a(1, 1) = 4.0;
    CHECK(determinant(a) == doctest::Approx(3.0 * 4.0 + 2.0 * 1.5).epsilon(1e-14));

    Matrix b(3, 3);
    const double v[3][3] = {{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            b(i, j) = v[i][j];
    CHECK(determinant(b) == doctest::Approx(4.0).epsilon(1e-14));  // tridiagonal chain

    Matrix s(2, 2);
    s(0, 0) = 1.0;
    s(0, 1) = 2.0;
    s(1, 0) = 2.0;
    s(1, 1) = 4.0;
    CHECK(determinant(s) == 0.0);
    CHECK_THROWS_AS(solve_linear(s, {1.0, 1.0}), SingularMatrix);
}

TEST_CASE("LU solve and inverse reproduce the identity")
{
    std::mt19937 rng(99u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix a(4, 4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j)
            a(i, j) = u(rng);
        a(i, i) += 3.0;
    }
    std::vector<double> rhs = {1.0, -2.0, 0.5, 3.0};
    const std::vector<double> x = solve_linear(a, rhs);
    const std::vector<double> back = a * x;
    for (int i = 0; i < 4; ++i)
        CHECK(back[i] == doctest::Approx(rhs[i]).epsilon(1e-12));

    const Matrix ainv = inverse(a);
    CHECK((a * ainv - Matrix::identity(4)).max_abs() < 1e-12);
}

TEST_CASE("symmetric eigenvalues")
{
    Matrix m(2, 2);
    m(0, 0) = 2.0;
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    m(1, 1) = 2.0;
    const std::vector<double> ev = symmetric_eigenvalues(m);
    CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-12));

    // random symmetric: eigenvalue sum/product match trace/determinant
    std::mt19937 rng(7u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix s(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            s(i, j) = s(j, i) = u(rng);
    const std::vector<double> es = symmetric_eigenvalues(s);
    double tr = 0.0, sum = 0.0, prod = 1.0;
    for (int i = 0; i < 4; ++i)
        tr += s(i, i);
    for (double e : es) {
        sum += e;
        prod *= e;
    }
    CHECK(sum == doctest::Approx(tr).epsilon(1e-10));
    CHECK(prod == doctest::Approx(determinant(s)).epsilon(1e-8));
}

TEST_CASE("symplectic form and defect")
{
    const Matrix omega = standard_symplectic_form(2);
    CHECK(omega.rows() == 6);
    CHECK(omega(0, 1) == 1.0);
    CHECK(omega(1, 0) == -1.0);
    CHECK(omega(2, 4) == 1.0);
    CHECK(omega(5, 3) == -1.0);
    CHECK(symplectic_defect(Matrix::identity(6), omega) == 0.0);

    // a shear in (theta, J) is symplectic
    Matrix m = Matrix::identity(6);
    m(2, 4) = 0.7;
    m(2, 5) = 0.2;
    m(3, 4) = 0.2;
    m(3, 5) = -0.4;
    CHECK(symplectic_defect(m, omega) < 1e-15);
}
