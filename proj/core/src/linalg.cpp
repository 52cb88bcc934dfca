#include "otoc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "otoc/errors.hpp"

namespace otoc {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n)
{
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const
{
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

namespace {

void check_same_shape(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("matrix shapes differ: " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                "x" + std::to_string(b.cols()));
}

} // namespace

Matrix& Matrix::operator+=(const Matrix& other)
{
    check_same_shape(*this, other);
    for (std::size_t i = 0; i < a_.size(); ++i)
        a_[i] += other.a_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other)
{
    check_same_shape(*this, other);
    for (std::size_t i = 0; i < a_.size(); ++i)
        a_[i] -= other.a_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s)
{
    for (double& x : a_)
        x *= s;
    return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.rows())
        throw DimensionMismatch("matrix product shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0)
                continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    return c;
}

double Matrix::max_abs() const
{
    double m = 0.0;
    for (double x : a_)
        m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> operator*(const Matrix& m, const std::vector<double>& v)
{
    if (m.cols() != v.size())
        throw DimensionMismatch("matrix-vector shape mismatch");
    std::vector<double> out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out[i] += m(i, j) * v[j];
    return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size())
        throw DimensionMismatch("dot: vector sizes differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double norm_inf(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

LuDecomposition::LuDecomposition(const Matrix& m) : lu_(m), perm_(m.rows())
{
    if (m.rows() != m.cols())
        throw DimensionMismatch("LU needs a square matrix");
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i)
        perm_[i] = i;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(lu_(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(lu_(r, col));
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) {
            singular_ = true;
            continue;
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j)
                std::swap(lu_(pivot, j), lu_(col, j));
            std::swap(perm_[pivot], perm_[col]);
            parity_ = -parity_;
        }
        const double d = lu_(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = lu_(r, col) / d;
            lu_(r, col) = f;
            for (std::size_t j = col + 1; j < n; ++j)
                lu_(r, j) -= f * lu_(col, j);
        }
    }
}

double LuDecomposition::determinant() const
{
    if (singular_)
        return 0.0;
    double d = parity_;
    for (std::size_t i = 0; i < lu_.rows(); ++i)
        d *= lu_(i, i);
    return d;
}

std::vector<double> LuDecomposition::solve(const std::vector<double>& rhs) const
{
    if (singular_)
        throw SingularMatrix("LU solve on a singular matrix");
    const std::size_t n = lu_.rows();
    if (rhs.size() != n)
        throw DimensionMismatch("LU solve: rhs size mismatch");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = rhs[perm_[i]];
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            x[i] -= lu_(i, j) * x[j];
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n; ++j)
            x[ii] -= lu_(ii, j) * x[j];
        x[ii] /= lu_(ii, ii);
    }
    return x;
}

double determinant(const Matrix& m)
{
    return LuDecomposition(m).determinant();
}

std::vector<double> solve_linear(const Matrix& m, const std::vector<double>& rhs)
{
    return LuDecomposition(m).solve(rhs);
}

Matrix inverse(const Matrix& m)
{
    const std::size_t n = m.rows();
    LuDecomposition lu(m);
    Matrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const std::vector<double> col = lu.solve(e);
        for (std::size_t i = 0; i < n; ++i)
            inv(i, j) = col[i];
        e[j] = 0.0;
    }
    return inv;
}

std::vector<double> symmetric_eigenvalues(Matrix m, double tol, int max_sweeps)
{
    if (m.rows() != m.cols())
        throw DimensionMismatch("eigenvalues need a square matrix");
    const std::size_t n = m.rows();
    const double scale = std::max(1.0, m.max_abs());
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off = std::max(off, std::abs(m(p, q)));
        if (off <= tol * scale)
            break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (std::abs(apq) <= 1e-300)
                    continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p);
                    const double mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k);
                    const double mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i)
        ev[i] = m(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

Matrix standard_symplectic_form(std::size_t bath_modes)
{
    const std::size_t n = 2 + 2 * bath_modes;
    Matrix omega(n, n);
    omega(0, 1) = 1.0;  // (q_u, p_u)
    omega(1, 0) = -1.0;
    for (std::size_t k = 0; k < bath_modes; ++k) {
        omega(2 + k, 2 + bath_modes + k) = 1.0;  // (theta_k, J_k)
        omega(2 + bath_modes + k, 2 + k) = -1.0;
    }
    return omega;
}

double symplectic_defect(const Matrix& m, const Matrix& omega)
{
    return (m.transpose() * omega * m - omega).max_abs();
}

} // namespace otoc
