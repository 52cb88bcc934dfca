#pragma once

#include <cstddef>
#include <vector>

namespace otoc {

/// Dense row-major matrix of doubles. Everything in this project is tiny
/// (at most (2+2f) x (2+2f) with f <= 3), so no effort is spent on blocking
/// or expression templates; clarity and determinism win.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    Matrix transpose() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }
    friend Matrix operator*(const Matrix& a, const Matrix& b);

    /// Largest |entry|.
    double max_abs() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

std::vector<double> operator*(const Matrix& m, const std::vector<double>& v);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm_inf(const std::vector<double>& v);

/// LU decomposition with partial pivoting.
class LuDecomposition {
public:
    explicit LuDecomposition(const Matrix& m);

    bool singular() const { return singular_; }
    double determinant() const;

    /// Solves m x = rhs. Throws SingularMatrix when the factorization broke down.
    std::vector<double> solve(const std::vector<double>& rhs) const;

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
    int parity_ = 1;
    bool singular_ = false;
};

double determinant(const Matrix& m);
std::vector<double> solve_linear(const Matrix& m, const std::vector<double>& rhs);
Matrix inverse(const Matrix& m);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> symmetric_eigenvalues(Matrix m, double tol = 1e-14, int max_sweeps = 64);

/// Standard symplectic form for the phase-space ordering
/// (q_u, p_u, theta_1..theta_f, J_1..J_f).
Matrix standard_symplectic_form(std::size_t bath_modes);

/// max |M^T Omega M - Omega| for the form above; zero for a symplectic map.
double symplectic_defect(const Matrix& m, const Matrix& omega);

} // namespace otoc
