#pragma once

#include <complex>
#include <map>
#include <vector>

#include "otoc/linalg.hpp"

namespace otoc {

/// One record of a normal-form polynomial over complexified coordinates
/// (x_1..x_d, xi_1..xi_d): coefficient h on the monomial
/// prod_k x_k^alpha_k xi_k^beta_k.
struct MonomialRecord {
    std::vector<int> alpha;
    std::vector<int> beta;
    std::complex<double> coefficient;
};

/// Raw normalization output: a list of (alpha, beta, h) records for a system
/// with one reactive mode (k = 1) and d-1 bath modes. Immutable once filled;
/// duplicate (alpha, beta) keys and negative exponents are rejected.
class ComplexMonomialTable {
public:
    explicit ComplexMonomialTable(int dof_count);

    void add(std::vector<int> alpha, std::vector<int> beta, std::complex<double> coefficient);

    int dof_count() const { return dof_count_; }
    const std::vector<MonomialRecord>& records() const { return records_; }

private:
    int dof_count_;
    std::vector<MonomialRecord> records_;
    std::map<std::pair<std::vector<int>, std::vector<int>>, std::size_t> index_;
};

/// Exponent key (n_I, n_J1, ..., n_Jf) of an action monomial.
using ExponentKey = std::vector<int>;

/// H(I, J) as a sparse real polynomial in the reaction action I and the bath
/// actions J_1..J_f. Terms live in an ordered map so every iteration order,
/// and hence every evaluation, is deterministic.
class ActionPolynomial {
public:
    explicit ActionPolynomial(int bath_modes);

    int bath_modes() const { return bath_modes_; }

    void add_term(const ExponentKey& key, double coefficient);
    double coefficient(const ExponentKey& key) const;
    const std::map<ExponentKey, double>& terms() const { return terms_; }

    /// Analytic partial derivative; variable 0 is I, variables 1..f are J_k.
    ActionPolynomial partial_derivative(int variable) const;

private:
    int bath_modes_;
    std::map<ExponentKey, double> terms_;
};

/// A point (I, J) in action space.
struct ActionPoint {
    double I = 0.0;
    std::vector<double> J;
};

/// Converts a complex monomial table to the action polynomial. Only resonant
/// records (alpha == beta) survive; the record h * (x_1 xi_1)^{n_1} *
/// prod_{k>=2} (x_k xi_k)^{n_k} maps to h * (-i)^N on I^{n_1} prod J_k^{n_k}
/// with N = sum_{k>=2} n_k, which must come out real to within tol.
ActionPolynomial convert_to_action_polynomial(const ComplexMonomialTable& table,
                                              double tol = 1e-10);

double eval_hamiltonian(const ActionPolynomial& poly, const ActionPoint& pt);

/// Lambda(I, J) = dH/dI, the local instability rate.
double lyapunov_exponent(const ActionPolynomial& poly, const ActionPoint& pt);

/// Omega(I, J) = dH/dJ, the bath frequency vector.
std::vector<double> bath_frequencies(const ActionPolynomial& poly, const ActionPoint& pt);

/// dOmega/dJ, symmetric f x f.
Matrix frequency_jacobian(const ActionPolynomial& poly, const ActionPoint& pt);

} // namespace otoc
