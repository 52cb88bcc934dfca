#include "otoc/normal_form.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "otoc/errors.hpp"

namespace otoc {

namespace {

std::string key_to_string(const std::vector<int>& key)
{
    std::string s = "(";
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(key[i]);
    }
    return s + ")";
}

} // namespace

ComplexMonomialTable::ComplexMonomialTable(int dof_count) : dof_count_(dof_count)
{
    if (dof_count < 1)
        throw DimensionMismatch("monomial table needs at least one degree of freedom");
}

void ComplexMonomialTable::add(std::vector<int> alpha, std::vector<int> beta,
                               std::complex<double> coefficient)
{
    if (static_cast<int>(alpha.size()) != dof_count_ ||
        static_cast<int>(beta.size()) != dof_count_)
        throw DimensionMismatch("monomial exponent length != dof count");
    for (int e : alpha)
        if (e < 0)
            throw ParseError("negative exponent in alpha " + key_to_string(alpha));
    for (int e : beta)
        if (e < 0)
            throw ParseError("negative exponent in beta " + key_to_string(beta));
    auto key = std::make_pair(alpha, beta);
    if (index_.count(key))
        throw ParseError("duplicate monomial key alpha=" + key_to_string(alpha) +
                         " beta=" + key_to_string(beta));
    index_[key] = records_.size();
    records_.push_back({std::move(alpha), std::move(beta), coefficient});
}

ActionPolynomial::ActionPolynomial(int bath_modes) : bath_modes_(bath_modes)
{
    if (bath_modes < 0)
        throw DimensionMismatch("negative bath mode count");
}

void ActionPolynomial::add_term(const ExponentKey& key, double coefficient)
{
    if (static_cast<int>(key.size()) != bath_modes_ + 1)
        throw DimensionMismatch("exponent key length != 1 + bath modes");
    for (int e : key)
        if (e < 0)
            throw ParseError("negative exponent in action key " + key_to_string(key));
    terms_[key] += coefficient;
    if (terms_[key] == 0.0)
        terms_.erase(key);
}

double ActionPolynomial::coefficient(const ExponentKey& key) const
{
    auto it = terms_.find(key);
    return it == terms_.end() ? 0.0 : it->second;
}

ActionPolynomial ActionPolynomial::partial_derivative(int variable) const
{
    if (variable < 0 || variable > bath_modes_)
        throw DimensionMismatch("derivative variable out of range");
    ActionPolynomial d(bath_modes_);
    for (const auto& [key, c] : terms_) {
        const int n = key[variable];
        if (n == 0)
            continue;
        ExponentKey dk = key;
        --dk[variable];
        d.add_term(dk, c * n);
    }
    return d;
}

ActionPolynomial convert_to_action_polynomial(const ComplexMonomialTable& table, double tol)
{
    if (tol <= 0.0)
        throw Error("conversion tolerance must be positive");
    const int f = table.dof_count() - 1;
    ActionPolynomial poly(f);
    // i^(-N) cycle for the bath-action substitution x_k xi_k = -i J_k.
    static const std::complex<double> minus_i_pow[4] = {
        {1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
    for (const MonomialRecord& r : table.records()) {
        if (r.alpha != r.beta) {
            if (std::abs(r.coefficient) > tol)
                throw NonResonantMonomial("non-resonant monomial alpha=" +
                                          key_to_string(r.alpha) + " beta=" +
                                          key_to_string(r.beta) + " with |h| = " +
                                          std::to_string(std::abs(r.coefficient)));
            continue;
        }
        int n_bath = 0;
        for (int k = 1; k <= f; ++k)
            n_bath += r.alpha[k];
        const std::complex<double> c = r.coefficient * minus_i_pow[n_bath % 4];
        if (std::abs(c.imag()) > tol)
            throw ComplexResidue("converted coefficient for " + key_to_string(r.alpha) +
                                 " has imaginary residue " + std::to_string(c.imag()));
        ExponentKey key(r.alpha.begin(), r.alpha.end());
        poly.add_term(key, c.real());
    }
    return poly;
}

namespace {

void check_point(const ActionPolynomial& poly, const ActionPoint& pt)
{
    if (static_cast<int>(pt.J.size()) != poly.bath_modes())
        throw DimensionMismatch("action point has " + std::to_string(pt.J.size()) +
                                " bath actions, polynomial expects " +
                                std::to_string(poly.bath_modes()));
}

double eval_terms(const ActionPolynomial& poly, const ActionPoint& pt)
{
    double sum = 0.0;
    for (const auto& [key, c] : poly.terms()) {
        double term = c;
        for (int n = 0; n < key[0]; ++n)
            term *= pt.I;
        for (std::size_t k = 1; k < key.size(); ++k)
            for (int n = 0; n < key[k]; ++n)
                term *= pt.J[k - 1];
        sum += term;
    }
    return sum;
}

} // namespace

double eval_hamiltonian(const ActionPolynomial& poly, const ActionPoint& pt)
{
    check_point(poly, pt);
    return eval_terms(poly, pt);
}

double lyapunov_exponent(const ActionPolynomial& poly, const ActionPoint& pt)
{
    check_point(poly, pt);
    return eval_terms(poly.partial_derivative(0), pt);
}

std::vector<double> bath_frequencies(const ActionPolynomial& poly, const ActionPoint& pt)
{
    check_point(poly, pt);
    std::vector<double> omega(poly.bath_modes());
    for (int k = 0; k < poly.bath_modes(); ++k)
        omega[k] = eval_terms(poly.partial_derivative(k + 1), pt);
    return omega;
}

Matrix frequency_jacobian(const ActionPolynomial& poly, const ActionPoint& pt)
{
    check_point(poly, pt);
    const int f = poly.bath_modes();
    Matrix jac(f, f);
    for (int k = 0; k < f; ++k) {
        const ActionPolynomial dk = poly.partial_derivative(k + 1);
        // Mixed partials of a polynomial commute, so fill both triangles from
        // one differentiation pass and keep the result exactly symmetric.
        for (int j = k; j < f; ++j)
            jac(k, j) = jac(j, k) = eval_terms(dk.partial_derivative(j + 1), pt);
    }
    return jac;
}

} // namespace otoc
