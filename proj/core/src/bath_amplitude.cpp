#include "otoc/bath_amplitude.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "otoc/errors.hpp"
#include "otoc/stability.hpp"

namespace otoc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSingularDet = 1e-14;

/// Active-mode restrictions of Omega and dOmega/dJ.
void active_parts(const ResonantTorus& torus, std::vector<double>& omega, Matrix& jac)
{
    std::vector<int> act;
    for (std::size_t k = 0; k < torus.active.size(); ++k)
        if (torus.active[k])
            act.push_back(static_cast<int>(k));
    const std::size_t na = act.size();
    omega.resize(na);
    jac = Matrix(na, na);
    for (std::size_t i = 0; i < na; ++i) {
        omega[i] = torus.omega_val[act[i]];
        for (std::size_t j = 0; j < na; ++j)
            jac(i, j) = torus.jacobian(act[i], act[j]);
    }
}

} // namespace

double classical_action(const ResonantTorus& torus, const ActionPolynomial& poly)
{
    double s = 0.0;
    for (std::size_t k = 0; k < torus.J.size(); ++k)
        s += torus.J[k] * kTwoPi * torus.m.m[k];
    s -= eval_hamiltonian(poly, ActionPoint{0.0, torus.J}) * torus.tau;
    return s;
}

int maslov_index(const WindingVector& m)
{
    int s = 0;
    for (int v : m.m)
        s += v;
    return 2 * s;
}

BorderedHessian bordered_hessian(const ResonantTorus& torus)
{
    std::vector<double> omega;
    Matrix jac;
    active_parts(torus, omega, jac);
    const std::size_t na = omega.size();
    if (na == 0)
        throw DegenerateHessian("bordered Hessian needs at least one active mode");

    LuDecomposition lu_jac(jac);
    const double det_jac = lu_jac.determinant();
    if (lu_jac.singular() || std::abs(det_jac) < kSingularDet)
        throw SingularJacobian("dOmega/dJ is singular on the torus, |det| = " +
                               std::to_string(std::abs(det_jac)));

    BorderedHessian h;
    h.active_count = static_cast<int>(na);
    h.matrix = Matrix(na + 1, na + 1);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < na; ++j)
            h.matrix(i, j) = -torus.tau * jac(i, j);
        h.matrix(i, na) = -omega[i];
        h.matrix(na, i) = -omega[i];
    }
    h.matrix(na, na) = 0.0;

    h.det_direct = determinant(h.matrix);

    // Schur complement of the -tau dOmega/dJ block:
    // det H = (-1)^f tau^{f-1} det(dOmega/dJ) [Omega^T (dOmega/dJ)^{-1} Omega].
    const std::vector<double> y = lu_jac.solve(omega);
    const double quad = dot(omega, y);
    const double sign = (na % 2 == 0) ? 1.0 : -1.0;
    h.det_schur = sign * std::pow(torus.tau, static_cast<double>(na) - 1.0) * det_jac * quad;

    if (std::abs(h.det_direct) < kSingularDet)
        throw DegenerateHessian("bordered Hessian is singular (bifurcation point), det = " +
                                std::to_string(h.det_direct));

    const std::vector<double> ev = symmetric_eigenvalues(h.matrix);
    int pos = 0, neg = 0;
    for (double v : ev)
        (v > 0.0 ? pos : neg) += 1;
    h.signature = pos - neg;
    return h;
}

double berry_tabor_amplitude(const BorderedHessian& hess, const ResonantTorus& torus,
                             double hbar)
{
    if (hbar <= 0.0)
        throw Error("berry_tabor_amplitude: hbar must be positive");
    if (std::abs(hess.det_direct) < kSingularDet)
        throw DegenerateHessian("berry_tabor_amplitude: degenerate Hessian");
    std::vector<double> omega;
    Matrix jac;
    active_parts(torus, omega, jac);
    const double det_jac = determinant(jac);
    return std::sqrt(kTwoPi * hbar) * std::sqrt(std::abs(det_jac)) /
           std::sqrt(std::abs(hess.det_direct));
}

OrbitContribution make_contribution(const ResonantTorus& torus, const ActionPolynomial& poly,
                                    double hbar)
{
    OrbitContribution c;
    c.torus = torus;
    c.action = classical_action(torus, poly);
    c.maslov = maslov_index(torus.m);
    const BorderedHessian hess = bordered_hessian(torus);
    c.hessian_signature = hess.signature;
    c.amplitude = berry_tabor_amplitude(hess, torus, hbar);
    c.stability_factor = gutzwiller_stability_factor(torus.lambda_val, torus.tau);
    c.phase = c.action / hbar - 0.5 * std::numbers::pi * c.maslov;
    return c;
}

} // namespace otoc
