#pragma once

#include <complex>
#include <vector>

#include "otoc/linalg.hpp"
#include "otoc/normal_form.hpp"

namespace otoc {

/// Full phase-space point (q_u, p_u, theta_1..theta_f, J_1..J_f).
struct PhaseState {
    double q_u = 0.0;
    double p_u = 0.0;
    std::vector<double> theta;
    std::vector<double> J;
};

struct FlowResult {
    PhaseState state;
    Matrix monodromy;     // (2+2f) x (2+2f), d z(t) / d z(0)
    int steps = 0;
    double halving_error = 0.0;  // max monodromy deviation between dt and dt/2
};

/// Integrates Hamilton's equations and the variational equations side by side
/// with fixed-step RK4, then repeats at half step as a convergence check.
FlowResult integrate_flow_and_variations(const ActionPolynomial& poly, const PhaseState& z0,
                                         double t, double dt);

struct GradientCheckReport {
    double err_lambda = 0.0;
    double err_omega = 0.0;
    double err_jacobian = 0.0;

    double max_error() const
    {
        return err_lambda > err_omega ? (err_lambda > err_jacobian ? err_lambda : err_jacobian)
                                      : (err_omega > err_jacobian ? err_omega : err_jacobian);
    }
};

/// Central finite differences at step h against the analytic derivatives;
/// reports the worst relative error per quantity.
GradientCheckReport finite_difference_check(const ActionPolynomial& poly, const ActionPoint& pt,
                                            double h);

struct QuantumGridConfig {
    double L = 20.0;        // box half-length
    int n_points = 2048;    // power of two, >= 256
    double lambda = 0.7350;
    double hbar = 0.05;
    std::vector<double> t_grid;
    double dt = 0.002;
    /// Probability mass allowed in the outer edges of the position or
    /// momentum grid before the run is declared under-resolved.
    double leak_tol = 1e-6;
};

/// lambda^{-1} ln(L / hbar): the time for the stretched packet to span the box.
double ehrenfest_time(double lambda, double L, double hbar);

/// Measured edge occupations of the forward-evolved state, one entry per
/// grid time.
struct QuantumLeakReport {
    std::vector<double> position_edge_mass;
    std::vector<double> momentum_edge_mass;
    double norm_drift = 0.0;  // max | <psi|psi> - 1 | over the grid times
};

/// Grid OTOC of the inverted oscillator H = p^2/2 - lambda^2 q^2 / 2 from a
/// minimum-uncertainty packet at the saddle: C(t) = || [q(t), p] psi ||^2 via
/// split-step spectral propagation, with q(t) applied through forward and
/// backward evolution.
std::vector<double> quantum_otoc_inverted_oscillator(const QuantumGridConfig& cfg,
                                                     QuantumLeakReport* report = nullptr);

namespace detail {

/// In-place radix-2 FFT; `inverse` applies the conjugate transform scaled by 1/n.
void fft(std::vector<std::complex<double>>& a, bool inverse);

} // namespace detail

} // namespace otoc
