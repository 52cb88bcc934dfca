#pragma once

#include <complex>

#include "otoc/stability.hpp"

namespace otoc {

struct ReactionTraceConfig {
    double q_max = 1.5;           // half-width of the valid neighborhood
    int quadrature_points = 20001;  // odd, >= 3
    double hbar = 0.05;
    /// Regularized boundary: linear taper to zero over the outer
    /// `apodize_fraction` of the interval length at each end. The raw hard
    /// cutoff is the default; the taper suppresses the boundary Fresnel ring.
    bool apodize = false;
    double apodize_fraction = 0.05;
    double quad_tol = 1e-8;       // relative convergence bound under doubling
    int max_refinements = 12;
};

/// Diagonal return propagator of the unstable mode,
///   sqrt(Lambda / (2 pi i hbar sinh(Lambda tau))) *
///   exp(i Lambda (cosh(Lambda tau) - 1) q_u^2 / (hbar sinh(Lambda tau))),
/// principal branch for the square root of i.
std::complex<double> kreac_diagonal(double q_u, double tau, double lambda_rate, double hbar);

/// Trace of the return propagator over [-q_max, q_max] by composite Simpson
/// quadrature, refined by point doubling until converged.
std::complex<double> reaction_trace_quadrature(double lambda_rate, double tau,
                                               const ReactionTraceConfig& cfg);

/// 1 / (2 sinh(Lambda tau / 2)), or its asymptotic form e^{-Lambda tau / 2}.
double reaction_trace_analytic(double lambda_rate, double tau,
                               GrowthForm form = GrowthForm::exact);

} // namespace otoc
