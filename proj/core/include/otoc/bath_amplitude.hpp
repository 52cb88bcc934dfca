#pragma once

#include "otoc/linalg.hpp"
#include "otoc/normal_form.hpp"
#include "otoc/resonance.hpp"

namespace otoc {

/// Bordered Hessian of the stationary phase over (J, tau):
///   [ -tau dOmega/dJ   -Omega ]
///   [ -Omega^T              0 ]
/// built on the torus's active modes. The determinant is carried twice, once
/// by LU of the assembled matrix and once through the Schur-complement
/// reduction; the two must agree.
struct BorderedHessian {
    Matrix matrix;
    double det_direct = 0.0;
    double det_schur = 0.0;
    int signature = 0;  // (#positive eigenvalues) - (#negative eigenvalues)
    int active_count = 0;
};

/// Per-orbit ingredients of the coherent sum.
struct OrbitContribution {
    ResonantTorus torus;
    double action = 0.0;       // S, units of hbar
    int maslov = 0;            // mu
    double amplitude = 0.0;    // bath amplitude A, positive
    double stability_factor = 0.0;  // 1/(2 sinh(Lambda tau / 2))
    double phase = 0.0;        // S/hbar - pi mu / 2
    int hessian_signature = 0; // sigma_H, logged for phase-convention audits
};

/// S = J . 2 pi m - H(0, J) tau.
double classical_action(const ResonantTorus& torus, const ActionPolynomial& poly);

/// mu = 2 sum_k m_k: each librational bath oscillation crosses two turning
/// points.
int maslov_index(const WindingVector& m);

BorderedHessian bordered_hessian(const ResonantTorus& torus);

/// Berry-Tabor bath amplitude
///   A = sqrt(2 pi hbar) |det dOmega/dJ|^{1/2} / |det H|^{1/2},
/// equal to sqrt(2 pi hbar) / (tau^{(f-1)/2} |Omega^T (dOmega/dJ)^{-1} Omega|^{1/2}).
/// Complex phase factors are not folded into the magnitude; they live in the
/// orbit phase and the logged signature.
double berry_tabor_amplitude(const BorderedHessian& hess, const ResonantTorus& torus,
                             double hbar);

/// Assembles every per-orbit ingredient for one solved torus.
OrbitContribution make_contribution(const ResonantTorus& torus, const ActionPolynomial& poly,
                                    double hbar);

} // namespace otoc
