#pragma once

#include "otoc/linalg.hpp"

namespace otoc {

/// 2x2 symmetric hyperbolic monodromy block [[cosh, sinh], [sinh, cosh]].
using ReactionBlock = Matrix;

/// 2f x 2f shear block [[I, (dOmega/dJ) t], [0, I]].
using BathBlock = Matrix;

/// Selects between the exact hyperbolic expression and its large-argument
/// exponential form. The coherent sum uses the asymptotic form by default.
enum class GrowthForm { exact, asymptotic };

/// Monodromy of the unstable pair after time t at constant rate lambda_rate.
ReactionBlock reaction_monodromy(double lambda_rate, double t);

/// Monodromy of the bath block: identity plus the frequency shear.
BathBlock bath_monodromy(const Matrix& dOmega_dJ, double t);

/// 1 / (2 sinh(lambda tau / 2)) == |det(M_reac(tau) - I)|^{-1/2}.
double gutzwiller_stability_factor(double lambda_rate, double period);

/// log of the stability factor, safe for lambda*tau far beyond double range.
double log_gutzwiller_stability_factor(double lambda_rate, double period);

/// Squared-commutator growth weight: hbar^2 cosh^2(lambda t), or its
/// asymptotic form (hbar^2/4) e^{2 lambda t}.
double butterfly_weight(double lambda_rate, double t_otoc, double hbar,
                        GrowthForm form = GrowthForm::exact);

double log_butterfly_weight(double lambda_rate, double t_otoc, double hbar,
                            GrowthForm form = GrowthForm::exact);

} // namespace otoc
