#pragma once

#include <optional>
#include <vector>

#include "otoc/linalg.hpp"
#include "otoc/normal_form.hpp"

namespace otoc {

/// Integer winding numbers (m_1..m_f) labelling a resonant torus.
struct WindingVector {
    std::vector<int> m;

    int l1_norm() const
    {
        int s = 0;
        for (int v : m)
            s += v < 0 ? -v : v;
        return s;
    }

    bool operator==(const WindingVector& other) const { return m == other.m; }
};

/// Whether a torus was pinned by the observation time or by the energy shell.
enum class SolveMode { fixed_time, fixed_energy };

/// A solved stationary torus with everything the amplitude assembly needs.
struct ResonantTorus {
    WindingVector m;
    std::vector<double> J;          // bath actions, all >= 0
    double tau = 0.0;               // period (fixed_time: the prescribed t)
    double lambda_val = 0.0;        // Lambda(0, J)
    std::vector<double> omega_val;  // Omega(0, J)
    Matrix jacobian;                // dOmega/dJ at the root, full f x f
    int iterations = 0;
    double residual_norm = 0.0;
    SolveMode mode = SolveMode::fixed_time;
    /// Modes participating in the root system. In fixed_time mode every mode
    /// is active; in fixed_energy mode the m_k = 0 modes are held at J_k = 0
    /// and excluded from the stationary conditions.
    std::vector<char> active;

    int active_count() const
    {
        int n = 0;
        for (char a : active)
            n += a != 0;
        return n;
    }
};

struct SolverConfig {
    double tol = 1e-10;       // convergence bound on the inf-norm residual
    int max_iter = 50;
    double damping = 0.5;     // backtracking shrink factor, in (0, 1)
    double min_step = 1e-4;   // give up a start when the line search is below this
    double j_min = -0.5;      // iterate box, keeps Newton in the trust region
    double j_cap = 50.0;
    double neg_clamp = 1e-9;  // boundary grazing: J in (-neg_clamp, 0) snaps to 0
    double dedup_tol = 1e-6;  // roots closer than this in inf-norm are one orbit
    double singular_det = 1e-14;
    /// Extra starting points prepended to the built-in ladder.
    std::vector<std::vector<double>> initial_guesses;
};

/// All integer vectors with 1 <= |m|_1 <= m_max in lexicographic order.
std::vector<WindingVector> enumerate_windings(int f, int m_max);

/// Roots of Omega(0, J) = 2 pi m / t with J_k >= 0, deduplicated, in the
/// deterministic order the starts produced them. Empty when every converged
/// root is unphysical. Throws NoRoot / SingularJacobian when nothing
/// converged at all.
std::vector<ResonantTorus> solve_resonance_fixed_time_all(const ActionPolynomial& poly,
                                                          const WindingVector& m, double t,
                                                          const SolverConfig& cfg);

/// First valid root, or nullopt when the converged roots are unphysical.
std::optional<ResonantTorus> solve_resonance_fixed_time(const ActionPolynomial& poly,
                                                        const WindingVector& m, double t,
                                                        const SolverConfig& cfg);

/// Joint roots (J, tau) of H(0, J) = E and Omega_k(0, J) tau = 2 pi m_k over
/// the active modes (m_k > 0). Windings with a negative component have no
/// torus here and yield an empty result.
std::vector<ResonantTorus> solve_resonance_fixed_energy_all(const ActionPolynomial& poly,
                                                            const WindingVector& m, double E,
                                                            const SolverConfig& cfg);

std::optional<ResonantTorus> solve_resonance_fixed_energy(const ActionPolynomial& poly,
                                                          const WindingVector& m, double E,
                                                          const SolverConfig& cfg);

} // namespace otoc
