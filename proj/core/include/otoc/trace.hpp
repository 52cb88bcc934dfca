#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "otoc/bath_amplitude.hpp"
#include "otoc/normal_form.hpp"
#include "otoc/resonance.hpp"
#include "otoc/stability.hpp"

namespace otoc {

/// resonant: tori are re-solved at every observation time with tau = t.
/// general: tori live on the energy shell and keep their own periods.
enum class TraceMode { resonant, general };

struct TraceConfig {
    double E = 0.0;             // energy shell (general mode)
    double hbar = 0.05;
    int m_max = 5;              // winding depth cutoff, |m|_1 <= m_max
    std::vector<double> t_grid; // strictly increasing observation times
    TraceMode mode = TraceMode::resonant;
    bool log_space = false;     // sum in log-magnitude/sign decomposition
    GrowthForm butterfly_form = GrowthForm::asymptotic;
    int threads = 1;            // worker threads over the time grid
};

/// One orbit's contribution at one observation time.
struct WeightedOrbit {
    std::size_t t_index = 0;
    OrbitContribution contribution;
    double weight = 0.0;
};

/// A winding that produced no orbit, with the reason.
struct SkipRecord {
    static constexpr std::size_t no_time = static_cast<std::size_t>(-1);
    std::size_t t_index = no_time;
    WindingVector m;
    std::string reason;
};

struct TraceSeries {
    std::vector<double> t;
    std::vector<double> c_e;                    // == partials.back() when m_max >= 1
    std::vector<std::vector<double>> partials;  // partials[k-1] = C^(k), k = 1..m_max
    std::vector<std::vector<double>> residuals; // residuals[k-1] = |C^(k) - C^(k-1)|
    std::vector<WeightedOrbit> contributions;   // t-major, enumeration order within t
    std::vector<SkipRecord> skips;
    std::vector<std::size_t> empty_times;       // grid indices with no orbit
    std::size_t orbit_count = 0;
    int m_max = 0;
    double hbar = 0.0;
    TraceMode mode = TraceMode::resonant;

    bool empty_sum() const { return empty_times.size() == t.size(); }
};

/// Resonant-case weight of one orbit: A e^{1.5 Lambda t} cos(S/hbar - pi mu/2).
/// The bath-only amplitude already carries the reaction dilution, so no extra
/// stability factor enters.
double orbit_weight_resonant(const OrbitContribution& c, double t, double hbar);

/// General-form weight: growth at the observation time over dilution at the
/// orbit's own period, times the bath amplitude and the action cosine.
double orbit_weight_general(const OrbitContribution& c, double t_otoc, double hbar,
                            GrowthForm form = GrowthForm::asymptotic);

/// Runs the coherent orbit sum over the full time grid. Solver failures are
/// recorded as skips, never aborting the sweep; times with no surviving orbit
/// are flagged. The reduction runs in deterministic enumeration order
/// independent of the thread count.
TraceSeries assemble_trace(const ActionPolynomial& poly, const TraceConfig& cfg,
                           const SolverConfig& solver_cfg);

/// |C^(k) - C^(k-1)| pointwise, 1 <= k <= m_max.
std::vector<double> convergence_residual(const TraceSeries& series, int k);

/// Least-squares slope of ln|C| against t on [t_lo, t_hi] (at least 8 grid
/// points). A zero crossing inside the window switches to the envelope fit
/// over the local maxima of |C|.
double fit_growth_exponent(const TraceSeries& series, double t_lo, double t_hi);
double fit_growth_exponent(const std::vector<double>& t, const std::vector<double>& values,
                           double t_lo, double t_hi);

/// Plain ln|v| regression; every value must be nonzero.
double fit_log_slope(const std::vector<double>& t, const std::vector<double>& values);

/// Regression restricted to the local maxima of |v|.
double fit_envelope_slope(const std::vector<double>& t, const std::vector<double>& values);

/// The contribution with the largest |weight| anywhere on the grid.
const WeightedOrbit& dominant_contribution(const TraceSeries& series);

/// Scan of a single frozen torus over observation time:
/// W(t) = A e^{1.5 Lambda t} cos(S/hbar - pi mu/2) with the orbit data held
/// fixed. This is the one-orbit restriction of the resonant-case sum.
std::vector<double> single_orbit_series(const OrbitContribution& c,
                                        const std::vector<double>& t_grid, double hbar);

} // namespace otoc
