#include "otoc/trace.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "otoc/errors.hpp"

namespace otoc {

namespace {

constexpr double kPi = std::numbers::pi;

double cosine_term(const OrbitContribution& c, double hbar)
{
    return std::cos(c.action / hbar - 0.5 * kPi * c.maslov);
}

/// Signed accumulator that can run either in compensated (Kahan) arithmetic
/// or in a log-magnitude/sign decomposition for exponents beyond double range.
class SignedAccumulator {
public:
    explicit SignedAccumulator(bool log_space) : log_space_(log_space) {}

    void add(double value)
    {
        if (!log_space_) {
            const double y = value - comp_;
            const double t = sum_ + y;
            comp_ = (t - sum_) - y;
            sum_ = t;
            return;
        }
        if (value == 0.0)
            return;
        const double l = std::log(std::abs(value));
        const double s = value > 0.0 ? 1.0 : -1.0;
        if (l > max_log_) {
            scaled_ *= std::exp(max_log_ - l);
            max_log_ = l;
            scaled_ += s;
        } else {
            scaled_ += s * std::exp(l - max_log_);
        }
    }

    double value() const
    {
        if (!log_space_)
            return sum_;
        if (scaled_ == 0.0)
            return 0.0;
        return (scaled_ > 0.0 ? 1.0 : -1.0) * std::exp(max_log_ + std::log(std::abs(scaled_)));
    }

private:
    bool log_space_;
    double sum_ = 0.0;
    double comp_ = 0.0;
    double max_log_ = -std::numeric_limits<double>::infinity();
    double scaled_ = 0.0;
};

void check_resonant_pairing(const OrbitContribution& c, double t)
{
    if (c.torus.mode != SolveMode::fixed_time)
        throw ModeMismatch("resonant weight needs a fixed-time torus");
    if (std::abs(c.torus.tau - t) > 1e-9 * std::max(1.0, std::abs(t)))
        throw ModeMismatch("resonant weight: torus period " + std::to_string(c.torus.tau) +
                           " differs from observation time " + std::to_string(t));
}

struct TimeSliceResult {
    std::vector<WeightedOrbit> orbits;
    std::vector<SkipRecord> skips;
};

struct LinearFit {
    double slope;
    std::size_t points;
};

LinearFit least_squares_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0)
        throw InsufficientData("slope fit needs at least two distinct abscissae");
    return {sxy / sxx, n};
}

} // namespace

double orbit_weight_resonant(const OrbitContribution& c, double t, double hbar)
{
    if (hbar <= 0.0)
        throw Error("orbit_weight_resonant: hbar must be positive");
    check_resonant_pairing(c, t);
    return c.amplitude * std::exp(1.5 * c.torus.lambda_val * t) * cosine_term(c, hbar);
}

double orbit_weight_general(const OrbitContribution& c, double t_otoc, double hbar,
                            GrowthForm form)
{
    if (hbar <= 0.0)
        throw Error("orbit_weight_general: hbar must be positive");
    if (c.torus.mode != SolveMode::fixed_energy)
        throw ModeMismatch("general weight needs a fixed-energy torus");
    const double lam = c.torus.lambda_val;
    // Growth normalized so that the (hbar^2/4) prefactor of the sum restores
    // hbar^2 cosh^2 in the exact form.
    double growth;
    if (form == GrowthForm::asymptotic) {
        growth = std::exp(2.0 * lam * t_otoc);
    } else {
        const double ch = std::cosh(lam * t_otoc);
        growth = 4.0 * ch * ch;
    }
    const double dilution = gutzwiller_stability_factor(lam, c.torus.tau);
    return growth * dilution * c.amplitude * cosine_term(c, hbar);
}

TraceSeries assemble_trace(const ActionPolynomial& poly, const TraceConfig& cfg,
                           const SolverConfig& solver_cfg)
{
    if (cfg.hbar <= 0.0)
        throw Error("assemble_trace: hbar must be positive");
    if (cfg.m_max < 0)
        throw Error("assemble_trace: m_max must be non-negative");
    if (cfg.t_grid.empty())
        throw Error("assemble_trace: empty time grid");
    for (std::size_t i = 1; i < cfg.t_grid.size(); ++i)
        if (cfg.t_grid[i] <= cfg.t_grid[i - 1])
            throw Error("assemble_trace: time grid must be strictly increasing");

    const int f = poly.bath_modes();
    const std::vector<WindingVector> windings = enumerate_windings(f, cfg.m_max);
    const std::size_t nt = cfg.t_grid.size();

    TraceSeries series;
    series.t = cfg.t_grid;
    series.m_max = cfg.m_max;
    series.hbar = cfg.hbar;
    series.mode = cfg.mode;

    // General mode: the orbit set lives on the energy shell and is solved once.
    std::vector<OrbitContribution> shell_orbits;
    if (cfg.mode == TraceMode::general) {
        const double e0 =
            eval_hamiltonian(poly, ActionPoint{0.0, std::vector<double>(f, 0.0)});
        if (cfg.E <= e0)
            throw BelowSaddle("trace energy is at or below the saddle energy");
        for (const WindingVector& m : windings) {
            try {
                for (const ResonantTorus& torus :
                     solve_resonance_fixed_energy_all(poly, m, cfg.E, solver_cfg))
                    shell_orbits.push_back(make_contribution(torus, poly, cfg.hbar));
            } catch (const Error& e) {
                series.skips.push_back({SkipRecord::no_time, m, e.what()});
            }
        }
    }

    // Per-time work, independent across grid points.
    std::vector<TimeSliceResult> slices(nt);
    auto run_slice = [&](std::size_t it) {
        TimeSliceResult& slice = slices[it];
        const double t = cfg.t_grid[it];
        if (cfg.mode == TraceMode::resonant) {
            for (const WindingVector& m : windings) {
                try {
                    for (const ResonantTorus& torus :
                         solve_resonance_fixed_time_all(poly, m, t, solver_cfg)) {
                        OrbitContribution c = make_contribution(torus, poly, cfg.hbar);
                        const double w = orbit_weight_resonant(c, t, cfg.hbar);
                        slice.orbits.push_back({it, std::move(c), w});
                    }
                } catch (const Error& e) {
                    slice.skips.push_back({it, m, e.what()});
                }
            }
        } else {
            for (const OrbitContribution& c : shell_orbits) {
                try {
                    const double w = orbit_weight_general(c, t, cfg.hbar, cfg.butterfly_form);
                    slice.orbits.push_back({it, c, w});
                } catch (const Error& e) {
                    slice.skips.push_back({it, c.torus.m, e.what()});
                }
            }
        }
    };

    const int workers = std::max(1, cfg.threads);
    if (workers == 1 || nt <= 1) {
        for (std::size_t it = 0; it < nt; ++it)
            run_slice(it);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const std::size_t n_threads = std::min<std::size_t>(workers, nt);
        pool.reserve(n_threads);
        for (std::size_t w = 0; w < n_threads; ++w)
            pool.emplace_back([&]() {
                for (std::size_t it = next.fetch_add(1); it < nt; it = next.fetch_add(1))
                    run_slice(it);
            });
        for (std::thread& th : pool)
            th.join();
    }

    // Ordered reduction: depth buckets summed in enumeration order, then
    // prefix-combined into the per-depth partial sums.
    const int depths = std::max(1, cfg.m_max);
    series.partials.assign(depths, std::vector<double>(nt, 0.0));
    series.residuals.assign(depths, std::vector<double>(nt, 0.0));
    series.c_e.assign(nt, 0.0);
    const double scale = 0.25 * cfg.hbar * cfg.hbar;

    for (std::size_t it = 0; it < nt; ++it) {
        std::vector<SignedAccumulator> buckets(depths + 1, SignedAccumulator(cfg.log_space));
        for (const WeightedOrbit& wo : slices[it].orbits)
            buckets[wo.contribution.torus.m.l1_norm()].add(wo.weight);
        double prev = 0.0;
        SignedAccumulator running(cfg.log_space);
        for (int k = 1; k <= depths; ++k) {
            running.add(buckets[k].value());
            const double ck = scale * running.value();
            series.partials[k - 1][it] = ck;
            series.residuals[k - 1][it] = std::abs(ck - prev);
            prev = ck;
        }
        series.c_e[it] = prev;
        if (slices[it].orbits.empty())
            series.empty_times.push_back(it);
        for (WeightedOrbit& wo : slices[it].orbits)
            series.contributions.push_back(std::move(wo));
        for (SkipRecord& sk : slices[it].skips)
            series.skips.push_back(std::move(sk));
    }
    series.orbit_count = series.contributions.size();
    return series;
}

std::vector<double> convergence_residual(const TraceSeries& series, int k)
{
    if (k < 1 || k > series.m_max)
        throw DepthOutOfRange("depth " + std::to_string(k) + " outside 1.." +
                              std::to_string(series.m_max));
    const std::vector<double>& cur = series.partials[k - 1];
    std::vector<double> out(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) {
        const double prev = k >= 2 ? series.partials[k - 2][i] : 0.0;
        out[i] = std::abs(cur[i] - prev);
    }
    return out;
}

double fit_log_slope(const std::vector<double>& t, const std::vector<double>& values)
{
    if (t.size() != values.size())
        throw DimensionMismatch("fit_log_slope: size mismatch");
    if (t.size() < 2)
        throw InsufficientData("fit_log_slope: need at least two points");
    std::vector<double> ly(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == 0.0)
            throw InsufficientData("fit_log_slope: zero value in window");
        ly[i] = std::log(std::abs(values[i]));
    }
    return least_squares_slope(t, ly).slope;
}

double fit_envelope_slope(const std::vector<double>& t, const std::vector<double>& values)
{
    if (t.size() != values.size())
        throw DimensionMismatch("fit_envelope_slope: size mismatch");
    std::vector<double> et, ey;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        const double a = std::abs(values[i]);
        if (a > 0.0 && a >= std::abs(values[i - 1]) && a >= std::abs(values[i + 1])) {
            et.push_back(t[i]);
            ey.push_back(std::log(a));
        }
    }
    if (et.size() < 2)
        throw InsufficientData("fit_envelope_slope: fewer than two local maxima");
    return least_squares_slope(et, ey).slope;
}

double fit_growth_exponent(const std::vector<double>& t, const std::vector<double>& values,
                           double t_lo, double t_hi)
{
    if (t.size() != values.size())
        throw DimensionMismatch("fit_growth_exponent: size mismatch");
    std::vector<double> wt, wv;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= t_lo && t[i] <= t_hi) {
            wt.push_back(t[i]);
            wv.push_back(values[i]);
        }
    if (wt.size() < 8)
        throw InsufficientData("fit_growth_exponent: fewer than 8 grid points in window");
    bool crossing = false;
    for (std::size_t i = 0; i < wv.size() && !crossing; ++i)
        crossing = wv[i] == 0.0 || (i > 0 && std::signbit(wv[i]) != std::signbit(wv[i - 1]));
    if (!crossing)
        return fit_log_slope(wt, wv);
    return fit_envelope_slope(wt, wv);  // oscillation-robust fallback
}

double fit_growth_exponent(const TraceSeries& series, double t_lo, double t_hi)
{
    return fit_growth_exponent(series.t, series.c_e, t_lo, t_hi);
}

const WeightedOrbit& dominant_contribution(const TraceSeries& series)
{
    if (series.contributions.empty())
        throw InsufficientData("dominant_contribution: the sum has no orbits");
    const WeightedOrbit* best = &series.contributions.front();
    for (const WeightedOrbit& wo : series.contributions)
        if (std::abs(wo.weight) > std::abs(best->weight))
            best = &wo;
    return *best;
}

std::vector<double> single_orbit_series(const OrbitContribution& c,
                                        const std::vector<double>& t_grid, double hbar)
{
    if (hbar <= 0.0)
        throw Error("single_orbit_series: hbar must be positive");
    const double cosw = cosine_term(c, hbar);
    std::vector<double> out(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i)
        out[i] = c.amplitude * std::exp(1.5 * c.torus.lambda_val * t_grid[i]) * cosw;
    return out;
}

} // namespace otoc
