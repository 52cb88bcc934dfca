#include "otoc/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "otoc/errors.hpp"

namespace otoc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_winding(const ActionPolynomial& poly, const WindingVector& m)
{
    if (static_cast<int>(m.m.size()) != poly.bath_modes())
        throw DimensionMismatch("winding vector length != bath mode count");
}

std::string winding_to_string(const WindingVector& m)
{
    std::string s = "(";
    for (std::size_t i = 0; i < m.m.size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(m.m[i]);
    }
    return s + ")";
}

/// Frequency map and its Jacobian with the derivative polynomials built once,
/// not on every Newton residual evaluation.
struct FrequencyModel {
    const ActionPolynomial& h;
    std::vector<ActionPolynomial> omega;
    std::vector<std::vector<ActionPolynomial>> curvature;  // upper triangle

    explicit FrequencyModel(const ActionPolynomial& poly) : h(poly)
    {
        const int f = poly.bath_modes();
        omega.reserve(f);
        for (int k = 0; k < f; ++k)
            omega.push_back(poly.partial_derivative(k + 1));
        curvature.resize(f);
        for (int k = 0; k < f; ++k)
            for (int j = k; j < f; ++j)
                curvature[k].push_back(omega[k].partial_derivative(j + 1));
    }

    int modes() const { return h.bath_modes(); }

    void eval_omega(const std::vector<double>& J, std::vector<double>& out) const
    {
        const ActionPoint pt{0.0, J};
        for (int k = 0; k < modes(); ++k)
            out[k] = eval_hamiltonian(omega[k], pt);
    }

    void eval_jacobian(const std::vector<double>& J, Matrix& out) const
    {
        const ActionPoint pt{0.0, J};
        const int f = modes();
        if (out.rows() != static_cast<std::size_t>(f))
            out = Matrix(f, f);
        for (int k = 0; k < f; ++k)
            for (int j = k; j < f; ++j)
                out(k, j) = out(j, k) = eval_hamiltonian(curvature[k][j - k], pt);
    }

    double eval_energy(const std::vector<double>& J) const
    {
        return eval_hamiltonian(h, ActionPoint{0.0, J});
    }
};

/// Built-in multistart ladder {0.1, 1.0, 2.5}^n in lexicographic order.
std::vector<std::vector<double>> start_ladder(int n)
{
    static const double rungs[3] = {0.1, 1.0, 2.5};
    std::vector<std::vector<double>> starts;
    std::vector<int> idx(n, 0);
    while (true) {
        std::vector<double> s(n);
        for (int i = 0; i < n; ++i)
            s[i] = rungs[idx[i]];
        starts.push_back(std::move(s));
        int pos = n - 1;
        while (pos >= 0 && ++idx[pos] == 3)
            idx[pos--] = 0;
        if (pos < 0)
            break;
    }
    return starts;
}

struct NewtonOutcome {
    bool converged = false;
    bool hit_singular = false;
    std::vector<double> x;
    int iterations = 0;
    double residual = 0.0;
};

/// Damped Newton with backtracking line search; iterates are clipped to the
/// [lo, hi] box so the polynomial is never evaluated outside its trust region.
NewtonOutcome damped_newton(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& residual,
    const std::function<void(const std::vector<double>&, Matrix&)>& jacobian,
    std::vector<double> x, const std::vector<double>& lo, const std::vector<double>& hi,
    const SolverConfig& cfg)
{
    const std::size_t n = x.size();
    NewtonOutcome out;
    std::vector<double> f(n), f_trial(n), trial(n), rhs(n);
    Matrix jac(n, n);

    auto clip = [&](std::vector<double>& v) {
        for (std::size_t i = 0; i < n; ++i)
            v[i] = std::clamp(v[i], lo[i], hi[i]);
    };

    clip(x);
    residual(x, f);
    double fnorm = norm_inf(f);

    for (int it = 1; it <= cfg.max_iter; ++it) {
        if (fnorm <= cfg.tol) {
            out.converged = true;
            out.x = x;
            out.iterations = it - 1;
            out.residual = fnorm;
            return out;
        }
        jacobian(x, jac);
        LuDecomposition lu(jac);
        if (lu.singular() || std::abs(lu.determinant()) < cfg.singular_det) {
            out.hit_singular = true;
            return out;
        }
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = -f[i];
        const std::vector<double> step = lu.solve(rhs);

        double alpha = 1.0;
        bool improved = false;
        while (alpha >= cfg.min_step) {
            bool moved = false;
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = std::clamp(x[i] + alpha * step[i], lo[i], hi[i]);
                moved = moved || trial[i] != x[i];
            }
            if (!moved)
                break;  // pinned against the box; shrinking alpha cannot help
            residual(trial, f_trial);
            const double tnorm = norm_inf(f_trial);
            if (std::isfinite(tnorm) && (tnorm < fnorm || tnorm <= cfg.tol)) {
                x = trial;
                f = f_trial;
                fnorm = tnorm;
                improved = true;
                break;
            }
            alpha *= cfg.damping;
        }
        if (!improved)
            return out;
        if (fnorm <= cfg.tol) {
            out.converged = true;
            out.x = x;
            out.iterations = it;
            out.residual = fnorm;
            return out;
        }
    }
    return out;
}

/// Boundary-grazing clamp; true when every action ends up non-negative.
bool clamp_actions(std::vector<double>& J, double neg_clamp)
{
    bool ok = true;
    for (double& j : J) {
        if (j < 0.0 && j > -neg_clamp)
            j = 0.0;
        if (j < 0.0)
            ok = false;
    }
    return ok;
}

ResonantTorus make_torus(const ActionPolynomial& poly, const WindingVector& m,
                         std::vector<double> J, double tau, int iterations, double residual,
                         SolveMode mode, std::vector<char> active)
{
    ResonantTorus torus;
    torus.m = m;
    torus.J = std::move(J);
    torus.tau = tau;
    const ActionPoint pt{0.0, torus.J};
    torus.lambda_val = lyapunov_exponent(poly, pt);
    torus.omega_val = bath_frequencies(poly, pt);
    torus.jacobian = frequency_jacobian(poly, pt);
    torus.iterations = iterations;
    torus.residual_norm = residual;
    torus.mode = mode;
    torus.active = std::move(active);
    return torus;
}

void throw_for_failures(bool any_converged, bool any_singular, const WindingVector& m)
{
    if (any_converged)
        return;
    if (any_singular)
        throw SingularJacobian("singular frequency Jacobian while solving winding " +
                               winding_to_string(m));
    throw NoRoot("no start converged for winding " + winding_to_string(m));
}

bool is_duplicate(const std::vector<std::vector<double>>& seen, const std::vector<double>& x,
                  double tol)
{
    for (const auto& r : seen) {
        double d = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k)
            d = std::max(d, std::abs(r[k] - x[k]));
        if (d < tol)
            return true;
    }
    return false;
}

} // namespace

std::vector<WindingVector> enumerate_windings(int f, int m_max)
{
    if (f < 1)
        throw DimensionMismatch("enumerate_windings: need at least one bath mode");
    if (m_max < 0)
        throw Error("enumerate_windings: m_max must be non-negative");
    std::vector<WindingVector> out;
    std::vector<int> v(f, -m_max);
    while (true) {
        WindingVector w{v};
        const int depth = w.l1_norm();
        if (depth >= 1 && depth <= m_max)
            out.push_back(std::move(w));
        int pos = f - 1;
        while (pos >= 0 && v[pos] == m_max)
            v[pos--] = -m_max;
        if (pos < 0)
            break;
        ++v[pos];
    }
    return out;
}

std::vector<ResonantTorus> solve_resonance_fixed_time_all(const ActionPolynomial& poly,
                                                          const WindingVector& m, double t,
                                                          const SolverConfig& cfg)
{
    check_winding(poly, m);
    if (t <= 0.0)
        throw Error("fixed-time solve needs t > 0");
    const int f = poly.bath_modes();
    const FrequencyModel model(poly);

    std::vector<double> target(f);
    for (int k = 0; k < f; ++k)
        target[k] = kTwoPi * m.m[k] / t;

    auto residual = [&](const std::vector<double>& J, std::vector<double>& out) {
        model.eval_omega(J, out);
        for (int k = 0; k < f; ++k)
            out[k] -= target[k];
    };
    auto jacobian = [&](const std::vector<double>& J, Matrix& out) {
        model.eval_jacobian(J, out);
    };

    // Starts: user-supplied, then the linearized estimate, then the ladder.
    std::vector<std::vector<double>> starts = cfg.initial_guesses;
    {
        const std::vector<double> origin(f, 0.0);
        Matrix jac0;
        model.eval_jacobian(origin, jac0);
        LuDecomposition lu(jac0);
        if (!lu.singular() && std::abs(lu.determinant()) >= cfg.singular_det) {
            std::vector<double> rhs(f);
            model.eval_omega(origin, rhs);
            for (int k = 0; k < f; ++k)
                rhs[k] = target[k] - rhs[k];
            starts.push_back(lu.solve(rhs));
        }
    }
    for (auto& s : start_ladder(f))
        starts.push_back(std::move(s));

    const std::vector<double> lo(f, cfg.j_min);
    const std::vector<double> hi(f, cfg.j_cap);

    std::vector<ResonantTorus> roots;
    std::vector<std::vector<double>> seen;  // converged roots, unphysical ones included
    bool any_converged = false;
    bool any_singular = false;

    std::vector<double> res(f);
    for (const auto& start : starts) {
        if (static_cast<int>(start.size()) != f)
            throw DimensionMismatch("initial guess length != bath mode count");
        NewtonOutcome nw = damped_newton(residual, jacobian, start, lo, hi, cfg);
        if (!nw.converged) {
            any_singular = any_singular || nw.hit_singular;
            continue;
        }
        any_converged = true;
        if (is_duplicate(seen, nw.x, cfg.dedup_tol))
            continue;
        seen.push_back(nw.x);
        std::vector<double> J = nw.x;
        if (!clamp_actions(J, cfg.neg_clamp))
            continue;  // converged but unphysical: absent, not an error
        residual(J, res);
        roots.push_back(make_torus(poly, m, std::move(J), t, nw.iterations, norm_inf(res),
                                   SolveMode::fixed_time, std::vector<char>(f, 1)));
    }
    throw_for_failures(any_converged, any_singular, m);
    return roots;
}

std::optional<ResonantTorus> solve_resonance_fixed_time(const ActionPolynomial& poly,
                                                        const WindingVector& m, double t,
                                                        const SolverConfig& cfg)
{
    std::vector<ResonantTorus> all = solve_resonance_fixed_time_all(poly, m, t, cfg);
    if (all.empty())
        return std::nullopt;
    return all.front();
}

std::vector<ResonantTorus> solve_resonance_fixed_energy_all(const ActionPolynomial& poly,
                                                            const WindingVector& m, double E,
                                                            const SolverConfig& cfg)
{
    check_winding(poly, m);
    const int f = poly.bath_modes();
    const FrequencyModel model(poly);
    const double e0 = model.eval_energy(std::vector<double>(f, 0.0));
    if (E <= e0)
        throw BelowSaddle("energy " + std::to_string(E) + " is at or below the saddle energy " +
                          std::to_string(e0));

    // Periods are positive, so a negative winding component admits no root;
    // zero components are held at J_k = 0 and leave the stationary system.
    std::vector<char> active(f, 0);
    std::vector<int> act;
    for (int k = 0; k < f; ++k) {
        if (m.m[k] < 0)
            return {};
        if (m.m[k] > 0) {
            active[k] = 1;
            act.push_back(k);
        }
    }
    if (act.empty())
        return {};
    const int na = static_cast<int>(act.size());
    const int dim = na + 1;  // unknowns: J on the active modes, then tau

    std::vector<double> omega_buf(f);
    Matrix domega_buf;

    auto expand = [&](const std::vector<double>& x) {
        std::vector<double> J(f, 0.0);
        for (int i = 0; i < na; ++i)
            J[act[i]] = x[i];
        return J;
    };

    auto residual = [&](const std::vector<double>& x, std::vector<double>& out) {
        const std::vector<double> J = expand(x);
        const double tau = x[na];
        model.eval_omega(J, omega_buf);
        for (int i = 0; i < na; ++i)
            out[i] = kTwoPi * m.m[act[i]] - omega_buf[act[i]] * tau;
        out[na] = E - model.eval_energy(J);
    };
    auto jacobian = [&](const std::vector<double>& x, Matrix& out) {
        const std::vector<double> J = expand(x);
        const double tau = x[na];
        model.eval_omega(J, omega_buf);
        model.eval_jacobian(J, domega_buf);
        if (out.rows() != static_cast<std::size_t>(dim))
            out = Matrix(dim, dim);
        for (int i = 0; i < na; ++i) {
            for (int j = 0; j < na; ++j)
                out(i, j) = -tau * domega_buf(act[i], act[j]);
            out(i, na) = -omega_buf[act[i]];
        }
        for (int j = 0; j < na; ++j)
            out(na, j) = -omega_buf[act[j]];
        out(na, na) = 0.0;
    };

    std::vector<std::vector<double>> starts = cfg.initial_guesses;
    {
        // Energy-consistent seed: J along omega with omega . J = E - E0.
        std::vector<double> omega0(f);
        model.eval_omega(std::vector<double>(f, 0.0), omega0);
        double w2 = 0.0;
        for (int i = 0; i < na; ++i)
            w2 += omega0[act[i]] * omega0[act[i]];
        if (w2 > 0.0) {
            std::vector<double> s(na);
            for (int i = 0; i < na; ++i)
                s[i] = (E - e0) * omega0[act[i]] / w2;
            starts.push_back(std::move(s));
        }
    }
    for (auto& s : start_ladder(na))
        starts.push_back(std::move(s));

    std::vector<double> lo(dim, cfg.j_min), hi(dim, cfg.j_cap);
    lo[na] = 1e-3;  // tau stays positive
    hi[na] = 1e6;

    std::vector<ResonantTorus> roots;
    std::vector<std::vector<double>> seen;
    bool any_converged = false;
    bool any_singular = false;

    std::vector<double> res(dim);
    for (const auto& start : starts) {
        std::vector<double> x0;
        if (static_cast<int>(start.size()) == na)
            x0 = start;
        else if (static_cast<int>(start.size()) == f) {
            for (int i = 0; i < na; ++i)
                x0.push_back(start[act[i]]);
        } else
            throw DimensionMismatch("initial guess length != bath mode count");
        {
            // Seed tau with the mean resonance period at the guessed actions.
            model.eval_omega(expand(x0), omega_buf);
            double tau0 = 0.0;
            int n = 0;
            for (int i = 0; i < na; ++i)
                if (omega_buf[act[i]] > 0.0) {
                    tau0 += kTwoPi * m.m[act[i]] / omega_buf[act[i]];
                    ++n;
                }
            x0.push_back(n ? tau0 / n : 1.0);
        }
        NewtonOutcome nw = damped_newton(residual, jacobian, x0, lo, hi, cfg);
        if (!nw.converged) {
            any_singular = any_singular || nw.hit_singular;
            continue;
        }
        any_converged = true;
        if (is_duplicate(seen, nw.x, cfg.dedup_tol))
            continue;
        seen.push_back(nw.x);
        const double tau = nw.x[na];
        std::vector<double> J = expand(nw.x);
        if (!clamp_actions(J, cfg.neg_clamp) || tau <= 0.0)
            continue;
        std::vector<double> x_final(dim);
        for (int i = 0; i < na; ++i)
            x_final[i] = J[act[i]];
        x_final[na] = tau;
        residual(x_final, res);
        roots.push_back(make_torus(poly, m, std::move(J), tau, nw.iterations, norm_inf(res),
                                   SolveMode::fixed_energy, active));
    }
    throw_for_failures(any_converged, any_singular, m);
    return roots;
}

std::optional<ResonantTorus> solve_resonance_fixed_energy(const ActionPolynomial& poly,
                                                          const WindingVector& m, double E,
                                                          const SolverConfig& cfg)
{
    std::vector<ResonantTorus> all = solve_resonance_fixed_energy_all(poly, m, E, cfg);
    if (all.empty())
        return std::nullopt;
    return all.front();
}

} // namespace otoc
