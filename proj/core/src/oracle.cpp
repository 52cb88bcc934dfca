#include "otoc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "otoc/errors.hpp"

namespace otoc {

namespace {

constexpr double kPi = std::numbers::pi;

/// All first and second derivative polynomials the variational flow needs,
/// differentiated once up front.
struct FlowModel {
    const ActionPolynomial& h;
    ActionPolynomial lambda;                     // dH/dI
    ActionPolynomial lambda_I;                   // d2H/dI2
    std::vector<ActionPolynomial> lambda_J;      // d2H/dI dJ_k
    std::vector<ActionPolynomial> omega;         // dH/dJ_k
    std::vector<std::vector<ActionPolynomial>> omega_J;  // d2H/dJ_k dJ_j, upper

    explicit FlowModel(const ActionPolynomial& poly)
        : h(poly), lambda(poly.partial_derivative(0)), lambda_I(lambda.partial_derivative(0))
    {
        const int f = poly.bath_modes();
        for (int k = 0; k < f; ++k)
            lambda_J.push_back(lambda.partial_derivative(k + 1));
        for (int k = 0; k < f; ++k)
            omega.push_back(poly.partial_derivative(k + 1));
        omega_J.resize(f);
        for (int k = 0; k < f; ++k)
            for (int j = k; j < f; ++j)
                omega_J[k].push_back(omega[k].partial_derivative(j + 1));
    }
};

struct FlowWorkspace {
    std::vector<double> z;   // (q_u, p_u, theta, J)
    Matrix m;
};

void flow_rhs(const FlowModel& model, const std::vector<double>& z, const Matrix& mon,
              std::vector<double>& dz, Matrix& dmon)
{
    const int f = model.h.bath_modes();
    const int dim = 2 + 2 * f;
    const double q_u = z[0];
    const double p_u = z[1];
    ActionPoint pt;
    pt.I = 0.5 * (p_u * p_u - q_u * q_u);
    pt.J.assign(z.begin() + 2 + f, z.end());

    const double lam = eval_hamiltonian(model.lambda, pt);
    const double lam_I = eval_hamiltonian(model.lambda_I, pt);
    std::vector<double> lam_J(f), om(f);
    for (int k = 0; k < f; ++k) {
        lam_J[k] = eval_hamiltonian(model.lambda_J[k], pt);
        om[k] = eval_hamiltonian(model.omega[k], pt);
    }

    dz.assign(dim, 0.0);
    dz[0] = lam * p_u;
    dz[1] = lam * q_u;
    for (int k = 0; k < f; ++k)
        dz[2 + k] = om[k];
    // dJ/dt = 0: the actions are exact invariants of the flow.

    // Jacobian of the vector field at z.
    Matrix a(dim, dim);
    a(0, 0) = -lam_I * q_u * p_u;
    a(0, 1) = lam + lam_I * p_u * p_u;
    a(1, 0) = lam - lam_I * q_u * q_u;
    a(1, 1) = lam_I * p_u * q_u;
    for (int k = 0; k < f; ++k) {
        a(0, 2 + f + k) = lam_J[k] * p_u;
        a(1, 2 + f + k) = lam_J[k] * q_u;
        a(2 + k, 0) = -lam_J[k] * q_u;  // dOmega_k/dI == dLambda/dJ_k
        a(2 + k, 1) = lam_J[k] * p_u;
        for (int j = 0; j < f; ++j) {
            const int lo = std::min(k, j), hi = std::max(k, j);
            a(2 + k, 2 + f + j) = eval_hamiltonian(model.omega_J[lo][hi - lo], pt);
        }
    }
    dmon = a * mon;
}

FlowWorkspace rk4_integrate(const FlowModel& model, const PhaseState& z0, double t, double dt)
{
    const int f = model.h.bath_modes();
    const int dim = 2 + 2 * f;
    FlowWorkspace w;
    w.z.assign(dim, 0.0);
    w.z[0] = z0.q_u;
    w.z[1] = z0.p_u;
    for (int k = 0; k < f; ++k) {
        w.z[2 + k] = z0.theta[k];
        w.z[2 + f + k] = z0.J[k];
    }
    w.m = Matrix::identity(dim);
    if (t == 0.0)
        return w;

    const int steps = std::max(1, static_cast<int>(std::llround(t / dt)));
    const double h = t / steps;

    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), ztmp(dim);
    Matrix m1, m2, m3, m4, mtmp;
    for (int s = 0; s < steps; ++s) {
        flow_rhs(model, w.z, w.m, k1, m1);
        for (int i = 0; i < dim; ++i)
            ztmp[i] = w.z[i] + 0.5 * h * k1[i];
        mtmp = w.m + 0.5 * h * m1;
        flow_rhs(model, ztmp, mtmp, k2, m2);
        for (int i = 0; i < dim; ++i)
            ztmp[i] = w.z[i] + 0.5 * h * k2[i];
        mtmp = w.m + 0.5 * h * m2;
        flow_rhs(model, ztmp, mtmp, k3, m3);
        for (int i = 0; i < dim; ++i)
            ztmp[i] = w.z[i] + h * k3[i];
        mtmp = w.m + h * m3;
        flow_rhs(model, ztmp, mtmp, k4, m4);
        for (int i = 0; i < dim; ++i)
            w.z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        w.m += (h / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
    }
    return w;
}

bool all_finite(const std::vector<double>& v)
{
    for (double x : v)
        if (!std::isfinite(x))
            return false;
    return true;
}

} // namespace

FlowResult integrate_flow_and_variations(const ActionPolynomial& poly, const PhaseState& z0,
                                         double t, double dt)
{
    const int f = poly.bath_modes();
    if (static_cast<int>(z0.theta.size()) != f || static_cast<int>(z0.J.size()) != f)
        throw DimensionMismatch("phase state dimensions do not match the polynomial");
    if (dt <= 0.0)
        throw Error("integrate_flow_and_variations: dt must be positive");
    if (t < 0.0)
        throw Error("integrate_flow_and_variations: t must be non-negative");

    const FlowModel model(poly);
    const FlowWorkspace full = rk4_integrate(model, z0, t, dt);
    const FlowWorkspace half = rk4_integrate(model, z0, t, 0.5 * dt);

    if (!all_finite(full.z) || !all_finite(half.z) || !std::isfinite(full.m.max_abs()) ||
        !std::isfinite(half.m.max_abs()))
        throw IntegratorDiverged("flow integration produced non-finite values");

    FlowResult out;
    out.halving_error = (full.m - half.m).max_abs();
    const double scale = std::max(1.0, half.m.max_abs());
    if (out.halving_error > 0.1 * scale)
        throw IntegratorDiverged("step-halving check failed: deviation " +
                                 std::to_string(out.halving_error));

    out.state.q_u = half.z[0];
    out.state.p_u = half.z[1];
    out.state.theta.assign(half.z.begin() + 2, half.z.begin() + 2 + f);
    out.state.J.assign(half.z.begin() + 2 + f, half.z.end());
    out.monodromy = half.m;
    out.steps = std::max(1, static_cast<int>(std::llround(t / (0.5 * dt))));
    return out;
}

GradientCheckReport finite_difference_check(const ActionPolynomial& poly, const ActionPoint& pt,
                                            double h)
{
    if (h <= 0.0)
        throw Error("finite_difference_check: h must be positive");
    const int f = poly.bath_modes();
    GradientCheckReport rep;

    auto rel = [](double fd, double an) {
        return std::abs(fd - an) / std::max(1.0, std::abs(an));
    };

    {
        ActionPoint hi = pt, lo = pt;
        hi.I += h;
        lo.I -= h;
        const double fd = (eval_hamiltonian(poly, hi) - eval_hamiltonian(poly, lo)) / (2.0 * h);
        rep.err_lambda = rel(fd, lyapunov_exponent(poly, pt));
    }
    {
        const std::vector<double> omega = bath_frequencies(poly, pt);
        for (int k = 0; k < f; ++k) {
            ActionPoint hi = pt, lo = pt;
            hi.J[k] += h;
            lo.J[k] -= h;
            const double fd =
                (eval_hamiltonian(poly, hi) - eval_hamiltonian(poly, lo)) / (2.0 * h);
            rep.err_omega = std::max(rep.err_omega, rel(fd, omega[k]));
        }
    }
    {
        const Matrix jac = frequency_jacobian(poly, pt);
        for (int j = 0; j < f; ++j) {
            ActionPoint hi = pt, lo = pt;
            hi.J[j] += h;
            lo.J[j] -= h;
            const std::vector<double> whi = bath_frequencies(poly, hi);
            const std::vector<double> wlo = bath_frequencies(poly, lo);
            for (int k = 0; k < f; ++k) {
                const double fd = (whi[k] - wlo[k]) / (2.0 * h);
                rep.err_jacobian = std::max(rep.err_jacobian, rel(fd, jac(k, j)));
            }
        }
    }
    return rep;
}

namespace detail {

void fft(std::vector<std::complex<double>>& a, bool inverse)
{
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw Error("fft: length must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a)
            x /= static_cast<double>(n);
}

} // namespace detail

double ehrenfest_time(double lambda, double L, double hbar)
{
    if (lambda <= 0.0 || L <= 0.0 || hbar <= 0.0)
        throw Error("ehrenfest_time: arguments must be positive");
    return std::log(L / hbar) / lambda;
}

namespace {

using CVec = std::vector<std::complex<double>>;

struct QuantumGrid {
    int n;
    double L, dq;
    std::vector<double> q, k;

    explicit QuantumGrid(const QuantumGridConfig& cfg)
        : n(cfg.n_points), L(cfg.L), dq(2.0 * cfg.L / cfg.n_points), q(n), k(n)
    {
        for (int i = 0; i < n; ++i)
            q[i] = -L + dq * i;
        const double dk = kPi / L;
        for (int j = 0; j < n; ++j)
            k[j] = dk * (j < n / 2 ? j : j - n);
    }
};

class SplitStepPropagator {
public:
    SplitStepPropagator(const QuantumGrid& grid, const QuantumGridConfig& cfg)
        : grid_(grid), cfg_(cfg)
    {
    }

    /// Advances psi by `duration` (signed) in steps of at most cfg.dt.
    void evolve(CVec& psi, double duration) const
    {
        if (duration == 0.0)
            return;
        const int steps = std::max(1, static_cast<int>(std::llround(std::abs(duration) / cfg_.dt)));
        const double h = duration / steps;
        CVec half_v(grid_.n), full_t(grid_.n);
        for (int i = 0; i < grid_.n; ++i) {
            const double v = -0.5 * cfg_.lambda * cfg_.lambda * grid_.q[i] * grid_.q[i];
            const double ph_v = -0.5 * v * h / cfg_.hbar;
            half_v[i] = {std::cos(ph_v), std::sin(ph_v)};
            const double tkin = 0.5 * cfg_.hbar * cfg_.hbar * grid_.k[i] * grid_.k[i];
            const double ph_t = -tkin * h / cfg_.hbar;
            full_t[i] = {std::cos(ph_t), std::sin(ph_t)};
        }
        for (int s = 0; s < steps; ++s) {
            for (int i = 0; i < grid_.n; ++i)
                psi[i] *= half_v[i];
            detail::fft(psi, false);
            for (int i = 0; i < grid_.n; ++i)
                psi[i] *= full_t[i];
            detail::fft(psi, true);
            for (int i = 0; i < grid_.n; ++i)
                psi[i] *= half_v[i];
        }
    }

    void apply_momentum(CVec& psi) const
    {
        detail::fft(psi, false);
        for (int i = 0; i < grid_.n; ++i)
            psi[i] *= cfg_.hbar * grid_.k[i];
        detail::fft(psi, true);
    }

private:
    const QuantumGrid& grid_;
    const QuantumGridConfig& cfg_;
};

double edge_mass(const QuantumGrid& grid, const CVec& psi, bool momentum_space)
{
    constexpr double edge_frac = 0.02;
    double total = 0.0, edge = 0.0;
    if (!momentum_space) {
        for (int i = 0; i < grid.n; ++i) {
            const double p = std::norm(psi[i]);
            total += p;
            if (std::abs(grid.q[i]) >= (1.0 - edge_frac) * grid.L)
                edge += p;
        }
    } else {
        CVec hat = psi;
        detail::fft(hat, false);
        const double k_max = kPi * grid.n / (2.0 * grid.L);
        for (int i = 0; i < grid.n; ++i) {
            const double p = std::norm(hat[i]);
            total += p;
            if (std::abs(grid.k[i]) >= (1.0 - edge_frac) * k_max)
                edge += p;
        }
    }
    return total > 0.0 ? edge / total : 0.0;
}

} // namespace

std::vector<double> quantum_otoc_inverted_oscillator(const QuantumGridConfig& cfg,
                                                     QuantumLeakReport* report)
{
    if (cfg.n_points < 256 || (cfg.n_points & (cfg.n_points - 1)) != 0)
        throw Error("quantum oracle: n_points must be a power of two >= 256");
    if (cfg.L <= 0.0 || cfg.lambda <= 0.0 || cfg.hbar <= 0.0 || cfg.dt <= 0.0)
        throw Error("quantum oracle: L, lambda, hbar, dt must be positive");
    if (cfg.t_grid.empty())
        throw Error("quantum oracle: empty time grid");
    for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) {
        if (cfg.t_grid[i] < 0.0)
            throw Error("quantum oracle: negative time");
        if (i && cfg.t_grid[i] <= cfg.t_grid[i - 1])
            throw Error("quantum oracle: time grid must be strictly increasing");
    }
    const double t_e = ehrenfest_time(cfg.lambda, cfg.L, cfg.hbar);
    if (cfg.t_grid.back() >= t_e)
        throw Error("quantum oracle: time grid reaches the Ehrenfest time");

    const QuantumGrid grid(cfg);
    const SplitStepPropagator prop(grid, cfg);

    // Minimum-uncertainty packet at the saddle, width matched to the rate.
    CVec psi0(grid.n);
    {
        double nrm = 0.0;
        for (int i = 0; i < grid.n; ++i) {
            const double a = std::exp(-cfg.lambda * grid.q[i] * grid.q[i] / (2.0 * cfg.hbar));
            psi0[i] = a;
            nrm += a * a;
        }
        nrm = std::sqrt(nrm * grid.dq);
        for (auto& x : psi0)
            x /= nrm;
    }

    CVec p_psi0 = psi0;
    prop.apply_momentum(p_psi0);

    std::vector<double> result;
    result.reserve(cfg.t_grid.size());

    CVec fwd_psi = psi0;     // U(t) psi0, marched incrementally
    CVec fwd_ppsi = p_psi0;  // U(t) p psi0
    double t_prev = 0.0;

    for (double t : cfg.t_grid) {
        prop.evolve(fwd_psi, t - t_prev);
        prop.evolve(fwd_ppsi, t - t_prev);
        t_prev = t;

        const double leak_q = edge_mass(grid, fwd_psi, false);
        const double leak_k = edge_mass(grid, fwd_psi, true);
        if (report) {
            report->position_edge_mass.push_back(leak_q);
            report->momentum_edge_mass.push_back(leak_k);
            double nrm = 0.0;
            for (int i = 0; i < grid.n; ++i)
                nrm += std::norm(fwd_psi[i]);
            report->norm_drift = std::max(report->norm_drift,
                                          std::abs(nrm * grid.dq - 1.0));
        }
        if (std::max(leak_q, leak_k) > cfg.leak_tol)
            throw GridTooSmall("wavepacket edge mass " +
                               std::to_string(std::max(leak_q, leak_k)) + " at t = " +
                               std::to_string(t) + " exceeds the allowed leak");

        // A = U^dag(t) q U(t) p psi0
        CVec a = fwd_ppsi;
        for (int i = 0; i < grid.n; ++i)
            a[i] *= grid.q[i];
        prop.evolve(a, -t);

        // B = p U^dag(t) q U(t) psi0
        CVec b = fwd_psi;
        for (int i = 0; i < grid.n; ++i)
            b[i] *= grid.q[i];
        prop.evolve(b, -t);
        prop.apply_momentum(b);

        double c = 0.0;
        for (int i = 0; i < grid.n; ++i)
            c += std::norm(a[i] - b[i]);
        result.push_back(c * grid.dq);
    }
    return result;
}

} // namespace otoc
