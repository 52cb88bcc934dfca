#include <benchmark/benchmark.h>

#include <numbers>

#include "otoc/bath_amplitude.hpp"
#include "otoc/io.hpp"
#include "otoc/oracle.hpp"
#include "otoc/reaction_trace.hpp"
#include "otoc/resonance.hpp"
#include "otoc/trace.hpp"

namespace {

using namespace otoc;

void bm_eval_hamiltonian(benchmark::State& state)
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    const ActionPoint pt{0.3, {1.2, 0.7}};
    for (auto _ : state)
        benchmark::DoNotOptimize(eval_hamiltonian(poly, pt));
}
BENCHMARK(bm_eval_hamiltonian);

void bm_frequency_jacobian(benchmark::State& state)
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    const ActionPoint pt{0.0, {1.2, 0.7}};
    for (auto _ : state)
        benchmark::DoNotOptimize(frequency_jacobian(poly, pt));
}
BENCHMARK(bm_frequency_jacobian);

void bm_solve_fixed_time(benchmark::State& state)
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    const WindingVector m{{1, 1}};
    const double t = 2.0 * std::numbers::pi / (1.8225 + 0.1);
    const SolverConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_resonance_fixed_time_all(poly, m, t, cfg));
}
BENCHMARK(bm_solve_fixed_time);

void bm_make_contribution(benchmark::State& state)
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    const WindingVector m{{1, 1}};
    const double t = 2.0 * std::numbers::pi / (1.8225 + 0.1);
    const auto torus = solve_resonance_fixed_time(poly, m, t, SolverConfig{});
    for (auto _ : state)
        benchmark::DoNotOptimize(make_contribution(*torus, poly, 0.05));
}
BENCHMARK(bm_make_contribution);

void bm_reaction_trace_quadrature(benchmark::State& state)
{
    ReactionTraceConfig cfg;
    cfg.hbar = 0.05;
    cfg.apodize = true;
    cfg.quadrature_points = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(reaction_trace_quadrature(0.7350, 5.0, cfg));
}
BENCHMARK(bm_reaction_trace_quadrature)->Arg(2001)->Arg(20001);

void bm_assemble_trace_point(benchmark::State& state)
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    TraceConfig cfg;
    cfg.E = -0.5;
    cfg.hbar = 0.05;
    cfg.m_max = static_cast<int>(state.range(0));
    cfg.t_grid = {4.0};
    const SolverConfig solver;
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_trace(poly, cfg, solver));
}
BENCHMARK(bm_assemble_trace_point)->Arg(3)->Arg(5)->Arg(8);

void bm_monodromy_integration(benchmark::State& state)
{
    const ActionPolynomial poly = eckart_morse_polynomial();
    const PhaseState z0{0.0, 0.0, {0.4, 1.0}, {0.8, 1.4}};
    const double t = static_cast<double>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(integrate_flow_and_variations(poly, z0, t, 1e-3));
}
BENCHMARK(bm_monodromy_integration)->Arg(1)->Arg(6);

} // namespace

BENCHMARK_MAIN();
