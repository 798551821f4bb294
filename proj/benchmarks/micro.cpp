#include <benchmark/benchmark.h>

#include "fixsynth/bench.hpp"
#include "fixsynth/costmodel.hpp"
#include "fixsynth/synth.hpp"

using namespace fixsynth;

namespace {

TypeAssignment circle_wl12(const Program& p) {
    std::vector<FxFormat> f(p.size());
    f[p.index_of("radius")] = FxFormat::make(false, 1, 11);
    f[p.index_of("mypi")] = FxFormat::make(false, 2, 10);
    f[p.index_of("t")] = FxFormat::make(false, 2, 10);
    f[p.index_of("area")] = FxFormat::make(false, 4, 8);
    return TypeAssignment(f);
}

TypeAssignment wide(const Program& p, int fwl) {
    std::vector<FxFormat> f;
    for (const auto& l : infer_layout(p, sample_domain(p.domains(), 1, 1000), IwlRule::Log2PlusOne))
        f.push_back(FxFormat::make(l.is_signed, l.iwl, fwl));
    return TypeAssignment(f);
}

}  // namespace

static void BM_Quantize(benchmark::State& st) {
    const FxFormat f = FxFormat::make(true, 4, static_cast<int>(st.range(0)));
    double x = 0.123456789;
    for (auto _ : st) {
        benchmark::DoNotOptimize(quantize(x, f));
        x += 1e-7;
    }
}
BENCHMARK(BM_Quantize)->Arg(8)->Arg(24)->Arg(56);

static void BM_Binop(benchmark::State& st) {
    const auto op = static_cast<BinaryOp>(st.range(0));
    const FxFormat f = FxFormat::make(true, 6, 20);
    const FxValue a = quantize(3.25, f), b = quantize(-1.7, f);
    for (auto _ : st) benchmark::DoNotOptimize(fx_binop(op, a, b, f));
}
BENCHMARK(BM_Binop)->DenseRange(0, 3);

static void BM_EvalFixed(benchmark::State& st) {
    const BenchCase bc = builtin(builtin_names()[static_cast<size_t>(st.range(0))]);
    const TypeAssignment ta = wide(bc.program, 20);
    const auto pts = sample_domain(bc.program.domains(), 2, 256);
    std::vector<FxValue> scratch;
    std::vector<double> out;
    size_t i = 0;
    for (auto _ : st) {
        eval_fixed_outputs(bc.program, pts[i++ % pts.size()], ta, kDefaultRounding, kDefaultOverflow, scratch, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetLabel(bc.name);
}
BENCHMARK(BM_EvalFixed)->DenseRange(0, 5);

static void BM_ProgramCost(benchmark::State& st) {
    const Program p = builtin("circle").program;
    const TypeAssignment ta = circle_wl12(p);
    const ConstantinidesModel m;
    for (auto _ : st) benchmark::DoNotOptimize(program_cost(p, ta, m));
}
BENCHMARK(BM_ProgramCost);

static void BM_TestErrCircle(benchmark::State& st) {
    const BenchCase bc = builtin("circle");
    SynthConfig cfg = bc.config;
    cfg.max_attempts = static_cast<int>(st.range(0));
    const TypeAssignment ta = circle_wl12(bc.program);
    for (auto _ : st) {
        Rng rng(7);
        benchmark::DoNotOptimize(test_err(bc.program, ta, cfg, rng));
    }
}
BENCHMARK(BM_TestErrCircle)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_SwatiCircle(benchmark::State& st) {
    const BenchCase bc = builtin("circle");
    SynthConfig cfg = bc.config;
    cfg.seed = 7;
    cfg.max_attempts = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(swati(bc.program, cfg));
}
BENCHMARK(BM_SwatiCircle)->Arg(10)->Arg(300)->Unit(benchmark::kMillisecond);

static void BM_GridSweepCircle(benchmark::State& st) {
    const BenchCase bc = builtin("circle");
    const TypeAssignment ta = circle_wl12(bc.program);
    const auto grid = make_grid(bc.program.domains(), {1e-4});
    for (auto _ : st) benchmark::DoNotOptimize(grid_sweep(bc.program, ta, bc.config, grid));
}
BENCHMARK(BM_GridSweepCircle)->Unit(benchmark::kMillisecond);

static void BM_SimulateDcMotor(benchmark::State& st) {
    const TypeAssignment ta = wide(builtin("dcmotor_u").program, 16);
    for (auto _ : st) benchmark::DoNotOptimize(simulate_dcmotor(ta));
}
BENCHMARK(BM_SimulateDcMotor)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
