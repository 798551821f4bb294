#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fixsynth/costmodel.hpp"
#include "fixsynth/errmetrics.hpp"
#include "fixsynth/neldermead.hpp"
#include "fixsynth/program.hpp"

namespace fixsynth {

struct SynthConfig {
    ErrorFn error_fn = ErrorFn::relative();
    double max_error = 0.01;
    int wl_max = 32;
    int initial_samples = 10;
    int max_attempts = 10;
    int max_outer_iters = 50;
    RoundingMode rm = kDefaultRounding;
    OverflowMode om = kDefaultOverflow;
    std::uint64_t seed = 0;
    bool seed_set = false;  // true once a config file or caller pinned the seed
    std::string cost_model = "constantinides";
    TableCostModel cost_table;  // used when cost_model == "table"
    IwlRule iwl_rule = IwlRule::Log2;
    SimplexConfig nm;
    double dedup_tol = 1e-9;
    int threads = 1;

    void validate() const;
    std::shared_ptr<const CostModel> make_cost_model() const;
};

// key = value lines, '#' comments. Keys not listed in the README are rejected.
SynthConfig parse_config(std::string_view text, SynthConfig base = {});
SynthConfig load_config(const std::string& path, SynthConfig base = {});
// Canonical text form with every key materialized.
std::string config_to_text(const SynthConfig& cfg);

// Points with cached float reference outputs.
struct SampleSet {
    std::vector<Point> points;
    std::vector<std::vector<double>> refs;

    static SampleSet build(const Program& p, const std::vector<Point>& points);
};

// Program error at one point; fixed-side evaluation failures score +inf.
double point_error(const Program& p, const SynthConfig& cfg, const TypeAssignment& ta, const Point& x,
                   const std::vector<double>& ref);

bool satisfies_all(const Program& p, const SynthConfig& cfg, const TypeAssignment& ta, const SampleSet& s);

TypeAssignment make_assignment(const std::vector<VarLayout>& layout, const std::vector<int>& wl);
std::vector<int> wordlengths(const TypeAssignment& ta);

struct DescentStep {
    std::vector<int> wl;
    double cost = 0.0;
};

struct DescentResult {
    std::vector<int> wl;
    double cost = 0.0;
    std::vector<DescentStep> trace;  // starts with the all-WLmax point
};

DescentResult get_min_cost_wl(const Program& p, const SynthConfig& cfg, const SampleSet& s,
                              const std::vector<VarLayout>& layout);

struct InduceResult {
    std::optional<TypeAssignment> assignment;
    std::vector<VarLayout> layout;
    DescentResult descent;
    std::string reason;  // set when infeasible
};

InduceResult opt_induce(const Program& p, const SynthConfig& cfg, const std::vector<Point>& samples);

struct Counterexamples {
    std::vector<Point> bad;
    std::vector<double> errors;
    double worst_error = 0.0;
    Point worst_point;
};

Counterexamples test_err(const Program& p, const TypeAssignment& ta, const SynthConfig& cfg, Rng& rng);

enum class SynthStatus { Ok, Infeasible, IterationCap };

const char* to_string(SynthStatus s);

struct IterationStats {
    int iteration = 0;
    size_t samples = 0;
    size_t bad = 0;
    double cost = 0.0;
    std::vector<int> wl;
    std::vector<double> descent_costs;
    double worst_error = 0.0;
};

struct SynthResult {
    SynthStatus status = SynthStatus::Infeasible;
    std::optional<TypeAssignment> assignment;  // Ok, or best-so-far on IterationCap
    double cost = 0.0;
    int outer_iterations = 0;
    size_t total_samples = 0;
    std::vector<size_t> bad_per_iteration;
    std::vector<IterationStats> iterations;
    std::uint64_t seed = 0;
    std::string reason;
};

SynthResult swati(const Program& p, const SynthConfig& cfg);

std::string result_to_json(const Program& p, const SynthResult& r);

// Grids over input domains.
std::vector<Point> make_grid(const std::vector<Interval>& doms, const std::vector<double>& steps);
// `counts[d]` evenly spaced points per axis between lower_in() and upper_in().
std::vector<Point> make_grid_counts(const std::vector<Interval>& doms, const std::vector<int>& counts);
// Per-axis step = width / divisor, then capped at `cap` total points by coarsening every axis.
std::vector<Point> default_grid(const std::vector<Interval>& doms, double divisor = 19000.0,
                                size_t cap = 1000000);

struct SweepResult {
    size_t points = 0;
    size_t violations = 0;
    double max_error = 0.0;
    Point argmax;
};

SweepResult grid_sweep(const Program& p, const TypeAssignment& ta, const SynthConfig& cfg,
                       const std::vector<Point>& grid);

// Exhaustive oracles for tiny instances.
struct OracleLimits {
    int max_vars = 4;
    int max_window = 8;
    size_t max_points = 10000;
    size_t max_combinations = 100000;
};

// Cheapest WL vector with WL(i) in [max(iwl,1), max(iwl,1) + window] correct on all points.
std::optional<TypeAssignment> brute_force_optimum(const Program& p, const SynthConfig& cfg,
                                                  const SampleSet& s, const std::vector<VarLayout>& layout,
                                                  int window, const OracleLimits& lim = {});

// swati with both heuristics replaced by exhaustive search over `grid`.
SynthResult swati_with_oracles(const Program& p, const SynthConfig& cfg, const std::vector<Point>& grid,
                               int window, const OracleLimits& lim = {});

}  // namespace fixsynth
