#include "fixsynth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "parallel.hpp"

namespace fixsynth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const Point& a, const Point& b) {
    double d = 0.0;
    for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
}

std::vector<Point> cartesian(const std::vector<std::vector<double>>& axes);

std::vector<int> min_wordlengths(const std::vector<VarLayout>& layout) {
    std::vector<int> out;
    out.reserve(layout.size());
    for (const VarLayout& l : layout) out.push_back(std::max(l.iwl, 1));
    return out;
}

}  // namespace

SampleSet SampleSet::build(const Program& p, const std::vector<Point>& points) {
    SampleSet s;
    s.points = points;
    s.refs.reserve(points.size());
    for (const Point& x : points) s.refs.push_back(eval_float(p, x).outputs);
    return s;
}

double point_error(const Program& p, const SynthConfig& cfg, const TypeAssignment& ta, const Point& x,
                   const std::vector<double>& ref) {
    thread_local std::vector<FxValue> scratch;
    thread_local std::vector<double> outs;
    try {
        eval_fixed_outputs(p, x, ta, cfg.rm, cfg.om, scratch, outs);
    } catch (const Error&) {
        return kInf;
    }
    return program_error(cfg.error_fn, ref, outs);
}

bool satisfies_all(const Program& p, const SynthConfig& cfg, const TypeAssignment& ta, const SampleSet& s) {
    for (size_t i = 0; i < s.points.size(); ++i) {
        if (!(point_error(p, cfg, ta, s.points[i], s.refs[i]) <= cfg.max_error)) return false;
    }
    return true;
}

TypeAssignment make_assignment(const std::vector<VarLayout>& layout, const std::vector<int>& wl) {
    std::vector<FxFormat> f;
    f.reserve(layout.size());
    for (size_t i = 0; i < layout.size(); ++i) {
        f.push_back(FxFormat::make(layout[i].is_signed, layout[i].iwl, wl[i] - layout[i].iwl));
    }
    return TypeAssignment(std::move(f));
}

std::vector<int> wordlengths(const TypeAssignment& ta) {
    std::vector<int> wl;
    wl.reserve(ta.size());
    for (const FxFormat& f : ta.formats()) wl.push_back(f.wordlength());
    return wl;
}

DescentResult get_min_cost_wl(const Program& p, const SynthConfig& cfg, const SampleSet& s,
                              const std::vector<VarLayout>& layout) {
    if (s.points.empty()) throw Error(ErrorCode::InvalidArgument, "get_min_cost_wl needs a nonempty sample set");
    const auto model = cfg.make_cost_model();
    const std::vector<int> lo = min_wordlengths(layout);
    const size_t k = layout.size();

    DescentResult res;
    res.wl.assign(k, cfg.wl_max);
    res.cost = program_cost(p, make_assignment(layout, res.wl), *model);
    res.trace.push_back({res.wl, res.cost});

    // Point that most recently rejected a candidate; checked first. Only an
    // ordering hint: validity does not depend on it.
    size_t hot = 0;
    auto valid = [&](const TypeAssignment& ta) {
        if (!(point_error(p, cfg, ta, s.points[hot], s.refs[hot]) <= cfg.max_error)) return false;
        for (size_t i = 0; i < s.points.size(); ++i) {
            if (i == hot) continue;
            if (!(point_error(p, cfg, ta, s.points[i], s.refs[i]) <= cfg.max_error)) {
                hot = i;
                return false;
            }
        }
        return true;
    };

    struct Candidate {
        double cost;
        std::vector<int> wl;
    };
    while (true) {
        std::vector<Candidate> cands;
        for (size_t i = 0; i < k; ++i) {
            for (int d : {-1, +1}) {
                std::vector<int> w = res.wl;
                w[i] += d;
                if (w[i] < lo[i] || w[i] > cfg.wl_max) continue;
                const double c = program_cost(p, make_assignment(layout, w), *model);
                if (!(c < res.cost)) continue;
                cands.push_back({c, std::move(w)});
            }
        }
        // argmin over valid candidates = first valid one in (cost, wl) order
        std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
            if (a.cost != b.cost) return a.cost < b.cost;
            return a.wl < b.wl;
        });
        std::optional<size_t> chosen;
        if (cfg.threads <= 1) {
            for (size_t c = 0; c < cands.size() && !chosen; ++c) {
                if (valid(make_assignment(layout, cands[c].wl))) chosen = c;
            }
        } else {
            const size_t batch = static_cast<size_t>(cfg.threads);
            for (size_t base = 0; base < cands.size() && !chosen; base += batch) {
                const size_t n = std::min(batch, cands.size() - base);
                std::vector<char> ok(n, 0);
                detail::parallel_for(n, cfg.threads, [&](size_t j) {
                    ok[j] = satisfies_all(p, cfg, make_assignment(layout, cands[base + j].wl), s) ? 1 : 0;
                });
                for (size_t j = 0; j < n && !chosen; ++j) {
                    if (ok[j]) chosen = base + j;
                }
            }
        }
        if (!chosen) break;
        res.wl = cands[*chosen].wl;
        res.cost = cands[*chosen].cost;
        res.trace.push_back({res.wl, res.cost});
    }
    return res;
}

InduceResult opt_induce(const Program& p, const SynthConfig& cfg, const std::vector<Point>& samples) {
    if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "opt_induce needs a nonempty sample set");
    InduceResult out;
    out.layout = infer_layout(p, samples, cfg.iwl_rule);
    for (size_t i = 0; i < out.layout.size(); ++i) {
        if (out.layout[i].iwl > cfg.wl_max) {
            out.reason = "iwl " + std::to_string(out.layout[i].iwl) + " of '" + p.var(static_cast<int>(i)).name +
                         "' exceeds wl_max " + std::to_string(cfg.wl_max);
            return out;
        }
    }
    const SampleSet s = SampleSet::build(p, samples);
    const TypeAssignment wide = make_assignment(out.layout, std::vector<int>(p.size(), cfg.wl_max));
    if (!satisfies_all(p, cfg, wide, s)) {
        out.reason = "all-wl_max assignment violates the error bound on the sample set";
        return out;
    }
    out.descent = get_min_cost_wl(p, cfg, s, out.layout);
    TypeAssignment ta = make_assignment(out.layout, out.descent.wl);
    if (!satisfies_all(p, cfg, ta, s)) {
        throw std::logic_error("opt_induce produced an assignment that violates its sample set");
    }
    out.assignment = std::move(ta);
    return out;
}

Counterexamples test_err(const Program& p, const TypeAssignment& ta, const SynthConfig& cfg, Rng& rng) {
    check_total(p, ta);
    const std::vector<Interval> doms = p.domains();
    Box box;
    for (const Interval& d : doms) {
        box.lo.push_back(d.lower_in());
        box.hi.push_back(d.upper_in());
    }
    std::vector<Point> starts;
    starts.reserve(static_cast<size_t>(cfg.max_attempts));
    for (int a = 0; a < cfg.max_attempts; ++a) starts.push_back(sample_domain(doms, rng, 1).front());

    const Objective objective = [&](std::span<const double> x) {
        const FloatTrace ref = eval_float(p, x);  // throws outside the domain or on float faults
        return point_error(p, cfg, ta, Point(x.begin(), x.end()), ref.outputs);
    };
    std::vector<MaximizeResult> runs(starts.size());
    detail::parallel_for(starts.size(), cfg.threads,
                         [&](size_t i) { runs[i] = maximize(objective, box, starts[i], cfg.nm); });

    Counterexamples out;
    bool have_worst = false;
    for (const MaximizeResult& r : runs) {
        if (!have_worst || r.f > out.worst_error) {
            out.worst_error = r.f;
            out.worst_point = r.x;
            have_worst = true;
        }
        if (!(r.f > cfg.max_error)) continue;
        bool inside = true;
        for (size_t i = 0; i < doms.size(); ++i) inside = inside && doms[i].contains(r.x[i]);
        if (!inside) continue;
        bool dup = false;
        for (const Point& q : out.bad) dup = dup || inf_norm(q, r.x) <= cfg.dedup_tol;
        if (dup) continue;
        out.bad.push_back(r.x);
        out.errors.push_back(r.f);
    }
    std::vector<size_t> order(out.bad.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return out.bad[a] < out.bad[b]; });
    Counterexamples sorted;
    sorted.worst_error = out.worst_error;
    sorted.worst_point = out.worst_point;
    for (size_t i : order) {
        sorted.bad.push_back(out.bad[i]);
        sorted.errors.push_back(out.errors[i]);
    }
    return sorted;
}

const char* to_string(SynthStatus s) {
    switch (s) {
        case SynthStatus::Ok: return "ok";
        case SynthStatus::Infeasible: return "infeasible";
        case SynthStatus::IterationCap: return "iteration-cap";
    }
    return "?";
}

namespace {

void merge_points(std::vector<Point>& into, const std::vector<Point>& extra) {
    for (const Point& x : extra) {
        if (std::find(into.begin(), into.end(), x) == into.end()) into.push_back(x);
    }
}

}  // namespace

SynthResult swati(const Program& p, const SynthConfig& cfg) {
    cfg.validate();
    SynthResult res;
    res.seed = cfg.seed;
    const auto model = cfg.make_cost_model();
    Rng rng(cfg.seed);
    std::vector<Point> samples;
    std::vector<Point> bad = sample_domain(p.domains(), rng, cfg.initial_samples);
    for (int it = 1;; ++it) {
        if (it > cfg.max_outer_iters) {
            res.status = SynthStatus::IterationCap;
            res.reason = "outer iteration cap " + std::to_string(cfg.max_outer_iters) + " reached";
            break;
        }
        merge_points(samples, bad);
        res.outer_iterations = it;
        res.total_samples = samples.size();
        InduceResult ind = opt_induce(p, cfg, samples);
        if (!ind.assignment) {
            res.status = SynthStatus::Infeasible;
            res.reason = ind.reason;
            res.assignment.reset();
            break;
        }
        const Counterexamples ce = test_err(p, *ind.assignment, cfg, rng);
        IterationStats st;
        st.iteration = it;
        st.samples = samples.size();
        st.bad = ce.bad.size();
        st.cost = ind.descent.cost;
        st.wl = ind.descent.wl;
        for (const DescentStep& d : ind.descent.trace) st.descent_costs.push_back(d.cost);
        st.worst_error = ce.worst_error;
        res.iterations.push_back(std::move(st));
        res.bad_per_iteration.push_back(ce.bad.size());
        res.assignment = std::move(ind.assignment);
        res.cost = program_cost(p, *res.assignment, *model);
        if (ce.bad.empty()) {
            res.status = SynthStatus::Ok;
            break;
        }
        bad = ce.bad;
    }
    return res;
}

std::string result_to_json(const Program& p, const SynthResult& r) {
    using json = nlohmann::ordered_json;
    json j;
    j["schema"] = 1;
    j["status"] = to_string(r.status);
    j["seed"] = r.seed;
    if (!r.reason.empty()) j["reason"] = r.reason;
    j["cost"] = r.cost;
    j["outer_iterations"] = r.outer_iterations;
    j["total_samples"] = r.total_samples;
    j["bad_per_iteration"] = r.bad_per_iteration;
    if (r.assignment) {
        json a = json::object();
        for (size_t i = 0; i < r.assignment->size(); ++i) {
            a[p.var(static_cast<int>(i)).name] = (*r.assignment)[i].to_string();
        }
        j["assignment"] = a;
    }
    json its = json::array();
    for (const IterationStats& s : r.iterations) {
        json e;
        e["iteration"] = s.iteration;
        e["samples"] = s.samples;
        e["bad"] = s.bad;
        e["cost"] = s.cost;
        e["wl"] = s.wl;
        e["descent_costs"] = s.descent_costs;
        if (std::isfinite(s.worst_error)) {
            e["worst_error"] = s.worst_error;
        } else {
            e["worst_error"] = s.worst_error > 0 ? "inf" : "-inf";
        }
        its.push_back(e);
    }
    j["iterations"] = its;
    return j.dump(2) + "\n";
}

std::vector<Point> make_grid(const std::vector<Interval>& doms, const std::vector<double>& steps) {
    if (steps.size() != doms.size()) throw Error(ErrorCode::DimensionMismatch, "one grid step per input required");
    std::vector<std::vector<double>> axes;
    for (size_t d = 0; d < doms.size(); ++d) {
        if (!(steps[d] > 0)) throw Error(ErrorCode::InvalidArgument, "grid step must be positive");
        const double lo = doms[d].lower_in();
        const double hi = doms[d].upper_in();
        std::vector<double> axis;
        for (size_t k = 0;; ++k) {
            double x = lo + static_cast<double>(k) * steps[d];
            if (x > hi) break;
            if (!doms[d].contains(x)) x = doms[d].clamp(x);
            axis.push_back(x);
        }
        axes.push_back(std::move(axis));
    }
    return cartesian(axes);
}

std::vector<Point> make_grid_counts(const std::vector<Interval>& doms, const std::vector<int>& counts) {
    if (counts.size() != doms.size()) throw Error(ErrorCode::DimensionMismatch, "one grid count per input required");
    std::vector<std::vector<double>> axes;
    for (size_t d = 0; d < doms.size(); ++d) {
        if (counts[d] < 1) throw Error(ErrorCode::InvalidArgument, "grid count must be positive");
        const double lo = doms[d].lower_in();
        const double hi = doms[d].upper_in();
        std::vector<double> axis;
        for (int k = 0; k < counts[d]; ++k) {
            const double t = counts[d] == 1 ? 0.0 : static_cast<double>(k) / (counts[d] - 1);
            axis.push_back(k == counts[d] - 1 && counts[d] > 1 ? hi : doms[d].clamp(lo + t * (hi - lo)));
        }
        axes.push_back(std::move(axis));
    }
    return cartesian(axes);
}

namespace {

std::vector<Point> cartesian(const std::vector<std::vector<double>>& axes) {
    size_t total = 1;
    for (const auto& a : axes) total *= a.size();
    std::vector<Point> out;
    out.reserve(total);
    std::vector<size_t> idx(axes.size(), 0);
    for (size_t n = 0; n < total; ++n) {
        Point pt(axes.size());
        for (size_t d = 0; d < axes.size(); ++d) pt[d] = axes[d][idx[d]];
        out.push_back(std::move(pt));
        for (size_t d = axes.size(); d-- > 0;) {
            if (++idx[d] < axes[d].size()) break;
            idx[d] = 0;
        }
    }
    return out;
}

}  // namespace

std::vector<Point> default_grid(const std::vector<Interval>& doms, double divisor, size_t cap) {
    std::vector<double> steps;
    std::vector<double> counts;
    double total = 1.0;
    for (const Interval& d : doms) {
        const double w = d.upper_in() - d.lower_in();
        steps.push_back(w > 0 ? w / divisor : 1.0);
        counts.push_back(w > 0 ? std::floor(divisor) + 1 : 1.0);
        total *= counts.back();
    }
    if (total > static_cast<double>(cap) && !doms.empty()) {
        const double per_axis = std::floor(std::pow(static_cast<double>(cap), 1.0 / static_cast<double>(doms.size())));
        for (size_t i = 0; i < doms.size(); ++i) {
            const double w = doms[i].upper_in() - doms[i].lower_in();
            if (w > 0 && counts[i] > per_axis) steps[i] = w / std::max(1.0, per_axis - 1.0);
        }
    }
    return make_grid(doms, steps);
}

SweepResult grid_sweep(const Program& p, const TypeAssignment& ta, const SynthConfig& cfg,
                       const std::vector<Point>& grid) {
    check_total(p, ta);
    std::vector<double> errs(grid.size(), 0.0);
    detail::parallel_for(grid.size(), cfg.threads, [&](size_t i) {
        try {
            const FloatTrace ref = eval_float(p, grid[i]);
            errs[i] = point_error(p, cfg, ta, grid[i], ref.outputs);
        } catch (const Error&) {
            errs[i] = 0.0;  // float side undefined: not a fixed-point defect
        }
    });
    SweepResult out;
    out.points = grid.size();
    for (size_t i = 0; i < grid.size(); ++i) {
        if (errs[i] > cfg.max_error) ++out.violations;
        if (out.argmax.empty() || errs[i] > out.max_error) {
            out.max_error = errs[i];
            out.argmax = grid[i];
        }
    }
    return out;
}

namespace {

void check_limits(const Program& p, size_t points, int window, const OracleLimits& lim) {
    double combos = 1.0;
    for (size_t i = 0; i < p.size(); ++i) combos *= window + 1;
    if (static_cast<int>(p.size()) > lim.max_vars || window < 0 || window > lim.max_window ||
        points > lim.max_points || combos > static_cast<double>(lim.max_combinations)) {
        throw Error(ErrorCode::InstanceTooLarge, "brute-force oracle instance too large (" +
                                                     std::to_string(p.size()) + " vars, window " +
                                                     std::to_string(window) + ", " + std::to_string(points) +
                                                     " points)");
    }
}

}  // namespace

std::optional<TypeAssignment> brute_force_optimum(const Program& p, const SynthConfig& cfg, const SampleSet& s,
                                                  const std::vector<VarLayout>& layout, int window,
                                                  const OracleLimits& lim) {
    check_limits(p, s.points.size(), window, lim);
    const auto model = cfg.make_cost_model();
    const std::vector<int> lo = min_wordlengths(layout);
    std::vector<int> hi(lo.size());
    for (size_t i = 0; i < lo.size(); ++i) hi[i] = std::min(lo[i] + window, cfg.wl_max);
    for (size_t i = 0; i < lo.size(); ++i) {
        if (hi[i] < lo[i]) return std::nullopt;
    }
    struct Entry {
        double cost;
        std::vector<int> wl;
    };
    std::vector<Entry> all;
    std::vector<int> w = lo;
    while (true) {
        all.push_back({program_cost(p, make_assignment(layout, w), *model), w});
        size_t d = w.size();
        while (d-- > 0) {
            if (++w[d] <= hi[d]) break;
            w[d] = lo[d];
        }
        if (d == static_cast<size_t>(-1)) break;
    }
    std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        return a.wl < b.wl;
    });
    for (const Entry& e : all) {
        TypeAssignment ta = make_assignment(layout, e.wl);
        if (satisfies_all(p, cfg, ta, s)) return ta;
    }
    return std::nullopt;
}

SynthResult swati_with_oracles(const Program& p, const SynthConfig& cfg, const std::vector<Point>& grid, int window,
                               const OracleLimits& lim) {
    check_limits(p, grid.size(), window, lim);
    const std::vector<VarLayout> layout = infer_layout(p, grid, cfg.iwl_rule);
    const SampleSet full = SampleSet::build(p, grid);
    const auto model = cfg.make_cost_model();
    SynthResult res;
    res.seed = cfg.seed;
    Rng rng(cfg.seed);
    std::vector<Point> samples;
    std::vector<Point> bad;
    for (int k = 0; k < cfg.initial_samples; ++k) {
        bad.push_back(grid[static_cast<size_t>(rng.next() % grid.size())]);
    }
    for (int it = 1;; ++it) {
        if (it > cfg.max_outer_iters) {
            res.status = SynthStatus::IterationCap;
            break;
        }
        merge_points(samples, bad);
        res.outer_iterations = it;
        res.total_samples = samples.size();
        const auto opt = brute_force_optimum(p, cfg, SampleSet::build(p, samples), layout, window, lim);
        if (!opt) {
            res.status = SynthStatus::Infeasible;
            res.assignment.reset();
            res.reason = "no assignment in the window is correct on the sample set";
            break;
        }
        res.assignment = *opt;
        res.cost = program_cost(p, *opt, *model);
        // O_V: the grid point of largest error
        double worst = -1.0;
        size_t arg = 0;
        for (size_t i = 0; i < full.points.size(); ++i) {
            const double e = point_error(p, cfg, *opt, full.points[i], full.refs[i]);
            if (e > worst) {
                worst = e;
                arg = i;
            }
        }
        res.bad_per_iteration.push_back(worst > cfg.max_error ? 1 : 0);
        if (!(worst > cfg.max_error)) {
            res.status = SynthStatus::Ok;
            break;
        }
        bad = {full.points[arg]};
    }
    return res;
}

}  // namespace fixsynth
