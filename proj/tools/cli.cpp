#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fixsynth/bench.hpp"
#include "fixsynth/costmodel.hpp"
#include "fixsynth/error.hpp"
#include "fixsynth/synth.hpp"

#ifndef FIXSYNTH_VERSION
#define FIXSYNTH_VERSION "0.0.0"
#endif

namespace fixsynth::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// Explicit --grid steps above this many points are refused.
constexpr size_t kMaxExplicitGrid = 10000000;

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
    f << text;
    if (!f) throw Error(ErrorCode::InvalidArgument, "write failed for '" + path + "'");
}

struct Manifest {
    ordered_json j;

    Manifest(const std::string& command, const std::vector<std::string>& args) {
        j["schema"] = 1;
        j["tool"] = "fixsynth";
        j["version"] = FIXSYNTH_VERSION;
        j["command"] = command;
        j["argv"] = args;
        j["started_at"] = utc_now();
    }

    void write(const std::string& path) {
        j["finished_at"] = utc_now();
        write_file(path, j.dump(2) + "\n");
    }
};

std::string manifest_path(const std::string& explicit_path, const std::string& out) {
    if (!explicit_path.empty()) return explicit_path;
    if (!out.empty()) return out + ".manifest.json";
    return {};
}

// --config, else a .cfg next to the program, else defaults.
SynthConfig resolve_config(const std::string& prog_path, const std::string& cfg_path, std::string& used,
                           std::ostream& err) {
    if (!cfg_path.empty()) {
        used = cfg_path;
        return load_config(cfg_path);
    }
    fs::path sib = fs::path(prog_path).replace_extension(".cfg");
    if (fs::exists(sib)) {
        used = sib.string();
        err << "using config " << used << "\n";
        return load_config(used);
    }
    used.clear();
    return SynthConfig{};
}

// --seed, then the config's seed, then FIXSYNTH_SEED, then 0.
void resolve_seed(SynthConfig& cfg, const std::optional<std::uint64_t>& flag) {
    if (flag) {
        cfg.seed = *flag;
        cfg.seed_set = true;
        return;
    }
    if (cfg.seed_set) return;
    if (const char* env = std::getenv("FIXSYNTH_SEED"); env && *env) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*end != '\0') throw Error(ErrorCode::ConfigError, "FIXSYNTH_SEED is not an unsigned integer");
        cfg.seed = v;
    } else {
        cfg.seed = 0;
    }
    cfg.seed_set = true;
}

std::vector<Point> build_grid(const Program& p, const std::string& spec) {
    const auto doms = p.domains();
    if (spec == "auto") return default_grid(doms);
    double step = 0;
    try {
        size_t pos = 0;
        step = std::stod(spec, &pos);
        if (pos != spec.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "--grid expects a positive step or 'auto'");
    }
    if (!(step > 0) || !std::isfinite(step)) throw Error(ErrorCode::InvalidArgument, "--grid step must be > 0");
    double total = 1;
    for (const auto& d : doms) total *= std::floor((d.upper_in() - d.lower_in()) / step) + 1;
    if (total > static_cast<double>(kMaxExplicitGrid)) {
        throw Error(ErrorCode::InvalidArgument, "grid of " + format_double(total) + " points is too large");
    }
    return make_grid(doms, std::vector<double>(doms.size(), step));
}

std::string point_to_string(const Program& p, const Point& x) {
    std::string s = "(";
    for (size_t i = 0; i < x.size(); ++i) {
        if (i) s += ", ";
        s += p.var(p.inputs()[i]).name + "=" + format_double(x[i]);
    }
    return s + ")";
}

std::string fmt_cost(double c) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", c);
    return buf;
}

struct Common {
    std::string prog;
    std::string config;
    std::string types;
    std::string out;
    std::string manifest;
    std::optional<std::uint64_t> seed;
};

int run_synth(const Common& c, const std::string& report, const std::vector<std::string>& args, std::ostream& out,
              std::ostream& err) {
    Manifest man("synth", args);
    const Program p = load_program(c.prog);
    std::string cfg_used;
    SynthConfig cfg = resolve_config(c.prog, c.config, cfg_used, err);
    resolve_seed(cfg, c.seed);
    cfg.validate();

    const SynthResult r = swati(p, cfg);
    err << "status " << to_string(r.status) << ", " << r.outer_iterations << " iteration(s), " << r.total_samples
        << " samples";
    if (r.assignment) err << ", cost " << fmt_cost(r.cost);
    err << "\n";
    if (!r.reason.empty()) err << r.reason << "\n";

    if (r.assignment) {
        const std::string types = types_to_json(p, *r.assignment);
        if (c.out.empty()) out << types;
        else write_file(c.out, types);
    }
    if (!report.empty()) write_file(report, result_to_json(p, r));

    if (const std::string mp = manifest_path(c.manifest, c.out); !mp.empty()) {
        man.j["program"] = c.prog;
        man.j["config_file"] = cfg_used;
        man.j["seed"] = cfg.seed;
        man.j["config"] = config_to_text(cfg);
        man.j["status"] = to_string(r.status);
        man.j["outputs"] = ordered_json::array();
        if (!c.out.empty() && r.assignment) man.j["outputs"].push_back(c.out);
        if (!report.empty()) man.j["outputs"].push_back(report);
        man.write(mp);
    }
    switch (r.status) {
        case SynthStatus::Ok: return kExitOk;
        case SynthStatus::Infeasible: return kExitInfeasible;
        case SynthStatus::IterationCap: return kExitIterationCap;
    }
    return kExitUsage;
}

int run_check(const Common& c, const std::string& grid, const std::vector<std::string>& args, std::ostream& out,
              std::ostream& err) {
    Manifest man("check", args);
    const Program p = load_program(c.prog);
    const TypeAssignment ta = load_types(p, c.types);
    std::string cfg_used;
    SynthConfig cfg = resolve_config(c.prog, c.config, cfg_used, err);
    resolve_seed(cfg, c.seed);
    cfg.validate();

    Rng rng(cfg.seed);
    const Counterexamples ce = test_err(p, ta, cfg, rng);
    bool violated = !ce.bad.empty();
    double worst = ce.worst_error;
    Point worst_pt = ce.worst_point;
    out << "search: " << ce.bad.size() << " bad point(s) from " << cfg.max_attempts << " restart(s), worst error "
        << format_double(ce.worst_error) << "\n";

    if (!grid.empty()) {
        const auto pts = build_grid(p, grid);
        const SweepResult sw = grid_sweep(p, ta, cfg, pts);
        out << "grid: " << sw.violations << " violation(s) in " << sw.points << " point(s), max error "
            << format_double(sw.max_error) << "\n";
        violated = violated || sw.violations > 0;
        if (sw.max_error > worst || worst_pt.empty()) {
            worst = sw.max_error;
            worst_pt = sw.argmax;
        }
    }
    if (!worst_pt.empty()) {
        out << "worst point " << point_to_string(p, worst_pt) << " error " << format_double(worst) << "\n";
    }
    out << (violated ? "VIOLATION" : "CLEAN") << " (max_error " << format_double(cfg.max_error) << ", "
        << cfg.error_fn.to_string() << ")\n";

    if (!c.manifest.empty()) {
        man.j["program"] = c.prog;
        man.j["types"] = c.types;
        man.j["config_file"] = cfg_used;
        man.j["seed"] = cfg.seed;
        man.j["config"] = config_to_text(cfg);
        man.j["grid"] = grid;
        man.j["violated"] = violated;
        man.write(c.manifest);
    }
    return violated ? kExitViolation : kExitOk;
}

int run_sweep(const Common& c, const std::string& grid, const std::vector<std::string>& args, std::ostream& out,
              std::ostream& err) {
    Manifest man("sweep", args);
    const Program p = load_program(c.prog);
    const TypeAssignment ta = load_types(p, c.types);
    std::string cfg_used;
    SynthConfig cfg = resolve_config(c.prog, c.config, cfg_used, err);
    cfg.validate();
    const auto pts = build_grid(p, grid);

    const size_t nv = p.size();
    std::ostringstream csv;
    for (int i : p.inputs()) csv << p.var(i).name << ",";
    for (size_t v = 0; v < nv; ++v) csv << p.var(static_cast<int>(v)).name << "_float," << p.var(static_cast<int>(v)).name << "_fixed,";
    for (size_t k = 0; k < p.outputs().size(); ++k) {
        csv << (k ? "," : "") << p.var(p.outputs()[k]).name << "_error";
    }
    csv << "\n";
    auto cell = [](double v) {
        if (std::isnan(v)) return std::string("nan");
        if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
        return format_double(v);
    };
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    size_t violations = 0;
    for (const Point& x : pts) {
        std::vector<double> fl(nv, nan);
        std::vector<double> fx(nv, nan);
        std::vector<double> errs(p.outputs().size(), nan);
        bool float_ok = false;
        try {
            fl = eval_float(p, x).values;
            float_ok = true;
            const FixedTrace ft = eval_fixed(p, x, ta, cfg.rm, cfg.om);
            for (size_t v = 0; v < nv; ++v) fx[v] = ft.values[v].to_real();
            for (size_t k = 0; k < errs.size(); ++k) {
                const auto o = static_cast<size_t>(p.outputs()[k]);
                errs[k] = eval_error_total(cfg.error_fn, fl[o], fx[o]);
            }
        } catch (const Error&) {
            // a fixed-side failure is a violation; a float-side one has no reference
            if (float_ok) errs.assign(errs.size(), inf);
        }
        for (double e : errs) {
            if (e > cfg.max_error) {
                ++violations;
                break;
            }
        }
        for (double v : x) csv << cell(v) << ",";
        for (size_t v = 0; v < nv; ++v) csv << cell(fl[v]) << "," << cell(fx[v]) << ",";
        for (size_t k = 0; k < errs.size(); ++k) csv << (k ? "," : "") << cell(errs[k]);
        csv << "\n";
    }
    if (c.out.empty()) out << csv.str();
    else write_file(c.out, csv.str());
    err << pts.size() << " point(s), " << violations << " above max_error " << format_double(cfg.max_error) << "\n";

    if (const std::string mp = manifest_path(c.manifest, c.out); !mp.empty()) {
        man.j["program"] = c.prog;
        man.j["types"] = c.types;
        man.j["config_file"] = cfg_used;
        man.j["config"] = config_to_text(cfg);
        man.j["grid"] = grid;
        man.j["points"] = pts.size();
        man.j["outputs"] = ordered_json::array({c.out});
        man.write(mp);
    }
    return kExitOk;
}

int run_cost(const Common& c, std::ostream& out, std::ostream& err) {
    const Program p = load_program(c.prog);
    const TypeAssignment ta = load_types(p, c.types);
    SynthConfig cfg;
    if (!c.config.empty()) {
        std::string used;
        cfg = resolve_config(c.prog, c.config, used, err);
    }
    out << fmt_cost(program_cost(p, ta, *cfg.make_cost_model())) << "\n";
    return kExitOk;
}

struct SimOptions {
    std::string bench;
    std::string types_v;
    std::string types_omega;
    std::string params;
    double dt = 0;
    double horizon = 0;
};

int run_simulate(const Common& c, const SimOptions& so, const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
    Manifest man("simulate", args);
    const BenchCase bc = builtin(so.bench);
    SynthConfig cfg;
    std::string cfg_used;
    if (!c.config.empty()) {
        cfg = load_config(c.config);
        cfg_used = c.config;
    }
    DcMotorParams dc;
    WmrParams wmr;
    if (!so.params.empty()) {
        std::ifstream f(so.params);
        if (!f) throw Error(ErrorCode::ConfigError, "cannot open params file '" + so.params + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        parse_sim_params(ss.str(), dc, wmr);
    }
    auto load_for = [](const std::string& bench, const std::string& path) -> std::optional<TypeAssignment> {
        if (path.empty()) return std::nullopt;
        return load_types(builtin(bench).program, path);
    };

    SimTrace tr;
    switch (bc.sim) {
        case SimKind::None:
            throw Error(ErrorCode::InvalidArgument, "benchmark '" + so.bench + "' has no simulator");
        case SimKind::Chirp:
            tr = run_chirp(bc, load_for(bc.name, c.types), cfg.rm, cfg.om);
            break;
        case SimKind::DcMotor:
            tr = simulate_dcmotor(load_for(bc.name, c.types), so.dt > 0 ? so.dt : 1e-3,
                                  so.horizon > 0 ? so.horizon : 10.0, cfg.rm, cfg.om, dc);
            err << tr.clamped_steps << " step(s) with the fixed controller input clamped to its domain\n";
            break;
        case SimKind::Wmr: {
            std::string tv = so.types_v;
            std::string tw = so.types_omega;
            if (!c.types.empty()) (bc.name == "wmr_v" ? tv : tw) = c.types;
            tr = simulate_wmr(load_for("wmr_v", tv), load_for("wmr_omega", tw), so.dt > 0 ? so.dt : 1e-2,
                              so.horizon > 0 ? so.horizon : 120.0, cfg.rm, cfg.om, wmr);
            err << tr.clamped_steps << " step(s) with the fixed controller input clamped to its domain\n";
            break;
        }
    }
    if (c.out.empty()) out << tr.to_csv();
    else tr.write_csv(c.out);
    err << tr.rows.size() << " row(s)\n";

    if (const std::string mp = manifest_path(c.manifest, c.out); !mp.empty()) {
        man.j["bench"] = so.bench;
        man.j["types"] = c.types;
        man.j["types_v"] = so.types_v;
        man.j["types_omega"] = so.types_omega;
        man.j["config_file"] = cfg_used;
        man.j["config"] = config_to_text(cfg);
        man.j["params_file"] = so.params;
        man.j["outputs"] = ordered_json::array({c.out});
        man.write(mp);
    }
    return kExitOk;
}

const char* sim_name(SimKind k) {
    switch (k) {
        case SimKind::None: return "none";
        case SimKind::Chirp: return "chirp";
        case SimKind::DcMotor: return "dcmotor";
        case SimKind::Wmr: return "wmr";
    }
    return "?";
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"fixed-point type synthesis for numeric programs", "fixsynth"};
    app.set_version_flag("--version", FIXSYNTH_VERSION);
    app.require_subcommand(1);

    Common c;
    std::string report;
    std::string grid;
    SimOptions so;
    std::uint64_t seed_val = 0;

    auto add_seed = [&](CLI::App* s) {
        s->add_option("--seed", seed_val, "RNG seed (overrides config and FIXSYNTH_SEED)");
    };

    auto* synth = app.add_subcommand("synth", "synthesize fixed-point types");
    synth->add_option("program", c.prog, "program file (.fxp)")->required();
    synth->add_option("--config", c.config, "config file (default: sibling .cfg if present)");
    add_seed(synth);
    synth->add_option("--out", c.out, "types.json output (default: stdout)");
    synth->add_option("--report", report, "full result JSON with per-iteration statistics");
    synth->add_option("--manifest", c.manifest, "run manifest path (default: <out>.manifest.json)");

    auto* check = app.add_subcommand("check", "search for accuracy violations");
    check->add_option("program", c.prog, "program file (.fxp)")->required();
    check->add_option("--types", c.types, "types.json")->required();
    check->add_option("--config", c.config, "config file (default: sibling .cfg if present)");
    add_seed(check);
    check->add_option("--grid", grid, "also sweep a grid with this per-axis step, or 'auto'");
    check->add_option("--manifest", c.manifest, "run manifest path");

    auto* sweep = app.add_subcommand("sweep", "dump the error over a dense grid as CSV");
    sweep->add_option("program", c.prog, "program file (.fxp)")->required();
    sweep->add_option("--types", c.types, "types.json")->required();
    sweep->add_option("--grid", grid, "per-axis step, or 'auto'")->required();
    sweep->add_option("--config", c.config, "config file (default: sibling .cfg if present)");
    sweep->add_option("--out", c.out, "CSV output (default: stdout)");
    sweep->add_option("--manifest", c.manifest, "run manifest path (default: <out>.manifest.json)");

    auto* cost = app.add_subcommand("cost", "print the hardware cost of a type assignment");
    cost->add_option("program", c.prog, "program file (.fxp)")->required();
    cost->add_option("--types", c.types, "types.json")->required();
    cost->add_option("--config", c.config, "config file selecting the cost model");

    auto* sim = app.add_subcommand("simulate", "run a benchmark simulator");
    sim->add_option("bench", so.bench, "benchmark name")->required();
    sim->add_option("--types", c.types, "types.json for the named benchmark");
    sim->add_option("--types-v", so.types_v, "types.json for wmr_v");
    sim->add_option("--types-omega", so.types_omega, "types.json for wmr_omega");
    sim->add_option("--config", c.config, "config file (rounding and overflow modes)");
    sim->add_option("--params", so.params, "simulator parameter overrides (dcmotor.*, wmr.*)");
    sim->add_option("--dt", so.dt, "time step");
    sim->add_option("--horizon", so.horizon, "simulated time");
    sim->add_option("--out", c.out, "CSV output (default: stdout)");
    sim->add_option("--manifest", c.manifest, "run manifest path (default: <out>.manifest.json)");

    auto* bench = app.add_subcommand("bench", "built-in benchmarks");
    bench->require_subcommand(1);
    auto* blist = bench->add_subcommand("list", "list built-in benchmarks");
    std::string show_name;
    auto* bshow = bench->add_subcommand("show", "print a benchmark's program source");
    bshow->add_option("name", show_name, "benchmark name")->required();

    std::vector<char*> argv;
    std::vector<std::string> copy = args.empty() ? std::vector<std::string>{"fixsynth"} : args;
    for (auto& a : copy) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    for (auto* s : {synth, check}) {
        if (s->parsed() && s->count("--seed")) c.seed = seed_val;
    }

    try {
        if (synth->parsed()) return run_synth(c, report, args, out, err);
        if (check->parsed()) return run_check(c, grid, args, out, err);
        if (sweep->parsed()) return run_sweep(c, grid, args, out, err);
        if (cost->parsed()) return run_cost(c, out, err);
        if (sim->parsed()) return run_simulate(c, so, args, out, err);
        if (blist->parsed()) {
            for (const auto& n : builtin_names()) {
                const BenchCase b = builtin(n);
                out << n << "\t" << b.config.error_fn.to_string() << "\t" << format_double(b.config.max_error) << "\t"
                    << sim_name(b.sim) << "\n";
            }
            return kExitOk;
        }
        if (bshow->parsed()) {
            out << builtin(show_name).source;
            return kExitOk;
        }
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

int dispatch(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace fixsynth::cli
