#include "fixsynth/bench.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fixsynth {

namespace {

constexpr double kPi = 3.14159265358979323846;

constexpr const char* kCircle = R"(# area of a circle
input radius in [0.1, 2.0);
const mypi = 3.14159265358979323846;
t = radius * radius;
area = mypi * t;
output area;
)";

constexpr const char* kIir1 = R"(# first-order direct form II section, one delay element
input x in (-2, 2);
state w1 in [-4, 4];
const a1 = -0.5;
const b0 = 0.9;
const b1 = 0.9;
fb = a1 * w1;
w = x - fb;
ff0 = b0 * w;
ff1 = b1 * w1;
y = ff0 + ff1;
output y;
)";

constexpr const char* kFir4 = R"(# order-4 FIR, x1..x4 form the delay line
input x0 in (-2, 2);
state x1 in (-2, 2);
state x2 in (-2, 2);
state x3 in (-2, 2);
state x4 in (-2, 2);
const h0 = 0.0346;
const h1 = 0.2405;
const h2 = 0.4499;
const h3 = 0.2405;
const h4 = 0.0346;
p0 = h0 * x0;
p1 = h1 * x1;
p2 = h2 * x2;
p3 = h3 * x3;
p4 = h4 * x4;
s1 = p0 + p1;
s2 = s1 + p2;
s3 = s2 + p3;
y = s3 + p4;
output y;
)";

constexpr const char* kDcMotor = R"(# feedback-linearising DC motor speed controller
input i_f in [0, 1.5];
input i_a in [0, 1.5];
input omega in [0, 1.5];
const a = 1;
const b = 1;
const c = 1;
const theta = 1;
const rho = 1;
const eps = 0.01;
t1 = theta * i_a;
t2 = eps + t1;
t3 = recip(t2);
t31 = a + b;
t32 = i_f * i_a;
t33 = t31 * t32;
t4 = theta * t33;
t41 = rho * i_f;
t5 = theta * t41;
t6 = i_f * i_f;
t61 = t6 * omega;
t62 = t61 * theta;
t7 = c * t62;
t8 = t4 + t5;
t9 = t8 - t7;
u = t3 * t9;
output u;
)";

// Shared prefix of the two WMR control laws (reference angular velocity is 0).
constexpr const char* kWmrOmegaBody = R"(input e1 in [-0.02, 0.02];
input e2 in [-0.02, 0.02];
input e3 in [-1.5707963267948966, 1.5707963267948966];
const k1 = 4.2;
const k2 = 5000;
const k3 = 1;
const l = 0.15;
const vr = 0.0075;
m1 = k2 * e2;
m2 = m1 * vr;
s3 = sin(e3);
m3 = k3 * s3;
w = m2 + m3;
)";

constexpr const char* kWmrVTail = R"(n1 = l * w;
c3 = cos(e3);
n2 = vr * c3;
n3 = k1 * e1;
n4 = n1 + n2;
v = n4 + n3;
output v;
)";

BenchCase make_case(const std::string& name, std::string source, ErrorFn fn, double max_error, SimKind sim) {
    BenchCase b;
    b.name = name;
    b.source = std::move(source);
    b.program = parse_program(b.source);
    b.config.error_fn = fn;
    b.config.max_error = max_error;
    b.sim = sim;
    return b;
}

std::string format_cell(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_double(v);
}

}  // namespace

std::vector<std::string> builtin_names() {
    return {"circle", "iir1", "fir4", "dcmotor_u", "wmr_v", "wmr_omega"};
}

BenchCase builtin(std::string_view name) {
    if (name == "circle") return make_case("circle", kCircle, ErrorFn::relative(), 0.01, SimKind::None);
    if (name == "iir1") {
        BenchCase b = make_case("iir1", kIir1, ErrorFn::relative(), 0.1, SimKind::Chirp);
        b.signal_input = "x";
        b.registers = {{"w1", "w"}};
        return b;
    }
    if (name == "fir4") {
        BenchCase b = make_case("fir4", kFir4, ErrorFn::relative(), 0.1, SimKind::Chirp);
        b.signal_input = "x0";
        b.registers = {{"x4", "x3"}, {"x3", "x2"}, {"x2", "x1"}, {"x1", "x0"}};
        return b;
    }
    if (name == "dcmotor_u") return make_case("dcmotor_u", kDcMotor, ErrorFn::absolute(), 0.1, SimKind::DcMotor);
    if (name == "wmr_omega") {
        return make_case("wmr_omega", std::string("# WMR angular velocity law\n") + kWmrOmegaBody + "output w;\n",
                         ErrorFn::moderated(0.001), 0.1, SimKind::Wmr);
    }
    if (name == "wmr_v") {
        return make_case("wmr_v", std::string("# WMR linear velocity law\n") + kWmrOmegaBody + kWmrVTail,
                         ErrorFn::relative(), 0.1, SimKind::Wmr);
    }
    throw Error(ErrorCode::UnknownBench, "unknown benchmark '" + std::string(name) + "'");
}

size_t SimTrace::column(std::string_view name) const {
    for (size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw Error(ErrorCode::InvalidArgument, "trace has no column '" + std::string(name) + "'");
}

double SimTrace::max_of(std::string_view name, size_t first_row) const {
    const size_t c = column(name);
    double m = -std::numeric_limits<double>::infinity();
    for (size_t r = first_row; r < rows.size(); ++r) m = std::max(m, rows[r][c]);
    return m;
}

std::string SimTrace::to_csv() const {
    std::ostringstream os;
    for (size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
        os << "\n";
    }
    return os.str();
}

void SimTrace::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
    out << to_csv();
}

std::vector<double> chirp_signal(int fs) {
    std::vector<double> x(static_cast<size_t>(fs));
    const double amp = 1.0 - std::ldexp(1.0, -15);
    for (int n = 0; n < fs; ++n) {
        const double t = static_cast<double>(n) / fs;
        x[static_cast<size_t>(n)] = amp * std::sin(kPi * (fs / 2.0) * t * t);
    }
    return x;
}

SimTrace run_chirp(const BenchCase& filter, const std::optional<TypeAssignment>& ta, RoundingMode rm,
                   OverflowMode om) {
    if (filter.sim != SimKind::Chirp) {
        throw Error(ErrorCode::InvalidArgument, "'" + filter.name + "' is not a chirp-driven filter");
    }
    const Program& p = filter.program;
    if (ta) check_total(p, *ta);
    const std::vector<double> x = chirp_signal();
    // position of each program input within the point vector
    auto slot = [&](const std::string& var) {
        const int idx = p.index_of(var);
        for (size_t k = 0; k < p.inputs().size(); ++k) {
            if (p.inputs()[k] == idx) return k;
        }
        throw Error(ErrorCode::InvalidArgument, "'" + var + "' is not an input");
    };
    const size_t sig = slot(filter.signal_input);
    std::vector<std::pair<size_t, int>> regs;  // (input slot, source var index)
    for (const auto& [state, src] : filter.registers) regs.emplace_back(slot(state), p.index_of(src));

    std::vector<double> fl_state(p.dimension(), 0.0);
    std::vector<FxValue> fx_state;
    if (ta) {
        for (int idx : p.inputs()) fx_state.push_back(quantize(0.0, (*ta)[static_cast<size_t>(idx)], rm, om));
    }
    SimTrace tr;
    tr.columns = {"t", "x", "y_float"};
    if (ta) tr.columns.insert(tr.columns.end(), {"y_fixed", "rel_error"});
    const int out_idx = p.outputs().front();
    for (size_t n = 0; n < x.size(); ++n) {
        fl_state[sig] = x[n];
        const FloatTrace ft = eval_float(p, fl_state, false);
        std::vector<double> row = {static_cast<double>(n) / kChirpRate, x[n], ft.values[static_cast<size_t>(out_idx)]};
        std::vector<double> next_fl = fl_state;
        for (const auto& [s, src] : regs) next_fl[s] = ft.values[static_cast<size_t>(src)];
        fl_state = std::move(next_fl);
        if (ta) {
            fx_state[sig] = quantize(x[n], (*ta)[static_cast<size_t>(p.inputs()[sig])], rm, om);
            const FixedTrace xt = eval_fixed(p, fx_state, *ta, rm, om);
            const double yf = xt.values[static_cast<size_t>(out_idx)].to_real();
            row.push_back(yf);
            row.push_back(eval_error_total(ErrorFn::relative(), row[2], yf));
            std::vector<FxValue> next_fx = fx_state;
            for (const auto& [s, src] : regs) {
                next_fx[s] = convert(xt.values[static_cast<size_t>(src)],
                                     (*ta)[static_cast<size_t>(p.inputs()[s])], rm, om);
            }
            fx_state = std::move(next_fx);
        }
        tr.rows.push_back(std::move(row));
    }
    return tr;
}

namespace {

size_t steps_for(double dt, double T) {
    if (!(dt > 0) || !(T >= dt)) throw Error(ErrorCode::InvalidArgument, "need dt > 0 and T >= dt");
    return static_cast<size_t>(std::llround(T / dt));
}

void check_finite(const std::vector<double>& v, size_t step) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw Error(ErrorCode::SimulationDiverged, "simulation diverged at step " + std::to_string(step));
        }
    }
}

}  // namespace

SimTrace simulate_dcmotor(const std::optional<TypeAssignment>& ta, double dt, double T, RoundingMode rm,
                          OverflowMode om, const DcMotorParams& k) {
    const size_t steps = steps_for(dt, T);
    const BenchCase bc = builtin("dcmotor_u");
    const Program& p = bc.program;
    if (ta) check_total(p, *ta);
    const std::vector<Interval> doms = p.domains();

    auto deriv = [&](const std::vector<double>& s, double u) {
        return std::vector<double>{-k.a * s[0] + u, -k.b * s[1] + k.rho - k.c * s[0] * s[2],
                                   k.theta * s[0] * s[1] - k.d * s[2]};
    };
    std::vector<double> fl = {k.i_f0, k.i_a0, k.omega0};
    std::vector<double> fx = fl;

    SimTrace tr;
    tr.columns = {"t", "i_f", "i_a", "omega", "u_float"};
    if (ta) {
        tr.columns.insert(tr.columns.end(), {"fx_i_f", "fx_i_a", "fx_omega", "u_fixed", "u_ref", "error",
                                             "cross_error", "clamped"});
    }
    for (size_t n = 0; n <= steps; ++n) {
        check_finite(fl, n);
        const double u_fl = eval_float(p, fl, false).outputs[0];
        std::vector<double> row = {static_cast<double>(n) * dt, fl[0], fl[1], fl[2], u_fl};
        double u_fx = 0.0;
        if (ta) {
            check_finite(fx, n);
            std::vector<double> in = fx;
            bool clamped = false;
            for (size_t i = 0; i < in.size(); ++i) {
                const double c = doms[i].clamp(in[i]);
                clamped = clamped || c != in[i];
                in[i] = c;
            }
            if (clamped) ++tr.clamped_steps;
            u_fx = eval_fixed(p, in, *ta, rm, om).outputs[0];
            const double u_ref = eval_float(p, in).outputs[0];
            row.insert(row.end(), {fx[0], fx[1], fx[2], u_fx, u_ref, std::fabs(u_fx - u_ref),
                                   std::fabs(u_fx - u_fl), clamped ? 1.0 : 0.0});
        }
        tr.rows.push_back(std::move(row));
        if (n == steps) break;
        const auto dfl = deriv(fl, u_fl);
        for (size_t i = 0; i < 3; ++i) fl[i] += dt * dfl[i];
        if (ta) {
            const auto dfx = deriv(fx, u_fx);
            for (size_t i = 0; i < 3; ++i) fx[i] += dt * dfx[i];
        }
    }
    return tr;
}

namespace {

struct WmrState {
    double x = 0, y = 0, phi = 0;
};

std::vector<double> tracking_error(const WmrState& s, double xr, double yr, double phir) {
    const double dx = xr - s.x;
    const double dy = yr - s.y;
    return {std::cos(s.phi) * dx + std::sin(s.phi) * dy, -std::sin(s.phi) * dx + std::cos(s.phi) * dy,
            phir - s.phi};
}

void wmr_step(WmrState& s, double v, double w, double dt, const WmrParams& k) {
    const double lin = v - k.l * w;
    const double dx = lin * std::cos(s.phi) - k.ldot * std::sin(s.phi);
    const double dy = lin * std::sin(s.phi) + k.ldot * std::cos(s.phi);
    s.x += dt * dx;
    s.y += dt * dy;
    s.phi += dt * w;
}

}  // namespace

SimTrace simulate_wmr(const std::optional<TypeAssignment>& ta_v, const std::optional<TypeAssignment>& ta_omega,
                      double dt, double T, RoundingMode rm, OverflowMode om, const WmrParams& k) {
    const size_t steps = steps_for(dt, T);
    const BenchCase bv = builtin("wmr_v");
    const BenchCase bw = builtin("wmr_omega");
    if (ta_v) check_total(bv.program, *ta_v);
    if (ta_omega) check_total(bw.program, *ta_omega);
    const bool fixed = ta_v.has_value() || ta_omega.has_value();
    const std::vector<Interval> doms = bv.program.domains();

    const double phi0 = k.phi0_degrees ? k.phi0 * kPi / 180.0 : k.phi0;
    WmrState fl{k.x_w0, k.y_w0, phi0};
    WmrState fx = fl;

    SimTrace tr;
    tr.columns = {"t", "x_r", "y_r", "x_w", "y_w", "phi", "e1", "e2", "e3", "v", "omega", "distance"};
    if (fixed) {
        tr.columns.insert(tr.columns.end(), {"fx_x_w", "fx_y_w", "fx_phi", "fx_v", "fx_omega", "v_ref", "omega_ref",
                                             "err_v", "err_omega", "fx_distance", "clamped"});
    }
    for (size_t n = 0; n <= steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        const double xr = k.x_r0 + k.vr * std::cos(k.path_heading) * t;
        const double yr = k.y_r0 + k.vr * std::sin(k.path_heading) * t;
        check_finite({fl.x, fl.y, fl.phi}, n);
        const std::vector<double> e = tracking_error(fl, xr, yr, k.path_heading);
        const double v = eval_float(bv.program, e, false).outputs[0];
        const double w = eval_float(bw.program, e, false).outputs[0];
        std::vector<double> row = {t, xr, yr, fl.x, fl.y, fl.phi, e[0], e[1], e[2], v, w,
                                   std::hypot(xr - fl.x, yr - fl.y)};
        double v_fx = v;
        double w_fx = w;
        if (fixed) {
            check_finite({fx.x, fx.y, fx.phi}, n);
            std::vector<double> in = tracking_error(fx, xr, yr, k.path_heading);
            bool clamped = false;
            for (size_t i = 0; i < in.size(); ++i) {
                const double c = doms[i].clamp(in[i]);
                clamped = clamped || c != in[i];
                in[i] = c;
            }
            if (clamped) ++tr.clamped_steps;
            const double v_ref = eval_float(bv.program, in).outputs[0];
            const double w_ref = eval_float(bw.program, in).outputs[0];
            v_fx = ta_v ? eval_fixed(bv.program, in, *ta_v, rm, om).outputs[0] : v_ref;
            w_fx = ta_omega ? eval_fixed(bw.program, in, *ta_omega, rm, om).outputs[0] : w_ref;
            row.insert(row.end(), {fx.x, fx.y, fx.phi, v_fx, w_fx, v_ref, w_ref,
                                   eval_error_total(bv.config.error_fn, v_ref, v_fx),
                                   eval_error_total(bw.config.error_fn, w_ref, w_fx),
                                   std::hypot(xr - fx.x, yr - fx.y), clamped ? 1.0 : 0.0});
        }
        tr.rows.push_back(std::move(row));
        if (n == steps) break;
        wmr_step(fl, v, w, dt, k);
        if (fixed) wmr_step(fx, v_fx, w_fx, dt, k);
    }
    return tr;
}

void parse_sim_params(std::string_view text, DcMotorParams& dc, WmrParams& wmr) {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        if (trim(line).empty()) continue;
        if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "expected key = value: '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "wmr.phi0_units") {
            if (val != "deg" && val != "rad") throw Error(ErrorCode::ConfigError, "wmr.phi0_units must be deg or rad");
            wmr.phi0_degrees = val == "deg";
            continue;
        }
        double num = 0;
        auto res = std::from_chars(val.data(), val.data() + val.size(), num);
        if (res.ec != std::errc() || res.ptr != val.data() + val.size()) {
            throw Error(ErrorCode::ConfigError, "bad value for '" + key + "'");
        }
        double* target = nullptr;
        if (key == "dcmotor.a") target = &dc.a;
        else if (key == "dcmotor.b") target = &dc.b;
        else if (key == "dcmotor.c") target = &dc.c;
        else if (key == "dcmotor.d") target = &dc.d;
        else if (key == "dcmotor.theta") target = &dc.theta;
        else if (key == "dcmotor.rho") target = &dc.rho;
        else if (key == "dcmotor.i_f0") target = &dc.i_f0;
        else if (key == "dcmotor.i_a0") target = &dc.i_a0;
        else if (key == "dcmotor.omega0") target = &dc.omega0;
        else if (key == "wmr.l") target = &wmr.l;
        else if (key == "wmr.ldot") target = &wmr.ldot;
        else if (key == "wmr.vr") target = &wmr.vr;
        else if (key == "wmr.x_r0") target = &wmr.x_r0;
        else if (key == "wmr.y_r0") target = &wmr.y_r0;
        else if (key == "wmr.path_heading") target = &wmr.path_heading;
        else if (key == "wmr.x_w0") target = &wmr.x_w0;
        else if (key == "wmr.y_w0") target = &wmr.y_w0;
        else if (key == "wmr.phi0") target = &wmr.phi0;
        else throw Error(ErrorCode::ConfigError, "unknown simulation key '" + key + "'");
        *target = num;
    }
}

}  // namespace fixsynth
