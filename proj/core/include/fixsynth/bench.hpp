#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fixsynth/program.hpp"
#include "fixsynth/synth.hpp"

namespace fixsynth {

enum class SimKind { None, Chirp, DcMotor, Wmr };

struct BenchCase {
    std::string name;
    std::string source;
    Program program;
    SynthConfig config;  // error function and threshold for this case
    SimKind sim = SimKind::None;
    // Chirp filters: the input fed by the signal, and delay registers as
    // (state var, var whose value it takes on the next sample).
    std::string signal_input;
    std::vector<std::pair<std::string, std::string>> registers;
};

std::vector<std::string> builtin_names();
BenchCase builtin(std::string_view name);

struct SimTrace {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    size_t clamped_steps = 0;  // closed-loop steps where the fixed controller input was clamped

    size_t column(std::string_view name) const;
    double max_of(std::string_view name, size_t first_row = 0) const;
    std::string to_csv() const;
    void write_csv(const std::string& path) const;
};

inline constexpr int kChirpRate = 256;

// (1 - 2^-15) * sin(pi * (fs/2) * t^2) at t = n/fs, n = 0..fs-1.
std::vector<double> chirp_signal(int fs = kChirpRate);

// Columns: t, x, y_float[, y_fixed, rel_error].
SimTrace run_chirp(const BenchCase& filter, const std::optional<TypeAssignment>& ta,
                   RoundingMode rm = kDefaultRounding, OverflowMode om = kDefaultOverflow);

struct DcMotorParams {
    double a = 1, b = 1, c = 1, d = 0, theta = 1, rho = 1;
    double i_f0 = 1, i_a0 = 1, omega0 = 1;
};

// Columns: t, i_f, i_a, omega, u_float[, fx_i_f, fx_i_a, fx_omega, u_fixed, u_ref, error, cross_error, clamped].
// u_ref is the float controller at the (clamped) state fed to the fixed controller.
SimTrace simulate_dcmotor(const std::optional<TypeAssignment>& ta, double dt = 1e-3, double T = 10.0,
                          RoundingMode rm = kDefaultRounding, OverflowMode om = kDefaultOverflow,
                          const DcMotorParams& prm = {});

struct WmrParams {
    double l = 0.15, ldot = 0.0, vr = 7.5e-3;
    double x_r0 = 0.280, y_r0 = 0.400;
    double path_heading = 1.5707963267948966;  // reference line direction, radians
    double x_w0 = 0.270, y_w0 = 0.390;
    double phi0 = 15.0;
    bool phi0_degrees = true;
};

// Columns: t, x_r, y_r, x_w, y_w, phi, e1, e2, e3, v, omega, distance
//   [, fx_x_w, fx_y_w, fx_phi, fx_v, fx_omega, v_ref, omega_ref, err_v, err_omega, fx_distance, clamped].
SimTrace simulate_wmr(const std::optional<TypeAssignment>& ta_v, const std::optional<TypeAssignment>& ta_omega,
                      double dt = 1e-2, double T = 120.0, RoundingMode rm = kDefaultRounding,
                      OverflowMode om = kDefaultOverflow, const WmrParams& prm = {});

// key = value overrides for the simulators ("dcmotor.*", "wmr.*").
void parse_sim_params(std::string_view text, DcMotorParams& dc, WmrParams& wmr);

}  // namespace fixsynth
