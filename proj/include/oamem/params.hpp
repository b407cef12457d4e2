#pragma once

// Physical parameter bundles and the small closed forms derived from them.
// All rates and detunings are angular frequencies in rad/s; temperatures in
// kelvin; velocities in m/s.

#include <cmath>
#include <optional>
#include <stdexcept>

namespace oamem {

inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double k_boltzmann = 1.380649e-23;   // J/K
inline constexpr double pi = 3.141592653589793238462643383279;
inline constexpr double two_pi = 2.0 * pi;

struct WaveguideParams {
    double gamma = 0.0;     // optical amplitude decay rate
    double Gamma = 0.0;     // acoustic amplitude decay rate
    double v_o = 0.0;       // optical group velocity
    double v_ac = 0.0;      // acoustic group velocity
    double Omega_ac = 0.0;  // acoustic resonance frequency
};

inline void check_params(const WaveguideParams& p) {
    if (!(p.gamma > 0.0)) throw std::domain_error("gamma must be positive");
    if (!(p.Gamma > 0.0)) throw std::domain_error("Gamma must be positive");
    if (!(p.v_o > 0.0)) throw std::domain_error("v_o must be positive");
    if (!(p.v_ac > 0.0)) throw std::domain_error("v_ac must be positive");
    if (!(p.Omega_ac > 0.0)) throw std::domain_error("Omega_ac must be positive");
    if (!(p.v_ac < p.v_o)) throw std::domain_error("acoustic velocity must be below optical");
}

struct Environment {
    double T_en = 0.0;  // kelvin
};

inline void check_environment(const Environment& e) {
    if (!(e.T_en > 0.0)) throw std::domain_error("temperature must be positive");
}

struct StageCoupling {
    double g1 = 0.0;  // write-stage coupling rate
    double g2 = 0.0;  // readout-stage coupling rate
};

inline void check_coupling(const StageCoupling& c) {
    if (c.g1 < 0.0 || c.g2 < 0.0) throw std::domain_error("coupling rates must be non-negative");
}

// Wavevector mismatch plus optional per-mode detuning overrides. When an
// override is absent the detuning follows from k and the group velocity.
struct ModeSelector {
    double k = 0.0;           // selected wavevector offset, 1/m
    double gamma_smf = 0.0;   // idler decay in the retention fibre
    std::optional<double> Delta_id;
    std::optional<double> Delta_sg;
    std::optional<double> Delta_re;
    std::optional<double> Delta_ac;
};

struct Detunings {
    double Delta_as = 0.0;  // optical branch, k * v_o
    double Delta_ac = 0.0;  // acoustic branch, k * v_ac
};

inline Detunings detunings_for_k(double k, const WaveguideParams& p) {
    return {k * p.v_o, k * p.v_ac};
}

inline double thermal_occupation(double Omega_ac, double T_en) {
    if (!(Omega_ac > 0.0)) throw std::domain_error("Omega_ac must be positive");
    if (!(T_en > 0.0)) throw std::domain_error("temperature must be positive");
    double x = hbar * Omega_ac / (k_boltzmann * T_en);
    if (x > 700.0) return 0.0;
    return 1.0 / std::expm1(x);
}

inline double heating_rate(double Gamma, double n_th) {
    if (!(Gamma > 0.0)) throw std::domain_error("Gamma must be positive");
    if (n_th < 0.0) throw std::domain_error("thermal occupation must be non-negative");
    return Gamma * n_th;
}

// Duration of a resonant pi/2 transfer pulse.
inline double optimal_pulse_duration(double g) {
    if (!(g > 0.0)) throw std::domain_error("coupling rate must be positive");
    return pi / (2.0 * g);
}

}  // namespace oamem
