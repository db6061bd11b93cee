#pragma once

// Lang-Kobayashi single-laser model: parameters, derived constants and the
// right-hand side of the field / carrier-density rate equations.

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace lknet {

using Complex = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Physical constants of the rate equations, SI units throughout.
struct LaserParameters {
    double gain_coefficient = 8.40e-13;       // G_N, m^3/s
    double transparency_density = 1.40e24;    // N_0, 1/m^3
    double gain_saturation = 2.0e-23;         // epsilon
    double photon_lifetime = 1.927e-12;       // s
    double carrier_lifetime = 2.04e-9;        // s
    double linewidth_enhancement = 3.0;       // alpha
    double coupling_delay = 5.0e-9;           // tau, s
    double injection_ratio = 2.0;             // J / J_th
    double wavelength = 1.537e-6;             // m
    double base_coupling = 155.3e9;           // kappa, 1/s
    // Overrides the (omega * tau) mod 2pi feedback phase when set.
    std::optional<double> feedback_phase;

    // Throws InvalidParameter on any violated invariant.
    void validate() const;

    friend bool operator==(const LaserParameters&, const LaserParameters&) = default;
};

struct DerivedConstants {
    double angular_frequency;  // omega = 2 pi c / lambda, rad/s
    double threshold_density;  // N_th, 1/m^3
    double threshold_current;  // J_th, 1/(m^3 s)
    double injection_current;  // J, 1/(m^3 s)
    double feedback_phase;     // (omega tau) mod 2pi, in [0, 2pi)
};

DerivedConstants derived_constants(const LaserParameters& params);

/// (omega * tau) mod 2pi evaluated as 2pi * frac(c tau / lambda) in long double.
double reduced_feedback_phase(double wavelength, double delay);

struct LaserState {
    Complex field{};       // E, normalised so that eps |E|^2 is dimensionless
    double carriers = 0.0; // N, 1/m^3

    [[nodiscard]] double intensity() const noexcept { return std::norm(field); }

    friend bool operator==(const LaserState&, const LaserState&) = default;
};

struct LaserDerivative {
    Complex field;
    double carriers;
};

/// Rate-equation right-hand side. `injected` is the already aggregated
/// delayed input sum_l kappa_{l->k} E_l(t - tau) exp(-i omega tau).
[[nodiscard]] inline LaserDerivative field_derivative(const LaserState& s, Complex injected,
                                                      const LaserParameters& p,
                                                      double injection_current) noexcept {
    const double intensity = std::norm(s.field);
    const double gain = p.gain_coefficient * (s.carriers - p.transparency_density) /
                        (1.0 + p.gain_saturation * intensity);
    const double net = 0.5 * (gain - 1.0 / p.photon_lifetime);
    const Complex rot(net, net * p.linewidth_enhancement);
    return {rot * s.field + injected,
            injection_current - s.carriers / p.carrier_lifetime - gain * intensity};
}

/// Free-running (uncoupled) lasing steady state, closed form.
struct SteadyState {
    double intensity;
    double carriers;
};
SteadyState solitary_steady_state(const LaserParameters& params);

}  // namespace lknet
