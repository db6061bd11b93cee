#include "lknet/laser.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace lknet {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%g", v);
        throw InvalidParameter(std::string(name) + " must be positive, got " + buf);
    }
}

}  // namespace

void LaserParameters::validate() const {
    require_positive(gain_coefficient, "gain_coefficient");
    require_positive(photon_lifetime, "photon_lifetime");
    require_positive(carrier_lifetime, "carrier_lifetime");
    require_positive(coupling_delay, "coupling_delay");
    require_positive(wavelength, "wavelength");
    require_positive(injection_ratio, "injection_ratio");
    if (!(transparency_density >= 0.0)) throw InvalidParameter("transparency_density must be >= 0");
    if (!(gain_saturation >= 0.0)) throw InvalidParameter("gain_saturation must be >= 0");
    if (!(base_coupling >= 0.0)) throw InvalidParameter("base_coupling must be >= 0");
    if (!std::isfinite(linewidth_enhancement)) throw InvalidParameter("linewidth_enhancement must be finite");
    if (feedback_phase && !std::isfinite(*feedback_phase)) throw InvalidParameter("feedback_phase must be finite");
}

double reduced_feedback_phase(double wavelength, double delay) {
    // omega tau / 2pi = c tau / lambda (~1e6 cycles); only the fraction matters.
    const long double cycles = static_cast<long double>(kSpeedOfLight) * delay / wavelength;
    const long double frac = cycles - std::floor(cycles);
    return static_cast<double>(2.0L * std::numbers::pi_v<long double> * frac);
}

DerivedConstants derived_constants(const LaserParameters& p) {
    p.validate();
    DerivedConstants d{};
    d.angular_frequency = 2.0 * std::numbers::pi * kSpeedOfLight / p.wavelength;
    d.threshold_density = p.transparency_density + 1.0 / (p.gain_coefficient * p.photon_lifetime);
    d.threshold_current = d.threshold_density / p.carrier_lifetime;
    d.injection_current = p.injection_ratio * d.threshold_current;
    if (p.feedback_phase) {
        const double two_pi = 2.0 * std::numbers::pi;
        d.feedback_phase = std::fmod(std::fmod(*p.feedback_phase, two_pi) + two_pi, two_pi);
    } else {
        d.feedback_phase = reduced_feedback_phase(p.wavelength, p.coupling_delay);
    }
    return d;
}

SteadyState solitary_steady_state(const LaserParameters& p) {
    const auto d = derived_constants(p);
    // Gain clamped at 1/tau_p: N = N_th + eps S / (G_N tau_p); carrier balance is then linear in S.
    const double excess = d.injection_current - d.threshold_current;
    if (excess <= 0.0) return {0.0, d.injection_current * p.carrier_lifetime};
    const double slope = 1.0 / p.photon_lifetime +
                         p.gain_saturation / (p.gain_coefficient * p.photon_lifetime * p.carrier_lifetime);
    const double s = excess / slope;
    return {s, d.threshold_density + p.gain_saturation * s / (p.gain_coefficient * p.photon_lifetime)};
}

}  // namespace lknet
