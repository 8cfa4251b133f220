#include "molstore/bessel_filter.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "molstore/errors.hpp"

namespace molstore {

namespace {

// Conjugate pole pairs of the 4th-order Bessel analog prototype, normalized
// to -3 dB at w = 1 rad/s. Stored as the s^2 + a*s + b denominator
// coefficients of each unity-gain second-order section.
struct PrototypeSection {
    double a;
    double b;
};

constexpr PrototypeSection kPrototype[2] = {
    {1.9904175287005439, 2.5707553248094528},
    {2.7401356611028844, 2.0453906910156383},
};

} // namespace

BesselLowpass4::BesselLowpass4(double cutoff_hz, double sample_rate_hz) {
    if (cutoff_hz <= 0) throw ConfigError("filter cutoff must be positive");
    if (sample_rate_hz <= 0) throw ConfigError("sample rate must be positive");
    if (cutoff_hz >= sample_rate_hz / 2.0) {
        throw ConfigError("filter cutoff " + std::to_string(cutoff_hz) +
                          " Hz reaches the Nyquist frequency of a " +
                          std::to_string(sample_rate_hz) + " Hz sampling rate");
    }
    // Bilinear transform with prewarping: the normalized analog frequency
    // variable maps to c*(1 - z^-1)/(1 + z^-1) with c = 1/tan(pi*fc/fs),
    // which pins the analog w = 1 response (-3 dB) exactly at fc.
    const double c = 1.0 / std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
    for (int i = 0; i < 2; ++i) {
        const double a = kPrototype[i].a;
        const double b = kPrototype[i].b;
        const double d0 = c * c + a * c + b;
        Biquad& s = sections_[i];
        s.b0 = b / d0;
        s.b1 = 2.0 * b / d0;
        s.b2 = b / d0;
        s.a1 = (2.0 * b - 2.0 * c * c) / d0;
        s.a2 = (c * c - a * c + b) / d0;
        s.s1 = s.s2 = 0.0;
    }
}

void BesselLowpass4::reset(double x0) {
    sections_[0].reset_steady_state(x0);
    sections_[1].reset_steady_state(x0);
}

double BesselLowpass4::step(double x) {
    return sections_[1].step(sections_[0].step(x));
}

std::vector<double> BesselLowpass4::apply(const std::vector<double>& samples) const {
    BesselLowpass4 f(*this);
    if (!samples.empty()) f.reset(samples.front());
    std::vector<double> out;
    out.reserve(samples.size());
    for (double x : samples) out.push_back(f.step(x));
    return out;
}

CurrentTrace bessel_lowpass(const CurrentTrace& trace, double bandwidth_khz) {
    if (bandwidth_khz <= 0) throw ConfigError("filter bandwidth must be positive");
    const double fs = 1e6 / trace.sample_interval_us;
    BesselLowpass4 filter(bandwidth_khz * 1e3, fs);
    CurrentTrace out = trace;
    out.samples_pa = filter.apply(trace.samples_pa);
    return out;
}

} // namespace molstore
