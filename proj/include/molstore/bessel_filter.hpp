#pragma once

#include <cstddef>
#include <vector>

#include "molstore/nanopore.hpp"

namespace molstore {

// Causal 4-pole low-pass Bessel filter, -3 dB at the configured cutoff,
// unity DC gain. Two biquad sections obtained from the magnitude-normalized
// analog prototype via the bilinear transform with prewarping, so the -3 dB
// point lands exactly on the cutoff frequency.
class BesselLowpass4 {
public:
    BesselLowpass4(double cutoff_hz, double sample_rate_hz);

    // Initializes the internal state to the steady-state response for a
    // constant input x0, so a constant trace passes through unchanged.
    void reset(double x0 = 0.0);

    double step(double x);

    std::vector<double> apply(const std::vector<double>& samples) const;

private:
    struct Biquad {
        double b0, b1, b2; // numerator
        double a1, a2;     // denominator (a0 = 1)
        double s1 = 0.0, s2 = 0.0;

        double step(double x) {
            const double y = b0 * x + s1;
            s1 = b1 * x - a1 * y + s2;
            s2 = b2 * x - a2 * y;
            return y;
        }
        void reset_steady_state(double x0) {
            s2 = (b2 - a2) * x0;
            s1 = (b1 - a1) * x0 + s2;
        }
    };

    Biquad sections_[2];
};

// Filters a trace in place semantics-wise (returns a copy with filtered
// samples; annotations and sampling are preserved). Throws ConfigError when
// the bandwidth is not positive or reaches the Nyquist frequency.
CurrentTrace bessel_lowpass(const CurrentTrace& trace, double bandwidth_khz);

} // namespace molstore
