#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "molstore/codec.hpp"
#include "molstore/config.hpp"
#include "molstore/errors.hpp"

namespace molstore {

enum class TranslocationDirection { five_to_three, three_to_five };

// Pore geometry and per-base blockade/dwell calibration.
//
// A and C residuals and dwells come from homopolymer translocation
// measurements; G and T have no measured counterpart, so their defaults are
// interpolated between the A and C values and flagged as such.
struct PoreModel {
    double channel_length_nm = 10.0;
    double base_pitch_nm = 0.34;
    double open_current_pa = 120.0;
    double applied_bias_mv = 120.0; // informational

    // Residual current at full channel occupancy, indexed by Base.
    std::array<double, 4> residual_pa{20.0, 40.0, 20.0 + 20.0 / 3.0, 20.0 + 40.0 / 3.0};
    // Per-base dwell by translocation direction; only A is direction-dependent.
    std::array<double, 4> dwell_fwd_us{3.3, 1.5, 2.1, 2.7}; // 5'->3'
    std::array<double, 4> dwell_rev_us{5.4, 1.5, 2.1, 2.7}; // 3'->5'
    // Which bases carry measured calibration (as opposed to interpolated defaults).
    std::array<bool, 4> calibrated{true, true, false, false};

    double residual(Base b) const { return residual_pa[static_cast<std::size_t>(b)]; }
    double dwell_us(Base b, TranslocationDirection dir) const {
        const auto i = static_cast<std::size_t>(b);
        return dir == TranslocationDirection::five_to_three ? dwell_fwd_us[i] : dwell_rev_us[i];
    }

    void validate() const;
    static PoreModel from_config(const KeyValueConfig& cfg);
};

// Number of bases simultaneously inside the channel: round(length/pitch).
std::size_t channel_window(const PoreModel& pore);

struct AcquisitionParams {
    double sample_interval_us = 5.0;
    double filter_bandwidth_khz = 20.0;          // 0 disables filtering
    double bilayer_area_um2 = 1256.6370614359173; // 40 um diameter aperture
    double noise_coefficient_pa_per_um2 = 2e-3;
    std::uint64_t rng_seed = 1;

    double sample_rate_hz() const { return 1e6 / sample_interval_us; }
    double noise_sigma_pa() const { return noise_coefficient_pa_per_um2 * bilayer_area_um2; }

    void validate() const;
    static AcquisitionParams from_config(const KeyValueConfig& cfg);
};

// True when the bandwidth is one of the three stock amplifier settings.
bool standard_bandwidth(double bandwidth_khz);

// Ground-truth interval attached to a synthesized trace.
struct EventAnnotation {
    double start_s = 0.0;
    double end_s = 0.0;
    std::uint64_t sequence_id = 0;
    TranslocationDirection direction = TranslocationDirection::five_to_three;
};

// Uniformly sampled ionic-current waveform.
struct CurrentTrace {
    std::vector<double> samples_pa;
    double sample_interval_us = 5.0;
    std::vector<EventAnnotation> annotations;

    std::size_t size() const { return samples_pa.size(); }
    double time_at_s(std::size_t i) const { return static_cast<double>(i) * sample_interval_us * 1e-6; }
    double duration_s() const { return static_cast<double>(samples_pa.size()) * sample_interval_us * 1e-6; }
};

// Piecewise-constant blockade current as a function of time since the strand
// entered the channel. Segment k covers the dwell of the k-th entering base;
// its current is the mean residual of the <=window bases then in the channel.
struct BlockadeProfile {
    std::vector<double> segment_end_us;     // cumulative end time per segment
    std::vector<double> segment_current_pa; // current during each segment
    double open_current_pa = 0.0;

    double total_duration_us() const {
        return segment_end_us.empty() ? 0.0 : segment_end_us.back();
    }
    // Open current outside [0, total_duration).
    double current_at_us(double t_us) const;
};

BlockadeProfile ideal_blockade_profile(const BaseSequence& seq, const PoreModel& pore,
                                       TranslocationDirection dir);

struct ScheduledEvent {
    BaseSequence seq;
    double start_s = 0.0;
    std::optional<TranslocationDirection> direction; // drawn 50/50 when unset
    std::uint64_t sequence_id = 0;
};

// Samples the ideal profiles of all events onto a uniform grid, adds
// zero-mean Gaussian noise with sigma = noise_coefficient * bilayer_area and
// applies the Bessel low-pass when a bandwidth is configured. Deterministic
// for a given rng_seed; per-event direction draws use independent substreams
// keyed by event index. duration_s defaults to last event end plus a lead-out
// equal to the first event's lead-in.
CurrentTrace synthesize_trace(const std::vector<ScheduledEvent>& events,
                              const PoreModel& pore, const AcquisitionParams& acq,
                              std::optional<double> duration_s = std::nullopt);

enum class Resolvability { resolvable, unresolvable };

// Segments shorter than the channel window cannot be told apart.
Resolvability resolvability(std::size_t segment_length, const PoreModel& pore);

} // namespace molstore
