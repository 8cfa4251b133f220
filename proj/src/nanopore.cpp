#include "molstore/nanopore.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "molstore/bessel_filter.hpp"

namespace molstore {

void PoreModel::validate() const {
    if (channel_length_nm <= 0 || base_pitch_nm <= 0) {
        throw ConfigError("channel length and base pitch must be positive");
    }
    if (open_current_pa <= 0) throw ConfigError("open current must be positive");
    for (Base b : all_bases) {
        const auto i = static_cast<std::size_t>(b);
        if (residual_pa[i] <= 0 || residual_pa[i] >= open_current_pa) {
            throw ConfigError(std::string("residual current for base ") + base_to_char(b) +
                              " must lie strictly between 0 and the open current");
        }
        if (dwell_fwd_us[i] <= 0 || dwell_rev_us[i] <= 0) {
            throw ConfigError(std::string("dwell time for base ") + base_to_char(b) +
                              " must be positive");
        }
    }
}

PoreModel PoreModel::from_config(const KeyValueConfig& cfg) {
    PoreModel pore;
    pore.channel_length_nm = cfg.get_double("channel_length_nm", pore.channel_length_nm);
    pore.base_pitch_nm = cfg.get_double("base_pitch_nm", pore.base_pitch_nm);
    pore.open_current_pa = cfg.get_double("open_current_pa", pore.open_current_pa);
    pore.applied_bias_mv = cfg.get_double("applied_bias_mv", pore.applied_bias_mv);

    const char* residual_keys[4] = {"residual_a_pa", "residual_c_pa", "residual_g_pa",
                                    "residual_t_pa"};
    for (std::size_t i = 0; i < 4; ++i) {
        if (cfg.has(residual_keys[i])) {
            pore.residual_pa[i] = cfg.get_double(residual_keys[i]);
            pore.calibrated[i] = true;
        }
    }
    pore.dwell_fwd_us[0] = cfg.get_double("dwell_a_fwd_us", pore.dwell_fwd_us[0]);
    pore.dwell_rev_us[0] = cfg.get_double("dwell_a_rev_us", pore.dwell_rev_us[0]);
    const char* dwell_keys[3] = {"dwell_c_us", "dwell_g_us", "dwell_t_us"};
    for (std::size_t i = 0; i < 3; ++i) {
        if (cfg.has(dwell_keys[i])) {
            const double v = cfg.get_double(dwell_keys[i]);
            pore.dwell_fwd_us[i + 1] = v;
            pore.dwell_rev_us[i + 1] = v;
            pore.calibrated[i + 1] = true;
        }
    }
    pore.validate();
    return pore;
}

std::size_t channel_window(const PoreModel& pore) {
    pore.validate();
    const auto window = std::llround(pore.channel_length_nm / pore.base_pitch_nm);
    return window < 1 ? 1 : static_cast<std::size_t>(window);
}

void AcquisitionParams::validate() const {
    if (sample_interval_us <= 0) throw ConfigError("sample interval must be positive");
    if (filter_bandwidth_khz < 0) throw ConfigError("filter bandwidth must be nonnegative");
    if (bilayer_area_um2 < 0) throw ConfigError("bilayer area must be nonnegative");
    if (noise_coefficient_pa_per_um2 < 0) throw ConfigError("noise coefficient must be nonnegative");
}

AcquisitionParams AcquisitionParams::from_config(const KeyValueConfig& cfg) {
    AcquisitionParams acq;
    acq.sample_interval_us = cfg.get_double("sample_interval_us", acq.sample_interval_us);
    acq.filter_bandwidth_khz = cfg.get_double("filter_bandwidth_khz", acq.filter_bandwidth_khz);
    acq.bilayer_area_um2 = cfg.get_double("bilayer_area_um2", acq.bilayer_area_um2);
    acq.noise_coefficient_pa_per_um2 =
        cfg.get_double("noise_coefficient_pa_per_um2", acq.noise_coefficient_pa_per_um2);
    acq.rng_seed = cfg.get_uint("rng_seed", acq.rng_seed);
    acq.validate();
    return acq;
}

bool standard_bandwidth(double bandwidth_khz) {
    return bandwidth_khz == 5.0 || bandwidth_khz == 20.0 || bandwidth_khz == 100.0;
}

double BlockadeProfile::current_at_us(double t_us) const {
    if (segment_end_us.empty() || t_us < 0 || t_us >= segment_end_us.back()) {
        return open_current_pa;
    }
    const auto it = std::upper_bound(segment_end_us.begin(), segment_end_us.end(), t_us);
    const auto idx = static_cast<std::size_t>(it - segment_end_us.begin());
    return segment_current_pa[idx];
}

BlockadeProfile ideal_blockade_profile(const BaseSequence& seq, const PoreModel& pore,
                                       TranslocationDirection dir) {
    pore.validate();
    if (seq.empty()) throw DomainError("cannot build a blockade profile for an empty sequence");

    const std::size_t window = channel_window(pore);
    BlockadeProfile profile;
    profile.open_current_pa = pore.open_current_pa;

    // Segment k spans the dwell of entering base k; the channel then holds
    // bases [k-window+1, k] (clipped at the strand's leading end).
    double t_us = 0.0;
    double window_sum = 0.0;
    for (std::size_t k = 0; k < seq.size(); ++k) {
        window_sum += pore.residual(seq[k]);
        if (k >= window) window_sum -= pore.residual(seq[k - window]);
        const std::size_t occupancy = std::min(k + 1, window);
        const double current = window_sum / static_cast<double>(occupancy);
        t_us += pore.dwell_us(seq[k], dir);
        if (!profile.segment_current_pa.empty() && profile.segment_current_pa.back() == current) {
            profile.segment_end_us.back() = t_us;
        } else {
            profile.segment_end_us.push_back(t_us);
            profile.segment_current_pa.push_back(current);
        }
    }
    return profile;
}

namespace {

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    std::seed_seq seq{seed, tag, index};
    return std::mt19937_64(seq);
}

} // namespace

CurrentTrace synthesize_trace(const std::vector<ScheduledEvent>& events,
                              const PoreModel& pore, const AcquisitionParams& acq,
                              std::optional<double> duration_s) {
    pore.validate();
    acq.validate();

    struct PlacedEvent {
        const ScheduledEvent* source;
        BlockadeProfile profile;
        TranslocationDirection direction;
        double start_s;
        double end_s;
    };

    std::vector<PlacedEvent> placed;
    placed.reserve(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        const ScheduledEvent& ev = events[i];
        if (ev.start_s < 0) throw SchedulingError("event start must be nonnegative");
        TranslocationDirection dir;
        if (ev.direction) {
            dir = *ev.direction;
        } else {
            auto rng = substream(acq.rng_seed, 0xd1, i);
            dir = (rng() & 1) ? TranslocationDirection::three_to_five
                              : TranslocationDirection::five_to_three;
        }
        PlacedEvent pe;
        pe.source = &ev;
        pe.profile = ideal_blockade_profile(ev.seq, pore, dir);
        pe.direction = dir;
        pe.start_s = ev.start_s;
        pe.end_s = ev.start_s + pe.profile.total_duration_us() * 1e-6;
        placed.push_back(std::move(pe));
    }
    std::sort(placed.begin(), placed.end(),
              [](const PlacedEvent& a, const PlacedEvent& b) { return a.start_s < b.start_s; });
    for (std::size_t i = 1; i < placed.size(); ++i) {
        if (placed[i].start_s < placed[i - 1].end_s) {
            throw SchedulingError("events overlap at t = " + std::to_string(placed[i].start_s) + " s");
        }
    }

    double total_s = 0.0;
    if (duration_s) {
        total_s = *duration_s;
        if (total_s < 0) throw ConfigError("trace duration must be nonnegative");
    } else if (!placed.empty()) {
        total_s = placed.back().end_s + placed.front().start_s;
    }

    CurrentTrace trace;
    trace.sample_interval_us = acq.sample_interval_us;
    const double dt_s = acq.sample_interval_us * 1e-6;
    const auto n = static_cast<std::size_t>(std::ceil(total_s / dt_s - 1e-12));
    trace.samples_pa.assign(n, pore.open_current_pa);

    for (const PlacedEvent& pe : placed) {
        const auto first =
            static_cast<std::size_t>(std::max(0.0, std::ceil(pe.start_s / dt_s - 1e-12)));
        for (std::size_t k = first; k < n; ++k) {
            const double t_s = static_cast<double>(k) * dt_s;
            if (t_s >= pe.end_s) break;
            trace.samples_pa[k] = pe.profile.current_at_us((t_s - pe.start_s) * 1e6);
        }
        trace.annotations.push_back(
            {pe.start_s, pe.end_s, pe.source->sequence_id, pe.direction});
    }

    const double sigma = acq.noise_sigma_pa();
    if (sigma > 0) {
        auto rng = substream(acq.rng_seed, 0xa0, 0);
        std::normal_distribution<double> noise(0.0, sigma);
        for (double& s : trace.samples_pa) s += noise(rng);
    }

    if (acq.filter_bandwidth_khz > 0 && !trace.samples_pa.empty()) {
        trace = bessel_lowpass(trace, acq.filter_bandwidth_khz);
    }
    return trace;
}

Resolvability resolvability(std::size_t segment_length, const PoreModel& pore) {
    if (segment_length < 1) throw DomainError("segment length must be >= 1");
    return segment_length < channel_window(pore) ? Resolvability::unresolvable
                                                 : Resolvability::resolvable;
}

} // namespace molstore
