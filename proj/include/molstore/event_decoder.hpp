#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "molstore/codec.hpp"
#include "molstore/nanopore.hpp"

namespace molstore {

// Detected translocation event.
struct BlockadeEvent {
    double start_s = 0.0;
    double end_s = 0.0;
    double mean_blocked_current_pa = 0.0;
    double baseline_pa = 0.0;
    double depth_fraction = 0.0; // 1 - blocked/baseline, clamped to [0, 1]
    std::optional<Base> classified_base;
    std::uint64_t estimated_base_count = 0;

    double duration_s() const { return end_s - start_s; }
    double duration_us() const { return (end_s - start_s) * 1e6; }
};

struct DetectorParams {
    double threshold_fraction = 0.5; // of the rolling baseline
    double min_duration_us = 10.0;
    std::size_t baseline_window = 1000; // samples in the rolling median
    // When set, a trace whose overall median sits below
    // threshold_fraction * expected is rejected as fully blocked.
    std::optional<double> expected_open_current_pa;
};

// Maximal spans where the current stays below threshold_fraction times the
// rolling-median baseline for at least min_duration_us. Events come back
// disjoint and time-ordered. Throws BaselineError when the trace is shorter
// than the baseline window or appears fully blocked.
std::vector<BlockadeEvent> detect_events(const CurrentTrace& trace,
                                         const DetectorParams& params);

struct ClassifyOptions {
    std::vector<Base> candidates{Base::A, Base::C, Base::G, Base::T};
    // Expected homopolymer length; enables the dwell-consistency check.
    std::optional<std::uint64_t> length_prior;
    double residual_tolerance = 0.30;
    double dwell_tolerance = 0.40;
};

struct Classification {
    std::optional<Base> base;    // empty = no calibration band matched
    double confidence = 0.0;     // 1 - normalized band distance, clamped to [0, 1]
    // Direction whose dwell fit best (meaningful when a length prior is given).
    std::optional<TranslocationDirection> direction;
};

// Nearest-neighbor match of (residual current, implied dwell) against the
// pore calibration. Unknown when the event falls outside every tolerance band.
Classification classify_homopolymer(const BlockadeEvent& event, const PoreModel& pore,
                                    const ClassifyOptions& options = {});

// round(duration / per-base dwell).
std::uint64_t estimate_base_count(const BlockadeEvent& event, Base base,
                                  const PoreModel& pore, TranslocationDirection dir);

// Picks the translocation direction whose dwell makes the event's base count
// sit closest to an integer multiple of the block-length prior; without a
// prior (or on a tie) the shorter dwell wins.
TranslocationDirection resolve_direction(const BlockadeEvent& event, Base base,
                                         const PoreModel& pore,
                                         std::optional<std::uint64_t> block_length_prior);

// Mismatch fraction over aligned positions; excess length counts as errors.
double symbol_error_rate(const BaseSequence& decoded, const BaseSequence& truth);

// One homopolymer run recovered from inside an event.
struct SegmentCall {
    double start_s = 0.0;
    double end_s = 0.0;
    double mean_current_pa = 0.0;
    Base base = Base::A;

    double duration_us() const { return (end_s - start_s) * 1e6; }
};

struct SegmentationParams {
    std::vector<Base> candidates{Base::A, Base::C, Base::G, Base::T};
    // Runs shorter than this are treated as noise flips or inter-level
    // transitions and folded into the neighboring plateaus.
    double min_segment_duration_us = 50.0;
};

// Splits a detected event into quasi-constant current segments and labels
// each with the nearest calibration level. Segment-level decoding only; no
// per-base calling.
std::vector<SegmentCall> segment_event(const CurrentTrace& trace, const BlockadeEvent& event,
                                       const PoreModel& pore, const SegmentationParams& params);

} // namespace molstore
