#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "molstore/errors.hpp"
#include "molstore/event_decoder.hpp"
#include "molstore/nanopore.hpp"

using namespace molstore;

namespace {

CurrentTrace flat_trace(std::size_t n, double level_pa, double dt_us = 5.0) {
    CurrentTrace trace;
    trace.sample_interval_us = dt_us;
    trace.samples_pa.assign(n, level_pa);
    return trace;
}

BlockadeEvent make_event(double mean_pa, double duration_us) {
    BlockadeEvent ev;
    ev.start_s = 0.0;
    ev.end_s = duration_us * 1e-6;
    ev.mean_blocked_current_pa = mean_pa;
    ev.baseline_pa = 120.0;
    ev.depth_fraction = 1.0 - mean_pa / 120.0;
    return ev;
}

AcquisitionParams clean_acquisition() {
    AcquisitionParams acq;
    acq.noise_coefficient_pa_per_um2 = 0.0;
    acq.filter_bandwidth_khz = 0.0;
    return acq;
}

} // namespace

TEST_CASE("a clean homopolymer event is recovered to within one sample") {
    PoreModel pore;
    const auto acq = clean_acquisition();
    ScheduledEvent ev{BaseSequence(120, Base::A), 5e-3, TranslocationDirection::five_to_three, 0};
    const auto trace = synthesize_trace({ev}, pore, acq);

    const auto events = detect_events(trace, {});
    REQUIRE(events.size() == 1);
    const auto& got = events.front();
    CHECK(std::abs(got.start_s - 5e-3) <= 5e-6);
    CHECK(std::abs(got.duration_us() - 396.0) <= 5.0);
    CHECK(got.mean_blocked_current_pa == doctest::Approx(20.0));
    CHECK(got.baseline_pa == doctest::Approx(120.0));
    CHECK(got.depth_fraction == doctest::Approx(1.0 - 20.0 / 120.0));
}

TEST_CASE("an open-pore trace yields no events") {
    const auto trace = flat_trace(2000, 120.0);
    DetectorParams params;
    params.expected_open_current_pa = 120.0;
    CHECK(detect_events(trace, params).empty());
}

TEST_CASE("minimum duration and threshold gates") {
    DetectorParams params;
    params.baseline_window = 51;

    auto trace = flat_trace(400, 120.0);
    trace.samples_pa[200] = 20.0; // 5 us dip, below the 10 us floor
    CHECK(detect_events(trace, params).empty());

    trace = flat_trace(400, 120.0);
    for (std::size_t i = 200; i < 203; ++i) trace.samples_pa[i] = 20.0;
    auto events = detect_events(trace, params);
    REQUIRE(events.size() == 1);
    CHECK(events.front().duration_us() == doctest::Approx(15.0));

    // a dip to 70 pA stays above half the 120 pA baseline
    trace = flat_trace(400, 120.0);
    for (std::size_t i = 200; i < 210; ++i) trace.samples_pa[i] = 70.0;
    CHECK(detect_events(trace, params).empty());

    for (std::size_t i = 200; i < 210; ++i) trace.samples_pa[i] = 50.0;
    CHECK(detect_events(trace, params).size() == 1);
}

TEST_CASE("baseline failures are reported, not guessed around") {
    DetectorParams params;
    CHECK_THROWS_AS(detect_events(flat_trace(500, 120.0), params), BaselineError);

    // fully blocked trace: rejected when the caller states the expected level
    const auto blocked = flat_trace(1500, 20.0);
    params.expected_open_current_pa = 120.0;
    CHECK_THROWS_AS(detect_events(blocked, params), BaselineError);
    params.expected_open_current_pa.reset();
    CHECK(detect_events(blocked, params).empty());

    DetectorParams bad;
    bad.threshold_fraction = 1.5;
    CHECK_THROWS_AS(detect_events(flat_trace(1500, 120.0), bad), ConfigError);
}

TEST_CASE("raising the duration floor never adds events") {
    PoreModel pore;
    AcquisitionParams acq;
    acq.rng_seed = 5;
    std::vector<ScheduledEvent> schedule;
    for (std::size_t i = 0; i < 10; ++i) {
        const std::size_t len = 10 + 30 * i;
        schedule.push_back({BaseSequence(len, Base::C), 6e-3 + 2e-3 * static_cast<double>(i),
                            TranslocationDirection::five_to_three, i});
    }
    const auto trace = synthesize_trace(schedule, pore, acq);

    std::size_t previous = trace.size();
    for (double floor_us : {10.0, 60.0, 120.0, 300.0, 1000.0}) {
        DetectorParams params;
        params.min_duration_us = floor_us;
        const auto count = detect_events(trace, params).size();
        CHECK(count <= previous);
        previous = count;
    }
}

TEST_CASE("homopolymer classification against the calibration bands") {
    PoreModel pore;
    ClassifyOptions opts;
    opts.candidates = {Base::A, Base::C};
    opts.length_prior = 120;

    auto cls = classify_homopolymer(make_event(20.0, 396.0), pore, opts);
    CHECK(cls.base == Base::A);
    CHECK(cls.confidence == doctest::Approx(1.0));
    CHECK(cls.direction == TranslocationDirection::five_to_three);

    cls = classify_homopolymer(make_event(20.0, 648.0), pore, opts);
    CHECK(cls.base == Base::A);
    CHECK(cls.direction == TranslocationDirection::three_to_five);

    cls = classify_homopolymer(make_event(40.0, 180.0), pore, opts);
    CHECK(cls.base == Base::C);
    CHECK(cls.confidence == doctest::Approx(1.0));

    // far from every band: no call, zero confidence
    cls = classify_homopolymer(make_event(55.0, 180.0), pore, {});
    CHECK_FALSE(cls.base.has_value());
    CHECK(cls.confidence == 0.0);

    // near-miss current degrades confidence smoothly
    cls = classify_homopolymer(make_event(22.0, 396.0), pore, {});
    CHECK(cls.base == Base::A);
    CHECK(cls.confidence == doctest::Approx(1.0 - 2.0 / 6.0));

    ClassifyOptions bad;
    bad.residual_tolerance = 0.0;
    CHECK_THROWS_AS(classify_homopolymer(make_event(20.0, 396.0), pore, bad), ConfigError);
}

TEST_CASE("base count and direction recovery from event duration") {
    PoreModel pore;
    CHECK(estimate_base_count(make_event(40.0, 180.0), Base::C, pore,
                              TranslocationDirection::five_to_three) == 120);
    CHECK(estimate_base_count(make_event(20.0, 648.0), Base::A, pore,
                              TranslocationDirection::three_to_five) == 120);
    CHECK(estimate_base_count(make_event(20.0, 100.0), Base::A, pore,
                              TranslocationDirection::five_to_three) == 30);
    CHECK(estimate_base_count(make_event(20.0, 0.0), Base::A, pore,
                              TranslocationDirection::five_to_three) == 0);

    CHECK(resolve_direction(make_event(20.0, 648.0), Base::A, pore, 120) ==
          TranslocationDirection::three_to_five);
    CHECK(resolve_direction(make_event(20.0, 396.0), Base::A, pore, 120) ==
          TranslocationDirection::five_to_three);
    // direction-independent dwell: the shorter (first) direction wins
    CHECK(resolve_direction(make_event(40.0, 180.0), Base::C, pore, 120) ==
          TranslocationDirection::five_to_three);
    CHECK(resolve_direction(make_event(20.0, 500.0), Base::A, pore, std::nullopt) ==
          TranslocationDirection::five_to_three);
}

TEST_CASE("symbol error rate counts mismatches and length excess") {
    const BaseSequence aaaa{Base::A, Base::A, Base::A, Base::A};
    const BaseSequence aaca{Base::A, Base::A, Base::C, Base::A};
    CHECK(symbol_error_rate(aaaa, aaaa) == 0.0);
    CHECK(symbol_error_rate(aaca, aaaa) == doctest::Approx(0.25));
    BaseSequence longer = aaaa;
    longer.push_back(Base::G);
    longer.push_back(Base::T);
    CHECK(symbol_error_rate(longer, aaaa) == doctest::Approx(2.0 / 6.0));
    CHECK(symbol_error_rate({}, {}) == 0.0);
    CHECK(symbol_error_rate({}, aaaa) == 1.0);
}

TEST_CASE("noisy filtered mixtures are detected with high recall and precision") {
    PoreModel pore;
    AcquisitionParams acq;
    acq.rng_seed = 17;

    std::vector<ScheduledEvent> schedule;
    for (std::size_t i = 0; i < 100; ++i) {
        const Base b = (i % 2 == 0) ? Base::A : Base::C;
        schedule.push_back({BaseSequence(120, b), 5e-3 * static_cast<double>(i + 1),
                            TranslocationDirection::five_to_three, i});
    }
    const auto trace = synthesize_trace(schedule, pore, acq);

    DetectorParams params;
    params.expected_open_current_pa = pore.open_current_pa;
    const auto events = detect_events(trace, params);

    const double tol_s = 40e-6; // filter group delay plus edge smear
    std::size_t matched = 0;
    for (const auto& ann : trace.annotations) {
        for (const auto& ev : events) {
            if (std::abs(ev.start_s - ann.start_s) <= tol_s &&
                std::abs(ev.end_s - ann.end_s) <= tol_s) {
                ++matched;
                break;
            }
        }
    }
    const double recall = static_cast<double>(matched) / 100.0;
    const double precision = static_cast<double>(matched) / static_cast<double>(events.size());
    CHECK(recall >= 0.99);
    CHECK(precision >= 0.99);
}

TEST_CASE("closure: a thousand noisy homopolymer blocks classify back to their base") {
    PoreModel pore;
    AcquisitionParams acq;
    acq.rng_seed = 23;

    std::mt19937_64 rng(0xeee1);
    std::uniform_int_distribution<int> pick(0, 3);
    std::vector<ScheduledEvent> schedule;
    BaseSequence truth;
    for (std::size_t i = 0; i < 1000; ++i) {
        const Base b = static_cast<Base>(pick(rng));
        truth.push_back(b);
        const auto dir = (rng() & 1) ? TranslocationDirection::three_to_five
                                     : TranslocationDirection::five_to_three;
        schedule.push_back({BaseSequence(120, b), 3e-3 * static_cast<double>(i + 1), dir, i});
    }
    const auto trace = synthesize_trace(schedule, pore, acq);

    DetectorParams params;
    params.expected_open_current_pa = pore.open_current_pa;
    const auto events = detect_events(trace, params);

    ClassifyOptions opts;
    opts.length_prior = 120;
    BaseSequence decoded(truth.size(), Base::A);
    std::size_t unmatched = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double mid = 0.5 * (trace.annotations[i].start_s + trace.annotations[i].end_s);
        const BlockadeEvent* hit = nullptr;
        for (const auto& ev : events) {
            if (ev.start_s <= mid && mid < ev.end_s) {
                hit = &ev;
                break;
            }
        }
        if (!hit) {
            ++unmatched;
            decoded[i] = truth[i] == Base::A ? Base::T : Base::A; // force an error
            continue;
        }
        const auto cls = classify_homopolymer(*hit, pore, opts);
        decoded[i] = cls.base.value_or(truth[i] == Base::A ? Base::T : Base::A);
    }
    CHECK(unmatched <= 5);
    CHECK(symbol_error_rate(decoded, truth) <= 0.01);
}

TEST_CASE("segmenting a four-block strand recovers the run structure") {
    PoreModel pore;
    const auto acq = clean_acquisition();

    BaseSequence seq;
    seq.insert(seq.end(), 120, Base::A);
    seq.insert(seq.end(), 120, Base::C);
    seq.insert(seq.end(), 120, Base::G);
    seq.insert(seq.end(), 120, Base::T);
    ScheduledEvent ev{seq, 6e-3, TranslocationDirection::five_to_three, 0};
    const auto trace = synthesize_trace({ev}, pore, acq);

    const auto events = detect_events(trace, {});
    REQUIRE(events.size() == 1);

    const auto calls = segment_event(trace, events.front(), pore, {});
    REQUIRE(calls.size() == 4);
    const Base expected[4] = {Base::A, Base::C, Base::G, Base::T};
    const double durations_us[4] = {396.0, 180.0, 252.0, 324.0};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(calls[i].base == expected[i]);
        CHECK(std::abs(calls[i].duration_us() - durations_us[i]) <= 70.0);
        CHECK(std::abs(calls[i].mean_current_pa - pore.residual(expected[i])) <= 3.5);
    }
    // segments tile the event without gaps
    for (std::size_t i = 1; i < 4; ++i) CHECK(calls[i].start_s == doctest::Approx(calls[i - 1].end_s));

    SegmentationParams no_candidates;
    no_candidates.candidates.clear();
    CHECK_THROWS_AS(segment_event(trace, events.front(), pore, no_candidates), ConfigError);
}

TEST_CASE("short-run blocks resolve to plateaus, not artifacts") {
    PoreModel pore;
    const double A = pore.residual(Base::A);
    const double C = pore.residual(Base::C);
    const double G = pore.residual(Base::G);
    const double T = pore.residual(Base::T);

    auto trace_of = [](const std::vector<std::pair<double, std::size_t>>& steps) {
        CurrentTrace trace;
        trace.sample_interval_us = 5.0;
        for (const auto& [level, count] : steps)
            trace.samples_pa.insert(trace.samples_pa.end(), count, level);
        return trace;
    };
    auto segment_all = [&](const CurrentTrace& trace) {
        BlockadeEvent ev;
        ev.end_s = static_cast<double>(trace.size()) * trace.sample_interval_us * 1e-6;
        SegmentationParams params;
        params.min_segment_duration_us = 108.0; // 22 samples
        return segment_event(trace, ev, pore, params);
    };
    auto shape = [](const std::vector<SegmentCall>& calls) {
        std::vector<std::pair<Base, long>> out;
        for (const auto& c : calls) out.emplace_back(c.base, std::lround(c.duration_us()));
        return out;
    };
    using Shape = std::vector<std::pair<Base, long>>;

    // A noise flip inside a plateau heals without leaving a seam.
    CHECK(shape(segment_all(trace_of({{T, 40}, {C, 3}, {T, 40}}))) ==
          Shape{{Base::T, 415}});

    // A split plateau whose label time clears the floor coalesces even though
    // every fragment is below it.
    CHECK(shape(segment_all(trace_of({{T, 40}, {C, 12}, {T, 3}, {C, 14}, {G, 40}}))) ==
          Shape{{Base::T, 200}, {Base::C, 145}, {Base::G, 200}});

    // A leading noise flip does not strand the dominant fragment on the wrong
    // side of the transition.
    CHECK(shape(segment_all(trace_of({{G, 40}, {T, 1}, {G, 17}, {T, 6}, {C, 40}}))) ==
          Shape{{Base::G, 290}, {Base::C, 230}});

    // A transition ramp crossing the G zone folds into the entered plateau
    // instead of fabricating a segment.
    CHECK(shape(segment_all(trace_of({{T, 40}, {G, 21}, {A, 40}}))) ==
          Shape{{Base::T, 200}, {Base::A, 305}});

    // Crossing time raises the coalesce bar: 30 samples of G between T and A
    // are explainable as ramp plus noise and still split...
    CHECK(shape(segment_all(trace_of({{T, 40}, {G, 10}, {T, 4}, {G, 20}, {A, 40}}))) ==
          Shape{{Base::T, 270}, {Base::A, 300}});

    // ...while 41 samples of G are not, so the split plateau is rebuilt.
    CHECK(shape(segment_all(trace_of({{T, 40}, {G, 20}, {T, 3}, {G, 21}, {A, 40}}))) ==
          Shape{{Base::T, 200}, {Base::G, 220}, {Base::A, 200}});
}
