#include "molstore/event_decoder.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "molstore/errors.hpp"

namespace molstore {

namespace {

// Sliding-window median over a uniformly advancing window.
class SlidingMedian {
public:
    void insert(double v) {
        if (low_.empty() || v <= *low_.rbegin()) {
            low_.insert(v);
        } else {
            high_.insert(v);
        }
        rebalance();
    }

    void erase(double v) {
        auto it = low_.find(v);
        if (it != low_.end()) {
            low_.erase(it);
        } else {
            high_.erase(high_.find(v));
        }
        rebalance();
    }

    double median() const {
        if (low_.size() > high_.size()) return *low_.rbegin();
        return 0.5 * (*low_.rbegin() + *high_.begin());
    }

private:
    void rebalance() {
        while (low_.size() > high_.size() + 1) {
            auto it = std::prev(low_.end());
            high_.insert(*it);
            low_.erase(it);
        }
        while (high_.size() > low_.size()) {
            auto it = high_.begin();
            low_.insert(*it);
            high_.erase(it);
        }
    }

    std::multiset<double> low_;  // lower half, max at rbegin
    std::multiset<double> high_; // upper half, min at begin
};

std::vector<double> rolling_median(const std::vector<double>& x, std::size_t window) {
    const std::size_t n = x.size();
    std::vector<double> out(n);
    SlidingMedian med;
    const std::size_t half = window / 2;
    std::size_t lo = 0, hi = 0; // current window [lo, hi)
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t want_lo = i > half ? i - half : 0;
        const std::size_t want_hi = std::min(n, i + window - half);
        while (hi < want_hi) med.insert(x[hi++]);
        while (lo < want_lo) med.erase(x[lo++]);
        out[i] = med.median();
    }
    return out;
}

double interior_mean(const std::vector<double>& x, std::size_t first, std::size_t last) {
    // Mean over the run with the outer eighths trimmed, so filter-smeared
    // edges do not bias the plateau estimate.
    const std::size_t len = last - first + 1;
    const std::size_t trim = len / 8;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = first + trim; i + trim <= last; ++i) {
        sum += x[i];
        ++count;
    }
    return sum / static_cast<double>(count);
}

} // namespace

std::vector<BlockadeEvent> detect_events(const CurrentTrace& trace,
                                         const DetectorParams& params) {
    if (params.threshold_fraction <= 0 || params.threshold_fraction >= 1) {
        throw ConfigError("threshold_fraction must lie in (0, 1)");
    }
    if (params.baseline_window == 0) throw ConfigError("baseline_window must be positive");
    const std::size_t n = trace.size();
    if (n < params.baseline_window) {
        throw BaselineError("trace has " + std::to_string(n) +
                            " samples, fewer than the baseline window of " +
                            std::to_string(params.baseline_window));
    }

    if (params.expected_open_current_pa) {
        std::vector<double> sorted = trace.samples_pa;
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
        const double global_median = sorted[sorted.size() / 2];
        if (global_median < params.threshold_fraction * *params.expected_open_current_pa) {
            throw BaselineError("trace appears fully blocked; no open-pore baseline to estimate");
        }
    }

    const std::vector<double> baseline = rolling_median(trace.samples_pa, params.baseline_window);
    const double dt_us = trace.sample_interval_us;

    std::vector<BlockadeEvent> events;
    std::size_t run_start = 0;
    bool in_run = false;
    auto flush = [&](std::size_t run_end /* inclusive */) {
        const double duration_us = static_cast<double>(run_end - run_start + 1) * dt_us;
        if (duration_us < params.min_duration_us) return;
        BlockadeEvent ev;
        ev.start_s = static_cast<double>(run_start) * dt_us * 1e-6;
        ev.end_s = static_cast<double>(run_end + 1) * dt_us * 1e-6;
        ev.baseline_pa = baseline[run_start];
        ev.mean_blocked_current_pa = interior_mean(trace.samples_pa, run_start, run_end);
        const double df = ev.baseline_pa > 0 ? 1.0 - ev.mean_blocked_current_pa / ev.baseline_pa : 0.0;
        ev.depth_fraction = std::clamp(df, 0.0, 1.0);
        events.push_back(ev);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const bool blocked = trace.samples_pa[i] < params.threshold_fraction * baseline[i];
        if (blocked && !in_run) {
            run_start = i;
            in_run = true;
        } else if (!blocked && in_run) {
            flush(i - 1);
            in_run = false;
        }
    }
    if (in_run) flush(n - 1);
    return events;
}

Classification classify_homopolymer(const BlockadeEvent& event, const PoreModel& pore,
                                    const ClassifyOptions& options) {
    pore.validate();
    if (options.residual_tolerance <= 0 || options.dwell_tolerance <= 0) {
        throw ConfigError("classification tolerances must be positive");
    }

    Classification best;
    double best_z = std::numeric_limits<double>::infinity();
    for (Base b : options.candidates) {
        const double residual = pore.residual(b);
        const double zr = std::abs(event.mean_blocked_current_pa - residual) /
                          (options.residual_tolerance * residual);
        double z = zr;
        std::optional<TranslocationDirection> dir;
        if (options.length_prior && *options.length_prior > 0) {
            const double tau = event.duration_us() / static_cast<double>(*options.length_prior);
            z = std::numeric_limits<double>::infinity();
            for (auto d : {TranslocationDirection::five_to_three,
                           TranslocationDirection::three_to_five}) {
                const double dwell = pore.dwell_us(b, d);
                const double zt = std::abs(tau - dwell) / (options.dwell_tolerance * dwell);
                const double zd = std::max(zr, zt);
                if (zd < z) {
                    z = zd;
                    dir = d;
                }
            }
        }
        if (z < best_z) {
            best_z = z;
            best.base = b;
            best.direction = dir;
        }
    }
    best.confidence = std::clamp(1.0 - best_z, 0.0, 1.0);
    if (best_z > 1.0) {
        best.base.reset();
        best.direction.reset();
    }
    return best;
}

std::uint64_t estimate_base_count(const BlockadeEvent& event, Base base,
                                  const PoreModel& pore, TranslocationDirection dir) {
    const double dwell = pore.dwell_us(base, dir);
    return static_cast<std::uint64_t>(std::llround(event.duration_us() / dwell));
}

TranslocationDirection resolve_direction(const BlockadeEvent& event, Base base,
                                         const PoreModel& pore,
                                         std::optional<std::uint64_t> block_length_prior) {
    const double dwell_fwd = pore.dwell_us(base, TranslocationDirection::five_to_three);
    const double dwell_rev = pore.dwell_us(base, TranslocationDirection::three_to_five);
    const TranslocationDirection shorter = dwell_fwd <= dwell_rev
                                               ? TranslocationDirection::five_to_three
                                               : TranslocationDirection::three_to_five;
    if (dwell_fwd == dwell_rev || !block_length_prior || *block_length_prior == 0) {
        return shorter;
    }
    const double prior = static_cast<double>(*block_length_prior);
    auto multiple_distance = [&](double dwell) {
        const double count = event.duration_us() / dwell;
        return std::abs(count - prior * std::round(count / prior));
    };
    const double d_fwd = multiple_distance(dwell_fwd);
    const double d_rev = multiple_distance(dwell_rev);
    if (d_fwd == d_rev) return shorter;
    return d_fwd < d_rev ? TranslocationDirection::five_to_three
                         : TranslocationDirection::three_to_five;
}

double symbol_error_rate(const BaseSequence& decoded, const BaseSequence& truth) {
    const std::size_t aligned = std::min(decoded.size(), truth.size());
    const std::size_t longest = std::max(decoded.size(), truth.size());
    if (longest == 0) return 0.0;
    std::size_t errors = longest - aligned;
    for (std::size_t i = 0; i < aligned; ++i) {
        if (decoded[i] != truth[i]) ++errors;
    }
    return static_cast<double>(errors) / static_cast<double>(longest);
}

std::vector<SegmentCall> segment_event(const CurrentTrace& trace, const BlockadeEvent& event,
                                       const PoreModel& pore, const SegmentationParams& params) {
    pore.validate();
    if (params.candidates.empty()) throw ConfigError("segmentation needs at least one candidate base");

    const double dt_us = trace.sample_interval_us;
    const auto first = static_cast<std::size_t>(std::llround(event.start_s * 1e6 / dt_us));
    auto last = static_cast<std::size_t>(std::llround(event.end_s * 1e6 / dt_us));
    last = std::min(last, trace.size());
    if (first >= last) return {};

    auto nearest = [&](double value) {
        Base best = params.candidates.front();
        double best_d = std::numeric_limits<double>::infinity();
        for (Base b : params.candidates) {
            const double d = std::abs(value - pore.residual(b));
            if (d < best_d) {
                best_d = d;
                best = b;
            }
        }
        return best;
    };

    struct Run {
        Base base;
        std::size_t first, last; // inclusive sample range
        std::size_t length() const { return last - first + 1; }
    };
    std::vector<Run> runs;
    for (std::size_t i = first; i < last; ++i) {
        const Base b = nearest(trace.samples_pa[i]);
        if (!runs.empty() && runs.back().base == b) {
            runs.back().last = i;
        } else {
            runs.push_back({b, i, i});
        }
    }

    // Runs shorter than the floor are either noise flips inside a plateau or
    // transition artifacts of the channel-window mixing ramp. Each maximal
    // block of short runs is resolved as a unit. A label whose members sum
    // past the floor by more than the time the bounding ramp itself spends
    // crossing that label's zone is a real plateau that noise flips have
    // split, so its span coalesces first. Anything else is a mixing ramp
    // between the bounding plateaus: the block splits where the
    // duration-weighted residual distance of each member to the bound it
    // joins is smallest, so a stray noise flip cannot strand later members
    // on the wrong side. Ties fold forward, onto the run whose bases produce
    // the ramp; blocks touching the event edge fold onto their only bound,
    // and same-label bounds heal back into one plateau via the re-join pass.
    const auto min_samples =
        static_cast<std::size_t>(std::ceil(params.min_segment_duration_us / dt_us));

    // Samples the u-to-v ramp spends inside L's nearest-label zone. The
    // direction is unknown at this layer, so the slower dwell of the
    // entering base bounds the crossing from above.
    auto crossing_samples = [&](Base L, Base u, Base v) {
        const double lo = std::min(pore.residual(u), pore.residual(v));
        const double hi = std::max(pore.residual(u), pore.residual(v));
        if (hi <= lo) return 0.0;
        const double rL = pore.residual(L);
        double below = -std::numeric_limits<double>::infinity();
        double above = std::numeric_limits<double>::infinity();
        for (Base b : params.candidates) {
            const double r = pore.residual(b);
            if (r < rL && r > below) below = r;
            if (r > rL && r < above) above = r;
        }
        const double zone_lo = std::isinf(below) ? lo : 0.5 * (below + rL);
        const double zone_hi = std::isinf(above) ? hi : 0.5 * (rL + above);
        const double overlap = std::max(0.0, std::min(zone_hi, hi) - std::max(zone_lo, lo));
        const double dwell =
            std::max(pore.dwell_us(v, TranslocationDirection::five_to_three),
                     pore.dwell_us(v, TranslocationDirection::three_to_five));
        return overlap / (hi - lo) * static_cast<double>(channel_window(pore)) * dwell / dt_us;
    };
    auto resolve_block = [&]() {
        std::size_t b = 0;
        while (b < runs.size() && runs[b].length() >= min_samples) ++b;
        if (b == runs.size()) return false;
        std::size_t e = b;
        while (e + 1 < runs.size() && runs[e + 1].length() < min_samples) ++e;
        const bool has_left = b > 0;
        const bool has_right = e + 1 < runs.size();

        if (!has_left && !has_right) {
            // Whole event is below the floor: keep the longest label.
            std::size_t widest = 0;
            for (std::size_t i = 1; i < runs.size(); ++i)
                if (runs[i].length() > runs[widest].length()) widest = i;
            const Run merged{runs[widest].base, runs.front().first, runs.back().last};
            runs.assign(1, merged);
            return false;
        }

        std::array<double, 4> label_sum{};
        for (std::size_t i = b; i <= e; ++i)
            label_sum[static_cast<std::size_t>(runs[i].base)] +=
                static_cast<double>(runs[i].length());
        std::size_t strongest = 0;
        for (std::size_t l = 1; l < 4; ++l)
            if (label_sum[l] > label_sum[strongest]) strongest = l;
        const Base L = static_cast<Base>(strongest);
        double coalesce_floor = static_cast<double>(min_samples);
        if (has_left && has_right)
            coalesce_floor += crossing_samples(L, runs[b - 1].base, runs[e + 1].base);
        if (label_sum[strongest] >= coalesce_floor) {
            std::size_t i0 = b, i1 = e;
            while (runs[i0].base != L) ++i0;
            while (runs[i1].base != L) --i1;
            runs[i0].last = runs[i1].last;
            runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(i0) + 1,
                       runs.begin() + static_cast<std::ptrdiff_t>(i1) + 1);
            for (std::size_t j = 0; j + 1 < runs.size();) {
                if (runs[j].base == runs[j + 1].base) {
                    runs[j].last = runs[j + 1].last;
                    runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(j) + 1);
                } else {
                    ++j;
                }
            }
            return true;
        }

        std::size_t split;  // members [b, split) fold left, [split, e] fold right
        if (!has_left) {
            split = b;
        } else if (!has_right) {
            split = e + 1;
        } else {
            const double rl = pore.residual(runs[b - 1].base);
            const double rr = pore.residual(runs[e + 1].base);
            split = b;
            double cost = 0.0;
            for (std::size_t i = b; i <= e; ++i)
                cost += static_cast<double>(runs[i].length()) *
                        std::abs(pore.residual(runs[i].base) - rr);
            double best = cost;
            for (std::size_t s = b; s <= e; ++s) {
                const double r = pore.residual(runs[s].base);
                cost += static_cast<double>(runs[s].length()) *
                        (std::abs(r - rl) - std::abs(r - rr));
                if (cost < best) {
                    best = cost;
                    split = s + 1;
                }
            }
        }
        if (split > b) runs[b - 1].last = runs[split - 1].last;
        if (split <= e) runs[e + 1].first = runs[split].first;
        runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(b),
                   runs.begin() + static_cast<std::ptrdiff_t>(e) + 1);
        // Re-join neighbors that now carry the same label.
        for (std::size_t j = 0; j + 1 < runs.size();) {
            if (runs[j].base == runs[j + 1].base) {
                runs[j].last = runs[j + 1].last;
                runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(j) + 1);
            } else {
                ++j;
            }
        }
        return true;
    };
    while (resolve_block()) {
    }

    std::vector<SegmentCall> calls;
    calls.reserve(runs.size());
    for (const Run& r : runs) {
        SegmentCall call;
        call.start_s = static_cast<double>(r.first) * dt_us * 1e-6;
        call.end_s = static_cast<double>(r.last + 1) * dt_us * 1e-6;
        call.mean_current_pa = interior_mean(trace.samples_pa, r.first, r.last);
        call.base = nearest(call.mean_current_pa);
        calls.push_back(call);
    }
    return calls;
}

} // namespace molstore
