#include "molstore/sim_orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "molstore/errors.hpp"
#include "molstore/event_decoder.hpp"
#include "molstore/write_station.hpp"

namespace molstore {
namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<std::uint8_t> parse_hex_payload(const std::string& hex) {
    if (hex.empty() || hex.size() % 2 != 0)
        throw ConfigError("hex payload needs an even, nonzero digit count");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw ConfigError(std::string("invalid hex digit: ") + c);
    };
    std::vector<std::uint8_t> bytes(hex.size() / 2);
    for (std::size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) * 16 + nibble(hex[2 * i + 1]));
    return bytes;
}

std::vector<std::uint8_t> random_payload(std::size_t n, std::uint64_t seed,
                                         std::size_t command_index) {
    if (n == 0)
        throw ConfigError("random payload needs a nonzero byte count");
    std::mt19937_64 rng(mix64(seed ^ mix64(0xb10c + command_index)));
    std::uniform_int_distribution<int> byte(0, 255);
    std::vector<std::uint8_t> out(n);
    for (auto& b : out)
        b = static_cast<std::uint8_t>(byte(rng));
    return out;
}

std::vector<Command> parse_workload(const std::vector<std::string>& lines, std::uint64_t seed) {
    std::vector<Command> cmds;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::istringstream ss(lines[i]);
        std::string verb, arg;
        ss >> verb >> arg;
        if (verb == "store") {
            std::vector<std::uint8_t> payload;
            if (arg.rfind("hex:", 0) == 0)
                payload = parse_hex_payload(arg.substr(4));
            else if (arg.rfind("random:", 0) == 0)
                payload = random_payload(std::stoull(arg.substr(7)), seed, i);
            else
                throw ConfigError("store expects hex:<digits> or random:<bytes>: " + lines[i]);
            cmds.push_back(StoreCommand{DataBlock{std::move(payload), i}});
        } else if (verb == "fetch" || verb == "erase") {
            std::uint64_t addr = 0;
            try {
                addr = std::stoull(arg);
            } catch (const std::exception&) {
                throw ConfigError(verb + " expects a spot address: " + lines[i]);
            }
            if (verb == "fetch")
                cmds.push_back(FetchCommand{addr});
            else
                cmds.push_back(EraseCommand{addr});
        } else {
            throw ConfigError("unknown workload command: " + lines[i]);
        }
    }
    return cmds;
}

double min_dwell_us(const PoreModel& pore) {
    double m = pore.dwell_fwd_us[0];
    for (std::size_t i = 0; i < 4; ++i)
        m = std::min({m, pore.dwell_fwd_us[i], pore.dwell_rev_us[i]});
    return m;
}

double max_dwell_us(const PoreModel& pore) {
    double m = pore.dwell_fwd_us[0];
    for (std::size_t i = 0; i < 4; ++i)
        m = std::max({m, pore.dwell_fwd_us[i], pore.dwell_rev_us[i]});
    return m;
}

} // namespace

BaseSequence run_length_encode(const DataBlock& block, std::size_t run_length) {
    if (run_length == 0)
        throw ConfigError("run_length must be positive");
    const BaseSequence symbols = encode_block(block);
    BaseSequence out;
    out.reserve(symbols.size() * run_length);
    for (Base b : symbols)
        out.insert(out.end(), run_length, b);
    return out;
}

void Scenario::validate() const {
    layout.validate();
    pore.validate();
    acq.validate();
    if (run_length < channel_window(pore))
        throw ConfigError("run_length below the channel window: runs would be unresolvable");
    if (station_overhead_s < 0.0)
        throw ConfigError("station overhead must be non-negative");
}

Scenario Scenario::from_config(const KeyValueConfig& cfg) {
    Scenario s;
    s.layout = ChipLayout::from_config(cfg);
    s.pore = PoreModel::from_config(cfg);
    s.acq = AcquisitionParams::from_config(cfg);
    s.transport = TransportMode::from_config(cfg);
    s.field = FieldParams::from_config(cfg);
    s.particle = ParticleModel::from_config(cfg);
    s.fluid = FluidParams::from_config(cfg);
    s.seed = cfg.get_uint("seed", 1);
    s.run_length = cfg.get_uint("run_length", 120);
    s.station_overhead_s = cfg.get_double("station_overhead_s", 0.0);
    s.workload = parse_workload(cfg.command_lines(), s.seed);
    s.validate();
    return s;
}

Scenario Scenario::from_file(const std::string& path) {
    return from_config(KeyValueConfig::parse_file(path));
}

double parallel_station_rate_bps(unsigned station_count, double per_station_rate_bps) {
    if (station_count == 0)
        throw DomainError("need at least one read/write station");
    if (per_station_rate_bps < 0.0)
        throw DomainError("per-station rate must be non-negative");
    return static_cast<double>(station_count) * per_station_rate_bps;
}

namespace {

struct ParkedStrand {
    DataBlock block;
    BaseSequence strand;
};

// Decodes one fetch: route out, synthesize the readout, detect, segment,
// re-expand runs into symbols, decode bytes, route back.
struct FetchOutcome {
    CurrentTrace trace;
    DataBlock decoded;
    double readout_s = 0.0;
};

FetchOutcome read_back(const Scenario& sc, const ParkedStrand& spot, std::size_t command_index) {
    FetchOutcome out;

    AcquisitionParams acq = sc.acq;
    acq.rng_seed = mix64(sc.seed ^ mix64(command_index + 1));

    // Lead-in long enough that the rolling median stays pinned to the open
    // level even across the longest possible event.
    const double dt_us = acq.sample_interval_us;
    const auto event_samples = static_cast<std::size_t>(
        std::ceil(static_cast<double>(spot.strand.size()) * max_dwell_us(sc.pore) / dt_us));
    const std::size_t lead = event_samples + 1000;

    ScheduledEvent ev;
    ev.seq = spot.strand;
    ev.start_s = static_cast<double>(lead) * dt_us * 1e-6;
    ev.sequence_id = spot.block.block_id;
    out.trace = synthesize_trace({ev}, sc.pore, acq);
    out.readout_s = out.trace.annotations.front().end_s - out.trace.annotations.front().start_s;

    DetectorParams det;
    det.baseline_window = 2 * event_samples + 1001;
    det.expected_open_current_pa = sc.pore.open_current_pa;
    const auto events = detect_events(out.trace, det);
    if (events.size() != 1)
        throw Error("expected one blockade event, found " + std::to_string(events.size()));

    SegmentationParams segp;
    segp.min_segment_duration_us =
        0.6 * static_cast<double>(sc.run_length) * min_dwell_us(sc.pore);
    const auto segments = segment_event(out.trace, events.front(), sc.pore, segp);
    if (segments.empty())
        throw Error("no run segments recovered from the event");

    // Segmentation folds each slice of the mixing ramp from u to v toward the
    // bounding residual nearest to it (ties forward), so the boundary lands
    // midway between the last u-side and first v-side label zones. The ramp
    // fraction retained by the previous segment follows directly.
    auto ramp_fraction_retained = [&](Base u, Base v) {
        if (u == v) return 0.0;
        const double ru = sc.pore.residual(u);
        const double rv = sc.pore.residual(v);
        double last_u = ru;
        double first_v = rv;
        for (const Base b : {Base::A, Base::C, Base::G, Base::T}) {
            const double r = sc.pore.residual(b);
            const bool between = (ru < r && r < rv) || (rv < r && r < ru);
            if (!between) continue;
            if (std::abs(r - ru) < std::abs(r - rv)) {
                if (std::abs(r - ru) > std::abs(last_u - ru)) last_u = r;
            } else {
                if (std::abs(r - ru) < std::abs(first_v - ru)) first_v = r;
            }
        }
        return 0.5 * std::abs(last_u + first_v - 2.0 * ru) / std::abs(rv - ru);
    };

    // Undo the ramp attribution bias: each run keeps the slice of the
    // following ramp still labeled with its own base and loses the head of
    // its own entry ramp to the previous label. A corrected duration that
    // rounds to zero runs marks a transition artifact that slipped past
    // segmentation (a ramp crossing a middle label's zone, stretched past the
    // floor by noise); its time folds forward into the next run, mirroring
    // the segmentation tie rule, and the corrections are recomputed without
    // it so the neighbor's duration is not left short.
    struct RunEstimate {
        Base base;
        double raw_us;
        double corrected_us = 0.0;
    };
    const auto window = static_cast<double>(channel_window(sc.pore));
    const auto run_len = static_cast<double>(sc.run_length);
    auto run_estimates = [&](TranslocationDirection dir) {
        std::vector<RunEstimate> est;
        est.reserve(segments.size());
        for (const auto& s : segments) est.push_back({s.base, s.duration_us()});
        for (;;) {
            for (std::size_t i = 0; i < est.size(); ++i) {
                double d = est[i].raw_us;
                if (i > 0) {
                    d += ramp_fraction_retained(est[i - 1].base, est[i].base) * window *
                         sc.pore.dwell_us(est[i].base, dir);
                }
                if (i + 1 < est.size()) {
                    d -= ramp_fraction_retained(est[i].base, est[i + 1].base) * window *
                         sc.pore.dwell_us(est[i + 1].base, dir);
                }
                est[i].corrected_us = std::max(0.0, d);
            }
            if (est.size() < 2) return est;
            std::size_t artifact = est.size();
            for (std::size_t i = 0; i < est.size(); ++i) {
                const double run_us = run_len * sc.pore.dwell_us(est[i].base, dir);
                if (std::round(est[i].corrected_us / run_us) < 1.0) {
                    artifact = i;
                    break;
                }
            }
            if (artifact == est.size()) return est;
            const std::size_t into = artifact + 1 < est.size() ? artifact + 1 : artifact - 1;
            est[into].raw_us += est[artifact].raw_us;
            est.erase(est.begin() + static_cast<std::ptrdiff_t>(artifact));
        }
    };

    // The only direction-dependent dwell separates the two hypotheses: the
    // true direction makes every duration land near a multiple of one full
    // run. The error accumulates in microseconds; dividing out the dwell
    // first would shrink every error under the longer-dwell hypothesis and
    // bias the choice. The controller also knows how many runs it wrote to
    // the spot, the way a disk controller knows its sector size: a direction
    // whose totals disagree with that count loses outright.
    auto expand = [&](const std::vector<RunEstimate>& est, TranslocationDirection dir) {
        BaseSequence symbols;
        for (const RunEstimate& r : est) {
            const double run_us = run_len * sc.pore.dwell_us(r.base, dir);
            const auto runs =
                static_cast<std::size_t>(std::max(0.0, std::round(r.corrected_us / run_us)));
            symbols.insert(symbols.end(), runs, r.base);
        }
        return symbols;
    };
    auto rounding_error = [&](const std::vector<RunEstimate>& est, TranslocationDirection dir) {
        double err = 0.0;
        for (const RunEstimate& r : est) {
            const double run_us = run_len * sc.pore.dwell_us(r.base, dir);
            const double runs = std::round(r.corrected_us / run_us);
            err += std::abs(r.corrected_us - runs * run_us);
        }
        return err;
    };
    const auto fwd = TranslocationDirection::five_to_three;
    const auto rev = TranslocationDirection::three_to_five;
    const auto est_fwd = run_estimates(fwd);
    const auto est_rev = run_estimates(rev);
    const auto symbols_fwd = expand(est_fwd, fwd);
    const auto symbols_rev = expand(est_rev, rev);
    const std::size_t written_runs = spot.strand.size() / sc.run_length;
    const bool match_fwd = symbols_fwd.size() == written_runs;
    const bool match_rev = symbols_rev.size() == written_runs;
    bool pick_fwd;
    if (match_fwd != match_rev) {
        pick_fwd = match_fwd;
    } else {
        pick_fwd = rounding_error(est_fwd, fwd) <= rounding_error(est_rev, rev);
    }
    out.decoded = decode_block(pick_fwd ? symbols_fwd : symbols_rev, spot.block.block_id);
    return out;
}

} // namespace

RunReport run(const Scenario& scenario, const TraceSink& trace_sink) {
    scenario.validate();
    const ChipLayout& L = scenario.layout;
    const unsigned lines = address_line_count(L.spot_count);
    const double path_m = L.chip_side_cm * 1e-2; // travel across the full chip
    const double leg_s =
        L.valve_switch_latency_s * lines +
        access_time_s(path_m, scenario.particle, scenario.transport, scenario.field);

    RunReport rep;
    rep.station_utilization.assign(L.station_count, 0.0);
    rep.areal_density_bytes_per_cm2 = areal_density_bytes_per_cm2(L);
    rep.volumetric_density_bytes_per_cm3 = volumetric_density_bytes_per_cm3(L);
    rep.dwell_limited_rate_bps = 2.0 / (min_dwell_us(scenario.pore) * 1e-6);
    rep.station_parallel_ceiling_bps =
        parallel_station_rate_bps(L.station_count, rep.dwell_limited_rate_bps);
    rep.rate_comparison = "dwell-limited ceiling; order-of-magnitude comparison only";
    rep.bits_per_base_effective = 2.0 / static_cast<double>(scenario.run_length);

    std::vector<std::optional<ParkedStrand>> spots(L.spot_count);
    std::vector<double> station_clock(L.station_count, 0.0);
    std::vector<double> station_busy(L.station_count, 0.0);
    std::uint64_t fetched_bits = 0;

    for (std::size_t i = 0; i < scenario.workload.size(); ++i) {
        CommandResult res;
        res.index = i;
        try {
            if (const auto* sc = std::get_if<StoreCommand>(&scenario.workload[i])) {
                res.kind = "store";
                if (sc->block.payload.empty())
                    throw DomainError("store payload is empty");
                if (sc->block.payload.size() > L.block_bytes)
                    throw DomainError("store payload exceeds the per-spot capacity");
                std::uint64_t spot = L.spot_count;
                for (std::uint64_t j = 0; j < L.spot_count; ++j)
                    if (!spots[j]) {
                        spot = j;
                        break;
                    }
                if (spot == L.spot_count)
                    throw SchedulingError("chip is full: no free parking spot");
                res.address = spot;
                res.station = station_for_spot(L, spot);

                PhotochemicalStation station;
                write_sequence(station, run_length_encode(sc->block, scenario.run_length));
                ValveBank bank(lines);
                bank.apply(compute_route(L, spot, RouteDirection::to_spot));
                bank.clear_all();
                spots[spot] = ParkedStrand{sc->block, station.strand()};
                res.latency_s = station.elapsed_s() + leg_s + scenario.station_overhead_s;
            } else if (const auto* fc = std::get_if<FetchCommand>(&scenario.workload[i])) {
                res.kind = "fetch";
                res.address = fc->address;
                const Route to_station = compute_route(L, fc->address, RouteDirection::to_station);
                res.station = station_for_spot(L, fc->address);
                if (!spots[fc->address])
                    throw AddressingError("fetch of an empty parking spot");
                ValveBank bank(lines);
                bank.apply(to_station);

                const auto outcome = read_back(scenario, *spots[fc->address], i);
                if (trace_sink)
                    trace_sink(i, outcome.trace);

                bank.apply(compute_route(L, fc->address, RouteDirection::to_spot));
                bank.clear_all();

                const bool ok = outcome.decoded.payload == spots[fc->address]->block.payload;
                res.payload_ok = ok;
                if (ok)
                    fetched_bits += 8 * spots[fc->address]->block.payload.size();
                res.latency_s =
                    2.0 * leg_s + outcome.readout_s + scenario.station_overhead_s;
            } else {
                const auto& ec = std::get<EraseCommand>(scenario.workload[i]);
                res.kind = "erase";
                res.address = ec.address;
                compute_route(L, ec.address, RouteDirection::to_station);
                res.station = station_for_spot(L, ec.address);
                if (!spots[ec.address])
                    throw AddressingError("erase of an empty parking spot");
                spots[ec.address].reset();
                res.latency_s = leg_s + scenario.station_overhead_s;
            }
        } catch (const Error& e) {
            res.error = e.what();
            res.latency_s = 0.0;
            if (res.kind == "fetch")
                res.payload_ok = false;
        }
        if (res.payload_ok && !*res.payload_ok)
            rep.all_payloads_ok = false;

        res.start_s = station_clock[res.station];
        res.finish_s = res.start_s + res.latency_s;
        station_clock[res.station] = res.finish_s;
        station_busy[res.station] += res.latency_s;
        rep.commands.push_back(std::move(res));
    }

    rep.total_time_s =
        station_clock.empty() ? 0.0 : *std::max_element(station_clock.begin(), station_clock.end());
    if (rep.total_time_s > 0.0) {
        for (unsigned s = 0; s < L.station_count; ++s)
            rep.station_utilization[s] = station_busy[s] / rep.total_time_s;
        rep.aggregate_data_rate_bps = static_cast<double>(fetched_bits) / rep.total_time_s;
    }

    double lat_sum = 0.0;
    std::size_t lat_n = 0;
    for (const auto& c : rep.commands) {
        if (!c.error.empty())
            continue;
        if (lat_n == 0) {
            rep.min_latency_s = rep.max_latency_s = c.latency_s;
        } else {
            rep.min_latency_s = std::min(rep.min_latency_s, c.latency_s);
            rep.max_latency_s = std::max(rep.max_latency_s, c.latency_s);
        }
        lat_sum += c.latency_s;
        ++lat_n;
    }
    if (lat_n > 0)
        rep.mean_latency_s = lat_sum / static_cast<double>(lat_n);
    return rep;
}

nlohmann::json report_to_json(const RunReport& report) {
    nlohmann::json cmds = nlohmann::json::array();
    for (const auto& c : report.commands) {
        nlohmann::json j{{"index", c.index},
                         {"kind", c.kind},
                         {"station", c.station},
                         {"start_s", c.start_s},
                         {"finish_s", c.finish_s},
                         {"latency_s", c.latency_s},
                         {"error", c.error}};
        if (c.address)
            j["address"] = *c.address;
        if (c.payload_ok)
            j["payload_ok"] = *c.payload_ok;
        cmds.push_back(std::move(j));
    }
    return {{"commands", cmds},
            {"total_time_s", report.total_time_s},
            {"station_utilization", report.station_utilization},
            {"aggregate_data_rate_bps", report.aggregate_data_rate_bps},
            {"dwell_limited_rate_bps", report.dwell_limited_rate_bps},
            {"station_parallel_ceiling_bps", report.station_parallel_ceiling_bps},
            {"rate_comparison", report.rate_comparison},
            {"areal_density_bytes_per_cm2", report.areal_density_bytes_per_cm2},
            {"volumetric_density_bytes_per_cm3", report.volumetric_density_bytes_per_cm3},
            {"bits_per_base_ceiling", report.bits_per_base_ceiling},
            {"bits_per_base_effective", report.bits_per_base_effective},
            {"min_latency_s", report.min_latency_s},
            {"mean_latency_s", report.mean_latency_s},
            {"max_latency_s", report.max_latency_s},
            {"all_payloads_ok", report.all_payloads_ok}};
}

} // namespace molstore
