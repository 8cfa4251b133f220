#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "molstore/chip_topology.hpp"
#include "molstore/codec.hpp"
#include "molstore/config.hpp"
#include "molstore/errors.hpp"
#include "molstore/event_decoder.hpp"
#include "molstore/nanopore.hpp"
#include "molstore/sim_orchestrator.hpp"
#include "molstore/trace_io.hpp"
#include "molstore/transport_physics.hpp"
#include "molstore/write_station.hpp"

namespace {

using nlohmann::json;

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw molstore::ConfigError("cannot open input file: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_binary_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw molstore::ConfigError("cannot open output file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw molstore::ConfigError("failed writing output file: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw molstore::ConfigError("cannot open input file: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out)
        throw molstore::ConfigError("cannot open output file: " + path);
    out << text;
    if (!out)
        throw molstore::ConfigError("failed writing output file: " + path);
}

molstore::KeyValueConfig load_config(const std::string& path) {
    if (path.empty())
        return molstore::KeyValueConfig::parse_text("");
    return molstore::KeyValueConfig::parse_file(path);
}

int cmd_encode(const std::string& in, const std::string& out) {
    molstore::DataBlock block{read_binary_file(in), 0};
    write_text_file(out, molstore::sequence_to_string(molstore::encode_block(block)) + "\n");
    return 0;
}

int cmd_decode(const std::string& in, const std::string& out) {
    const auto seq = molstore::sequence_from_string(read_text_file(in));
    write_binary_file(out, molstore::decode_block(seq).payload);
    return 0;
}

int cmd_layout(const std::string& config_path) {
    auto layout = molstore::ChipLayout::from_config(load_config(config_path));
    layout.validate();
    const json doc{
        {"spot_count", layout.spot_count},
        {"spot_pitch_um", layout.spot_pitch_um},
        {"chip_side_cm", layout.chip_side_cm},
        {"layer_thickness_um", layout.layer_thickness_um},
        {"block_bytes", layout.block_bytes},
        {"station_count", layout.station_count},
        {"address_line_count", molstore::address_line_count(layout.spot_count)},
        {"chip_area_cm2", layout.chip_area_cm2()},
        {"spot_footprint_um2", layout.footprint_um2()},
        {"total_bytes", layout.total_bytes()},
        {"areal_density_bytes_per_cm2", molstore::areal_density_bytes_per_cm2(layout)},
        {"volumetric_density_bytes_per_cm3", molstore::volumetric_density_bytes_per_cm3(layout)},
    };
    std::cout << doc.dump(2) << '\n';
    return 0;
}

int cmd_physics(const std::string& config_path) {
    const auto cfg = load_config(config_path);
    const auto fluid = molstore::FluidParams::from_config(cfg);
    const auto particle = molstore::ParticleModel::from_config(cfg);
    const auto field = molstore::FieldParams::from_config(cfg);

    const double reynolds = molstore::reynolds_number(fluid, particle);
    const double drag_n = molstore::stokes_drag_n(fluid, particle);
    const double charge_c = molstore::required_charge_c(drag_n, field);
    const double bases = molstore::bases_for_charge(charge_c, particle.charge_per_base_c);
    const double capacity_mb = 2.0 * bases / 8.0 / 1e6;

    molstore::TransportMode ideal{molstore::TransportKind::idealized_sphere, 1e3, {}};
    molstore::TransportMode gel{molstore::TransportKind::empirical_gel,
                                cfg.get_double("empirical_slowdown", 1e3), {}};
    const double path_m = field.electrode_gap_m;

    const json doc{
        {"fluid",
         {{"density_kg_m3", fluid.density_kg_m3},
          {"viscosity_ns_m2", fluid.viscosity_ns_m2},
          {"temperature_c", fluid.temperature_c}}},
        {"particle",
         {{"radius_m", particle.radius_m},
          {"speed_m_s", particle.speed_m_s},
          {"charge_per_base_c", particle.charge_per_base_c}}},
        {"field_v_m", field.field_v_m()},
        {"reynolds", {{"computed", reynolds}, {"nominal", 10.0}}},
        {"stokes_regime_ok", molstore::stokes_regime_ok(fluid, particle)},
        {"stokes_drag_n", {{"computed", drag_n}, {"nominal", 1e-7}}},
        {"required_charge_c", {{"computed", charge_c}, {"nominal", 1e-10}}},
        {"bases_per_molecule", {{"computed", bases}, {"nominal", 2.5e8}}},
        {"block_capacity_mb", {{"computed", capacity_mb}, {"nominal", 60.0}}},
        {"access_time_s",
         {{"idealized", molstore::access_time_s(path_m, particle, ideal, field)},
          {"empirical_gel", molstore::access_time_s(path_m, particle, gel, field)}}},
        {"dwell_limited_rate_bps", 2.0 / 1.5e-6},
    };
    std::cout << doc.dump(2) << '\n';
    return 0;
}

int cmd_synth(const std::string& seq_path, const std::string& pore_path,
              const std::string& acq_path, const std::string& out_path, double start_s,
              const std::string& direction) {
    const auto seq = molstore::sequence_from_string(read_text_file(seq_path));
    const auto pore = molstore::PoreModel::from_config(load_config(pore_path));
    const auto acq = molstore::AcquisitionParams::from_config(load_config(acq_path));

    molstore::ScheduledEvent ev;
    ev.seq = seq;
    if (direction == "fwd")
        ev.direction = molstore::TranslocationDirection::five_to_three;
    else if (direction == "rev")
        ev.direction = molstore::TranslocationDirection::three_to_five;
    else if (direction != "auto")
        throw molstore::ConfigError("direction must be auto, fwd or rev");

    if (start_s >= 0.0) {
        ev.start_s = start_s;
    } else {
        // Default lead-in: room for the event plus a full baseline window.
        double worst_dwell = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            worst_dwell = std::max({worst_dwell, pore.dwell_fwd_us[i], pore.dwell_rev_us[i]});
        const double event_us = static_cast<double>(seq.size()) * worst_dwell;
        ev.start_s = (event_us + 1000.0 * acq.sample_interval_us) * 1e-6;
    }

    const auto trace = molstore::synthesize_trace({ev}, pore, acq);
    molstore::write_trace_csv(trace, out_path);
    molstore::write_annotations_json(trace, out_path + ".annotations.json");
    std::cout << "wrote " << trace.size() << " samples to " << out_path << '\n';
    return 0;
}

int cmd_detect(const std::string& trace_path, const std::string& out_path,
               const std::string& pore_path, double threshold, double min_duration_us,
               std::size_t baseline_window, double expected_open) {
    const auto trace = molstore::read_trace_csv(trace_path);
    const auto pore = molstore::PoreModel::from_config(load_config(pore_path));

    molstore::DetectorParams params;
    params.threshold_fraction = threshold;
    params.min_duration_us = min_duration_us;
    params.baseline_window = baseline_window;
    if (expected_open > 0.0)
        params.expected_open_current_pa = expected_open;

    const auto events = molstore::detect_events(trace, params);

    json event_docs = json::array();
    for (const auto& ev : events) {
        const auto cls = molstore::classify_homopolymer(ev, pore);
        json j{{"start_s", ev.start_s},
               {"end_s", ev.end_s},
               {"duration_us", ev.duration_us()},
               {"mean_blocked_current_pa", ev.mean_blocked_current_pa},
               {"baseline_pa", ev.baseline_pa},
               {"depth_fraction", ev.depth_fraction},
               {"confidence", cls.confidence}};
        if (cls.base)
            j["classified_base"] = std::string(1, molstore::base_to_char(*cls.base));
        if (cls.base) {
            const auto dir = molstore::resolve_direction(ev, *cls.base, pore, std::nullopt);
            j["estimated_base_count"] = molstore::estimate_base_count(ev, *cls.base, pore, dir);
        }
        event_docs.push_back(std::move(j));
    }

    json params_doc{{"threshold_fraction", params.threshold_fraction},
                    {"min_duration_us", params.min_duration_us},
                    {"baseline_window", params.baseline_window}};
    if (params.expected_open_current_pa)
        params_doc["expected_open_current_pa"] = *params.expected_open_current_pa;

    molstore::write_json_file(json{{"detector", params_doc}, {"events", event_docs}}, out_path);
    std::cout << "detected " << events.size() << " events\n";
    return 0;
}

const char* action_name(molstore::CycleAction::Kind kind) {
    using Kind = molstore::CycleAction::Kind;
    switch (kind) {
    case Kind::deblock: return "deblock";
    case Kind::open_gate: return "open_gate";
    case Kind::attach: return "attach";
    case Kind::attach_failed: return "attach_failed";
    case Kind::close_gate: return "close_gate";
    }
    return "?";
}

int cmd_write_sim(const std::string& target_path, const std::string& scheme,
                  const std::string& log_path, double attach_failure, std::uint64_t seed) {
    const auto target = molstore::sequence_from_string(read_text_file(target_path));
    json doc{{"scheme", scheme}, {"target_length", target.size()}};

    if (scheme == "photochemical") {
        molstore::PhotochemicalStation::Config cfg;
        cfg.attach_failure_probability = attach_failure;
        cfg.rng_seed = seed;
        molstore::PhotochemicalStation station(cfg);
        molstore::write_sequence(station, target);

        json actions = json::array();
        for (const auto& a : station.cycle_log()) {
            json j{{"sequence_number", a.sequence_number}, {"action", action_name(a.kind)}};
            if (a.base)
                j["base"] = std::string(1, molstore::base_to_char(*a.base));
            actions.push_back(std::move(j));
        }
        doc["actions"] = std::move(actions);
        doc["strand"] = molstore::sequence_to_string(station.strand());
        doc["elapsed_s"] = station.elapsed_s();
    } else if (scheme == "activator") {
        // Sites carry one of four excited levels (base value + 1); level 0
        // stays reserved for unwritten sites.
        auto strand = molstore::PrecursorStrand::fresh(target.size(), 200.0, 5, false);
        molstore::ActivatorModel activator;
        activator.wavelength_nm = 400.0;

        std::string digits;
        for (auto b : target)
            digits.push_back(static_cast<char>('1' + static_cast<int>(b)));
        const auto result = molstore::activate_pattern(strand, digits, activator);

        json actions = json::array();
        for (const auto& rec : result.schedule) {
            actions.push_back(json{{"sequence_number", rec.sequence_number},
                                   {"site", rec.site},
                                   {"energized", rec.energized},
                                   {"level", rec.level}});
        }
        doc["actions"] = std::move(actions);
        doc["spot_size_nm"] = activator.resolved_spot_size_nm();
        doc["spacer_length_nm"] = strand.spacer_length_nm;
        doc["site_states"] = molstore::splice(result.strand);
    } else {
        throw molstore::ConfigError("scheme must be photochemical or activator");
    }

    molstore::write_json_file(doc, log_path);
    std::cout << "wrote action log to " << log_path << '\n';
    return 0;
}

int cmd_run(const std::string& scenario_path, const std::string& report_path,
            const std::string& traces_dir) {
    const auto scenario = molstore::Scenario::from_file(scenario_path);

    molstore::TraceSink sink;
    if (!traces_dir.empty()) {
        std::filesystem::create_directories(traces_dir);
        sink = [&traces_dir](std::size_t index, const molstore::CurrentTrace& trace) {
            const auto stem =
                (std::filesystem::path(traces_dir) / ("trace_" + std::to_string(index))).string();
            molstore::write_trace_csv(trace, stem + ".csv");
            molstore::write_annotations_json(trace, stem + ".annotations.json");
        };
    }

    const auto report = molstore::run(scenario, sink);
    molstore::write_json_file(molstore::report_to_json(report), report_path);

    std::size_t fetches = 0, ok = 0;
    for (const auto& c : report.commands)
        if (c.payload_ok) {
            ++fetches;
            if (*c.payload_ok)
                ++ok;
        }
    std::cout << report.commands.size() << " commands, " << ok << "/" << fetches
              << " payload checks passed, total " << report.total_time_s << " s\n";
    return report.all_payloads_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale macromolecular data storage simulator"};
    app.require_subcommand(1);

    std::string in_path, out_path, config_path, seq_path, pore_path, acq_path;
    std::string trace_path, target_path, scheme = "photochemical", log_path;
    std::string scenario_path, report_path, traces_dir, direction = "auto";
    double start_s = -1.0, threshold = 0.5, min_duration_us = 10.0, expected_open = 0.0;
    double attach_failure = 0.0;
    std::size_t baseline_window = 1000;
    std::uint64_t seed = 1;
    bool report_flag = false;

    auto* enc = app.add_subcommand("encode", "payload bytes to a base sequence");
    enc->add_option("--in", in_path)->required();
    enc->add_option("--out", out_path)->required();

    auto* dec = app.add_subcommand("decode", "base sequence back to payload bytes");
    dec->add_option("--in", in_path)->required();
    dec->add_option("--out", out_path)->required();

    auto* lay = app.add_subcommand("layout", "chip layout derived figures");
    lay->add_option("--config", config_path);
    lay->add_flag("--report", report_flag);

    auto* phy = app.add_subcommand("physics", "transport derivation chain");
    phy->add_option("--config", config_path);
    phy->add_flag("--report", report_flag);

    auto* syn = app.add_subcommand("synth", "synthesize a readout trace");
    syn->add_option("--seq", seq_path)->required();
    syn->add_option("--pore", pore_path);
    syn->add_option("--acq", acq_path);
    syn->add_option("--out", out_path)->required();
    syn->add_option("--start-s", start_s);
    syn->add_option("--direction", direction)->check(CLI::IsMember({"auto", "fwd", "rev"}));

    auto* det = app.add_subcommand("detect", "find blockade events in a trace");
    det->add_option("--trace", trace_path)->required();
    det->add_option("--out", out_path)->required();
    det->add_option("--pore", pore_path);
    det->add_option("--threshold", threshold);
    det->add_option("--min-duration-us", min_duration_us);
    det->add_option("--baseline-window", baseline_window);
    det->add_option("--expected-open-pa", expected_open);

    auto* wrs = app.add_subcommand("write-sim", "simulate a write protocol");
    wrs->add_option("--target", target_path)->required();
    wrs->add_option("--scheme", scheme)->check(CLI::IsMember({"photochemical", "activator"}));
    wrs->add_option("--log", log_path)->required();
    wrs->add_option("--attach-failure", attach_failure);
    wrs->add_option("--seed", seed);

    auto* run = app.add_subcommand("run", "execute a scenario end to end");
    run->add_option("--scenario", scenario_path)->required();
    run->add_option("--report", report_path)->required();
    run->add_option("--traces", traces_dir);

    CLI11_PARSE(app, argc, argv);

    try {
        if (enc->parsed())
            return cmd_encode(in_path, out_path);
        if (dec->parsed())
            return cmd_decode(in_path, out_path);
        if (lay->parsed())
            return cmd_layout(config_path);
        if (phy->parsed())
            return cmd_physics(config_path);
        if (syn->parsed())
            return cmd_synth(seq_path, pore_path, acq_path, out_path, start_s, direction);
        if (det->parsed())
            return cmd_detect(trace_path, out_path, pore_path, threshold, min_duration_us,
                              baseline_window, expected_open);
        if (wrs->parsed())
            return cmd_write_sim(target_path, scheme, log_path, attach_failure, seed);
        if (run->parsed())
            return cmd_run(scenario_path, report_path, traces_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
