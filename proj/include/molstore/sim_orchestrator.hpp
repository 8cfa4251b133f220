#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "molstore/chip_topology.hpp"
#include "molstore/codec.hpp"
#include "molstore/config.hpp"
#include "molstore/nanopore.hpp"
#include "molstore/transport_physics.hpp"

namespace molstore {

struct StoreCommand {
    DataBlock block;
};
struct FetchCommand {
    std::uint64_t address = 0;
};
struct EraseCommand {
    std::uint64_t address = 0;
};
using Command = std::variant<StoreCommand, FetchCommand, EraseCommand>;

// Full system description plus an ordered workload.
//
// Blocks are stored as homopolymer runs: every 2-bit symbol becomes
// run_length identical bases, long enough for the segment-level decoder to
// resolve. The 2 bits/base figure stays in the report as the ceiling.
struct Scenario {
    ChipLayout layout;
    PoreModel pore;
    AcquisitionParams acq;
    TransportMode transport;
    FieldParams field;
    ParticleModel particle;
    FluidParams fluid;
    std::vector<Command> workload;
    std::uint64_t seed = 1;
    std::size_t run_length = 120; // bases per stored symbol
    double station_overhead_s = 0.0;

    void validate() const;
    static Scenario from_config(const KeyValueConfig& cfg);
    static Scenario from_file(const std::string& path);
};

struct CommandResult {
    std::size_t index = 0;
    std::string kind; // "store" | "fetch" | "erase"
    std::optional<std::uint64_t> address;
    unsigned station = 0;
    double start_s = 0.0;  // station timeline
    double finish_s = 0.0;
    double latency_s = 0.0;
    std::optional<bool> payload_ok; // fetches only
    std::string error;              // empty = command succeeded
};

struct RunReport {
    std::vector<CommandResult> commands;
    double total_time_s = 0.0;
    std::vector<double> station_utilization; // busy fraction per station
    double aggregate_data_rate_bps = 0.0;    // fetched payload bits / total time
    double dwell_limited_rate_bps = 0.0;     // per station, 2 bits / shortest dwell
    double station_parallel_ceiling_bps = 0.0;
    std::string rate_comparison;
    double areal_density_bytes_per_cm2 = 0.0;
    double volumetric_density_bytes_per_cm3 = 0.0;
    double bits_per_base_ceiling = 2.0;
    double bits_per_base_effective = 0.0; // 2 / run_length
    double min_latency_s = 0.0;
    double mean_latency_s = 0.0;
    double max_latency_s = 0.0;
    bool all_payloads_ok = true;
};

using TraceSink = std::function<void(std::size_t command_index, const CurrentTrace& trace)>;

// Executes the workload in order. Stores pick the lowest free spot; fetches
// route the strand to its station, synthesize and decode a readout trace and
// route it back. Addressing and decode failures land in the per-command
// error field without aborting the run. Deterministic for a given seed.
RunReport run(const Scenario& scenario, const TraceSink& trace_sink = {});

// Aggregate ceiling across stations; spots are partitioned round-robin, so
// stations scale without queueing. Throws DomainError when station_count is 0.
double parallel_station_rate_bps(unsigned station_count, double per_station_rate_bps);

// Expands a payload into its parked strand: 4 symbols per byte, run_length
// bases per symbol.
BaseSequence run_length_encode(const DataBlock& block, std::size_t run_length);

nlohmann::json report_to_json(const RunReport& report);

} // namespace molstore
