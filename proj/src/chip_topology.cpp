#include "molstore/chip_topology.hpp"

#include <bit>
#include <string>

namespace molstore {

ChipLayout ChipLayout::from_config(const KeyValueConfig& cfg) {
    ChipLayout layout;
    layout.spot_count = cfg.get_uint("spot_count", layout.spot_count);
    layout.spot_pitch_um = cfg.get_double("spot_pitch_um", layout.spot_pitch_um);
    layout.chip_side_cm = cfg.get_double("chip_side_cm", layout.chip_side_cm);
    layout.layer_thickness_um = cfg.get_double("layer_thickness_um", layout.layer_thickness_um);
    layout.block_bytes = cfg.get_uint("block_bytes", layout.block_bytes);
    layout.station_count = static_cast<unsigned>(cfg.get_uint("station_count", layout.station_count));
    layout.valve_switch_latency_s = cfg.get_double("valve_switch_latency_s", layout.valve_switch_latency_s);
    layout.validate();
    return layout;
}

void ChipLayout::validate() const {
    if (spot_count == 0 || !std::has_single_bit(spot_count)) {
        throw InvalidLayoutError("spot_count must be a power of two, got " +
                                 std::to_string(spot_count));
    }
    if (spot_pitch_um <= 0 || chip_side_cm <= 0 || layer_thickness_um <= 0) {
        throw InvalidLayoutError("geometric parameters must be positive");
    }
    if (station_count < 1) {
        throw InvalidLayoutError("station_count must be >= 1");
    }
    const double chip_area_um2 = chip_area_cm2() * 1e8; // 1 cm2 = 1e8 um2
    if (footprint_um2() > chip_area_um2 * (1.0 + 1e-12)) {
        throw InvalidLayoutError("parking spots exceed the chip area");
    }
}

double ChipLayout::footprint_um2() const {
    return static_cast<double>(spot_count) * spot_pitch_um * spot_pitch_um;
}

double ChipLayout::total_bytes() const {
    return static_cast<double>(spot_count) * static_cast<double>(block_bytes);
}

unsigned address_line_count(std::uint64_t spot_count) {
    if (spot_count == 0 || !std::has_single_bit(spot_count)) {
        throw InvalidLayoutError("spot_count must be a power of two, got " +
                                 std::to_string(spot_count));
    }
    return static_cast<unsigned>(std::bit_width(spot_count) - 1);
}

Route compute_route(const ChipLayout& layout, std::uint64_t spot_address,
                    RouteDirection direction) {
    if (spot_address >= layout.spot_count) {
        throw AddressingError("spot address " + std::to_string(spot_address) +
                              " out of range for " + std::to_string(layout.spot_count) +
                              " spots");
    }
    const unsigned lines = address_line_count(layout.spot_count);
    Route route;
    route.spot_address = spot_address;
    route.direction = direction;
    route.valve_commands.reserve(lines);
    for (unsigned depth = 0; depth < lines; ++depth) {
        const unsigned bit_index = lines - 1 - depth; // MSB at the station
        const bool bit = (spot_address >> bit_index) & 1ULL;
        route.valve_commands.push_back(
            {depth, bit ? ValveCommand::energized : ValveCommand::relaxed});
    }
    return route;
}

unsigned station_for_spot(const ChipLayout& layout, std::uint64_t spot_address) {
    if (spot_address >= layout.spot_count) {
        throw AddressingError("spot address " + std::to_string(spot_address) +
                              " out of range");
    }
    return static_cast<unsigned>(spot_address % layout.station_count);
}

// Density figures are pure geometry: they also cover spot counts that are
// not routable powers of two (e.g. the headline 10^6-spot estimate).
double areal_density_bytes_per_cm2(const ChipLayout& layout) {
    if (layout.spot_count == 0 || layout.chip_side_cm <= 0) {
        throw InvalidLayoutError("density needs a populated chip with positive area");
    }
    return layout.total_bytes() / layout.chip_area_cm2();
}

double volumetric_density_bytes_per_cm3(const ChipLayout& layout) {
    if (layout.layer_thickness_um <= 0) {
        throw InvalidLayoutError("layer thickness must be positive");
    }
    const double layers_per_cm = 1e4 / layout.layer_thickness_um;
    return areal_density_bytes_per_cm2(layout) * layers_per_cm;
}

void ValveBank::apply(const Route& route) {
    if (route.valve_commands.size() != commands_.size()) {
        throw AddressingError("route has " + std::to_string(route.valve_commands.size()) +
                              " commands for a " + std::to_string(commands_.size()) +
                              "-line valve bank");
    }
    for (const ValveState& v : route.valve_commands) {
        commands_.at(v.valve_id) = v.command;
    }
}

void ValveBank::clear_all() {
    for (auto& c : commands_) c = ValveCommand::relaxed;
}

} // namespace molstore
