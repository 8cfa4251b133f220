#pragma once

#include <cstdint>
#include <vector>

#include "molstore/config.hpp"
#include "molstore/errors.hpp"

namespace molstore {

// Parking-spot grid with a binary valve tree connecting every spot to the
// read/write station(s).
struct ChipLayout {
    std::uint64_t spot_count = 16;      // must be a power of two
    double spot_pitch_um = 10.0;        // side of one parking spot
    double chip_side_cm = 1.0;
    double layer_thickness_um = 10.0;   // for stacked-layer volumetric figures
    std::uint64_t block_bytes = 1'000'000; // payload per parking spot
    unsigned station_count = 1;
    double valve_switch_latency_s = 0.0;

    static ChipLayout from_config(const KeyValueConfig& cfg);

    // Throws InvalidLayoutError when spot_count is not a power of two or the
    // spots do not fit on the chip.
    void validate() const;

    double chip_area_cm2() const { return chip_side_cm * chip_side_cm; }
    double footprint_um2() const;
    double total_bytes() const;
};

enum class ValvePosition { outlet1, outlet2 };
enum class ValveCommand { relaxed, energized };

// Spring-return valve: relaxed => outlet1, energized => outlet2.
struct ValveState {
    std::uint32_t valve_id = 0; // tree depth, 0 = nearest the station
    ValveCommand command = ValveCommand::relaxed;

    ValvePosition position() const {
        return command == ValveCommand::energized ? ValvePosition::outlet2
                                                  : ValvePosition::outlet1;
    }
};

enum class RouteDirection { to_station, to_spot };

struct Route {
    std::uint64_t spot_address = 0;
    std::vector<ValveState> valve_commands; // one per address line, MSB first
    RouteDirection direction = RouteDirection::to_spot;
};

// log2(spot_count); throws InvalidLayoutError for non powers of two.
unsigned address_line_count(std::uint64_t spot_count);

// Big-endian bit decomposition of the address into valve commands, most
// significant bit at the valve nearest the station.
Route compute_route(const ChipLayout& layout, std::uint64_t spot_address,
                    RouteDirection direction);

// Round-robin partition of spots among stations.
unsigned station_for_spot(const ChipLayout& layout, std::uint64_t spot_address);

double areal_density_bytes_per_cm2(const ChipLayout& layout);
double volumetric_density_bytes_per_cm3(const ChipLayout& layout);

// One command line per valve depth; energizing line d switches every valve at
// depth d on the path. Clearing all lines spring-returns to all-outlet1.
class ValveBank {
public:
    explicit ValveBank(unsigned line_count)
        : commands_(line_count, ValveCommand::relaxed) {}

    unsigned line_count() const { return static_cast<unsigned>(commands_.size()); }
    ValveCommand command(unsigned line) const { return commands_.at(line); }
    ValvePosition position(unsigned line) const {
        return commands_.at(line) == ValveCommand::energized ? ValvePosition::outlet2
                                                             : ValvePosition::outlet1;
    }

    void apply(const Route& route);
    void clear_all();

private:
    std::vector<ValveCommand> commands_;
};

} // namespace molstore
