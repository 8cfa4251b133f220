#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "molstore/codec.hpp"
#include "molstore/errors.hpp"

namespace molstore {

// --- Photochemical write cycle -------------------------------------------
//
// Four blocked-base reservoirs around a main chamber. The growing strand is
// anchored in the chamber; per base the laser deblocks the free end, one
// reservoir gate opens, exactly one blocked base attaches, the gate closes.

struct CycleAction {
    enum class Kind { deblock, open_gate, attach, attach_failed, close_gate };
    Kind kind;
    std::optional<Base> base; // set for gate and attach actions
    std::uint64_t sequence_number = 0;
};

class PhotochemicalStation {
public:
    struct Config {
        BaseSequence precursor;                 // anchored seed strand
        double attach_failure_probability = 0.0;
        std::uint64_t rng_seed = 0;
        // Optional per-action durations for throughput what-ifs.
        double deblock_duration_s = 0.0;
        double gate_duration_s = 0.0;
        double attach_duration_s = 0.0;
    };

    PhotochemicalStation() : PhotochemicalStation(Config{}) {}
    explicit PhotochemicalStation(Config config);

    // Raw protocol actions. Illegal actions throw ProtocolViolation and leave
    // the station state untouched.
    void deblock();
    void open_gate(Base b);
    bool attach(Base b); // false when the stochastic attachment failed
    void close_gate(Base b);

    const BaseSequence& strand() const { return strand_; }
    bool end_blocked() const { return end_blocked_; }
    std::optional<Base> open_reservoir() const { return open_reservoir_; }
    const std::vector<CycleAction>& cycle_log() const { return log_; }
    double elapsed_s() const { return elapsed_s_; }

private:
    void record(CycleAction::Kind kind, std::optional<Base> base, double duration_s);

    Config config_;
    BaseSequence strand_;
    bool end_blocked_ = true;
    std::optional<Base> open_reservoir_;
    std::vector<CycleAction> log_;
    double elapsed_s_ = 0.0;
    std::mt19937_64 rng_;
};

// Runs the full cycle for every target base. Post: strand = precursor + target.
// Returns the station's cycle log.
const std::vector<CycleAction>& write_sequence(PhotochemicalStation& station,
                                               const BaseSequence& target);

// --- Activator / spacer precursor-strand scheme ---------------------------

enum class ActivatorKind { far_field_optical, near_field_optical, electric_tip };

struct ActivatorModel {
    ActivatorKind kind = ActivatorKind::far_field_optical;
    std::optional<double> wavelength_nm; // optical kinds
    std::optional<double> spot_size_nm;  // far-field default: wavelength / 2

    // Throws ConfigError when neither spot size nor (for far-field optics)
    // wavelength is given.
    double resolved_spot_size_nm() const;
};

// Spacers must keep neighbors outside the activator spot; they are only
// needed when the activator is larger than the active molecule itself.
double min_spacer_length_nm(const ActivatorModel& activator,
                            double active_molecule_size_nm = 1.0);

// 0 = ground (native) state; excited states are 1..state_count-1.
using SiteState = unsigned;

struct PrecursorStrand {
    std::vector<SiteState> sites;        // all ground on a fresh strand
    double spacer_length_nm = 100.0;
    double active_molecule_size_nm = 1.0;
    unsigned state_count = 2;            // >2 enables ternary/quaternary recording
    bool erasable = false;
    bool write_complete = false;

    static PrecursorStrand fresh(std::size_t site_count, double spacer_length_nm = 100.0,
                                 unsigned state_count = 2, bool erasable = false);

    std::size_t excited_count() const;
};

struct ActivationRecord {
    std::uint64_t sequence_number = 0;
    std::size_t site = 0;
    bool energized = false;
    SiteState level = 0;
};

struct ActivationResult {
    PrecursorStrand strand;
    std::vector<ActivationRecord> schedule; // one pull per site, in order
};

// Pulls the strand site-by-site under the activator; site i ends excited at
// digits[i] (digit '0' leaves the activator off). Write-once: a site already
// excited at a different level raises ProtocolViolation. Throws
// AdjacencyError when the spacers are shorter than the activator requires.
ActivationResult activate_pattern(const PrecursorStrand& strand, const std::string& digits,
                                  const ActivatorModel& activator);

// Removes the spacers; returns site states in their original order. The
// write pass must have completed first.
std::vector<SiteState> splice(const PrecursorStrand& strand);

enum class EraseMode { destroy_and_rewrite, reverse_excitation };

struct DisposalRecord {
    std::size_t site_count = 0;
    bool spot_freed = true;
};

using EraseResult = std::variant<PrecursorStrand, DisposalRecord>;

// destroy_and_rewrite always works and frees the parking spot;
// reverse_excitation needs an erasable strand and resets every site to ground.
EraseResult erase_block(EraseMode mode, const PrecursorStrand& strand);

} // namespace molstore
