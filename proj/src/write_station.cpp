#include "molstore/write_station.hpp"

#include <algorithm>

namespace molstore {

PhotochemicalStation::PhotochemicalStation(Config config)
    : config_(std::move(config)), strand_(config_.precursor), rng_(config_.rng_seed) {
    if (config_.attach_failure_probability < 0.0 || config_.attach_failure_probability >= 1.0)
        throw ConfigError("attach failure probability must be in [0, 1)");
}

void PhotochemicalStation::record(CycleAction::Kind kind, std::optional<Base> base,
                                  double duration_s) {
    log_.push_back({kind, base, static_cast<std::uint64_t>(log_.size())});
    elapsed_s_ += duration_s;
}

void PhotochemicalStation::deblock() {
    if (!end_blocked_)
        throw ProtocolViolation("deblock: blocking group already removed");
    end_blocked_ = false;
    record(CycleAction::Kind::deblock, std::nullopt, config_.deblock_duration_s);
}

void PhotochemicalStation::open_gate(Base b) {
    if (open_reservoir_)
        throw ProtocolViolation("open_gate: another reservoir gate is already open");
    open_reservoir_ = b;
    record(CycleAction::Kind::open_gate, b, config_.gate_duration_s);
}

bool PhotochemicalStation::attach(Base b) {
    if (!open_reservoir_ || *open_reservoir_ != b)
        throw ProtocolViolation("attach: reservoir gate for that base is not open");
    if (end_blocked_)
        throw ProtocolViolation("attach: strand end is still blocked");
    if (config_.attach_failure_probability > 0.0) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        if (u(rng_) < config_.attach_failure_probability) {
            record(CycleAction::Kind::attach_failed, b, config_.attach_duration_s);
            return false;
        }
    }
    strand_.push_back(b);
    end_blocked_ = true; // the incoming monomer carries the next blocking group
    record(CycleAction::Kind::attach, b, config_.attach_duration_s);
    return true;
}

void PhotochemicalStation::close_gate(Base b) {
    if (!open_reservoir_ || *open_reservoir_ != b)
        throw ProtocolViolation("close_gate: that reservoir gate is not open");
    open_reservoir_.reset();
    record(CycleAction::Kind::close_gate, b, config_.gate_duration_s);
}

const std::vector<CycleAction>& write_sequence(PhotochemicalStation& station,
                                               const BaseSequence& target) {
    for (Base b : target) {
        station.deblock();
        station.open_gate(b);
        while (!station.attach(b)) {
        }
        station.close_gate(b);
    }
    return station.cycle_log();
}

double ActivatorModel::resolved_spot_size_nm() const {
    if (spot_size_nm) {
        if (*spot_size_nm <= 0.0)
            throw ConfigError("activator spot size must be positive");
        return *spot_size_nm;
    }
    if (kind == ActivatorKind::far_field_optical) {
        if (!wavelength_nm || *wavelength_nm <= 0.0)
            throw ConfigError("far-field activator needs a wavelength (diffraction limit)");
        return *wavelength_nm / 2.0;
    }
    throw ConfigError("near-field and tip activators need an explicit spot size");
}

double min_spacer_length_nm(const ActivatorModel& activator, double active_molecule_size_nm) {
    if (active_molecule_size_nm <= 0.0)
        throw ConfigError("active molecule size must be positive");
    return std::max(activator.resolved_spot_size_nm(), active_molecule_size_nm);
}

PrecursorStrand PrecursorStrand::fresh(std::size_t site_count, double spacer_length_nm,
                                       unsigned state_count, bool erasable) {
    if (state_count < 2)
        throw ConfigError("precursor sites need at least two states");
    PrecursorStrand s;
    s.sites.assign(site_count, 0);
    s.spacer_length_nm = spacer_length_nm;
    s.state_count = state_count;
    s.erasable = erasable;
    return s;
}

std::size_t PrecursorStrand::excited_count() const {
    return static_cast<std::size_t>(
        std::count_if(sites.begin(), sites.end(), [](SiteState s) { return s != 0; }));
}

ActivationResult activate_pattern(const PrecursorStrand& strand, const std::string& digits,
                                  const ActivatorModel& activator) {
    if (digits.size() != strand.sites.size())
        throw DomainError("activation pattern length does not match site count");
    const double needed = min_spacer_length_nm(activator, strand.active_molecule_size_nm);
    if (strand.spacer_length_nm < needed)
        throw AdjacencyError("spacer too short: activator would excite neighboring sites");

    ActivationResult out{strand, {}};
    out.schedule.reserve(digits.size());
    for (std::size_t i = 0; i < digits.size(); ++i) {
        const char d = digits[i];
        if (d < '0' || d > '9')
            throw DomainError("activation pattern digits must be 0-9");
        const auto level = static_cast<SiteState>(d - '0');
        if (level >= strand.state_count)
            throw DomainError("activation level exceeds the strand's state count");
        if (level != 0) {
            SiteState& site = out.strand.sites[i];
            if (site != 0 && site != level)
                throw ProtocolViolation("site already excited at a different level");
            site = level;
        }
        out.schedule.push_back({static_cast<std::uint64_t>(i), i, level != 0, level});
    }
    out.strand.write_complete = true;
    return out;
}

std::vector<SiteState> splice(const PrecursorStrand& strand) {
    if (!strand.sites.empty() && !strand.write_complete)
        throw ProtocolViolation("splice before the write pass completed");
    return strand.sites;
}

EraseResult erase_block(EraseMode mode, const PrecursorStrand& strand) {
    if (mode == EraseMode::destroy_and_rewrite)
        return DisposalRecord{strand.sites.size(), true};
    if (!strand.erasable)
        throw CapabilityError("strand does not support reverse excitation");
    PrecursorStrand reset = strand;
    std::fill(reset.sites.begin(), reset.sites.end(), 0);
    reset.write_complete = false;
    return reset;
}

} // namespace molstore
