#pragma once

#include <optional>

#include "molstore/config.hpp"
#include "molstore/errors.hpp"

namespace molstore {

struct FluidParams {
    double density_kg_m3 = 1e3;
    double viscosity_ns_m2 = 1e-3;
    double temperature_c = 20.0; // informational

    static FluidParams from_config(const KeyValueConfig& cfg);
};

struct ParticleModel {
    double radius_m = 5e-7;
    double speed_m_s = 10.0;
    double charge_per_base_c = 4e-19; // ~2.5 electrons per base

    static ParticleModel from_config(const KeyValueConfig& cfg);
};

struct FieldParams {
    double applied_voltage_v = 10.0;
    double electrode_gap_m = 1e-2;

    double field_v_m() const;

    static FieldParams from_config(const KeyValueConfig& cfg);
};

enum class TransportKind { idealized_sphere, empirical_gel, vesicle };

struct TransportMode {
    TransportKind kind = TransportKind::idealized_sphere;
    double empirical_slowdown = 1e3;               // >= 1
    std::optional<double> vesicle_mobility_m2_vs;  // required in vesicle mode

    static TransportMode from_config(const KeyValueConfig& cfg);
};

// R = 2*rho*V*r0/eta. Dimensionless.
double reynolds_number(const FluidParams& fluid, const ParticleModel& particle);

// Stokes-regime check: the drag formula assumes R of order 10 or less.
bool stokes_regime_ok(const FluidParams& fluid, const ParticleModel& particle);

// F = 6*pi*eta*r0*V.
double stokes_drag_n(const FluidParams& fluid, const ParticleModel& particle);

// q = F/E. Throws DomainError when the field is not positive.
double required_charge_c(double drag_n, const FieldParams& field);

// Base count carrying charge q at charge_per_base each.
double bases_for_charge(double charge_c, double charge_per_base_c);

// Spot-to-station travel time for one transfer.
// idealized_sphere: path/V; empirical_gel: slowdown*path/V;
// vesicle: path/(mobility*E).
double access_time_s(double path_length_m, const ParticleModel& particle,
                     const TransportMode& mode, const FieldParams& field = {});

struct PumpRate {
    double frequency_hz = 0.0;
    bool extrapolated = false; // power outside the measured 3.0..9.0 mW range
};

// Linear through the measured endpoints (3.0 mW, 0.8 Hz) and (9.0 mW, 5.0 Hz).
// Throws DomainError for negative power.
PumpRate pump_rotation_frequency(double power_mw);

// Volume of a cubic micro-chamber in nanoliters.
double chamber_volume_nl(double side_um);

} // namespace molstore
