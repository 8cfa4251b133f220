#include "molstore/transport_physics.hpp"

#include <cmath>
#include <numbers>

namespace molstore {

FluidParams FluidParams::from_config(const KeyValueConfig& cfg) {
    FluidParams fluid;
    fluid.density_kg_m3 = cfg.get_double("density_kg_m3", fluid.density_kg_m3);
    fluid.viscosity_ns_m2 = cfg.get_double("viscosity_ns_m2", fluid.viscosity_ns_m2);
    fluid.temperature_c = cfg.get_double("temperature_c", fluid.temperature_c);
    if (fluid.density_kg_m3 <= 0 || fluid.viscosity_ns_m2 <= 0) {
        throw ConfigError("fluid density and viscosity must be positive");
    }
    return fluid;
}

ParticleModel ParticleModel::from_config(const KeyValueConfig& cfg) {
    ParticleModel particle;
    particle.radius_m = cfg.get_double("radius_m", particle.radius_m);
    particle.speed_m_s = cfg.get_double("speed_m_s", particle.speed_m_s);
    particle.charge_per_base_c = cfg.get_double("charge_per_base_c", particle.charge_per_base_c);
    if (particle.radius_m <= 0 || particle.speed_m_s < 0 || particle.charge_per_base_c <= 0) {
        throw ConfigError("particle radius and charge per base must be positive, speed nonnegative");
    }
    return particle;
}

double FieldParams::field_v_m() const {
    if (electrode_gap_m <= 0) throw DomainError("electrode gap must be positive");
    return applied_voltage_v / electrode_gap_m;
}

FieldParams FieldParams::from_config(const KeyValueConfig& cfg) {
    FieldParams field;
    field.applied_voltage_v = cfg.get_double("applied_voltage_v", field.applied_voltage_v);
    field.electrode_gap_m = cfg.get_double("electrode_gap_m", field.electrode_gap_m);
    if (field.electrode_gap_m <= 0) throw ConfigError("electrode gap must be positive");
    return field;
}

TransportMode TransportMode::from_config(const KeyValueConfig& cfg) {
    TransportMode mode;
    const std::string kind = cfg.get_string("transport_mode", "idealized_sphere");
    if (kind == "idealized_sphere") {
        mode.kind = TransportKind::idealized_sphere;
    } else if (kind == "empirical_gel") {
        mode.kind = TransportKind::empirical_gel;
    } else if (kind == "vesicle") {
        mode.kind = TransportKind::vesicle;
    } else {
        throw ConfigError("unknown transport_mode: " + kind);
    }
    mode.empirical_slowdown = cfg.get_double("empirical_slowdown", mode.empirical_slowdown);
    if (mode.empirical_slowdown < 1.0) {
        throw ConfigError("empirical_slowdown must be >= 1");
    }
    if (cfg.has("vesicle_mobility_m2_vs")) {
        mode.vesicle_mobility_m2_vs = cfg.get_double("vesicle_mobility_m2_vs");
    }
    return mode;
}

double reynolds_number(const FluidParams& fluid, const ParticleModel& particle) {
    return 2.0 * fluid.density_kg_m3 * particle.speed_m_s * particle.radius_m /
           fluid.viscosity_ns_m2;
}

bool stokes_regime_ok(const FluidParams& fluid, const ParticleModel& particle) {
    return reynolds_number(fluid, particle) <= 10.0;
}

double stokes_drag_n(const FluidParams& fluid, const ParticleModel& particle) {
    return 6.0 * std::numbers::pi * fluid.viscosity_ns_m2 * particle.radius_m *
           particle.speed_m_s;
}

double required_charge_c(double drag_n, const FieldParams& field) {
    const double e = field.field_v_m();
    if (e <= 0) throw DomainError("electric field must be positive");
    return drag_n / e;
}

double bases_for_charge(double charge_c, double charge_per_base_c) {
    if (charge_per_base_c <= 0) throw DomainError("charge per base must be positive");
    return charge_c / charge_per_base_c;
}

double access_time_s(double path_length_m, const ParticleModel& particle,
                     const TransportMode& mode, const FieldParams& field) {
    if (path_length_m < 0) throw DomainError("path length must be nonnegative");
    switch (mode.kind) {
    case TransportKind::idealized_sphere:
        if (particle.speed_m_s <= 0) throw DomainError("particle speed must be positive");
        return path_length_m / particle.speed_m_s;
    case TransportKind::empirical_gel:
        if (particle.speed_m_s <= 0) throw DomainError("particle speed must be positive");
        return mode.empirical_slowdown * path_length_m / particle.speed_m_s;
    case TransportKind::vesicle: {
        if (!mode.vesicle_mobility_m2_vs) {
            throw ConfigError("vesicle transport requires vesicle_mobility_m2_vs");
        }
        const double v = *mode.vesicle_mobility_m2_vs * field.field_v_m();
        if (v <= 0) throw DomainError("vesicle drift velocity must be positive");
        return path_length_m / v;
    }
    }
    throw ConfigError("unknown transport mode");
}

PumpRate pump_rotation_frequency(double power_mw) {
    if (power_mw < 0) throw DomainError("pump power must be nonnegative");
    constexpr double p0 = 3.0, f0 = 0.8;
    constexpr double p1 = 9.0, f1 = 5.0;
    const double t = (power_mw - p0) / (p1 - p0);
    PumpRate rate;
    rate.frequency_hz = std::lerp(f0, f1, t);
    rate.extrapolated = power_mw < p0 || power_mw > p1;
    return rate;
}

double chamber_volume_nl(double side_um) {
    if (side_um < 0) throw DomainError("chamber side must be nonnegative");
    // 1 um^3 = 1e-15 L = 1e-6 nL
    return side_um * side_um * side_um * 1e-6;
}

} // namespace molstore
