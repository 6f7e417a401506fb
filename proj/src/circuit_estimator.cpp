#include "ppcqed/circuit_estimator.hpp"

#include <cmath>
#include <string>

#include "ppcqed/constants.hpp"
#include "ppcqed/errors.hpp"

namespace ppcqed::circuit {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(name) + " must be positive and finite");
    }
}

// Two-sided unit-cell capacitance per finger pair, 2 eps0 eps_eff l K(k)/K(k').
double cell_capacitance(double k, double eps_eff, double length) {
    if (!(k >= 0.0 && k < 1.0)) {
        throw DomainError("IDC modulus outside [0, 1): " + std::to_string(k));
    }
    const double k_prime = std::sqrt(1.0 - k * k);
    return 2.0 * constants::vacuum_permittivity * eps_eff * length *
           complete_elliptic_k(k) / complete_elliptic_k(k_prime);
}

// Half-integer flux: cos(pi Phi) vanishes and the symmetric arc closes.
bool at_arc_zero(double flux) { return std::abs(std::remainder(flux - 0.5, 1.0)) < 1e-15; }

}  // namespace

void IdcGeometry::validate() const {
    if (finger_count < 4) throw DomainError("IDC needs at least 4 fingers");
    require_positive(finger_width, "finger_width");
    require_positive(finger_gap, "finger_gap");
    require_positive(finger_length, "finger_length");
    if (!(relative_permittivity >= 1.0)) {
        throw DomainError("relative_permittivity must be >= 1");
    }
}

void SquidGeometry::validate() const {
    require_positive(loop_length, "loop_length");
    require_positive(near_distance, "near_distance");
    if (!(far_distance > near_distance)) {
        throw DomainError("far_distance must exceed near_distance");
    }
}

void ResonatorParams::validate() const {
    require_positive(frequency, "resonator frequency");
    require_positive(capacitance, "resonator capacitance");
    require_positive(inductance, "resonator inductance");
    if (internal_rate < 0.0 || external_rate < 0.0) {
        throw DomainError("resonator decay rates must be non-negative");
    }
    const double product = frequency * std::sqrt(inductance * capacitance);
    if (std::abs(product - 1.0) > consistency_tolerance) {
        throw DomainError("resonator frequency inconsistent with L and C");
    }
}

void FluxArc::validate() const {
    require_positive(sweet_spot_frequency, "sweet_spot_frequency");
    if (!(anharmonicity < 0.0)) throw DomainError("anharmonicity must be negative");
    if (!(std::abs(operating_flux) < 0.5)) {
        throw DomainError("operating_flux must satisfy |flux| < 0.5");
    }
}

double complete_elliptic_k(double k) {
    if (!(k >= 0.0 && k < 1.0)) {
        throw DomainError("complete_elliptic_k requires 0 <= k < 1");
    }
    double a = 1.0;
    double b = std::sqrt(1.0 - k * k);
    // Quadratic convergence: a handful of iterations even at k = 1 - 1e-12.
    for (int i = 0; i < 64 && std::abs(a - b) >= 1e-15 * a; ++i) {
        const double next_a = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = next_a;
    }
    return constants::pi / (2.0 * a);
}

double idc_capacitance(const IdcGeometry& geom) {
    geom.validate();
    const double a = geom.finger_width;
    const double b = geom.finger_gap;
    const double eps_eff = 0.5 * (geom.relative_permittivity + 1.0);

    const double k1 = std::sin(0.5 * constants::pi * a / (a + b));
    const double k2 = 2.0 * std::sqrt(a * (a + b)) / (2.0 * a + b);

    const double c1 = cell_capacitance(k1, eps_eff, geom.finger_length);
    const double c2 = cell_capacitance(k2, eps_eff, geom.finger_length);
    return (geom.finger_count - 3) * 0.5 * c1 + 2.0 * c1 * c2 / (c1 + c2);
}

double inductance_from_frequency(double omega, double capacitance) {
    require_positive(omega, "omega");
    require_positive(capacitance, "capacitance");
    return 1.0 / (omega * omega * capacitance);
}

double frequency_from_lc(double inductance, double capacitance) {
    require_positive(inductance, "inductance");
    require_positive(capacitance, "capacitance");
    return 1.0 / std::sqrt(inductance * capacitance);
}

double zero_point_current(double omega, double inductance) {
    require_positive(omega, "omega");
    require_positive(inductance, "inductance");
    return std::sqrt(constants::hbar * omega / (2.0 * inductance));
}

double mutual_inductance(const SquidGeometry& geom) {
    geom.validate();
    return constants::vacuum_permeability * geom.loop_length / (2.0 * constants::pi) *
           std::log(geom.far_distance / geom.near_distance);
}

double zero_point_flux(double mutual, double current) {
    if (mutual < 0.0 || current < 0.0) {
        throw DomainError("zero_point_flux inputs must be non-negative");
    }
    return mutual * current / constants::flux_quantum;
}

double flux_arc_frequency(const FluxArc& arc, double flux) {
    require_positive(arc.sweet_spot_frequency, "sweet_spot_frequency");
    const double c = std::abs(std::cos(constants::pi * flux));
    if (!(c > 0.0) || at_arc_zero(flux)) {
        throw DomainError("flux arc has no transmon frequency at |cos(pi Phi)| = 0");
    }
    return arc.sweet_spot_frequency * std::sqrt(c);
}

double flux_sensitivity(const FluxArc& arc, double flux) {
    require_positive(arc.sweet_spot_frequency, "sweet_spot_frequency");
    const double x = constants::pi * flux;
    const double c = std::abs(std::cos(x));
    if (!(c > 0.0) || at_arc_zero(flux)) {
        throw DomainError("flux sensitivity diverges at the arc zero");
    }
    return arc.sweet_spot_frequency * 0.5 * constants::pi * std::abs(std::sin(x)) / std::sqrt(c);
}

double flux_for_frequency(const FluxArc& arc, double omega) {
    require_positive(arc.sweet_spot_frequency, "sweet_spot_frequency");
    require_positive(omega, "omega");
    const double ratio = omega / arc.sweet_spot_frequency;
    if (ratio > 1.0) throw DomainError("frequency above the sweet spot");
    return std::acos(ratio * ratio) / constants::pi;
}

double single_photon_coupling(double sensitivity, double zpf_flux) {
    if (sensitivity < 0.0 || zpf_flux < 0.0) {
        throw DomainError("single_photon_coupling inputs must be non-negative");
    }
    return sensitivity * zpf_flux;
}

EstimateChain estimate_chain(const IdcGeometry& idc, const SquidGeometry& squid,
                             double resonator_frequency, double sensitivity) {
    EstimateChain chain;
    chain.capacitance = idc_capacitance(idc);
    chain.inductance = inductance_from_frequency(resonator_frequency, chain.capacitance);
    chain.zero_point_current = zero_point_current(resonator_frequency, chain.inductance);
    chain.mutual_inductance = mutual_inductance(squid);
    chain.zero_point_flux = zero_point_flux(chain.mutual_inductance, chain.zero_point_current);
    chain.flux_sensitivity = sensitivity;
    chain.single_photon_coupling = single_photon_coupling(sensitivity, chain.zero_point_flux);
    return chain;
}

}  // namespace ppcqed::circuit
