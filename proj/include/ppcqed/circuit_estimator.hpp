#pragma once

// Closed-form estimates of the linear resonator and photon-pressure coupling
// from device geometry. All inputs SI, all angular frequencies rad/s, flux in
// units of the flux quantum.

namespace ppcqed::circuit {

// Interdigitated capacitor on a thick dielectric substrate.
struct IdcGeometry {
    int finger_count = 0;
    double finger_width = 0.0;   // m
    double finger_gap = 0.0;     // m
    double finger_length = 0.0;  // m
    double relative_permittivity = 1.0;

    // Throws DomainError when any invariant is broken.
    void validate() const;
};

// Straight inductor wire running alongside a rectangular SQUID loop.
struct SquidGeometry {
    double loop_length = 0.0;    // m, loop side parallel to the wire
    double near_distance = 0.0;  // m, wire to the near loop edge
    double far_distance = 0.0;   // m, wire to the far loop edge

    void validate() const;
};

struct ResonatorParams {
    double frequency = 0.0;    // rad/s
    double capacitance = 0.0;  // F
    double inductance = 0.0;   // H
    double internal_rate = 0.0;
    double external_rate = 0.0;

    static constexpr double consistency_tolerance = 1e-9;

    // frequency * sqrt(L C) must be 1 within consistency_tolerance.
    void validate() const;
    double total_rate() const { return internal_rate + external_rate; }
};

// Symmetric-SQUID transmon flux arc.
struct FluxArc {
    double sweet_spot_frequency = 0.0;  // rad/s
    double anharmonicity = 0.0;         // rad/s, negative
    double operating_flux = 0.0;        // Phi_0

    void validate() const;
};

/// Complete elliptic integral of the first kind K(k), with k the modulus
/// (not the parameter m = k^2). Arithmetic-geometric mean iteration.
double complete_elliptic_k(double k);

/// Total capacitance of an interdigitated capacitor from the conformal-mapping
/// model: (N-3) C1/2 + 2 C1 C2/(C1 + C2), with interior and exterior unit-cell
/// capacitances C1 and C2.
double idc_capacitance(const IdcGeometry& geom);

double inductance_from_frequency(double omega, double capacitance);
double frequency_from_lc(double inductance, double capacitance);

/// Zero-point current fluctuation sqrt(hbar omega / 2L), in amperes.
double zero_point_current(double omega, double inductance);

/// Mutual inductance between a long straight wire and a rectangular loop.
double mutual_inductance(const SquidGeometry& geom);

/// Zero-point flux M * I_zpf expressed in flux quanta.
double zero_point_flux(double mutual, double current);

/// omega_max sqrt|cos(pi Phi)|. Throws DomainError at the arc zero.
double flux_arc_frequency(const FluxArc& arc, double flux);

/// |d omega_q / d Phi| in rad/s per flux quantum, analytic.
double flux_sensitivity(const FluxArc& arc, double flux);

/// Flux in [0, 0.5) at which the arc reaches `omega` (omega <= omega_max).
double flux_for_frequency(const FluxArc& arc, double omega);

/// g0 = |d omega_q / d Phi| * Phi_zpf.
double single_photon_coupling(double sensitivity, double zpf_flux);

// Every intermediate of the geometry -> g0 chain.
struct EstimateChain {
    double capacitance = 0.0;
    double inductance = 0.0;
    double zero_point_current = 0.0;
    double mutual_inductance = 0.0;
    double zero_point_flux = 0.0;
    double flux_sensitivity = 0.0;
    double single_photon_coupling = 0.0;
};

// Runs the chain with a given flux sensitivity (measured or from an arc).
EstimateChain estimate_chain(const IdcGeometry& idc, const SquidGeometry& squid,
                             double resonator_frequency, double sensitivity);

}  // namespace ppcqed::circuit
