#pragma once

#include <array>

#include "ppcqed/circuit_estimator.hpp"
#include "ppcqed/constants.hpp"
#include "ppcqed/quantum_core.hpp"
#include "ppcqed/spectroscopy.hpp"

// Parameters of the reference transmon/resonator device.
namespace ppcqed::device {

inline circuit::IdcGeometry idc_geometry() { return {44, 10e-6, 6e-6, 400e-6, 11.8}; }
inline circuit::SquidGeometry squid_geometry() { return {120e-6, 1.8e-6, 5.3e-6}; }

inline constexpr double qubit_frequency_hz = 6.10e9;
inline constexpr double sweet_spot_hz = 10.2e9;
inline constexpr double anharmonicity_hz = -388e6;
inline constexpr double resonator_frequency_hz = 4.347e9;
inline constexpr double g0_hz = 11.9e6;
inline constexpr double parasitic_coupling_hz = 2.5e6;
inline constexpr double internal_rate_hz = 28.0e3;
inline constexpr double external_rate_hz = 88.6e3;
inline constexpr double t1 = 664e-9;
inline constexpr double qubit_linewidth_hz = 677e3;
inline constexpr double flux_sensitivity_hz = 26.0e9;  // per flux quantum
inline constexpr double rabi_coupling_hz = 2.76e6;      // time-domain sideband coupling
inline constexpr double crossing_coupling_hz = 2.81e6;  // spectral sideband coupling

// Sideband drive powers at the source (dBm) and the one whose coupling is
// taken as the spectral value above.
inline constexpr std::array<double, 4> sideband_powers_dbm{3.3, 8.3, 12.3, 14.4};
inline constexpr double reference_power_dbm = 12.3;

inline SystemParams system_params() {
    SystemParams p;
    p.qubit_frequency = hz_to_rad(qubit_frequency_hz);
    p.anharmonicity = hz_to_rad(anharmonicity_hz);
    p.resonator_frequency = hz_to_rad(resonator_frequency_hz);
    p.single_photon_coupling = hz_to_rad(g0_hz);
    p.parasitic_coupling = hz_to_rad(parasitic_coupling_hz);
    p.resonator_decay = hz_to_rad(internal_rate_hz + external_rate_hz);
    p.qubit_relaxation = 1.0 / t1;
    p.qubit_linewidth = hz_to_rad(qubit_linewidth_hz);
    return p;
}

inline spectroscopy::NotchParams notch_params() {
    return {hz_to_rad(resonator_frequency_hz), hz_to_rad(internal_rate_hz), hz_to_rad(external_rate_hz), 0.0};
}

inline circuit::FluxArc flux_arc() {
    circuit::FluxArc arc;
    arc.sweet_spot_frequency = hz_to_rad(sweet_spot_hz);
    arc.anharmonicity = hz_to_rad(anharmonicity_hz);
    arc.operating_flux = circuit::flux_for_frequency(arc, hz_to_rad(qubit_frequency_hz));
    return arc;
}

}  // namespace ppcqed::device
