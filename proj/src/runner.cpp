#include "ppcqed/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "ppcqed/calibration.hpp"
#include "ppcqed/circuit_estimator.hpp"
#include "ppcqed/constants.hpp"
#include "ppcqed/csv.hpp"
#include "ppcqed/device.hpp"
#include "ppcqed/dynamics.hpp"
#include "ppcqed/errors.hpp"
#include "ppcqed/pipeline.hpp"
#include "ppcqed/spectroscopy.hpp"

namespace ppcqed {

namespace {

using config::ConfigError;
using config::ExperimentConfig;
using config::Json;
using config::Section;

struct Context {
    const ExperimentConfig& config;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::ostringstream summary;
    Json diagnostics = Json::object();
    Json invariants = Json::object();
    Json outputs = Json::array();
    bool computing = false;  // set once parameters have been validated

    explicit Context(const ExperimentConfig& c) : config(c) {}

    void write(const std::string& name, const csv::Table& table) {
        csv::write(out / name, table);
        outputs.push_back(name);
    }

    std::filesystem::path input(const std::string& path) const {
        const std::filesystem::path p(path);
        return p.is_absolute() ? p : config.base_dir / p;
    }

    std::uint64_t require_seed(const std::string& why) const {
        if (!seed) throw ConfigError("seed", "required when " + why);
        return *seed;
    }
};

std::vector<double> axis(const Section& s) {
    const double start = s.number("start");
    const double stop = s.number("stop");
    const int count = s.integer("count");
    s.finish();
    if (count < 1) throw ConfigError(s.key_path("count"), "must be at least 1");
    if (count == 1) return {start};
    if (!(stop > start)) throw ConfigError(s.key_path("stop"), "must exceed start");
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = start + (stop - start) * i / (count - 1);
    return v;
}

csv::Table fit_table(const fit::FitResult& r, const std::vector<std::pair<std::string, bool>>& columns) {
    csv::Table t{{"parameter", "value", "uncertainty"}, {}};
    for (std::size_t i = 0; i < r.parameters.size(); ++i) {
        const auto& p = r.parameters[i];
        const bool angular = columns[i].second;
        const double scale = angular ? 1.0 / (2.0 * constants::pi) : 1.0;
        t.rows.push_back({columns[i].first, csv::format_number(p.value * scale),
                          csv::format_number(p.uncertainty * scale)});
    }
    return t;
}

Json fit_diagnostics(const fit::FitResult& r) {
    return {{"residual_norm", r.residual_norm}, {"iterations", r.iterations}, {"converged", r.converged},
            {"gradient_norm", r.gradient_norm}};
}

spectroscopy::NotchParams parse_notch(const Section& s, const spectroscopy::NotchParams& fallback) {
    spectroscopy::NotchParams p;
    p.resonator_frequency = hz_to_rad(s.number("frequency_hz", rad_to_hz(fallback.resonator_frequency)));
    p.internal_rate = hz_to_rad(s.number("internal_rate_hz", rad_to_hz(fallback.internal_rate)));
    p.external_rate = hz_to_rad(s.number("external_rate_hz", rad_to_hz(fallback.external_rate)));
    p.mismatch_phase = s.number("mismatch_phase", fallback.mismatch_phase);
    s.finish();
    p.validate();
    return p;
}

Preparation parse_preparation(const Section& s) {
    const auto name = s.text("preparation", "excited_qubit");
    if (name == "ground") return Preparation::Ground;
    if (name == "excited_qubit") return Preparation::ExcitedQubit;
    if (name == "fock1_resonator") return Preparation::Fock1Resonator;
    throw ConfigError(s.key_path("preparation"), "expected ground, excited_qubit or fock1_resonator");
}

Json report_json(const InvariantReport& r) {
    return {{"max_trace_error", r.max_trace_error},
            {"max_hermiticity_error", r.max_hermiticity_error},
            {"min_eigenvalue", r.min_eigenvalue},
            {"positivity_checks", r.positivity_checks},
            {"trace_ok", r.max_trace_error < DensityMatrix::trace_tolerance},
            {"hermiticity_ok", r.max_hermiticity_error < DensityMatrix::hermiticity_tolerance},
            {"positivity_ok", r.min_eigenvalue > -DensityMatrix::positivity_tolerance}};
}

void run_estimate(Context& ctx) {
    const Section p(ctx.config.parameters, "parameters");
    const auto idc_s = p.child("idc");
    circuit::IdcGeometry idc;
    idc.finger_count = idc_s.integer("finger_count");
    idc.finger_width = idc_s.number("finger_width");
    idc.finger_gap = idc_s.number("finger_gap");
    idc.finger_length = idc_s.number("finger_length");
    idc.relative_permittivity = idc_s.number("relative_permittivity");
    idc_s.finish();
    const auto sq = p.child("squid");
    circuit::SquidGeometry squid{sq.number("loop_length"), sq.number("near_distance"), sq.number("far_distance")};
    sq.finish();
    const double wb = hz_to_rad(p.number("resonator_frequency_hz"));

    double sensitivity = 0.0;
    std::optional<circuit::FluxArc> arc;
    if (p.has("flux_sensitivity_hz")) {
        sensitivity = hz_to_rad(p.number("flux_sensitivity_hz"));
    } else {
        const auto a = p.child("flux_arc");
        circuit::FluxArc f;
        f.sweet_spot_frequency = hz_to_rad(a.number("sweet_spot_hz"));
        f.anharmonicity = hz_to_rad(a.number("anharmonicity_hz", device::anharmonicity_hz));
        f.operating_flux = circuit::flux_for_frequency(f, hz_to_rad(a.number("qubit_frequency_hz")));
        a.finish();
        arc = f;
    }
    p.finish();
    idc.validate();
    squid.validate();

    ctx.computing = true;
    if (arc) sensitivity = circuit::flux_sensitivity(*arc, arc->operating_flux);
    const auto c = circuit::estimate_chain(idc, squid, wb, sensitivity);

    csv::Table t{{"capacitance_f", "inductance_h", "zero_point_current_a", "mutual_inductance_h",
                  "zero_point_flux_phi0", "flux_sensitivity_hz_per_phi0", "g0_hz"},
                 {}};
    t.add_row({c.capacitance, c.inductance, c.zero_point_current, c.mutual_inductance, c.zero_point_flux,
               rad_to_hz(c.flux_sensitivity), rad_to_hz(c.single_photon_coupling)});
    ctx.write("estimate.csv", t);

    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "C_IDC      %10.4f pF\n"
                  "L_b        %10.4f nH\n"
                  "I_zpf      %10.4f nA\n"
                  "M          %10.4f pH\n"
                  "Phi_zpf    %10.4f uPhi0\n"
                  "dw/dPhi/2pi%10.4f GHz/Phi0\n"
                  "g0/2pi     %10.4f MHz\n",
                  c.capacitance * 1e12, c.inductance * 1e9, c.zero_point_current * 1e9, c.mutual_inductance * 1e12,
                  c.zero_point_flux * 1e6, rad_to_hz(c.flux_sensitivity) * 1e-9,
                  rad_to_hz(c.single_photon_coupling) * 1e-6);
    ctx.summary << buf;
    if (arc) ctx.diagnostics["operating_flux_phi0"] = arc->operating_flux;
}

void run_chevron(Context& ctx) {
    const Section p(ctx.config.parameters, "parameters");
    auto params = config::parse_device(p.child_or_empty("device"));
    const double g = hz_to_rad(p.number("coupling_hz"));
    auto detunings = axis(p.child("detuning_hz"));
    for (auto& d : detunings) d = hz_to_rad(d);
    const auto times = axis(p.child("time_s"));
    const auto prep = parse_preparation(p);
    ChevronOptions opt;
    opt.dt_max = p.number("dt_max_s", opt.dt_max);
    opt.pi_pulse_duration = p.number("pi_pulse_s", 0.0);
    opt.frame.counter_rotating = p.flag("counter_rotating", false);
    const bool open = p.flag("open_system", true);
    p.finish();
    if (ctx.config.truncation.qubit_dim != 2) throw ConfigError("truncation.qubit_dim", "chevrons use a two-level qubit");
    opt.resonator_dim = ctx.config.truncation.resonator_dim;
    opt.threads = ctx.threads;
    if (!open) {
        params.resonator_decay = 0.0;
        params.qubit_relaxation = 0.0;
    }
    if (!(g >= 0.0)) throw ConfigError("parameters.coupling_hz", "must be non-negative");
    if (times.front() < 0.0) throw ConfigError("parameters.time_s.start", "must be non-negative");
    if (!(opt.dt_max > 0.0)) throw ConfigError("parameters.dt_max_s", "must be positive");

    ctx.computing = true;
    const auto r = chevron_experiment(params, g, detunings, times, prep, opt);
    csv::Table t{{"detuning_hz", "time_s", "p_excited"}, {}};
    t.rows.reserve(r.excited.size());
    for (std::size_t i = 0; i < r.detunings.size(); ++i)
        for (std::size_t j = 0; j < r.times.size(); ++j) t.add_row({rad_to_hz(r.detunings[i]), r.times[j], r.at(i, j)});
    ctx.write("chevron.csv", t);
    ctx.invariants = report_json(r.report);

    // First minimum of the row closest to zero detuning.
    std::size_t row = 0;
    for (std::size_t i = 1; i < r.detunings.size(); ++i)
        if (std::abs(r.detunings[i]) < std::abs(r.detunings[row])) row = i;
    for (std::size_t j = 1; j + 1 < r.times.size(); ++j) {
        if (r.at(row, j) <= r.at(row, j - 1) && r.at(row, j) < r.at(row, j + 1)) {
            ctx.diagnostics["first_minimum_s"] = r.times[j];
            ctx.summary << "first P_e minimum at detuning " << rad_to_hz(r.detunings[row]) << " Hz: "
                        << r.times[j] * 1e9 << " ns\n";
            break;
        }
    }
    ctx.summary << "grid " << r.detunings.size() << " x " << r.times.size() << ", max |tr-1| "
                << r.report.max_trace_error << ", min eigenvalue " << r.report.min_eigenvalue << "\n";
}

void run_spectrum(Context& ctx) {
    const Section p(ctx.config.parameters, "parameters");
    const auto dev = config::parse_device(p.child_or_empty("device"));
    auto notch = device::notch_params();
    notch.resonator_frequency = dev.resonator_frequency;
    spectroscopy::HybridLineshape line;
    line.resonator = parse_notch(p.child_or_empty("resonator"), notch);
    line.coupling = hz_to_rad(p.number("coupling_hz", 0.0));
    line.qubit_detuning = hz_to_rad(p.number("sideband_detuning_hz", 0.0)) - line.resonator.resonator_frequency;
    line.qubit_linewidth = dev.qubit_linewidth;
    const auto probes = axis(p.child("probe_hz"));
    const double noise = p.number("noise", 0.0);
    p.finish();
    if (noise < 0.0) throw ConfigError("parameters.noise", "must be non-negative");
    if (line.coupling < 0.0) throw ConfigError("parameters.coupling_hz", "must be non-negative");
    std::mt19937_64 rng(noise > 0.0 ? ctx.require_seed("noise > 0") : 0);

    ctx.computing = true;
    std::normal_distribution<double> normal(0.0, 1.0);
    csv::Table t{{"probe_hz", "s21_re", "s21_im", "s21_abs"}, {}};
    std::vector<double> freqs, mags;
    for (double f : probes) {
        auto s = spectroscopy::s21_hybridized(hz_to_rad(f), line);
        if (noise > 0.0) s += spectroscopy::Complex(noise * normal(rng), noise * normal(rng));
        t.add_row({f, s.real(), s.imag(), std::abs(s)});
        freqs.push_back(hz_to_rad(f));
        mags.push_back(std::abs(s));
    }
    ctx.write("spectrum.csv", t);
    const auto modes =
        spectroscopy::normal_mode_frequencies(line.resonator.resonator_frequency, line.qubit_detuning, line.coupling);
    ctx.diagnostics["upper_mode_hz"] = rad_to_hz(modes.upper);
    ctx.diagnostics["lower_mode_hz"] = rad_to_hz(modes.lower);
    const double width = 0.5 * (line.resonator.total_rate() + line.qubit_linewidth);
    const auto minima = spectroscopy::extract_minima(freqs, mags, width, std::max(0.02, 5.0 * noise));
    Json m = Json::array();
    for (double v : minima) m.push_back(rad_to_hz(v));
    ctx.diagnostics["minima_hz"] = m;
    ctx.summary << "normal modes " << rad_to_hz(modes.lower) << " Hz, " << rad_to_hz(modes.upper) << " Hz; "
                << minima.size() << " minima found\n";
}

void run_calibrate(Context& ctx) {
    const Section p(ctx.config.parameters, "parameters");
    const auto dev = config::parse_device(p.child_or_empty("device"));
    const double wd = hz_to_rad(p.number("drive_frequency_hz", rad_to_hz(dev.qubit_frequency - dev.resonator_frequency)));
    const bool by_amplitude = p.has("drive_amplitudes_hz");
    if (by_amplitude == p.has("stark_shifts_hz")) {
        throw ConfigError("parameters.drive_amplitudes_hz", "give exactly one of drive_amplitudes_hz or stark_shifts_hz");
    }
    const auto values = p.numbers(by_amplitude ? "drive_amplitudes_hz" : "stark_shifts_hz");
    p.finish();
    const DriveParams drive{wd, 0.0, dev.qubit_frequency};
    const double detuning = drive.detuning();
    const double sum = drive.sum_frequency();
    if (detuning == 0.0) throw ConfigError("parameters.drive_frequency_hz", "drive must be detuned from the qubit");
    if (!(sum > 0.0)) throw ConfigError("parameters.drive_frequency_hz", "sum frequency must be positive");

    ctx.computing = true;
    csv::Table t{{"drive_amplitude_hz", "stark_shift_hz", "photon_number", "bistable"}, {}};
    for (double v : values) {
        double eps = 0.0;
        double shift = 0.0;
        if (by_amplitude) {
            eps = hz_to_rad(v);
            shift = calibration::ac_stark_shift(eps, dev.anharmonicity, detuning, sum);
        } else {
            shift = hz_to_rad(v);
            eps = std::sqrt(calibration::drive_power_from_stark({shift, dev.anharmonicity, detuning, sum}));
        }
        const auto kerr = calibration::kerr_steady_state(detuning, dev.anharmonicity, eps);
        t.add_row({rad_to_hz(eps), rad_to_hz(shift), kerr.occupation, kerr.bistable ? 1.0 : 0.0});
    }
    ctx.write("calibration.csv", t);
    const double a_eff = calibration::effective_kerr(dev.anharmonicity, dev.single_photon_coupling,
                                                     dev.resonator_frequency, dev.resonator_decay);
    ctx.diagnostics["effective_kerr_hz"] = rad_to_hz(a_eff);
    ctx.diagnostics["fold_drive_amplitude_hz"] = rad_to_hz(calibration::fold_drive_amplitude(detuning, dev.anharmonicity));
    if (dev.parasitic_coupling > 0.0) {
        const double n_crit = calibration::critical_photon_number(dev.qubit_frequency - dev.resonator_frequency,
                                                                  dev.parasitic_coupling);
        ctx.diagnostics["critical_photon_number"] = n_crit;
        ctx.summary << "n_crit " << n_crit << "\n";
    }
    ctx.summary << "alpha_eff/2pi " << rad_to_hz(a_eff) << " Hz; " << values.size() << " calibration points\n";
}

void run_fit_notch(Context& ctx) {
    const Section p(ctx.config.parameters, "parameters");
    const auto path = ctx.input(p.text("data"));
    const double exclusion = p.number("background_exclusion_hz", 0.0);
    const auto init_s = p.child_or_empty("init");
    p.finish();
    const auto table = csv::read(path);
    const auto f = table.column("probe_hz");
    const auto re = table.column("s21_re");
    const auto im = table.column("s21_im");
    std::vector<spectroscopy::SpectrumPoint> data;
    for (std::size_t i = 0; i < f.size(); ++i) data.push_back({hz_to_rad(f[i]), {re[i], im[i]}});
    if (data.empty()) throw ConfigError("parameters.data", "no data rows");

    // Default start: the deepest sample and the half-depth width of the dip.
    std::size_t k = 0;
    for (std::size_t i = 1; i < data.size(); ++i)
        if (std::abs(data[i].s21) < std::abs(data[k].s21)) k = i;
    const double depth = std::abs(data[k].s21);
    const double half = 0.5 * (1.0 + depth);
    double lo = data[k].frequency, hi = data[k].frequency;
    for (const auto& d : data) {
        if (std::abs(d.s21) < half) {
            lo = std::min(lo, d.frequency);
            hi = std::max(hi, d.frequency);
        }
    }
    const double kappa = std::max(hi - lo, 1e-9 * data[k].frequency);
    const spectroscopy::NotchParams guess{data[k].frequency, kappa * depth, kappa * (1.0 - depth), 0.0};
    const auto init = parse_notch(init_s, guess);

    ctx.computing = true;
    if (exclusion > 0.0) data = spectroscopy::subtract_background(data, init.resonator_frequency, hz_to_rad(exclusion));
    const auto r = spectroscopy::fit_notch(data, init);
    ctx.write("fit_notch.csv", fit_table(r, {{"resonator_frequency_hz", true},
                                             {"internal_rate_hz", true},
                                             {"external_rate_hz", true},
                                             {"mismatch_phase", false}}));
    ctx.diagnostics["fit"] = fit_diagnostics(r);
    const auto n = spectroscopy::notch_from_fit(r);
    ctx.summary << "omega_b/2pi " << rad_to_hz(n.resonator_frequency) << " Hz, kappa_int/2pi "
                << rad_to_hz(n.internal_rate) << " Hz, kappa_ext/2pi " << rad_to_hz(n.external_rate) << " Hz\n";
}

void run_fit_crossing(Context& ctx) {
    const Section p(ctx.config.parameters, "parameters");
    const auto path = ctx.input(p.text("data"));
    const auto init_s = p.child_or_empty("init");
    const bool select = p.has("power_index");
    const double power_index = select ? p.integer("power_index") : 0.0;
    const auto table = csv::read(path);
    const auto drives = table.column("drive_hz");
    const auto minima = table.column("minimum_hz");
    std::vector<double> index(drives.size(), power_index);
    if (select) index = table.column("power_index");
    std::map<double, std::vector<double>> grouped;
    for (std::size_t i = 0; i < drives.size(); ++i)
        if (index[i] == power_index) grouped[hz_to_rad(drives[i])].push_back(hz_to_rad(minima[i]));
    if (grouped.empty()) throw ConfigError("parameters.data", "no minima selected");
    std::vector<spectroscopy::CrossingSpectrum> spectra;
    for (auto& [d, m] : grouped) spectra.push_back({d, m});
    auto init = spectroscopy::initial_crossing_guess(spectra);
    init.resonator_frequency = hz_to_rad(init_s.number("resonator_frequency_hz", rad_to_hz(init.resonator_frequency)));
    init.coupling = hz_to_rad(init_s.number("coupling_hz", rad_to_hz(init.coupling)));
    init.crossing_drive_frequency =
        hz_to_rad(init_s.number("crossing_drive_frequency_hz", rad_to_hz(init.crossing_drive_frequency)));
    init_s.finish();
    p.finish();

    ctx.computing = true;
    const auto r = spectroscopy::fit_avoided_crossing(spectra, init);
    ctx.write("fit_crossing.csv", fit_table(r, {{"resonator_frequency_hz", true},
                                                {"coupling_hz", true},
                                                {"crossing_drive_frequency_hz", true}}));
    ctx.diagnostics["fit"] = fit_diagnostics(r);
    ctx.summary << "g/2pi " << rad_to_hz(r.value("coupling")) << " +- " << rad_to_hz(r.uncertainty("coupling"))
                << " Hz\n";
}

void run_extract_g0(Context& ctx) {
    const Section p(ctx.config.parameters, "parameters");
    std::vector<spectroscopy::CouplingPoint> points;
    if (p.has("data")) {
        const auto table = csv::read(ctx.input(p.text("data")));
        const auto n = table.column("photon_number");
        const auto g = table.column("coupling_hz");
        std::vector<double> sigma(n.size(), 0.0);
        if (std::find(table.header.begin(), table.header.end(), "sigma_hz") != table.header.end())
            sigma = table.column("sigma_hz");
        for (std::size_t i = 0; i < n.size(); ++i) points.push_back({n[i], hz_to_rad(g[i]), hz_to_rad(sigma[i])});
    } else {
        const auto& arr = p.raw("points");
        if (!arr.is_array()) throw ConfigError("parameters.points", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const Section s(arr[i], "parameters.points[" + std::to_string(i) + "]");
            points.push_back({s.number("photon_number"), hz_to_rad(s.number("coupling_hz")),
                              hz_to_rad(s.number("sigma_hz", 0.0))});
            s.finish();
        }
    }
    p.finish();

    ctx.computing = true;
    const auto r = spectroscopy::fit_g0(points);
    ctx.write("fit_g0.csv", fit_table(r, {{"g0_hz", true}}));
    ctx.diagnostics["fit"] = fit_diagnostics(r);
    ctx.summary << "g0/2pi " << rad_to_hz(r.value("g0")) << " +- " << rad_to_hz(r.uncertainty("g0")) << " Hz\n";
}

void run_pipeline(Context& ctx) {
    const Section p(ctx.config.parameters, "parameters");
    pipeline::G0PipelineConfig c;
    c.device = config::parse_device(p.child_or_empty("device"));
    c.resonator = device::notch_params();
    c.resonator.resonator_frequency = c.device.resonator_frequency;
    c.resonator = parse_notch(p.child_or_empty("resonator"), c.resonator);
    c.g0_true = hz_to_rad(p.number("g0_hz", rad_to_hz(c.device.single_photon_coupling)));
    if (p.has("drive_amplitudes_hz")) {
        for (double v : p.numbers("drive_amplitudes_hz")) c.drive_amplitudes.push_back(hz_to_rad(v));
    } else {
        const auto pw = p.child_or_empty("powers");
        std::vector<double> dbm(device::sideband_powers_dbm.begin(), device::sideband_powers_dbm.end());
        if (pw.has("dbm")) dbm = pw.numbers("dbm");
        const double ref_dbm = pw.number("reference_dbm", device::reference_power_dbm);
        const double ref_n = pw.number("reference_photon_number",
                                       std::pow(device::crossing_coupling_hz / device::g0_hz, 2));
        pw.finish();
        c.drive_amplitudes = pipeline::drive_amplitudes_for_powers(dbm, ref_dbm, ref_n, -c.device.resonator_frequency,
                                                                   c.device.anharmonicity);
    }
    c.sweep_points = p.integer("sweep_points", c.sweep_points);
    c.sweep_half_span = hz_to_rad(p.number("sweep_half_span_hz", 0.0));
    c.probe_half_span = hz_to_rad(p.number("probe_half_span_hz", 0.0));
    c.probe_step = hz_to_rad(p.number("probe_step_hz", 0.0));
    c.s21_noise = p.number("s21_noise", 0.0);
    c.stark_noise = p.number("stark_noise", 0.0);
    c.min_depth = p.number("min_depth", 0.0);
    p.finish();
    if (c.s21_noise > 0.0 || c.stark_noise > 0.0) c.seed = ctx.require_seed("noise > 0");
    try {
        c.validate();
    } catch (const DomainError& e) {
        throw ConfigError("parameters", e.what());
    }

    ctx.computing = true;
    const auto r = pipeline::run_g0_pipeline(c);
    csv::Table pts{{"drive_amplitude_hz", "photon_number_true", "photon_number", "coupling_true_hz", "coupling_hz",
                    "coupling_uncertainty_hz", "stark_shift_hz", "crossing_drive_frequency_hz", "minima_count"},
                   {}};
    for (const auto& x : r.points) {
        pts.add_row({rad_to_hz(x.drive_amplitude), x.photon_number_true, x.photon_number, rad_to_hz(x.coupling_true),
                     rad_to_hz(x.coupling), rad_to_hz(x.coupling_uncertainty), rad_to_hz(x.stark_shift),
                     rad_to_hz(x.crossing_drive_frequency), static_cast<double>(x.minima_count)});
    }
    ctx.write("pipeline_points.csv", pts);
    csv::Table cross{{"power_index", "drive_hz", "minimum_hz"}, {}};
    for (std::size_t i = 0; i < r.crossings.size(); ++i)
        for (const auto& s : r.crossings[i])
            for (double m : s.minima) cross.add_row({static_cast<double>(i), rad_to_hz(s.drive_frequency), rad_to_hz(m)});
    ctx.write("crossings.csv", cross);
    ctx.write("fit_g0.csv", fit_table(r.g0_fit, {{"g0_hz", true}}));
    ctx.diagnostics["fit"] = fit_diagnostics(r.g0_fit);
    ctx.diagnostics["g0_true_hz"] = rad_to_hz(c.g0_true);
    double n_max = 0.0;
    for (const auto& x : r.points) n_max = std::max(n_max, x.photon_number);
    ctx.invariants["all_photon_numbers_below_one"] = n_max < 1.0;
    ctx.summary << "g0/2pi " << rad_to_hz(r.g0()) << " +- " << rad_to_hz(r.g0_fit.uncertainty("g0"))
                << " Hz (injected " << rad_to_hz(c.g0_true) << " Hz)\n";
}

void dispatch(Context& ctx) {
    using config::ExperimentKind;
    switch (ctx.config.kind) {
        case ExperimentKind::Estimate: return run_estimate(ctx);
        case ExperimentKind::Chevron: return run_chevron(ctx);
        case ExperimentKind::Spectrum: return run_spectrum(ctx);
        case ExperimentKind::Calibrate: return run_calibrate(ctx);
        case ExperimentKind::FitNotch: return run_fit_notch(ctx);
        case ExperimentKind::FitCrossing: return run_fit_crossing(ctx);
        case ExperimentKind::ExtractG0: return run_extract_g0(ctx);
        case ExperimentKind::Pipeline: return run_pipeline(ctx);
    }
}

}  // namespace

int run(const ExperimentConfig& config, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    Context ctx(config);
    ctx.out = options.output.value_or(config.output);
    ctx.seed = options.seed ? options.seed : config.seed;
    ctx.threads = std::max(1, options.threads);
    int code = exit_success;
    std::string error;
    try {
        std::filesystem::create_directories(ctx.out);
        dispatch(ctx);
    } catch (const ConfigError& e) {
        code = exit_config_error;
        error = e.what();
    } catch (const std::exception& e) {
        // Bad parameter values surface before computing starts; anything
        // later is a numerical failure.
        code = ctx.computing ? exit_numerical_failure : exit_config_error;
        error = e.what();
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    Json manifest{{"experiment", std::string(config::kind_name(config.kind))},
                  {"config_hash", config::config_hash(config.document)},
                  {"version", toolkit_version},
                  {"wall_clock_s", elapsed},
                  {"exit_code", code},
                  {"outputs", ctx.outputs},
                  {"diagnostics", ctx.diagnostics},
                  {"invariants", ctx.invariants}};
    if (ctx.seed) manifest["seed"] = *ctx.seed;
    if (!error.empty()) manifest["error"] = error;
    try {
        if (std::filesystem::is_directory(ctx.out)) csv::write_text_atomic(ctx.out / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        if (options.log) *options.log << "warning: manifest not written: " << e.what() << "\n";
    }
    if (options.log) {
        if (code == exit_success) {
            *options.log << ctx.summary.str();
        } else {
            *options.log << (code == exit_config_error ? "config error: " : "numerical failure: ") << error << "\n";
        }
    }
    return code;
}

int run_file(const std::filesystem::path& path, std::optional<config::ExperimentKind> expected,
             const RunOptions& options) {
    try {
        const auto cfg = config::load_config(path);
        if (expected && *expected != cfg.kind) {
            throw ConfigError("experiment", "document describes '" + std::string(config::kind_name(cfg.kind)) +
                                                "' but '" + std::string(config::kind_name(*expected)) +
                                                "' was requested");
        }
        return run(cfg, options);
    } catch (const ConfigError& e) {
        if (options.log) *options.log << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
}

}  // namespace ppcqed
