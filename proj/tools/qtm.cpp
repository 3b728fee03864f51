// qtm: base-d Fourier phase-estimation magnetometry toolbox.
//
// Subcommands: run, solve-pulse, density, optimize-bias, sweep.
// Config keys can be overridden with --section.key=value.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtm/analysis.hpp"
#include "qtm/config.hpp"
#include "qtm/io.hpp"
#include "qtm/protocol.hpp"
#include "qtm/pulse.hpp"
#include "qtm/qudit.hpp"
#include "qtm/transmon.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_solver = 3;
constexpr int exit_io = 4;

using json = nlohmann::ordered_json;

qtm::ExperimentConfig load_with_overrides(const std::string& path,
                                          const std::vector<std::string>& extras) {
    qtm::config_detail::RawConfig raw;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw qtm::ConfigError("cannot open config file: " + path);
        raw = qtm::config_detail::parse_ini(in, path);
    }
    qtm::apply_overrides(raw, extras);
    return qtm::build_config(raw, path.empty() ? "<overrides>" : path);
}

// Field scale h0 and the oracle: transmon backend when a device and a true
// flux are configured, ideal oracle otherwise.
struct RunSetup {
    qtm::PhaseOracle oracle;
    double h0;
};

RunSetup make_setup(const qtm::ExperimentConfig& cfg) {
    if (cfg.device && cfg.true_flux) {
        const auto& dev = *cfg.device;
        dev.validate();
        double mu = std::abs(qtm::magnetic_moment(dev, cfg.reference_flux));
        if (!(mu > 0.0))
            throw qtm::ConfigError("magnetic moment vanishes at the reference flux (sweet spot)");
        double h0 = qtm::two_pi * qtm::constants().hbar /
                    (cfg.protocol.base * mu * cfg.protocol.tau0);
        return {qtm::transmon_backend(dev, *cfg.true_flux, cfg.reference_flux), h0};
    }
    if (cfg.true_field)
        return {qtm::ideal_oracle(cfg.protocol, *cfg.true_field), cfg.protocol.h0()};
    throw qtm::ConfigError("config needs either [field] h_true_t or a [device] plus phi_true_wb");
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& extras) {
    auto cfg = load_with_overrides(config_path, extras);
    cfg.protocol.validate();
    RunSetup setup = make_setup(cfg);

    auto [digits, records] = qtm::run_fourier_estimation(cfg.protocol, setup.oracle);
    double h_est = qtm::decode_field(digits, setup.h0);
    auto spec = qtm::PosteriorSpec::from_digits(digits);

    if (!cfg.records_csv.empty())
        qtm::write_records_csv(cfg.records_csv, records, cfg.protocol.base);

    json result;
    result["base"] = cfg.protocol.base;
    result["steps"] = cfg.protocol.steps;
    result["digits"] = digits.digits();
    result["h_estimate_t"] = h_est;
    result["posterior_peak_rad"] = spec.reference_phase;
    result["coherence_time_s"] =
        qtm::coherence_time(cfg.protocol.base, cfg.protocol.steps, cfg.protocol.tau0);
    if (cfg.device) {
        if (auto warn = cfg.device->regime_warning(cfg.reference_flux))
            result["device_warning"] = *warn;
    }
    std::string text = result.dump(2);
    if (!cfg.result_json.empty()) {
        auto out = qtm::open_output(cfg.result_json);
        out << text << "\n";
    }
    std::cout << text << "\n";
    return exit_ok;
}

int cmd_solve_pulse(const std::string& config_path, const std::vector<std::string>& extras,
                    const std::string& unitary_prefix, const std::string& waveform_path) {
    qtm::PulseSolution sol = qtm::solve_transcendental();
    std::printf("epsilon0 = %.4f\nxi0 = %.4f\ndelta0 = %.4f\n", sol.epsilon, sol.xi, sol.delta);
    std::printf("residual_amplitude = %.3e\nresidual_phase = %.3e\n",
                sol.residual_amplitude, sol.residual_phase);
    for (const auto& r : qtm::scan_transcendental_roots())
        if (r.epsilon != sol.epsilon)
            std::printf("other root: epsilon = %.4f, xi = %.4f\n", r.epsilon, r.xi);

    if (!unitary_prefix.empty()) {
        auto prot = qtm::protocol_unitaries(sol);
        qtm::write_unitary_csv(unitary_prefix + "_readout.csv", prot.readout);
        qtm::write_unitary_csv(unitary_prefix + "_preparation.csv", prot.preparation);
    }
    if (!waveform_path.empty()) {
        auto cfg = load_with_overrides(config_path, extras);
        if (!cfg.device)
            throw qtm::ConfigError("--emit-waveform needs a [device] section");
        if (!(cfg.detuning > 0.0))
            throw qtm::ConfigError("--emit-waveform needs [pulse] delta_omega_rad_s > 0");
        auto settings = qtm::iq_pulse_settings(qtm::PulseMode::readout, *cfg.device,
                                               cfg.reference_flux, cfg.detuning, cfg.v1,
                                               cfg.v2, cfg.sample_rate);
        double tau_p = sol.epsilon / cfg.detuning;
        qtm::write_waveform_csv(waveform_path, qtm::synthesize_waveform(settings, tau_p));
    }
    return exit_ok;
}

int cmd_density(int d, int steps, int points, double span, const std::string& out_path) {
    if (d < 2 || steps < 1 || points < 2)
        throw qtm::ConfigError("density needs d >= 2, steps >= 1, points >= 2");
    qtm::PosteriorSpec spec{d, steps, 0.0};
    auto out = qtm::open_output(out_path);
    out << "delta_phi_rad,density\n";
    for (int i = 0; i < points; ++i) {
        double dphi = -span + 2.0 * span * i / (points - 1);
        out << qtm::format_double(dphi) << ','
            << qtm::format_double(qtm::posterior_density(dphi, spec)) << "\n";
    }
    return exit_ok;
}

struct T2Table {
    std::vector<double> flux;
    std::vector<double> t2;

    double interpolate(double phi) const {
        if (phi <= flux.front()) return t2.front();
        if (phi >= flux.back()) return t2.back();
        for (std::size_t i = 1; i < flux.size(); ++i)
            if (phi <= flux[i]) {
                double f = (phi - flux[i - 1]) / (flux[i] - flux[i - 1]);
                return t2[i - 1] + f * (t2[i] - t2[i - 1]);
            }
        return t2.back();
    }
};

T2Table read_t2_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qtm::IoError("cannot open T2 table: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "phi_wb,t2_s")
        throw qtm::ConfigError(path + ": expected header phi_wb,t2_s");
    T2Table t;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw qtm::ConfigError(path + ":" + std::to_string(lineno) + ": malformed row");
        try {
            t.flux.push_back(std::stod(line.substr(0, comma)));
            t.t2.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw qtm::ConfigError(path + ":" + std::to_string(lineno) + ": malformed number");
        }
    }
    if (t.flux.empty()) throw qtm::ConfigError(path + ": empty T2 table");
    return t;
}

int cmd_optimize_bias(const std::string& config_path, const std::vector<std::string>& extras,
                      const std::string& t2_table_path, int d, double tau0) {
    auto cfg = load_with_overrides(config_path, extras);
    if (!cfg.device) throw qtm::ConfigError("optimize-bias needs a [device] section");
    const auto& dev = *cfg.device;
    dev.validate();

    json report;
    auto opt = qtm::optimal_bias(dev);
    report["mu_only"] = {
        {"phi_c_wb", opt.flux},
        {"mu_j_per_t", opt.moment},
        {"tan_condition_phi_wb", opt.tan_candidate_flux},
        {"closed_form_estimate_mu_j_per_t", opt.closed_form_estimate_moment},
        {"validity_warning", opt.validity_warning},
    };

    double best_phi = opt.flux;
    double best_t2 = 0.0;
    if (!t2_table_path.empty()) {
        T2Table table = read_t2_table(t2_table_path);
        const double phi0 = qtm::constants().flux_quantum;
        double best = -1.0;
        for (int i = 1; i < 20000; ++i) {
            double phi = 0.5 * phi0 * i / 20000;
            double prod = std::abs(qtm::magnetic_moment(dev, phi)) * table.interpolate(phi);
            if (prod > best) { best = prod; best_phi = phi; }
        }
        best_t2 = table.interpolate(best_phi);
        report["mu_t2_product"] = {
            {"phi_c_wb", best_phi},
            {"mu_j_per_t", qtm::magnetic_moment(dev, best_phi)},
            {"t2_s", best_t2},
            {"product", best},
        };
    }

    double mu_star = std::abs(qtm::magnetic_moment(dev, best_phi));
    if (best_t2 > 0.0 && mu_star > 0.0) {
        report["delta_h_t2_limited_t"] = qtm::t2_limited_precision(mu_star, d, best_t2);
        if (tau0 > 0.0)
            report["k_max"] =
                1 + static_cast<int>(std::floor(std::log(best_t2 / tau0) /
                                                std::log(static_cast<double>(d))));
    }
    std::cout << report.dump(2) << "\n";
    return exit_ok;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& extras,
              int points, const std::string& out_path) {
    auto cfg = load_with_overrides(config_path, extras);
    cfg.protocol.validate();
    if (points < 2) throw qtm::ConfigError("sweep needs at least 2 points");

    auto out = qtm::open_output(out_path);
    out << "h_true_t,h_est_t,abs_error_t,digits\n";
    for (int i = 0; i < points; ++i) {
        double h = cfg.protocol.field_range * i / points;
        qtm::ProtocolConfig pc = cfg.protocol;
        pc.seed = qtm::SplitMix64(cfg.protocol.seed).split(i).next_u64();
        auto [digits, records] = qtm::run_fourier_estimation(pc, qtm::ideal_oracle(pc, h));
        double est = qtm::decode_field(digits, pc.h0());
        out << qtm::format_double(h) << ',' << qtm::format_double(est) << ','
            << qtm::format_double(std::abs(est - h)) << ',';
        for (int k = 0; k < digits.length(); ++k) out << digits.digit(k);
        out << "\n";
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"base-d Fourier phase-estimation magnetometry toolbox"};
    app.require_subcommand(1);

    std::string config_path;
    std::string unitary_prefix, waveform_path, out_path, t2_table_path;
    int d = 3, steps = 3, points = 1001;
    double span = qtm::pi, tau0 = 0.0;

    auto* run = app.add_subcommand("run", "run the Fourier estimation protocol");
    run->add_option("--config", config_path, "experiment config file");
    run->allow_extras();

    auto* solve = app.add_subcommand("solve-pulse", "solve the readout-pulse constraints");
    solve->add_option("--config", config_path, "experiment config file");
    solve->add_option("--emit-unitaries", unitary_prefix, "write U_r/U_p CSV with this prefix");
    solve->add_option("--emit-waveform", waveform_path, "write the readout waveform CSV");
    solve->allow_extras();

    auto* density = app.add_subcommand("density", "emit posterior density profile");
    density->add_option("--d", d, "base");
    density->add_option("--steps", steps, "number of protocol steps");
    density->add_option("--points", points, "grid points");
    density->add_option("--span", span, "half-width of the delta-phi grid, rad");
    density->add_option("--out", out_path, "output CSV path")->required();

    auto* optimize = app.add_subcommand("optimize-bias", "optimize the flux working point");
    optimize->add_option("--config", config_path, "experiment config file");
    optimize->add_option("--t2-table", t2_table_path, "CSV phi_wb,t2_s");
    optimize->add_option("--d", d, "base for the precision report");
    optimize->add_option("--tau0", tau0, "minimal Ramsey delay for the K_max report, s");
    optimize->allow_extras();

    auto* sweep = app.add_subcommand("sweep", "sweep the true field over [0, H0)");
    sweep->add_option("--config", config_path, "experiment config file");
    sweep->add_option("--points", points, "number of sweep points");
    sweep->add_option("--out", out_path, "output CSV path")->required();
    sweep->allow_extras();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, run->remaining());
        if (solve->parsed())
            return cmd_solve_pulse(config_path, solve->remaining(), unitary_prefix, waveform_path);
        if (density->parsed()) return cmd_density(d, steps, points, span, out_path);
        if (optimize->parsed())
            return cmd_optimize_bias(config_path, optimize->remaining(), t2_table_path, d, tau0);
        if (sweep->parsed()) return cmd_sweep(config_path, sweep->remaining(), points, out_path);
    } catch (const qtm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const qtm::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return exit_solver;
    } catch (const qtm::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    }
    return exit_ok;
}
