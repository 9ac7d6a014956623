// edp: self-consistent spectra for energy-dependent potentials
//
// Subcommands:
//   spectrum     levels E(n) of a deformed system as CSV
//   masses       quarkonium mass tables vs experiment as CSV
//   fit          splitting-fit parameters as CSV
//   xform-check  numeric-vs-closed-form check of the transformation engine
//
// Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "edp/errors.hpp"
#include "edp/quarkonia.hpp"
#include "edp/spectrum.hpp"
#include "edp/transform.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt9(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

// All knobs of a run; optionals fall back to system-dependent defaults.
struct RunConfig {
    std::string command;
    std::string system;
    std::optional<double> q;
    std::vector<double> lambdas;
    std::optional<int> n_max;
    std::optional<double> quark_mass;
    std::string out;
    std::string data_dir;

    // xform-check parameters
    std::optional<double> x_k, x_c, x_a, x_mass, u_min, u_max;
    std::optional<int> points;

    // optional explicit quarkonia parameters (skips the fit)
    std::optional<double> qq_k, qq_p;
};

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
    if (j.contains("system")) cfg.system = j.at("system").get<std::string>();
    if (j.contains("q")) cfg.q = j.at("q").get<double>();
    if (j.contains("lambda")) {
        cfg.lambdas.clear();
        if (j.at("lambda").is_array()) {
            for (const auto& v : j.at("lambda")) cfg.lambdas.push_back(v.get<double>());
        } else {
            cfg.lambdas.push_back(j.at("lambda").get<double>());
        }
    }
    if (j.contains("n_max")) cfg.n_max = j.at("n_max").get<int>();
    if (j.contains("quark_mass")) cfg.quark_mass = j.at("quark_mass").get<double>();
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    if (j.contains("data_dir")) cfg.data_dir = j.at("data_dir").get<std::string>();
    if (j.contains("xform")) {
        const auto& x = j.at("xform");
        if (x.contains("k")) cfg.x_k = x.at("k").get<double>();
        if (x.contains("c")) cfg.x_c = x.at("c").get<double>();
        if (x.contains("a")) cfg.x_a = x.at("a").get<double>();
        if (x.contains("mass")) cfg.x_mass = x.at("mass").get<double>();
        if (x.contains("u_min")) cfg.u_min = x.at("u_min").get<double>();
        if (x.contains("u_max")) cfg.u_max = x.at("u_max").get<double>();
        if (x.contains("points")) cfg.points = x.at("points").get<int>();
    }
    if (j.contains("quarkonia")) {
        const auto& q = j.at("quarkonia");
        if (q.contains("k")) cfg.qq_k = q.at("k").get<double>();
        if (q.contains("p")) cfg.qq_p = q.at("p").get<double>();
    }
}

nlohmann::json effective_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["system"] = cfg.system;
    if (cfg.q) j["q"] = *cfg.q;
    j["lambda"] = cfg.lambdas;
    if (cfg.n_max) j["n_max"] = *cfg.n_max;
    if (cfg.quark_mass) j["quark_mass"] = *cfg.quark_mass;
    if (!cfg.out.empty()) j["out"] = cfg.out;
    if (!cfg.data_dir.empty()) j["data_dir"] = cfg.data_dir;
    nlohmann::json x;
    if (cfg.x_k) x["k"] = *cfg.x_k;
    if (cfg.x_c) x["c"] = *cfg.x_c;
    if (cfg.x_a) x["a"] = *cfg.x_a;
    if (cfg.x_mass) x["mass"] = *cfg.x_mass;
    if (cfg.u_min) x["u_min"] = *cfg.u_min;
    if (cfg.u_max) x["u_max"] = *cfg.u_max;
    if (cfg.points) x["points"] = *cfg.points;
    if (!x.empty()) j["xform"] = x;
    nlohmann::json qq;
    if (cfg.qq_k) qq["k"] = *cfg.qq_k;
    if (cfg.qq_p) qq["p"] = *cfg.qq_p;
    if (!qq.empty()) j["quarkonia"] = qq;
    return j;
}

void write_atomic(const std::string& path, const std::string& content) {
    if (path.empty()) throw UsageError("no output path given (--out)");
    const std::filesystem::path target(path);
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, target);
}

std::string data_file(const RunConfig& cfg) {
    std::string dir = cfg.data_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("EDP_DATA_DIR")) dir = env;
    }
    if (dir.empty()) dir = EDP_DEFAULT_DATA_DIR;
    std::string path = dir + "/quarkonia_experimental.csv";
    if (!std::filesystem::exists(path)) {
        throw UsageError("data file not found: " + path);
    }
    return path;
}

int run_spectrum(const RunConfig& cfg) {
    if (cfg.lambdas.size() > 1) {
        throw UsageError("spectrum takes a single --lambda");
    }
    const double lambda = cfg.lambdas.empty() ? 0.0 : cfg.lambdas.front();
    const double q = cfg.q.value_or(1.0);
    const int n_max = cfg.n_max.value_or(20);
    if (n_max < 0 || n_max > 1000000) throw UsageError("n_max must be in [0, 1e6]");

    std::vector<edp::SolvedLevel> rows;
    if (cfg.system == "ho" || cfg.system == "hydrogen") {
        if (cfg.system == "hydrogen" && n_max < 1) {
            throw UsageError("hydrogen spectra need n_max >= 1");
        }
        const auto base = (cfg.system == "ho") ? edp::BaseSpectrum::harmonic(1.0)
                                               : edp::BaseSpectrum::hydrogen_atom(0.5);
        rows = edp::spectrum_table(base, {lambda, q}, n_max);
    } else if (const auto system = edp::quarkonia::system_from_string(cfg.system)) {
        if (cfg.qq_k || cfg.qq_p) {
            const auto base =
                edp::BaseSpectrum::quarkonium(cfg.qq_k.value_or(1.0), cfg.qq_p.value_or(0.0));
            rows = edp::spectrum_table(base, {lambda, q}, n_max);
        } else {
            if (q != 1.0) {
                throw UsageError(
                    "fitted quarkonia spectra are defined for q = 1; pass explicit "
                    "quarkonia.k/p in the config for other exponents");
            }
            const auto tables = edp::quarkonia::load_experimental(data_file(cfg));
            const double mq =
                cfg.quark_mass.value_or(edp::quarkonia::default_quark_mass(*system));
            const auto fit = edp::quarkonia::fit(*system, lambda, tables.at(*system), mq);
            if (!fit.converged) throw edp::convergence_error("quarkonia fit did not converge");
            for (int n = 0; n <= n_max; ++n) {
                edp::SolvedLevel level;
                level.n = n;
                level.base_energy =
                    edp::quarkonia::beta_coefficients(n, fit.k_sq, fit.k_sq_p_sq) / 16.0;
                try {
                    level.energy =
                        edp::quarkonia::energy_coefficients(n, fit.k_sq, fit.k_sq_p_sq, lambda);
                } catch (const edp::pole_error& e) {
                    level.valid = false;
                    level.reason = e.what();
                }
                rows.push_back(level);
            }
        }
    } else {
        throw UsageError("unknown system '" + cfg.system + "'");
    }

    std::string csv = "n,base_energy,energy,valid,branch\n";
    for (const auto& row : rows) {
        csv += std::to_string(row.n) + "," + fmt9(row.base_energy) + "," +
               (row.valid ? fmt9(row.energy) : "") + "," +
               (row.valid ? "true" : "false") + "," + edp::to_string(row.branch) + "\n";
    }
    write_atomic(cfg.out, csv);
    return 0;
}

int run_masses(const RunConfig& cfg) {
    const auto system = edp::quarkonia::system_from_string(cfg.system);
    if (!system) throw UsageError("masses requires --system ccbar or bbbar");
    std::vector<double> lambdas = cfg.lambdas;
    if (lambdas.empty()) {
        lambdas = (*system == edp::quarkonia::System::ccbar)
                      ? std::vector<double>{0.0, -0.2, -0.4}
                      : std::vector<double>{0.0, -0.3, -0.6};
    }
    const int n_max = cfg.n_max.value_or(8);
    if (n_max < 0 || n_max > 1000000) throw UsageError("n_max must be in [0, 1e6]");
    const double mq = cfg.quark_mass.value_or(edp::quarkonia::default_quark_mass(*system));

    const auto tables = edp::quarkonia::load_experimental(data_file(cfg));
    const auto report =
        edp::quarkonia::mass_table(*system, lambdas, tables.at(*system), mq, n_max);
    if (report.rows.empty()) {
        throw edp::convergence_error("all requested fits failed");
    }
    for (const double failed : report.failed_lambdas) {
        std::cerr << "warning: fit failed for lambda = " << fmt9(failed)
                  << ", column skipped\n";
    }

    std::string csv = "state,lambda,mass_GeV,experimental_GeV,deviation\n";
    for (const auto& row : report.rows) {
        csv += row.state + "," + fmt9(row.lambda) + "," + fmt9(row.mass_gev) + ",";
        csv += row.experimental ? fmt9(*row.experimental) : "";
        csv += ",";
        csv += row.deviation ? fmt9(*row.deviation) : "";
        csv += "\n";
    }
    write_atomic(cfg.out, csv);
    return 0;
}

int run_fit(const RunConfig& cfg) {
    const auto system = edp::quarkonia::system_from_string(cfg.system);
    if (!system) throw UsageError("fit requires --system ccbar or bbbar");
    std::vector<double> lambdas = cfg.lambdas;
    if (lambdas.empty()) lambdas = {0.0};
    const double mq = cfg.quark_mass.value_or(edp::quarkonia::default_quark_mass(*system));
    const auto tables = edp::quarkonia::load_experimental(data_file(cfg));

    std::string csv = "system,lambda,k_sq,k_sq_p_sq,residual_1,residual_2,converged\n";
    for (const double lambda : lambdas) {
        const auto f = edp::quarkonia::fit(*system, lambda, tables.at(*system), mq);
        csv += edp::quarkonia::to_string(*system) + "," + fmt9(lambda) + "," +
               fmt9(f.k_sq) + "," + fmt9(f.k_sq_p_sq) + "," + fmt9(f.residuals[0]) + "," +
               fmt9(f.residuals[1]) + "," + (f.converged ? "true" : "false") + "\n";
    }
    write_atomic(cfg.out, csv);
    return 0;
}

int run_xform_check(const RunConfig& cfg) {
    const bool oscillator = cfg.system == "ho";
    if (!oscillator && cfg.system != "hydrogen") {
        throw UsageError("xform-check requires --system ho or hydrogen");
    }
    const double k = cfg.x_k.value_or(2.0);
    const double c = cfg.x_c.value_or(oscillator ? 1.5 : 2.0);
    const double a = cfg.x_a.value_or(oscillator ? -1.0 : 0.0);
    const double mass = cfg.x_mass.value_or(1.0);
    const double u_min = cfg.u_min.value_or(0.2);
    const double u_max = cfg.u_max.value_or(5.0);
    const int points = cfg.points.value_or(241);
    if (points < 8) throw UsageError("xform-check needs at least 8 grid points");
    if (!(u_min > 0.0) || !(u_max > u_min)) throw UsageError("need 0 < u_min < u_max");

    const auto spec = oscillator ? edp::xform::oscillator_spec(k, c, a)
                                 : edp::xform::coulomb_spec(k, c, a);
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) {
        grid[i] = u_min + (u_max - u_min) * i / (points - 1);
    }

    const auto result = edp::xform::split_potential_energy(spec, grid, mass);
    const double e_closed = oscillator ? edp::xform::oscillator_split_energy(c, a, k, mass)
                                       : edp::xform::coulomb_split_energy(k, mass);

    double dev_w = 0.0;
    double dev_v = 0.0;
    std::string csv = "u,W_numeric,W_closed,v_numeric,v_closed\n";
    for (int i = 0; i < points; ++i) {
        const double u = grid[i];
        const double w_closed = oscillator ? edp::xform::oscillator_gauge_weight(u, c, k)
                                           : edp::xform::coulomb_gauge_weight(u, c, k);
        const double v_closed = oscillator
                                    ? edp::xform::oscillator_effective_potential(u, c, k)
                                    : edp::xform::coulomb_effective_potential(u, c, k);
        dev_w = std::max(dev_w, std::abs(result.W[i] - w_closed));
        dev_v = std::max(dev_v, std::abs(result.v[i] - v_closed));
        csv += fmt9(u) + "," + fmt9(result.W[i]) + "," + fmt9(w_closed) + "," +
               fmt9(result.v[i]) + "," + fmt9(v_closed) + "\n";
    }
    const double e_dev = std::abs(result.energy - e_closed);
    const std::string summary = "# max_dev_W=" + fmt9(dev_w) + ",max_dev_v=" + fmt9(dev_v) +
                                ",E_extracted=" + fmt9(result.energy) +
                                ",E_closed=" + fmt9(e_closed) +
                                ",constancy_defect=" + fmt9(result.constancy_defect);
    csv += summary + "\n";
    write_atomic(cfg.out, csv);
    std::cout << summary << "\n";

    const bool ok = dev_w < 1e-5 && dev_v < 1e-5 &&
                    e_dev <= 1e-6 * std::max(1.0, std::abs(e_closed));
    return ok ? 0 : kExitNumerical;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"edp: self-consistent spectra for energy-dependent potentials"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::string emit_config_path;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--system", cfg.system, "ho, hydrogen, ccbar, or bbbar");
        cmd->add_option("--q", cfg.q, "deformation exponent q");
        cmd->add_option("--lambda", cfg.lambdas, "saturation parameter (repeatable)");
        cmd->add_option("--n-max", cfg.n_max, "highest level index");
        cmd->add_option("--quark-mass", cfg.quark_mass, "constituent quark mass, GeV");
        cmd->add_option("--out", cfg.out, "output CSV path");
        cmd->add_option("--config", config_path, "JSON config file mirroring the flags");
        cmd->add_option("--data", cfg.data_dir, "directory of the experimental data file");
        cmd->add_option("--emit-effective-config", emit_config_path,
                        "write the merged configuration as JSON");
        cmd->add_option("--points", cfg.points, "grid points (xform-check)");
    };

    auto* spectrum = app.add_subcommand("spectrum", "level table of a deformed system");
    auto* masses = app.add_subcommand("masses", "quarkonium mass table vs experiment");
    auto* fit = app.add_subcommand("fit", "splitting-fit parameters");
    auto* xcheck = app.add_subcommand("xform-check", "transformation-engine cross-check");
    for (auto* cmd : {spectrum, masses, fit, xcheck}) add_common(cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    // precedence: defaults < config file < command line
    if (!config_path.empty()) {
        RunConfig merged;
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot read config " << config_path << "\n";
            return kExitUsage;
        }
        try {
            nlohmann::json j;
            in >> j;
            apply_json(merged, j);
        } catch (const std::exception& e) {
            std::cerr << "error: bad config: " << e.what() << "\n";
            return kExitUsage;
        }
        if (!cfg.system.empty()) merged.system = cfg.system;
        if (cfg.q) merged.q = cfg.q;
        if (!cfg.lambdas.empty()) merged.lambdas = cfg.lambdas;
        if (cfg.n_max) merged.n_max = cfg.n_max;
        if (cfg.quark_mass) merged.quark_mass = cfg.quark_mass;
        if (!cfg.out.empty()) merged.out = cfg.out;
        if (!cfg.data_dir.empty()) merged.data_dir = cfg.data_dir;
        if (cfg.points) merged.points = cfg.points;
        cfg = merged;
    }

    CLI::App* active = app.get_subcommands().front();
    cfg.command = active->get_name();

    if (!emit_config_path.empty()) {
        nlohmann::json j = effective_json(cfg);
        j["command"] = cfg.command;
        std::ofstream out(emit_config_path, std::ios::trunc);
        out << j.dump(2) << "\n";
    }

    try {
        if (cfg.command == "spectrum") return run_spectrum(cfg);
        if (cfg.command == "masses") return run_masses(cfg);
        if (cfg.command == "fit") return run_fit(cfg);
        return run_xform_check(cfg);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
