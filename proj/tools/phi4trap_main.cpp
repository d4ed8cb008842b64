// Command-line front end: stationary states, spectra, PDE evolution,
// collective-coordinate reductions, and velocity scans, with reproducible
// run manifests. See README.md for the file formats.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "phi4trap/collective.hpp"
#include "phi4trap/csv.hpp"
#include "phi4trap/dynamics.hpp"
#include "phi4trap/manifest.hpp"
#include "phi4trap/model.hpp"
#include "phi4trap/scan.hpp"
#include "phi4trap/spectra.hpp"
#include "phi4trap/stationary.hpp"

namespace fs = std::filesystem;
using namespace phi4trap;

namespace {

struct GlobalOpts {
    double dx = 0.02;
    double xmax = 30.0;
    double dt = -1.0;      // < 0: use 0.5*dx
    double tmax = 400.0;
    int threads = 0;
    std::string out_dir = "out";
    std::string config_path;
};

SimParams make_params(const GlobalOpts& g, double omega) {
    SimParams p;
    p.omega = omega;
    p.dx = g.dx;
    p.x_max = g.xmax;
    p.dt = g.dt > 0.0 ? g.dt : 0.5 * g.dx;
    p.t_max = g.tmax;
    p.validate();
    return p;
}

struct RunContext {
    fs::path dir;
    RunManifest manifest;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    RunContext(const GlobalOpts& g, const std::string& command) {
        dir = g.out_dir;
        fs::create_directories(dir);
        manifest.command = command;
        if (!g.config_path.empty())
            manifest.input_hashes["config"] = file_hash(g.config_path);
    }

    void param(const std::string& k, double v) { manifest.parameters[k] = format_double(v); }
    void param(const std::string& k, const std::string& v) { manifest.parameters[k] = v; }

    void emit(const std::string& name, const CsvWriter& csv) {
        fs::path p = dir / name;
        csv.write(p);
        manifest.outputs.push_back(p);
    }

    void emit_text(const std::string& name, const std::string& text) {
        fs::path p = dir / name;
        std::ofstream os(p);
        os << text;
        if (!os) throw std::runtime_error("cannot write " + p.string());
        os.close();
        manifest.outputs.push_back(p);
    }

    void finish() {
        manifest.duration_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        manifest.write(dir);
    }
};

void record_params(RunContext& ctx, const SimParams& p) {
    ctx.param("omega", p.omega);
    ctx.param("dx", p.dx);
    ctx.param("x_max", p.x_max);
    ctx.param("dt", p.dt);
    ctx.param("t_max", p.t_max);
    ctx.param("newton_tol", p.newton_tol);
}

CsvWriter profile_csv(const Grid& g, const std::vector<double>& u) {
    CsvWriter csv({"x", "u"});
    for (int i = 0; i < g.n(); ++i) csv.add_row(std::array{g.node(i), u[i]});
    return csv;
}

CsvWriter spectrum_csv(const SpectrumResult& s) {
    CsvWriter csv({"re_lambda", "im_lambda"});
    for (const auto& l : s.lambda_pairs()) csv.add_row(std::array{l.real(), l.imag()});
    return csv;
}

CsvWriter trajectory_csv(const TrajectoryRecord& rec) {
    if (rec.pair) {
        CsvWriter csv({"t", "x_kink", "x_antikink", "X", "E"});
        for (std::size_t k = 0; k < rec.times.size(); ++k)
            csv.add_row(std::array{rec.times[k], rec.positions[k][0], rec.positions[k][1],
                                   rec.coordinate(k), rec.energies[k]});
        return csv;
    }
    CsvWriter csv({"t", "X", "E"});
    for (std::size_t k = 0; k < rec.times.size(); ++k)
        csv.add_row(std::array{rec.times[k], rec.positions[k][0], rec.energies[k]});
    return csv;
}

std::string outcome_json(const TrajectoryRecord& rec) {
    nlohmann::json j;
    j["outcome"] = outcome_label(rec.outcome);
    j["n_bounces"] = rec.outcome.n_bounces;
    j["final_time"] = rec.final_time;
    j["resolve_time"] = rec.resolve_time;
    j["energy_mean"] = rec.energy_mean;
    j["energy_drift"] = rec.energy_drift;
    auto& tp = j["turning_points"] = nlohmann::json::array();
    for (const auto& [t, x] : rec.turning_points) tp.push_back({{"t", t}, {"x", x}});
    return j.dump(2) + "\n";
}

CsvWriter cc_trajectory_csv(const CCTrajectory& tr) {
    CsvWriter csv({"t", "X", "Xdot", "A", "Adot", "H"});
    for (const auto& s : tr.samples)
        csv.add_row(std::array{s.t, s.X, s.Xdot, s.A, s.Adot, s.E});
    return csv;
}

CsvWriter cc_tables_csv(const CCTables& t) {
    std::vector<std::string> cols{"X"};
    for (const auto& n : t.names()) cols.push_back(n);
    for (const auto& n : t.names()) cols.push_back(n + "_prime");
    CsvWriter csv(cols);
    for (std::size_t k = 0; k < t.X().size(); ++k) {
        std::vector<double> row{t.X()[k]};
        for (std::size_t c = 0; c < t.names().size(); ++c) row.push_back(t.values(c)[k]);
        for (std::size_t c = 0; c < t.names().size(); ++c) row.push_back(t.derivs(c)[k]);
        csv.add_row(row);
    }
    return csv;
}

double cc_table_xmax(const SimParams& p) {
    const double xs = p.omega > 0.0 ? tf_support_radius(p.omega) : p.x_max;
    const double raw = 0.9 * std::min(xs, p.x_max);
    return std::floor(raw / 0.05) * 0.05;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phi4 kinks in a parabolic trap: stationary states, stability spectra,\n"
                 "collision dynamics, and collective-coordinate reductions"};
    app.set_version_flag("--version", kToolVersion);

    GlobalOpts g;
    app.add_option("--dx", g.dx, "spatial step")->capture_default_str();
    app.add_option("--xmax", g.xmax, "domain half-width")->capture_default_str();
    app.add_option("--dt", g.dt, "time step (default 0.5*dx)");
    app.add_option("--tmax", g.tmax, "evolution horizon")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads for scans (0 = hardware)")
        ->capture_default_str();
    app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
    app.set_config("--config", "", "flat key=value file for the global options");
    app.require_subcommand(1);

    double omega = 0.15;
    int kink_sign = 1;
    bool want_spectrum = false;
    double spectral_dx = 0.04;
    double x0 = 5.0, vin = 0.0;
    bool pair = false, cc_pair = false;
    int sample_every = 10;
    std::string dump_path, overlay_path;
    double cc_xstep = 0.05, v_offset = 0.0;
    double vmin = 0.0, vmax = 0.0, coarse = 2e-4, refine_tol = 1e-5;
    int vsteps = 12;

    auto* ground = app.add_subcommand("ground", "Newton ground state and TF comparison");
    ground->add_option("--omega", omega, "trap strength")->capture_default_str();

    auto* kink = app.add_subcommand("kink", "stationary kink and optional spectrum");
    kink->add_option("--omega", omega, "trap strength")->capture_default_str();
    kink->add_option("--sign", kink_sign, "+1 kink, -1 antikink")->capture_default_str();
    kink->add_flag("--spectrum", want_spectrum, "emit spectral plane and chi1");
    kink->add_option("--spectral-dx", spectral_dx, "eigensolve grid step")
        ->capture_default_str();

    auto* kak = app.add_subcommand("kak-equilibrium",
                                   "equilibrium separation x_cr and refined state");
    kak->add_option("--omega", omega, "trap strength")->capture_default_str();
    kak->add_flag("--spectrum", want_spectrum, "emit the KAK spectral plane");
    kak->add_option("--spectral-dx", spectral_dx, "eigensolve grid step")
        ->capture_default_str();

    auto* evolve_cmd = app.add_subcommand("evolve", "PDE run with outcome classification");
    evolve_cmd->add_option("--omega", omega, "trap strength")->capture_default_str();
    evolve_cmd->add_option("--x0", x0, "start position (kink) or half-separation (pair)")
        ->required();
    evolve_cmd->add_option("--v", vin, "speed toward the trap center")->required();
    evolve_cmd->add_flag("--pair", pair, "kink-antikink run");
    evolve_cmd->add_option("--sample-every", sample_every, "steps between samples")
        ->capture_default_str();
    evolve_cmd->add_option("--dump-field", dump_path,
                           "space-time field CSV (x rows, t columns)");

    auto* cc = app.add_subcommand("cc", "collective-coordinate reduction");
    cc->add_option("--omega", omega, "trap strength")->capture_default_str();
    cc->add_option("--x0", x0, "initial coordinate")->required();
    cc->add_option("--v", vin, "speed toward the trap center")->required();
    cc->add_flag("--pair", cc_pair, "two-coordinate kink-antikink model");
    cc->add_option("--xstep", cc_xstep, "coefficient tabulation step")->capture_default_str();
    cc->add_option("--v-offset", v_offset,
                   "added to the ODE initial speed (reported, never silent)");
    cc->add_option("--overlay", overlay_path, "PDE trajectory CSV to join on t");
    cc->add_option("--spectral-dx", spectral_dx, "chi1 eigensolve grid step")
        ->capture_default_str();

    auto* scan = app.add_subcommand("scan", "velocity sweep and bounce-window table");
    scan->add_option("--omega", omega, "trap strength")->capture_default_str();
    scan->add_option("--x0", x0, "half-separation")->required();
    scan->add_option("--vmin", vmin, "sweep start")->required();
    scan->add_option("--vmax", vmax, "sweep end")->required();
    scan->add_option("--step", coarse, "coarse velocity step")->capture_default_str();
    scan->add_option("--refine", refine_tol, "edge bisection tolerance")
        ->capture_default_str();

    auto* tmap = app.add_subcommand("turning-map", "turning point vs kinetic energy map");
    tmap->add_option("--omega", omega, "trap strength")->capture_default_str();
    tmap->add_option("--x0", x0, "start position")->required();
    tmap->add_option("--vmax", vmax, "largest subcritical speed")->required();
    tmap->add_option("--vsteps", vsteps, "number of speeds in (0, vmax]")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    if (auto* cfg = app.get_config_ptr(); cfg && cfg->count() > 0)
        g.config_path = cfg->as<std::string>();

    try {
        if (ground->parsed()) {
            RunContext ctx(g, "ground");
            SimParams p = make_params(g, omega);
            record_params(ctx, p);
            auto prof = solve_ground_state(p);
            ctx.emit("ground_profile.csv", profile_csv(prof.grid, prof.u));
            CsvWriter tf({"x", "u_tf"});
            double max_dev = 0.0, max_dev_x = 0.0;
            for (int i = 0; i < prof.grid.n(); ++i) {
                const double x = prof.grid.node(i);
                const double v = p.omega > 0 ? tf_profile(x, p.omega) : 1.0;
                tf.add_row(std::array{x, v});
                if (std::abs(prof.u[i] - v) > max_dev) {
                    max_dev = std::abs(prof.u[i] - v);
                    max_dev_x = x;
                }
            }
            ctx.emit("ground_tf.csv", tf);
            nlohmann::json rep;
            rep["residual_norm"] = prof.residual_norm;
            rep["u_center"] = prof.u[(prof.grid.n() - 1) / 2];
            rep["max_tf_deviation"] = max_dev;
            rep["max_tf_deviation_x"] = max_dev_x;
            ctx.emit_text("ground_report.json", rep.dump(2) + "\n");
            ctx.finish();
            std::cout << "ground state: residual " << prof.residual_norm
                      << ", max |u - u_TF| = " << max_dev << " at x = " << max_dev_x
                      << "\n";
        } else if (kink->parsed()) {
            RunContext ctx(g, "kink");
            SimParams p = make_params(g, omega);
            record_params(ctx, p);
            ctx.param("sign", static_cast<double>(kink_sign));
            auto prof = solve_kink(p, kink_sign);
            ctx.emit("kink_profile.csv", profile_csv(prof.grid, prof.u));
            std::cout << "kink: residual " << prof.residual_norm << "\n";
            if (want_spectrum) {
                ctx.param("spectral_dx", spectral_dx);
                auto spec = linearization_spectrum(prof, spectral_dx, true);
                ctx.emit("kink_spectrum.csv", spectrum_csv(spec));
                auto chi1 = extract_chi1(spec);
                CsvWriter chi({"x", "chi"});
                for (int i = 0; i < spec.grid.n(); ++i)
                    chi.add_row(std::array{spec.grid.node(i), chi1[i]});
                ctx.emit("kink_chi1.csv", chi);
                std::cout << "spectrum: n_unstable = " << spec.n_unstable;
                if (spec.n_unstable > 0)
                    std::cout << ", |lambda| = " << std::sqrt(spec.mu.front());
                std::cout << "\n";
            }
            ctx.finish();
        } else if (kak->parsed()) {
            RunContext ctx(g, "kak-equilibrium");
            SimParams p = make_params(g, omega);
            record_params(ctx, p);
            auto eq = find_equilibrium_separation(p);
            ctx.emit("kak_profile.csv", profile_csv(eq.state.grid, eq.state.u));
            nlohmann::json rep;
            rep["x_cr"] = eq.x_cr;
            rep["x0_projected"] = eq.x0_projected;
            rep["ansatz_residual"] = eq.ansatz_residual;
            rep["refined_residual"] = eq.state.residual_norm;
            ctx.emit_text("equilibrium.json", rep.dump(2) + "\n");
            std::cout << "x_cr = " << eq.x_cr << " (projected seed " << eq.x0_projected
                      << ")\n";
            if (want_spectrum) {
                ctx.param("spectral_dx", spectral_dx);
                auto spec = linearization_spectrum(eq.state, spectral_dx, true);
                ctx.emit("kak_spectrum.csv", spectrum_csv(spec));
                std::cout << "spectrum: n_unstable = " << spec.n_unstable << "\n";
            }
            ctx.finish();
        } else if (evolve_cmd->parsed()) {
            RunContext ctx(g, "evolve");
            SimParams p = make_params(g, omega);
            record_params(ctx, p);
            ctx.param("x0", x0);
            ctx.param("v", vin);
            ctx.param("pair", pair ? "true" : "false");
            ctx.param("sample_every", static_cast<double>(sample_every));
            EvolveOptions opt;
            opt.sample_every = sample_every;
            std::vector<double> dump_times;
            std::vector<std::vector<double>> dump_fields;
            if (!dump_path.empty())
                opt.dump = [&](double t, const std::vector<double>& u) {
                    dump_times.push_back(t);
                    dump_fields.push_back(u);
                };
            auto rec = pair ? run_kak(p, x0, vin, opt) : run_kink(p, x0, vin, opt);
            ctx.emit("trajectory.csv", trajectory_csv(rec));
            ctx.emit_text("outcome.json", outcome_json(rec));
            if (!dump_path.empty()) {
                Grid grid = make_grid(p);
                std::vector<std::string> cols{"x"};
                for (double t : dump_times) cols.push_back("t=" + format_double(t));
                CsvWriter field(cols);
                for (int i = 0; i < grid.n(); ++i) {
                    std::vector<double> row{grid.node(i)};
                    for (const auto& u : dump_fields) row.push_back(u[i]);
                    field.add_row(row);
                }
                field.write(dump_path);
                ctx.manifest.outputs.push_back(dump_path);
            }
            ctx.finish();
            std::cout << "outcome: " << outcome_label(rec.outcome) << " at t = "
                      << (rec.resolve_time >= 0 ? rec.resolve_time : rec.final_time)
                      << ", energy drift " << rec.energy_drift << "\n";
        } else if (cc->parsed()) {
            RunContext ctx(g, "cc");
            SimParams p = make_params(g, omega);
            record_params(ctx, p);
            ctx.param("x0", x0);
            ctx.param("v", vin);
            ctx.param("pair", cc_pair ? "true" : "false");
            ctx.param("xstep", cc_xstep);
            ctx.param("v_offset", v_offset);
            if (v_offset != 0.0)
                std::cout << "note: ODE initial speed offset " << v_offset
                          << " applied on top of v = " << vin << "\n";
            auto ground_state = solve_ground_state(p);
            const double table_xmax = cc_table_xmax(p);
            CCTables tables = [&] {
                if (!cc_pair) return build_single_tables(ground_state, table_xmax, cc_xstep);
                auto kink_prof = solve_kink(p, +1);
                auto spec = linearization_spectrum(kink_prof, spectral_dx, true);
                auto chi1 = extract_chi1(spec);
                return build_pair_tables(ground_state, chi1, spec.grid, table_xmax,
                                         cc_xstep);
            }();
            ctx.emit("cc_tables.csv", cc_tables_csv(tables));
            const double v_eff = vin + v_offset;
            CCTrajectory tr;
            if (cc_pair) {
                tr = integrate_cc_pair(tables, x0, v_eff, g.tmax);
            } else {
                // match the Lorentz-boosted PDE launch: the rigid ansatz
                // carries the same field momentum at the rate gamma*v
                const double rate = v_eff / std::sqrt(1.0 - v_eff * v_eff);
                const double xdot0 = x0 != 0.0 ? -std::copysign(rate, x0) : rate;
                tr = integrate_cc_single(tables, x0, xdot0, g.tmax);
            }
            ctx.emit("cc_trajectory.csv", cc_trajectory_csv(tr));
            if (!overlay_path.empty()) {
                auto pde = read_csv(overlay_path);
                ctx.manifest.input_hashes["overlay"] = file_hash(overlay_path);
                const std::size_t xcol = (!pde.empty() && pde[0].size() >= 5) ? 3 : 1;
                CsvWriter joint({"t", "X_pde", "X_cc"});
                std::size_t s = 0;
                for (const auto& row : pde) {
                    const double t = row[0];
                    while (s + 1 < tr.samples.size() && tr.samples[s + 1].t <= t) ++s;
                    if (s + 1 >= tr.samples.size()) break;
                    const auto& s0 = tr.samples[s];
                    const auto& s1 = tr.samples[s + 1];
                    const double a = (t - s0.t) / (s1.t - s0.t);
                    if (a < -1e-9 || a > 1.0 + 1e-9) continue;
                    joint.add_row(std::array{t, row[xcol], s0.X + a * (s1.X - s0.X)});
                }
                ctx.emit("cc_overlay.csv", joint);
            }
            ctx.finish();
            std::cout << "cc run: " << tr.samples.size() << " samples, end t = "
                      << tr.end_time << (tr.exited_range ? " (left table range)" : "")
                      << "\n";
        } else if (scan->parsed()) {
            RunContext ctx(g, "scan");
            SimParams p = make_params(g, omega);
            record_params(ctx, p);
            ctx.param("x0", x0);
            ctx.param("vmin", vmin);
            ctx.param("vmax", vmax);
            ctx.param("step", coarse);
            ctx.param("refine", refine_tol);
            ctx.param("threads", static_cast<double>(g.threads));
            auto sweep_result = sweep_velocities(p, x0, vmin, vmax, coarse, g.threads);
            CsvWriter raw({"v", "n_bounces", "t_resolve", "flagged"});
            for (const auto& pt : sweep_result) {
                const double n = pt.outcome.kind == OutcomeKind::n_bounce
                                     ? pt.outcome.n_bounces
                                     : (pt.outcome.kind == OutcomeKind::bion ? -1 : 0);
                raw.add_row(std::array{pt.v, n, pt.t_resolve, pt.flagged ? 1.0 : 0.0});
            }
            ctx.emit("sweep.csv", raw);
            auto table = refine_window_edges(sweep_result, p, x0, refine_tol, g.threads);
            ctx.emit_text("windows.txt", table.formatted());
            CsvWriter wcsv({"n", "v1", "v2", "dv", "midpoint_ok", "uncertain"});
            for (const auto& r : table.rows)
                wcsv.add_row(std::array{static_cast<double>(r.n), r.v1, r.v2, r.dv,
                                        r.midpoint_ok ? 1.0 : 0.0, r.uncertain ? 1.0 : 0.0});
            ctx.emit("windows.csv", wcsv);
            ctx.finish();
            std::cout << table.formatted();
        } else if (tmap->parsed()) {
            RunContext ctx(g, "turning-map");
            SimParams p = make_params(g, omega);
            record_params(ctx, p);
            ctx.param("x0", x0);
            ctx.param("vmax", vmax);
            ctx.param("vsteps", static_cast<double>(vsteps));
            std::vector<double> vgrid;
            for (int i = 0; i <= vsteps; ++i) vgrid.push_back(vmax * i / vsteps);
            std::vector<double> excluded;
            auto map = turning_point_map(p, x0, vgrid, &excluded);
            CsvWriter csv({"x1", "half_v_squared"});
            for (const auto& [x1, e] : map) csv.add_row(std::array{x1, e});
            ctx.emit("turning_map.csv", csv);
            ctx.finish();
            std::cout << "turning map: " << map.size() << " points";
            if (!excluded.empty()) std::cout << ", " << excluded.size() << " transmitted";
            std::cout << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
