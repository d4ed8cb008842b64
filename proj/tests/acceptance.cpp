// Acceptance suite: one criterion per entry, each printing a PASS/FAIL line
// with the measured values. Run all, a subset (--criterion N, repeatable),
// or list them (--list). Exit status is the number of failed criteria.

#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "phi4trap/collective.hpp"
#include "phi4trap/dynamics.hpp"
#include "phi4trap/model.hpp"
#include "phi4trap/scan.hpp"
#include "phi4trap/spectra.hpp"
#include "phi4trap/stationary.hpp"

using namespace phi4trap;

namespace {

SimParams params_for(double omega) {
    SimParams p;
    p.omega = omega;
    if (omega > 0.0 && p.x_max < 2.0 / omega + 5.0) p.x_max = 48.0;
    return p;
}

struct Check {
    bool ok = true;
    std::ostringstream log;

    template <typename T>
    Check& operator<<(const T& v) {
        log << v;
        return *this;
    }

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            log << "  [failed: " << what << "]";
        }
    }
};

double unstable_lambda(const SpectrumResult& s, int k = 0) {
    return std::sqrt(s.mu[k]);
}

// ---- criteria ------------------------------------------------------------

Check c01_tf_support() {
    Check c;
    const double xs = tf_support_radius(0.15);
    c << "x_s(0.15) = " << xs;
    c.expect(std::abs(xs - 2.0 / 0.15) <= 1e-12, "x_s == 2/omega to 1e-12");
    return c;
}

Check c02_ground_stability() {
    Check c;
    auto spec = linearization_spectrum(solve_ground_state(params_for(0.15)), 0.04, false);
    double max_re = 0.0;
    for (const auto& l : spec.lambda_pairs()) max_re = std::max(max_re, l.real());
    c << "n_unstable = " << spec.n_unstable << ", max Re lambda = " << max_re;
    c.expect(spec.n_unstable == 0, "no unstable modes");
    c.expect(max_re < 1e-4, "max Re lambda < 1e-4");
    return c;
}

Check c03_kink_eigenvalue() {
    Check c;
    auto spec = linearization_spectrum(solve_kink(params_for(0.15), +1), 0.04, false);
    c << "n_unstable = " << spec.n_unstable;
    c.expect(spec.n_unstable == 1, "exactly one real pair");
    if (spec.n_unstable == 1) {
        const double lam = unstable_lambda(spec);
        c << ", |lambda| = " << lam;
        c.expect(std::abs(lam - 0.13) <= 0.01, "|lambda| = 0.13 +- 0.01");
    }
    return c;
}

Check c04_homogeneous_oracle() {
    Check c;
    auto spec = linearization_spectrum(solve_kink(params_for(0.0), +1), 0.04, false);
    double near0 = 1e9, near3 = 1e9;
    for (double m : spec.mu) {
        if (std::abs(m) < std::abs(near0)) near0 = m;
        if (std::abs(m + 3.0) < std::abs(near3 + 3.0)) near3 = m;
    }
    c << "translation mu = " << near0 << ", internal mu = " << near3;
    c.expect(std::abs(near0) < 1e-3, "|mu_translation| < 1e-3");
    c.expect(std::abs(near3 + 3.0) <= 0.01, "mu_internal = -3 +- 0.01");
    return c;
}

Check c05_equilibrium_separations() {
    Check c;
    struct Row {
        double omega, target, tol;
    };
    for (const Row& r : {Row{0.05, 2.173, 0.01}, Row{0.1, 1.8669, 0.005},
                         Row{0.15, 1.6907, 0.005}, Row{0.2, 1.5661, 0.005}}) {
        auto p = params_for(r.omega);
        auto eq = find_equilibrium_separation(p);
        auto spec = linearization_spectrum(eq.state, 0.04, false);
        c << "omega=" << r.omega << ": x_cr=" << eq.x_cr << " (target " << r.target
          << "), pairs=" << spec.n_unstable << "; ";
        std::ostringstream what;
        what << "x_cr(" << r.omega << ") = " << r.target << " +- " << r.tol;
        c.expect(std::abs(eq.x_cr - r.target) <= r.tol, what.str());
        c.expect(spec.n_unstable == 2, "two real pairs");
    }
    return c;
}

Check c06_critical_velocity() {
    Check c;
    auto p = params_for(0.15);
    auto slow = run_kink(p, 5.0, 0.577);
    auto fast = run_kink(p, 5.0, 0.578);
    c << "v=0.577 -> " << outcome_label(slow.outcome) << ", v=0.578 -> "
      << outcome_label(fast.outcome);
    c.expect(slow.outcome.kind == OutcomeKind::reflected_no_collision, "0.577 reflects");
    c.expect(fast.outcome.kind == OutcomeKind::transmitted, "0.578 transmits");
    const double vcr = find_critical_velocity(p, 5.0, 0.57, 0.585, false, 1e-4);
    c << ", bisected v_cr = " << vcr;
    c.expect(vcr > 0.577 && vcr < 0.578, "v_cr inside (0.577, 0.578)");
    return c;
}

Check c07_saddle_dichotomy() {
    Check c;
    auto p = params_for(0.15);
    auto bound = run_kak(p, 1.69, 0.0);
    auto expel = run_kak(p, 1.70, 0.0);
    c << "x0=1.69 -> " << outcome_label(bound.outcome) << ", x0=1.70 -> "
      << outcome_label(expel.outcome);
    c.expect(bound.outcome.kind == OutcomeKind::bion ||
                 bound.outcome.kind == OutcomeKind::n_bounce,
             "1.69 forms a bound state");
    c.expect(expel.outcome.kind == OutcomeKind::reflected_no_collision,
             "1.70 is expelled without collision");
    return c;
}

Check c08_energy_conservation() {
    Check c;
    auto p = params_for(0.15);
    struct Run {
        const char* name;
        TrajectoryRecord rec;
    };
    std::vector<Run> runs;
    runs.push_back({"kink 5/0.577", run_kink(p, 5.0, 0.577)});
    runs.push_back({"kink 5/0.578", run_kink(p, 5.0, 0.578)});
    runs.push_back({"kak 1.69/0", run_kak(p, 1.69, 0.0)});
    runs.push_back({"kak 1.70/0", run_kak(p, 1.70, 0.0)});
    runs.push_back({"kak 1.4/0.245", run_kak(p, 1.4, 0.245)});
    runs.push_back({"kak 1.4/0.26", run_kak(p, 1.4, 0.26)});
    for (const auto& r : runs) {
        const double bound = 1e-4 * std::max(1.0, std::abs(r.rec.energy_mean));
        c << r.name << ": drift " << r.rec.energy_drift << "; ";
        c.expect(r.rec.energy_drift <= bound, std::string(r.name) + " drift <= 1e-4");
    }
    return c;
}

Check c09_window_table() {
    Check c;
    auto p = params_for(0.15);
    auto sweep = sweep_velocities(p, 1.4, 0.235, 0.261, 2e-4, 0);
    auto table = refine_window_edges(sweep, p, 1.4, 1e-5, 0);

    const WindowRow* dominant = nullptr;
    for (const auto& r : table.rows)
        if (r.n == 2 && (!dominant || r.dv > dominant->dv)) dominant = &r;
    c.expect(dominant != nullptr, "a two-bounce window exists");
    if (dominant) {
        c << "dominant 2-bounce [" << dominant->v1 << ", " << dominant->v2 << "]";
        c.expect(std::abs(dominant->v1 - 0.24038) <= 0.002, "v1 = 0.24038 +- 0.002");
        c.expect(std::abs(dominant->v2 - 0.24744) <= 0.002, "v2 = 0.24744 +- 0.002");
    }

    const double v1b = one_bounce_threshold(sweep, p, 1.4);
    c << ", one-bounce threshold " << v1b;
    c.expect(std::abs(v1b - 0.25845) <= 0.002, "one-bounce threshold 0.25845 +- 0.002");

    // every table window wider than 5e-4 must be reproduced with the same
    // bounce count at the same place, in the same order (narrower rows are
    // fragile against the unstated bounce criterion and are not compared)
    struct Expect {
        int n;
        double v1;
    };
    const std::vector<Expect> expected{{3, 0.23729}, {2, 0.24038}, {3, 0.25396}, {2, 0.25453}};
    c << "; matches:";
    int prev_found = -1;
    for (const auto& e : expected) {
        int found = -1;
        for (std::size_t k = 0; k < table.rows.size(); ++k) {
            const auto& r = table.rows[k];
            if (r.n == e.n && std::abs(r.v1 - e.v1) <= 0.002) {
                found = static_cast<int>(k);
                break;
            }
        }
        std::ostringstream what;
        what << e.n << "-bounce window at " << e.v1 << " reproduced in order";
        c.expect(found >= 0 && found > prev_found, what.str());
        if (found >= 0) {
            c << " " << e.n << "@" << table.rows[found].v1;
            prev_found = found;
        }
    }
    for (const auto& r : table.rows)
        if (r.dv > 5e-4 && r.n >= 2) c.expect(r.midpoint_ok, "midpoints re-classify to n");
    return c;
}

Check c10_window_shrinkage() {
    Check c;
    auto p2 = params_for(0.2);
    auto sweep2 = sweep_velocities(p2, 2.0, 0.265, 0.29, 2e-4, 0);
    auto table2 = refine_window_edges(sweep2, p2, 2.0, 1e-5, 0);
    const WindowRow* dom2 = nullptr;
    for (const auto& r : table2.rows)
        if (r.n == 2 && (!dom2 || r.dv > dom2->dv)) dom2 = &r;
    c.expect(dom2 != nullptr, "omega=0.2 two-bounce window exists");

    auto p3 = params_for(0.3);
    auto sweep3 = sweep_velocities(p3, 2.0, 0.359, 0.364, 1e-4, 0);
    auto table3 = refine_window_edges(sweep3, p3, 2.0, 1e-5, 0);
    const WindowRow* dom3 = nullptr;
    for (const auto& r : table3.rows)
        if (r.n == 2 && (!dom3 || r.dv > dom3->dv)) dom3 = &r;
    c.expect(dom3 != nullptr, "omega=0.3 two-bounce window exists");

    if (dom2 && dom3) {
        c << "width(0.2) = " << dom2->dv << " (target 0.00861 +- 30%), width(0.3) = "
          << dom3->dv << " (target 0.00098 +- 50%), ratio = " << dom3->dv / dom2->dv;
        c.expect(std::abs(dom2->dv - 0.00861) <= 0.3 * 0.00861, "width at omega 0.2");
        c.expect(std::abs(dom3->dv - 0.00098) <= 0.5 * 0.00098, "width at omega 0.3");
        const double ratio = dom3->dv / dom2->dv;
        c.expect(ratio >= 0.05 && ratio <= 0.2, "shrinkage by roughly 1/10");
    }
    return c;
}

struct CCComparison {
    TrajectoryRecord pde;
    CCTrajectory cc;
};

CCComparison compare_single(const SimParams& p, const CCTables& t, double x0, double v,
                            double horizon) {
    EvolveOptions opt;
    opt.stop_on_resolve = false;
    opt.t_max_override = horizon;
    CCComparison out;
    out.pde = run_kink(p, x0, v, opt);
    // the PDE launch is a Lorentz boost; matching its field momentum on the
    // rigid ansatz gives the reduced model the rate gamma*v
    const double rate = v / std::sqrt(1.0 - v * v);
    const double xdot0 = x0 != 0.0 ? -std::copysign(rate, x0) : rate;
    out.cc = integrate_cc_single(t, x0, xdot0, horizon);
    return out;
}

Check c11_cc_single_fidelity() {
    Check c;
    auto p = params_for(0.15);
    auto ground = solve_ground_state(p);
    auto tables = build_single_tables(ground, 12.0, 0.05);

    for (double x0 : {-3.0, 3.0}) {
        auto cmp = compare_single(p, tables, x0, 0.0, 12.0);
        double worst = 0.0;
        for (std::size_t k = 0; k < cmp.pde.times.size(); ++k) {
            const double t = cmp.pde.times[k];
            if (t > 10.0) break;
            const std::size_t ci = static_cast<std::size_t>(std::round(t / 0.1));
            if (ci >= cmp.cc.samples.size()) break;
            const double xp = cmp.pde.positions[k][0];
            if (std::isnan(xp)) break;
            worst = std::max(worst, std::abs(cmp.cc.samples[ci].X - xp));
        }
        c << "x0=" << x0 << ": max|X_ODE - X_PDE| = " << worst << "; ";
        c.expect(worst < 0.5, "agreement to 0.5 for t <= 10");
    }

    auto cmp = compare_single(p, tables, 5.0, 0.5, 80.0);
    double pde_turn = 1e9, cc_turn = 1e9;
    for (std::size_t k = 0; k < cmp.pde.times.size(); ++k) {
        const double xp = cmp.pde.positions[k][0];
        if (!std::isnan(xp)) pde_turn = std::min(pde_turn, std::abs(xp));
    }
    for (const auto& s : cmp.cc.samples) cc_turn = std::min(cc_turn, std::abs(s.X));
    c << "turning points: PDE " << pde_turn << ", ODE " << cc_turn;
    c.expect(pde_turn > 0.0 && cc_turn > 0.0, "both reflect off the barrier");
    c.expect(std::abs(pde_turn - cc_turn) < 0.3, "turning points within 0.3");
    return c;
}

double cc_rel_drift(const CCTrajectory& tr) {
    const double e0 = tr.samples.front().E;
    double d = 0.0;
    for (const auto& s : tr.samples) d = std::max(d, std::abs(s.E - e0));
    return d / std::max(1.0, std::abs(e0));
}

Check c12_cc_energy_invariants() {
    Check c;
    auto p = params_for(0.15);
    auto ground = solve_ground_state(p);
    auto single = build_single_tables(ground, 12.0, 0.05);
    for (double x0 : {-3.0, 3.0}) {
        auto tr = integrate_cc_single(single, x0, 0.0, 12.0);
        c << "single x0=" << x0 << ": drift " << cc_rel_drift(tr) << "; ";
        c.expect(cc_rel_drift(tr) <= 1e-6, "single-kink E_cc drift <= 1e-6");
    }
    auto tr5 = integrate_cc_single(single, 5.0, -0.5 / std::sqrt(1.0 - 0.25), 80.0);
    c << "single x0=5: drift " << cc_rel_drift(tr5) << "; ";
    c.expect(cc_rel_drift(tr5) <= 1e-6, "single-kink E_cc drift <= 1e-6");

    auto spec = linearization_spectrum(solve_kink(p, +1), 0.04, true);
    auto chi1 = extract_chi1(spec);
    auto pair = build_pair_tables(ground, chi1, spec.grid, 12.0, 0.05);
    for (auto [x0, v] : {std::pair{2.0, 0.7}, std::pair{1.4, 0.245}}) {
        auto tr = integrate_cc_pair(pair, x0, v, 60.0);
        c << "pair x0=" << x0 << ": drift " << cc_rel_drift(tr) << "; ";
        c.expect(cc_rel_drift(tr) <= 1e-5, "pair H drift <= 1e-5");
    }
    return c;
}

int cc_bounces(const CCTrajectory& tr, double x_col, double x_esc) {
    int bounces = 0;
    bool in_col = false;
    for (const auto& s : tr.samples) {
        const bool col = std::abs(s.X) <= x_col;
        if (col && !in_col) ++bounces;
        in_col = col;
        if (bounces > 0 && std::abs(s.X) >= x_esc && !col) break;
    }
    return bounces;
}

Check c13_cc_pair_match() {
    Check c;
    auto p = params_for(0.15);
    auto ground = solve_ground_state(p);
    auto spec = linearization_spectrum(solve_kink(p, +1), 0.04, true);
    auto chi1 = extract_chi1(spec);
    auto tables = build_pair_tables(ground, chi1, spec.grid, 12.0, 0.05);

    struct Case {
        double x0, v;
        int n;
    };
    for (const Case& k : {Case{2.0, 0.7, 1}, Case{1.4, 0.245, 2}}) {
        auto pde = run_kak(p, k.x0, k.v);
        auto cc = integrate_cc_pair(tables, k.x0, k.v, 80.0);
        const double x_esc = std::min(0.8 * tf_support_radius(p.omega), k.x0 + 3.0);
        const int nb = cc_bounces(cc, 0.5, x_esc);
        c << "x0=" << k.x0 << " v=" << k.v << ": PDE " << outcome_label(pde.outcome)
          << ", CC bounces " << nb << "; ";
        std::ostringstream what;
        what << "both give " << k.n << " bounce(s)";
        c.expect(pde.outcome.kind == OutcomeKind::n_bounce && pde.outcome.n_bounces == k.n &&
                     nb == k.n,
                 what.str());
    }
    return c;
}

Check c14_saddle_dwell() {
    Check c;
    auto rec = run_kink(params_for(0.15), 0.0, 0.0);
    double held_until = 0.0;
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
        const double x = rec.positions[k][0];
        if (std::isnan(x) || std::abs(x) >= 0.1) break;
        held_until = rec.times[k];
    }
    c << "held within |X| < 0.1 until t = " << held_until << ", outcome "
      << outcome_label(rec.outcome);
    c.expect(held_until >= 150.0, "dwell lasts to at least t = 150");
    c.expect(rec.outcome.kind == OutcomeKind::expelled_left ||
                 rec.outcome.kind == OutcomeKind::expelled_right,
             "the kink eventually escapes");
    return c;
}

struct Criterion {
    int id;
    const char* name;
    std::function<Check()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list = {
        {1, "TF support radius", c01_tf_support},
        {2, "ground-state spectral stability", c02_ground_stability},
        {3, "kink instability eigenvalue", c03_kink_eigenvalue},
        {4, "homogeneous Poschl-Teller oracle", c04_homogeneous_oracle},
        {5, "equilibrium separations and KAK pairs", c05_equilibrium_separations},
        {6, "single-kink critical velocity", c06_critical_velocity},
        {7, "saddle dichotomy at x_cr", c07_saddle_dichotomy},
        {8, "PDE energy conservation", c08_energy_conservation},
        {9, "bounce-window table at omega 0.15", c09_window_table},
        {10, "window shrinkage with omega", c10_window_shrinkage},
        {11, "CC single-kink fidelity", c11_cc_single_fidelity},
        {12, "CC energy invariants", c12_cc_energy_invariants},
        {13, "CC pair qualitative match", c13_cc_pair_match},
        {14, "saddle dwell and escape", c14_saddle_dwell},
    };
    return list;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--list") == 0) {
            for (const auto& c : criteria())
                std::cout << c.id << ": " << c.name << "\n";
            return 0;
        }
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            selected.insert(std::atoi(argv[++i]));
    }

    int failures = 0;
    for (const auto& crit : criteria()) {
        if (!selected.empty() && !selected.count(crit.id)) continue;
        Check c;
        try {
            c = crit.run();
        } catch (const std::exception& e) {
            c.ok = false;
            c << "exception: " << e.what();
        }
        std::cout << (c.ok ? "[PASS]" : "[FAIL]") << " criterion " << crit.id << ": "
                  << crit.name << " -- " << c.log.str() << "\n";
        if (!c.ok) ++failures;
    }
    return failures;
}
