#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phi4trap/grid.hpp"
#include "phi4trap/sim_params.hpp"

namespace phi4trap {

struct FieldState {
    double t = 0.0;
    std::vector<double> u;   // field
    std::vector<double> w;   // u_t
};

enum class OutcomeKind {
    expelled_left,
    expelled_right,
    reflected_no_collision,
    transmitted,
    n_bounce,
    bion,
    held_at_saddle,
    timeout,
};

struct Outcome {
    OutcomeKind kind = OutcomeKind::timeout;
    int n_bounces = 0;
};

std::string outcome_label(const Outcome& o);

/// Classification thresholds. Bounce counting has no canonical definition,
/// so every threshold is exposed here.
struct ClassifyParams {
    double x_col = 0.5;     // in collision when half-separation <= x_col
    double x_esc = -1.0;    // escape radius; <= 0 selects min(0.8*x_s, |x0|+3)
    int n_max = 6;          // more collision intervals than this => bion
    double hold_window = 0.1;   // |X| band for held_at_saddle
    double hold_frac = 0.8;     // fraction of t_max the kink must stay in band
};

struct EvolveOptions {
    int sample_every = 10;          // steps between samples
    bool pair = false;              // track two crossings instead of one
    double x0 = 0.0;                // initial position / half-separation (metadata)
    double v_in = 0.0;              // inward speed (metadata for labeling)
    ClassifyParams cls{};
    bool stop_on_resolve = true;
    double t_max_override = -1.0;   // > 0 replaces params.t_max
    /// Optional field dump, called at every sample with (t, u).
    std::function<void(double, const std::vector<double>&)> dump;
};

struct TrajectoryRecord {
    std::vector<double> times;
    /// Tracked zero crossings per sample: [x] for kink runs (second slot NaN),
    /// [kink, antikink] for pair runs; NaN where no crossing exists.
    std::vector<std::array<double, 2>> positions;
    std::vector<double> energies;
    std::vector<std::pair<double, double>> turning_points;  // (t, x) velocity sign flips
    Outcome outcome;
    double final_time = 0.0;
    double resolve_time = -1.0;     // when the outcome became definite, -1 if at t_max
    double energy_mean = 0.0;
    double energy_drift = 0.0;      // max |E - mean E| over the samples
    bool pair = false;
    double x0 = 0.0, v_in = 0.0;    // launch metadata
    double t_max = 0.0;             // horizon the run was classified against

    /// Half-separation (pair) or tracked position (single) at sample k; NaN
    /// when untracked. For pair runs the overlap phase of a collision reports 0.
    double coordinate(std::size_t k) const;
};

struct BlowUpError : std::runtime_error {
    BlowUpError(double t) : std::runtime_error("numerical blow-up"), last_stable_time(t) {}
    double last_stable_time;
};

struct EnergyDriftError : std::runtime_error {
    EnergyDriftError(double drift, double mean)
        : std::runtime_error("energy drift exceeds hard bound"), drift(drift), mean(mean) {}
    double drift, mean;
};

/// Lorentz-boosted kink initial data (signed velocity, v > 0 moves right):
///   u = u_Omega(x) tanh(gamma (x - x0)),  w = -v gamma u_Omega sech^2(...).
FieldState boost_kink(const SimParams& p, double x0, double v);

/// Boosted kink-antikink initial data; v > 0 makes the pair approach.
FieldState boost_kak(const SimParams& p, double x0, double v);

/// Total discrete energy, quadrature of
///   1/2 [ w^2 + u_x^2 + (u^2-1)^2 + 1/2 Omega^2 x^2 u^2 ].
double discrete_energy(const FieldState& s, const SimParams& p);

/// Zero crossings of u restricted to the tracking window |x| < 0.9 x_s
/// (0.9 x_max when omega == 0). Returns up to `expected` positions: for
/// pair tracking the outermost crossing on each side, for single tracking
/// the crossing nearest `hint`. Empty when no crossing exists.
std::vector<double> track_positions(const FieldState& s, const SimParams& p,
                                    int expected, double hint = 0.0);

/// RK4 method-of-lines evolution of u_tt = D2 u - dV/du with the free-end
/// (even-reflection) closure. Integrates to t_max or until the outcome
/// resolves; samples positions and energy, detects turning points, and
/// classifies per the ClassifyParams rules. Throws BlowUpError on NaN/Inf
/// and EnergyDriftError when |E - mean| exceeds 1e-3 * max(1, |mean|).
TrajectoryRecord evolve(FieldState state, const SimParams& p, const EvolveOptions& opt);

/// Bare stepper: advances the state to t_end with no tracking or
/// classification and returns it.
FieldState integrate_to(FieldState state, const SimParams& p, double t_end);

/// Single kink launched from x0; v_in >= 0 aims at the trap center when
/// x0 != 0 (signed rightward velocity when x0 == 0), v_in < 0 aims outward.
TrajectoryRecord run_kink(const SimParams& p, double x0, double v_in,
                          EvolveOptions opt = {});

/// Kink-antikink pair at half-separation x0 approaching with speed v_in.
TrajectoryRecord run_kak(const SimParams& p, double x0, double v_in,
                         EvolveOptions opt = {});

/// Re-runs the classification state machine over a record's samples (used
/// to audit or re-threshold finished runs). x_esc <= 0 resolves to the
/// default min(0.8 x_s, |x0| + 3).
Outcome classify_record(const TrajectoryRecord& rec, const SimParams& p,
                        ClassifyParams cls = {});

/// For each subcritical speed, the innermost turning point x1 paired with
/// the kinetic energy per unit mass v^2/2, sorted by x1. Transmitting
/// speeds are excluded and reported in `excluded`.
std::vector<std::pair<double, double>> turning_point_map(
    const SimParams& p, double x0, const std::vector<double>& v_grid,
    std::vector<double>* excluded = nullptr);

}  // namespace phi4trap
