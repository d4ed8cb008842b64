#pragma once

#include <vector>

#include "phi4trap/dynamics.hpp"
#include "phi4trap/sim_params.hpp"

namespace phi4trap {

struct SweepPoint {
    double v = 0.0;
    Outcome outcome;
    double t_resolve = 0.0;
    bool flagged = false;      // run blew up or tripped the energy guard
};

struct WindowRow {
    int n = 0;             // bounce count
    double v1 = 0.0;       // lower edge
    double v2 = 0.0;       // upper edge
    double dv = 0.0;       // width
    bool midpoint_ok = false;   // interior midpoint re-classifies to n
    bool uncertain = false;     // sub-window structure found inside an edge bracket
};

struct WindowTable {
    std::vector<WindowRow> rows;   // sorted by v1, disjoint
    double omega = 0.0, x0 = 0.0;
    double v_lo = 0.0, v_hi = 0.0, coarse_step = 0.0, edge_tol = 0.0;

    std::string formatted() const;   // aligned text table
};

/// Classify a kink-antikink collision at every coarse velocity. Runs are
/// independent and execute on a worker pool (threads = 0 selects the
/// hardware count); results are keyed by velocity so the output does not
/// depend on scheduling. Individual blow-ups are flagged, not fatal.
std::vector<SweepPoint> sweep_velocities(const SimParams& p, double x0,
                                         double v_lo, double v_hi,
                                         double coarse_step, int threads = 0);

/// Bisect every adjacent outcome transition of the sweep down to edge_tol
/// and assemble the bounce-window table. A midpoint that classifies to
/// neither bracket outcome reveals sub-window structure: the bracket is
/// split toward the original edge and the row is marked uncertain.
WindowTable refine_window_edges(const std::vector<SweepPoint>& sweep,
                                const SimParams& p, double x0,
                                double edge_tol = 1e-5, int threads = 0);

/// Bisection (to width tol) of the velocity separating the two different
/// outcomes observed at v_lo and v_hi; single-kink runs when pair == false.
/// Throws std::invalid_argument when the endpoints classify identically.
double find_critical_velocity(const SimParams& p, double x0, double v_lo,
                              double v_hi, bool pair, double tol = 1e-4);

/// Lowest velocity above which the classification stays n_bounce(1) through
/// the top of the sweep, refined to edge_tol. Returns a negative value when
/// the sweep does not end in a one-bounce run.
double one_bounce_threshold(const std::vector<SweepPoint>& sweep,
                            const SimParams& p, double x0,
                            double edge_tol = 1e-5);

}  // namespace phi4trap
