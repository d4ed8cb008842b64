#pragma once

namespace phi4trap {

/// Physical and numerical parameters shared by all pipeline stages.
///
/// omega = 0 selects the homogeneous (untrapped) model, which has analytic
/// solutions and is used as an oracle; the Thomas-Fermi helpers are the only
/// places that require omega > 0.
struct SimParams {
    double omega = 0.15;      // trap strength
    double dx = 0.02;         // spatial step
    double x_max = 30.0;      // symmetric domain [-x_max, x_max]
    double dt = 0.01;         // time step (0.5*dx keeps RK4 well inside stability)
    double t_max = 400.0;     // evolution horizon
    double newton_tol = 1e-10;
    int newton_max_iter = 50;

    /// Throws std::invalid_argument on any violated constraint:
    /// positive steps, integer point count n = 2*x_max/dx + 1 >= 5, and
    /// (for omega > 0) x_max >= 2/omega + 5 so the domain holds the
    /// Thomas-Fermi support plus margin.
    void validate() const;

    /// Number of grid points; validate() must hold.
    int grid_points() const;
};

}  // namespace phi4trap
