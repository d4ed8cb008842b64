#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "phi4trap/grid.hpp"
#include "phi4trap/sim_params.hpp"

namespace phi4trap {

struct NewtonError : std::runtime_error {
    NewtonError(const std::string& what, double residual)
        : std::runtime_error(what), last_residual(residual) {}
    double last_residual;
};

struct StationaryProfile {
    enum class Kind { ground, kink, antikink, kink_antikink };

    Grid grid;
    std::vector<double> u;
    double residual_norm = 0.0;  // sup norm of D2 u - dV/du at convergence
    Kind kind = Kind::ground;
    double omega = 0.0;
};

/// Newton-Raphson solution of D2 u - dV/du = 0 from the Thomas-Fermi seed
/// (constant 1 when omega == 0). Throws NewtonError on non-convergence.
StationaryProfile solve_ground_state(const SimParams& p);

/// Single kink (sign=+1) or antikink (sign=-1), seeded with
/// sign * u_Omega(x) * tanh(x). The converged profile has exactly one zero
/// crossing, at x = 0 within dx.
StationaryProfile solve_kink(const SimParams& p, int sign = +1);

/// Kink-antikink ansatz u_Omega(x) (tanh(x+x0) - tanh(x-x0) - 1) sampled on
/// the grid. Not Newton-refined; serves as dynamical initial data and as the
/// seed family for the equilibrium-separation search.
std::vector<double> kak_profile(const SimParams& p, double x0);

struct EquilibriumSeparation {
    double x_cr;               // zero-crossing half-separation of the refined state
    double x0_projected;       // ansatz parameter where the projected residual vanishes
    double ansatz_residual;    // sup-norm stationary residual of the ansatz at x0_projected
    StationaryProfile state;   // Newton-refined stationary kink-antikink
};

/// Locates the stationary kink-antikink pair. The ansatz parameter is first
/// bracketed by the projected stationary residual (inner product with the
/// separation mode d(ansatz)/dx0) and bisected to 1e-4, then the field is
/// Newton-refined. The returned x_cr is measured from the zero crossings of
/// the refined state, which is what the saddle actually sits at; the raw
/// projected zero is kept alongside.
EquilibriumSeparation find_equilibrium_separation(const SimParams& p);

/// Stationary residual D2 u - dV/du evaluated with the one-sided operator.
std::vector<double> stationary_residual(const Grid& g, const StencilOperator& d2,
                                        std::span<const double> u, double omega);

/// Zero crossings of u by linear interpolation, restricted to |x| < window.
std::vector<double> zero_crossings(const Grid& g, std::span<const double> u,
                                   double window);

}  // namespace phi4trap
