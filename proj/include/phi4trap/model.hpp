#pragma once

#include <cmath>
#include <stdexcept>

namespace phi4trap {

// Double-well potential with parabolic trap,
//   V(u,x) = 1/2 (u^2-1)^2 - 1/2 + 1/4 Omega^2 x^2 u^2.
// The -1/2 is kept so that V(0,x) = 0 and energy densities vanish in the
// exterior vacuum; reported energies then match the Hamiltonian convention.
inline double potential_v(double u, double x, double omega) {
    const double q = u * u - 1.0;
    const double ox = omega * x;
    return 0.5 * q * q - 0.5 + 0.25 * ox * ox * u * u;
}

// dV/du = 2u(u^2-1) + 1/2 Omega^2 x^2 u
inline double potential_du(double u, double x, double omega) {
    const double ox = omega * x;
    return 2.0 * u * (u * u - 1.0) + 0.5 * ox * ox * u;
}

// d2V/du2 = 6u^2 - 2 + 1/2 Omega^2 x^2
inline double potential_d2u(double u, double x, double omega) {
    const double ox = omega * x;
    return 6.0 * u * u - 2.0 + 0.5 * ox * ox;
}

/// Support radius of the Thomas-Fermi profile, x_s = 2/Omega.
inline double tf_support_radius(double omega) {
    if (omega <= 0.0) throw std::domain_error("tf_support_radius: omega must be > 0");
    return 2.0 / omega;
}

/// Thomas-Fermi ground-state approximation max{0, sqrt(1 - Omega^2 x^2 / 4)};
/// zero outside |x| >= 2/Omega.
inline double tf_profile(double x, double omega) {
    if (omega <= 0.0) throw std::domain_error("tf_profile: omega must be > 0");
    const double s = 1.0 - 0.25 * omega * omega * x * x;
    return s > 0.0 ? std::sqrt(s) : 0.0;
}

}  // namespace phi4trap
