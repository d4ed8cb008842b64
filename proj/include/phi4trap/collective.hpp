#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "phi4trap/grid.hpp"
#include "phi4trap/stationary.hpp"

namespace phi4trap {

/// Tabulated collective-coordinate coefficients on a uniform symmetric
/// X grid, with fourth-order centered-difference derivative tables.
///
/// Evaluation between knots is cubic Hermite on the (value, derivative)
/// pairs, and slope() is the exact derivative of that interpolant. Using
/// one consistent interpolant for values and slopes is what makes the
/// reduced-model energies conserved up to integrator tolerance.
class CCTables {
public:
    CCTables(std::vector<double> X_grid, std::vector<std::string> names,
             std::vector<std::vector<double>> values, double omega);

    double value(int c, double X) const;
    double slope(int c, double X) const;
    bool in_range(double X) const;
    int column(const std::string& name) const;

    const std::vector<double>& X() const { return X_; }
    const std::vector<double>& values(int c) const { return val_[c]; }
    const std::vector<double>& derivs(int c) const { return der_[c]; }
    const std::vector<std::string>& names() const { return names_; }
    double omega() const { return omega_; }
    double x_step() const { return step_; }

private:
    std::vector<double> X_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> val_, der_;
    double omega_, step_;
};

/// Single-kink model: a0(X) = 1/2 int u_Omega^2 sech^4(x-X) dx and
/// a1(X) = 1/2 [I1 + I2 + I3 + I4 + I5] with
///   I1 = int u_Omega'^2 tanh^2(x-X)
///   I2 = int 2 u_Omega' u_Omega tanh(x-X) sech^2(x-X)
///   I3 = int u_Omega^2 sech^4(x-X)
///   I4 = int (u_Omega^2 tanh^2(x-X) - 1)^2 - 1
///   I5 = int 1/2 Omega^2 x^2 u_Omega^2 tanh^2(x-X).
/// Tabulated for X in [0, X_max] at X_step and extended to negative X by
/// parity. Throws when X_max + 5 exceeds the grid half-width.
CCTables build_single_tables(const StationaryProfile& ground,
                             double X_max, double X_step = 0.05);

/// Kink-antikink pair model coefficients I, U, F, K, Q, C with
/// phi+- = +-tanh(x +- X), chi+- = +-chi1(x +- X):
///   I = 1/2 int u^2 (phi+' - phi-')^2
///   Q = 1/2 int (chi+ + chi-)^2
///   C = 1/2 int u (phi+' - phi-') (chi+ + chi-)
///   U = int 1/2 (u (phi+' + phi-') + u'(phi+ + phi- - 1))^2 + int V(u_a)
///   F = -1/2 int (d u_a/dx)(chi+' + chi-') - 1/2 int V'(u_a)(chi+ + chi-)
///   K = -1/2 int (chi+' + chi-')^2 - 1/2 int V''(u_a)(chi+ + chi-)^2
/// where u = u_Omega and u_a = u_Omega (phi+ + phi- - 1). chi1 lives on
/// chi_grid and is interpolated; zero outside its grid.
CCTables build_pair_tables(const StationaryProfile& ground,
                           const std::vector<double>& chi1, const Grid& chi_grid,
                           double X_max, double X_step = 0.05);

/// Direct quadrature of the coefficient integrals at a single X; the table
/// builders tabulate these (tests also evaluate them at arbitrary X).
std::array<double, 2> cc_single_coefficients(const StationaryProfile& ground, double X);
std::array<double, 6> cc_pair_coefficients(const StationaryProfile& ground,
                                           const std::vector<double>& chi1,
                                           const Grid& chi_grid, double X);

struct CCSample {
    double t, X, Xdot, A, Adot, E;
};

struct CCTrajectory {
    std::vector<CCSample> samples;
    bool exited_range = false;     // X left the table; comparison past this is meaningless
    bool singular_mass = false;    // pair mass matrix degenerated
    double end_time = 0.0;
};

struct SingularMassError : std::runtime_error {
    SingularMassError(double t, double X, double A)
        : std::runtime_error("collective-coordinate mass matrix is singular"),
          t(t), X(X), A(A) {}
    double t, X, A;
};

/// Integration control for the embedded Dormand-Prince 4(5) stepper.
struct CCIntegrationOptions {
    double rtol = 1e-9;
    double atol = 1e-11;
    double sample_dt = 0.1;
};

/// Single-kink reduced dynamics  Xdot = Y,
/// Ydot = -1/2 (a0'/a0) Y^2 - 1/2 a1'/a0, from X(0)=x0, Y(0)=xdot0
/// (signed). Conserves E = a0 Y^2 + a1. Truncates when X exits the tables.
CCTrajectory integrate_cc_single(const CCTables& t, double x0, double xdot0,
                                 double t_max, CCIntegrationOptions opt = {});

/// Pair reduced dynamics, unknowns (X, A) with mass matrix rows
/// [C, Q; 2I, 2C]:
///   C Xdd + Q Add = -Q' Xd Ad - C' Xd^2 + F + K A
///   2I Xdd + 2C Add = -I' Xd^2 - U' + 2F' A + K' A^2 + Q' Ad^2
/// from X(0)=x0, Xd(0)=-v_in (v_in >= 0 approaches), A(0)=Ad(0)=0.
/// Conserves E = I Xd^2 + Q Ad^2 + 2C Xd Ad + U - 2FA - KA^2.
/// Throws SingularMassError when |2C^2 - 2IQ| < 1e-10 (|IQ| + |C^2|).
CCTrajectory integrate_cc_pair(const CCTables& t, double x0, double v_in,
                               double t_max, CCIntegrationOptions opt = {});

}  // namespace phi4trap
