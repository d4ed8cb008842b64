#include "phi4trap/collective.hpp"

#include <algorithm>
#include <cmath>

#include "phi4trap/detail/dopri45.hpp"
#include "phi4trap/model.hpp"

namespace phi4trap {

namespace {

// 4-point Lagrange cubic on a uniform grid; zero outside (the interpolated
// eigenfunctions decay well inside the domain).
double interp_cubic(const std::vector<double>& f, const Grid& g, double x) {
    if (x <= g.x_min() || x >= g.x_max()) return 0.0;
    const double t = (x - g.x_min()) / g.dx();
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 1, g.n() - 3);
    const double s = t - i;
    const double w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    const double w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    const double w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    const double w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
    return w0 * f[i - 1] + w1 * f[i] + w2 * f[i + 1] + w3 * f[i + 2];
}

struct SingleContext {
    const StationaryProfile& ground;
    std::vector<double> ugp;  // u_Omega'
};

std::array<double, 2> single_at(const SingleContext& c, double X) {
    const Grid& g = c.ground.grid;
    const double om = c.ground.omega;
    double a0 = 0.0, I1 = 0.0, I2 = 0.0, I3 = 0.0, I4 = 0.0, I5 = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        const double w = quadrature_weight(i, g);
        const double x = g.node(i);
        const double ug = c.ground.u[i], up = c.ugp[i];
        const double th = std::tanh(x - X);
        const double s2 = 1.0 - th * th, s4 = s2 * s2;
        const double g2 = ug * ug;
        a0 += w * 0.5 * g2 * s4;
        I1 += w * up * up * th * th;
        I2 += w * 2.0 * up * ug * th * s2;
        I3 += w * g2 * s4;
        const double q = g2 * th * th - 1.0;
        I4 += w * (q * q - 1.0);
        I5 += w * 0.5 * om * om * x * x * g2 * th * th;
    }
    return {a0, 0.5 * (I1 + I2 + I3 + I4 + I5)};
}

struct PairContext {
    const StationaryProfile& ground;
    std::vector<double> ugp;
    const std::vector<double>& chi;
    std::vector<double> chip;
    const Grid& chi_grid;
};

std::array<double, 6> pair_at(const PairContext& c, double X) {
    const Grid& g = c.ground.grid;
    const double om = c.ground.omega;
    double I = 0.0, U = 0.0, F = 0.0, K = 0.0, Q = 0.0, C = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        const double w = quadrature_weight(i, g);
        const double x = g.node(i);
        const double ug = c.ground.u[i], up = c.ugp[i];
        const double tp = std::tanh(x + X), tm = std::tanh(x - X);
        const double s2p = 1.0 - tp * tp, s2m = 1.0 - tm * tm;
        const double phis = tp - tm - 1.0;      // phi+ + phi- - 1
        const double dphidiff = s2p + s2m;      // phi+' - phi-'
        const double dphisum = s2p - s2m;       // phi+' + phi-'
        const double chs = interp_cubic(c.chi, c.chi_grid, x + X) -
                           interp_cubic(c.chi, c.chi_grid, x - X);
        const double dchs = interp_cubic(c.chip, c.chi_grid, x + X) -
                            interp_cubic(c.chip, c.chi_grid, x - X);
        const double ua = ug * phis;
        const double uax = ug * dphisum + up * phis;
        I += w * 0.5 * ug * ug * dphidiff * dphidiff;
        Q += w * 0.5 * chs * chs;
        C += w * 0.5 * ug * dphidiff * chs;
        U += w * (0.5 * uax * uax + potential_v(ua, x, om));
        F += w * (-0.5 * uax * dchs - 0.5 * potential_du(ua, x, om) * chs);
        K += w * (-0.5 * dchs * dchs - 0.5 * potential_d2u(ua, x, om) * chs * chs);
    }
    return {I, U, F, K, Q, C};
}

std::vector<double> mirror_even(const std::vector<double>& half) {
    const int m = static_cast<int>(half.size()) - 1;
    std::vector<double> full(2 * m + 1);
    for (int k = 0; k <= m; ++k) {
        full[m + k] = half[k];
        full[m - k] = half[k];
    }
    return full;
}

void check_table_range(const Grid& g, double X_max) {
    // integrands carry sech factors; keep ~5 units of decay past the last X
    if (X_max + 5.0 > g.x_max())
        throw std::invalid_argument("CC tables: X range exceeds the grid support");
}

}  // namespace

CCTables::CCTables(std::vector<double> X_grid, std::vector<std::string> names,
                   std::vector<std::vector<double>> values, double omega)
    : X_(std::move(X_grid)), names_(std::move(names)), val_(std::move(values)),
      omega_(omega) {
    if (X_.size() < 5) throw std::invalid_argument("CCTables: too few samples");
    step_ = X_[1] - X_[0];
    // fourth-order centered differences on the tabulation grid (one-sided
    // at the ends); these become the Hermite knot slopes
    Grid tab(X_.back(), step_);
    der_.reserve(val_.size());
    for (const auto& v : val_) {
        if (v.size() != X_.size()) throw std::invalid_argument("CCTables: column size");
        der_.push_back(first_derivative(v, tab));
    }
}

int CCTables::column(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    throw std::invalid_argument("CCTables: no column " + name);
}

bool CCTables::in_range(double X) const { return X >= X_.front() && X <= X_.back(); }

double CCTables::value(int c, double X) const {
    const double t = (X - X_.front()) / step_;
    int i = std::clamp(static_cast<int>(std::floor(t)), 0,
                       static_cast<int>(X_.size()) - 2);
    if (X == X_[i]) return val_[c][i];  // exact-knot queries skip the fp of t
    if (X == X_[i + 1]) return val_[c][i + 1];
    const double s = t - i;
    const double h = step_;
    const double v0 = val_[c][i], v1 = val_[c][i + 1];
    const double m0 = der_[c][i], m1 = der_[c][i + 1];
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * v0 + (s3 - 2 * s2 + s) * h * m0 +
           (-2 * s3 + 3 * s2) * v1 + (s3 - s2) * h * m1;
}

double CCTables::slope(int c, double X) const {
    const double t = (X - X_.front()) / step_;
    int i = std::clamp(static_cast<int>(std::floor(t)), 0,
                       static_cast<int>(X_.size()) - 2);
    if (X == X_[i]) return der_[c][i];
    if (X == X_[i + 1]) return der_[c][i + 1];
    const double s = t - i;
    const double h = step_;
    const double v0 = val_[c][i], v1 = val_[c][i + 1];
    const double m0 = der_[c][i], m1 = der_[c][i + 1];
    const double s2 = s * s;
    return (6 * s2 - 6 * s) * (v0 - v1) / h + (3 * s2 - 4 * s + 1) * m0 +
           (3 * s2 - 2 * s) * m1;
}

std::array<double, 2> cc_single_coefficients(const StationaryProfile& ground, double X) {
    SingleContext c{ground, first_derivative(ground.u, ground.grid)};
    return single_at(c, X);
}

std::array<double, 6> cc_pair_coefficients(const StationaryProfile& ground,
                                           const std::vector<double>& chi1,
                                           const Grid& chi_grid, double X) {
    PairContext c{ground, first_derivative(ground.u, ground.grid), chi1,
                  first_derivative(chi1, chi_grid), chi_grid};
    return pair_at(c, X);
}

CCTables build_single_tables(const StationaryProfile& ground, double X_max,
                             double X_step) {
    check_table_range(ground.grid, X_max);
    const int M = static_cast<int>(std::floor(X_max / X_step + 1e-9));
    if (M < 4) throw std::invalid_argument("build_single_tables: range too small");
    SingleContext c{ground, first_derivative(ground.u, ground.grid)};
    std::vector<double> a0(M + 1), a1(M + 1);
    for (int k = 0; k <= M; ++k) {
        auto v = single_at(c, k * X_step);
        a0[k] = v[0];
        a1[k] = v[1];
    }
    std::vector<double> X(2 * M + 1);
    for (int k = 0; k < 2 * M + 1; ++k) X[k] = (k - M) * X_step;
    return CCTables(std::move(X), {"a0", "a1"}, {mirror_even(a0), mirror_even(a1)},
                    ground.omega);
}

CCTables build_pair_tables(const StationaryProfile& ground,
                           const std::vector<double>& chi1, const Grid& chi_grid,
                           double X_max, double X_step) {
    check_table_range(ground.grid, X_max);
    const int M = static_cast<int>(std::floor(X_max / X_step + 1e-9));
    if (M < 4) throw std::invalid_argument("build_pair_tables: range too small");
    PairContext c{ground, first_derivative(ground.u, ground.grid), chi1,
                  first_derivative(chi1, chi_grid), chi_grid};
    std::vector<std::vector<double>> half(6, std::vector<double>(M + 1));
    for (int k = 0; k <= M; ++k) {
        auto v = pair_at(c, k * X_step);
        for (int j = 0; j < 6; ++j) half[j][k] = v[j];
    }
    std::vector<double> X(2 * M + 1);
    for (int k = 0; k < 2 * M + 1; ++k) X[k] = (k - M) * X_step;
    std::vector<std::vector<double>> full;
    full.reserve(6);
    for (auto& h : half) full.push_back(mirror_even(h));
    return CCTables(std::move(X), {"I", "U", "F", "K", "Q", "C"}, std::move(full),
                    ground.omega);
}

namespace {

template <std::size_t N, typename Rhs, typename Energy, typename Store>
CCTrajectory integrate(const Rhs& rhs, const Energy& energy, const Store& store,
                       std::array<double, N> y, double t_max,
                       const CCIntegrationOptions& opt, bool* singular_flag) {
    CCTrajectory out;
    detail::Dopri45<N> stepper;
    stepper.rtol = opt.rtol;
    stepper.atol = opt.atol;
    stepper.h_max = opt.sample_dt;
    stepper.h = std::min(1e-3, opt.sample_dt);

    double t = 0.0;
    double t_sample = 0.0;
    std::array<double, N> k1{};
    bool have_k1 = false;

    store(out, t, y, energy(y));
    t_sample += opt.sample_dt;

    while (t < t_max - 1e-12) {
        const double limit = std::min(t_sample, t_max) - t;
        bool clipped = false;
        const double h_keep = stepper.h;
        if (stepper.h > limit) {
            stepper.h = limit;
            clipped = true;
        }
        auto r = stepper.step(rhs, t, y, k1, have_k1);
        if (r == detail::Dopri45<N>::StepResult::accepted) {
            have_k1 = true;
            if (clipped) stepper.h = h_keep;  // do not let clipping shrink future steps
            if (t >= std::min(t_sample, t_max) - 1e-12) {
                store(out, t, y, energy(y));
                while (t_sample <= t + 1e-12) t_sample += opt.sample_dt;
            }
        } else if (r == detail::Dopri45<N>::StepResult::rejected) {
            have_k1 = true;  // k1 still valid at (t, y)
        } else {
            out.exited_range = true;
            if (singular_flag && *singular_flag) out.singular_mass = true;
            break;
        }
    }
    out.end_time = t;
    return out;
}

}  // namespace

CCTrajectory integrate_cc_single(const CCTables& tbl, double x0, double xdot0,
                                 double t_max, CCIntegrationOptions opt) {
    if (!tbl.in_range(x0))
        throw std::invalid_argument("integrate_cc_single: x0 outside the tables");
    const int a0 = tbl.column("a0"), a1 = tbl.column("a1");
    auto rhs = [&](double, const std::array<double, 2>& y, std::array<double, 2>& dy) {
        if (!tbl.in_range(y[0])) return false;
        const double v0 = tbl.value(a0, y[0]);
        dy[0] = y[1];
        dy[1] = -0.5 * (tbl.slope(a0, y[0]) * y[1] * y[1] + tbl.slope(a1, y[0])) / v0;
        return true;
    };
    auto energy = [&](const std::array<double, 2>& y) {
        return tbl.value(a0, y[0]) * y[1] * y[1] + tbl.value(a1, y[0]);
    };
    auto store = [](CCTrajectory& tr, double t, const std::array<double, 2>& y, double E) {
        tr.samples.push_back({t, y[0], y[1], 0.0, 0.0, E});
    };
    return integrate<2>(rhs, energy, store, {x0, xdot0}, t_max, opt, nullptr);
}

CCTrajectory integrate_cc_pair(const CCTables& tbl, double x0, double v_in,
                               double t_max, CCIntegrationOptions opt) {
    if (!tbl.in_range(x0))
        throw std::invalid_argument("integrate_cc_pair: x0 outside the tables");
    const int iI = tbl.column("I"), iU = tbl.column("U"), iF = tbl.column("F"),
              iK = tbl.column("K"), iQ = tbl.column("Q"), iC = tbl.column("C");
    bool singular = false;
    auto rhs = [&](double t, const std::array<double, 4>& y, std::array<double, 4>& dy) {
        const double X = y[0], Xd = y[1], A = y[2], Ad = y[3];
        if (!tbl.in_range(X)) return false;
        const double I = tbl.value(iI, X), F = tbl.value(iF, X), K = tbl.value(iK, X),
                     Q = tbl.value(iQ, X), C = tbl.value(iC, X);
        const double Ip = tbl.slope(iI, X), Up = tbl.slope(iU, X), Fp = tbl.slope(iF, X),
                     Kp = tbl.slope(iK, X), Qp = tbl.slope(iQ, X), Cp = tbl.slope(iC, X);
        const double det = 2.0 * (C * C - I * Q);
        if (std::abs(det) < 1e-10 * (std::abs(I * Q) + std::abs(C * C))) {
            singular = true;
            if (t == 0.0) throw SingularMassError(t, X, A);
            return false;
        }
        const double r1 = -Qp * Xd * Ad - Cp * Xd * Xd + F + K * A;
        const double r2 = -Ip * Xd * Xd - Up + 2.0 * Fp * A + Kp * A * A + Qp * Ad * Ad;
        dy[0] = Xd;
        dy[1] = (2.0 * C * r1 - Q * r2) / det;
        dy[2] = Ad;
        dy[3] = (-2.0 * I * r1 + C * r2) / det;
        return true;
    };
    auto energy = [&](const std::array<double, 4>& y) {
        const double X = y[0], Xd = y[1], A = y[2], Ad = y[3];
        return tbl.value(iI, X) * Xd * Xd + tbl.value(iQ, X) * Ad * Ad +
               2.0 * tbl.value(iC, X) * Ad * Xd + tbl.value(iU, X) -
               2.0 * tbl.value(iF, X) * A - tbl.value(iK, X) * A * A;
    };
    auto store = [](CCTrajectory& tr, double t, const std::array<double, 4>& y, double E) {
        tr.samples.push_back({t, y[0], y[1], y[2], y[3], E});
    };
    return integrate<4>(rhs, energy, store, {x0, -v_in, 0.0, 0.0}, t_max, opt, &singular);
}

}  // namespace phi4trap
