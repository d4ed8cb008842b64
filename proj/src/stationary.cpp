#include "phi4trap/stationary.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

#include "phi4trap/model.hpp"

namespace phi4trap {

std::vector<double> stationary_residual(const Grid& g, const StencilOperator& d2,
                                        std::span<const double> u, double omega) {
    std::vector<double> r(g.n());
    d2.apply(u, r);
    for (int i = 0; i < g.n(); ++i) r[i] -= potential_du(u[i], g.node(i), omega);
    return r;
}

std::vector<double> zero_crossings(const Grid& g, std::span<const double> u,
                                   double window) {
    std::vector<double> out;
    for (int i = 0; i + 1 < g.n(); ++i) {
        const double xa = g.node(i), xb = g.node(i + 1);
        if (std::abs(xa) >= window || std::abs(xb) >= window) continue;
        const double a = u[i], b = u[i + 1];
        if (a == 0.0) {
            out.push_back(xa);
        } else if (a * b < 0.0) {
            out.push_back(xa - a * (xb - xa) / (b - a));
        }
    }
    return out;
}

namespace {

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Newton iteration on D2 u - dV/du = 0 with the banded Jacobian
/// D2 - diag(d2V/du2), factored sparsely per step.
std::vector<double> newton_solve(const Grid& g, const StencilOperator& d2,
                                 std::vector<double> u, const SimParams& p,
                                 double* residual_out) {
    const int n = g.n();
    using Sparse = Eigen::SparseMatrix<double>;
    std::vector<Eigen::Triplet<double>> d2_entries;
    d2_entries.reserve(5 * n + 8);
    d2.for_each_entry([&](int i, int j, double v) { d2_entries.emplace_back(i, j, v); });

    Eigen::VectorXd delta(n), rhs(n);
    Eigen::SparseLU<Sparse> lu;
    double res = 0.0;
    for (int it = 0; it <= p.newton_max_iter; ++it) {
        auto r = stationary_residual(g, d2, u, p.omega);
        res = sup_norm(r);
        if (residual_out) *residual_out = res;
        if (res <= p.newton_tol) return u;
        if (it == p.newton_max_iter) break;

        std::vector<Eigen::Triplet<double>> entries = d2_entries;
        for (int i = 0; i < n; ++i)
            entries.emplace_back(i, i, -potential_d2u(u[i], g.node(i), p.omega));
        Sparse jac(n, n);
        jac.setFromTriplets(entries.begin(), entries.end());
        lu.compute(jac);
        if (lu.info() != Eigen::Success)
            throw NewtonError("Newton Jacobian factorization failed", res);
        for (int i = 0; i < n; ++i) rhs[i] = r[i];
        delta = lu.solve(rhs);
        for (int i = 0; i < n; ++i) u[i] -= delta[i];
    }
    throw NewtonError("Newton iteration did not converge", res);
}

}  // namespace

StationaryProfile solve_ground_state(const SimParams& p) {
    p.validate();
    Grid g = make_grid(p);
    StencilOperator d2(g);
    std::vector<double> seed(g.n(), 1.0);
    if (p.omega > 0.0)
        for (int i = 0; i < g.n(); ++i) seed[i] = tf_profile(g.node(i), p.omega);
    double res = 0.0;
    auto u = newton_solve(g, d2, std::move(seed), p, &res);
    return {std::move(g), std::move(u), res, StationaryProfile::Kind::ground, p.omega};
}

StationaryProfile solve_kink(const SimParams& p, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("solve_kink: sign must be +-1");
    auto ground = solve_ground_state(p);
    const Grid& g = ground.grid;
    StencilOperator d2(g);
    std::vector<double> seed(g.n());
    for (int i = 0; i < g.n(); ++i)
        seed[i] = sign * ground.u[i] * std::tanh(g.node(i));
    double res = 0.0;
    auto u = newton_solve(g, d2, std::move(seed), p, &res);
    return {g, std::move(u), res,
            sign > 0 ? StationaryProfile::Kind::kink : StationaryProfile::Kind::antikink,
            p.omega};
}

std::vector<double> kak_profile(const SimParams& p, double x0) {
    if (x0 <= 0.0) throw std::invalid_argument("kak_profile: x0 must be > 0");
    auto ground = solve_ground_state(p);
    const Grid& g = ground.grid;
    std::vector<double> u(g.n());
    for (int i = 0; i < g.n(); ++i) {
        const double x = g.node(i);
        u[i] = ground.u[i] * (std::tanh(x + x0) - std::tanh(x - x0) - 1.0);
    }
    return u;
}

EquilibriumSeparation find_equilibrium_separation(const SimParams& p) {
    p.validate();
    if (p.omega <= 0.0)
        throw std::domain_error("find_equilibrium_separation: omega must be > 0");
    auto ground = solve_ground_state(p);
    const Grid& g = ground.grid;
    StencilOperator d2(g);
    const int n = g.n();
    const double xs = tf_support_radius(p.omega);

    std::vector<double> ua(n), mode(n);
    auto projected = [&](double x0) {
        for (int i = 0; i < n; ++i) {
            const double x = g.node(i);
            const double tp = std::tanh(x + x0), tm = std::tanh(x - x0);
            ua[i] = ground.u[i] * (tp - tm - 1.0);
            mode[i] = ground.u[i] * ((1.0 - tp * tp) + (1.0 - tm * tm));
        }
        auto r = stationary_residual(g, d2, ua, p.omega);
        for (int i = 0; i < n; ++i) r[i] *= mode[i];
        return quadrature(r, g);
    };

    // bracket the projected-residual sign change inside (0.5, x_s)
    double lo = 0.6, hi = -1.0, glo = projected(lo);
    for (double x0 = lo + 0.1; x0 < xs - 1e-9; x0 += 0.1) {
        const double gx = projected(x0);
        if (glo * gx <= 0.0) {
            hi = x0;
            break;
        }
        lo = x0;
        glo = gx;
    }
    if (hi < 0.0)
        throw std::runtime_error(
            "find_equilibrium_separation: projected residual has no sign change in (0.5, x_s)");
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        const double gm = projected(mid);
        if (glo * gm <= 0.0)
            hi = mid;
        else {
            lo = mid;
            glo = gm;
        }
    }
    const double x0p = 0.5 * (lo + hi);

    for (int i = 0; i < n; ++i) {
        const double x = g.node(i);
        ua[i] = ground.u[i] * (std::tanh(x + x0p) - std::tanh(x - x0p) - 1.0);
    }
    const double ansatz_res = sup_norm(stationary_residual(g, d2, ua, p.omega));

    double res = 0.0;
    auto refined = newton_solve(g, d2, ua, p, &res);
    auto crossings = zero_crossings(g, refined, 0.9 * xs);
    if (crossings.size() != 2)
        throw std::runtime_error(
            "find_equilibrium_separation: refined state does not have exactly two zeros");
    const double x_cr = 0.5 * (crossings.back() - crossings.front());

    StationaryProfile state{g, std::move(refined), res,
                            StationaryProfile::Kind::kink_antikink, p.omega};
    return {x_cr, x0p, ansatz_res, std::move(state)};
}

}  // namespace phi4trap
