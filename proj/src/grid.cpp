#include "phi4trap/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "phi4trap/sim_params.hpp"

namespace phi4trap {

void SimParams::validate() const {
    if (dx <= 0.0 || x_max <= 0.0 || dt <= 0.0 || t_max <= 0.0)
        throw std::invalid_argument("SimParams: dx, x_max, dt, t_max must be positive");
    if (omega < 0.0) throw std::invalid_argument("SimParams: omega must be >= 0");
    const double half = x_max / dx;
    const double m = std::round(half);
    if (std::abs(half - m) > 1e-9 * std::max(1.0, half))
        throw std::invalid_argument("SimParams: x_max must be an integer multiple of dx");
    if (2 * static_cast<long>(m) + 1 < 5)
        throw std::invalid_argument("SimParams: grid needs at least 5 points");
    if (omega > 0.0 && x_max < 2.0 / omega + 5.0)
        throw std::invalid_argument(
            "SimParams: x_max must be >= 2/omega + 5 to contain the TF support");
    if (newton_tol <= 0.0 || newton_max_iter < 1)
        throw std::invalid_argument("SimParams: bad Newton controls");
}

int SimParams::grid_points() const {
    return 2 * static_cast<int>(std::round(x_max / dx)) + 1;
}

Grid::Grid(double x_max, double dx) : dx_(dx) {
    if (dx <= 0.0 || x_max <= 0.0) throw std::invalid_argument("Grid: bad extents");
    const double half = x_max / dx;
    const int m = static_cast<int>(std::round(half));
    if (std::abs(half - m) > 1e-9 * std::max(1.0, half))
        throw std::invalid_argument("Grid: x_max must be an integer multiple of dx");
    n_ = 2 * m + 1;
    if (n_ < 5) throw std::invalid_argument("Grid: need at least 5 points");
    nodes_.resize(n_);
    // (i - m)*dx makes the grid exactly antisymmetric in floating point
    for (int i = 0; i < n_; ++i) nodes_[i] = (i - m) * dx;
}

int Grid::nearest(double x) const {
    const int m = (n_ - 1) / 2;
    int i = m + static_cast<int>(std::round(x / dx_));
    if (i < 0) i = 0;
    if (i >= n_) i = n_ - 1;
    return i;
}

Grid make_grid(const SimParams& p) {
    p.validate();
    return Grid(p.x_max, p.dx);
}

namespace {

// One-sided fourth-order second-derivative rows (6 points), exact through
// degree-5 polynomials; mirrored at the right edge.
constexpr double kEdge0[6] = {45.0 / 12, -154.0 / 12, 214.0 / 12,
                              -156.0 / 12, 61.0 / 12, -10.0 / 12};
constexpr double kEdge1[6] = {10.0 / 12, -15.0 / 12, -4.0 / 12,
                              14.0 / 12, -6.0 / 12, 1.0 / 12};

// Even-reflection (free end) rows: central stencil folded with
// u_{-1} = u_1, u_{-2} = u_2.
constexpr double kFold0[3] = {-30.0 / 12, 32.0 / 12, -2.0 / 12};
constexpr double kFold1[4] = {16.0 / 12, -31.0 / 12, 16.0 / 12, -1.0 / 12};

constexpr double kCentral[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};

}  // namespace

StencilOperator::StencilOperator(const Grid& g, Closure closure)
    : n_(g.n()), inv_dx2_(1.0 / (g.dx() * g.dx())), closure_(closure) {}

int StencilOperator::row_entries(int i, int* cols, double* vals) const {
    const double s = inv_dx2_;
    auto edge = [&](const double* c, int m, int base, bool mirrored) {
        for (int k = 0; k < m; ++k) {
            cols[k] = mirrored ? base - k : base + k;
            vals[k] = c[k] * s;
        }
        return m;
    };
    if (closure_ == Closure::one_sided) {
        if (i == 0) return edge(kEdge0, 6, 0, false);
        if (i == 1) return edge(kEdge1, 6, 0, false);
        if (i == n_ - 1) return edge(kEdge0, 6, n_ - 1, true);
        if (i == n_ - 2) return edge(kEdge1, 6, n_ - 1, true);
    } else {
        if (i == 0) return edge(kFold0, 3, 0, false);
        if (i == 1) return edge(kFold1, 4, 0, false);
        if (i == n_ - 1) return edge(kFold0, 3, n_ - 1, true);
        if (i == n_ - 2) return edge(kFold1, 4, n_ - 1, true);
    }
    for (int k = 0; k < 5; ++k) {
        cols[k] = i - 2 + k;
        vals[k] = kCentral[k] * s;
    }
    return 5;
}

void StencilOperator::apply(std::span<const double> f, std::span<double> out) const {
    if (static_cast<int>(f.size()) != n_ || static_cast<int>(out.size()) != n_)
        throw std::invalid_argument("StencilOperator::apply: length mismatch");
    const double s = inv_dx2_ / 12.0;
    const double* u = f.data();
    double* o = out.data();
    // difference form: row coefficients sum to zero, so subtracting the
    // center value first avoids the large-value cancellation error
    for (int i = 2; i < n_ - 2; ++i) {
        const double d1 = (u[i - 1] - u[i]) + (u[i + 1] - u[i]);
        const double d2 = (u[i - 2] - u[i]) + (u[i + 2] - u[i]);
        o[i] = s * (16.0 * d1 - d2);
    }
    int cols[6];
    double vals[6];
    for (int i : {0, 1, n_ - 2, n_ - 1}) {
        const int m = row_entries(i, cols, vals);
        double acc = 0.0;
        for (int k = 0; k < m; ++k) acc += vals[k] * (u[cols[k]] - u[i]);
        o[i] = acc;
    }
}

std::vector<double> StencilOperator::apply(const std::vector<double>& f) const {
    std::vector<double> out(f.size());
    apply(f, out);
    return out;
}

std::vector<double> first_derivative(std::span<const double> f, const Grid& g) {
    const int n = g.n();
    if (static_cast<int>(f.size()) != n)
        throw std::invalid_argument("first_derivative: length mismatch");
    std::vector<double> out(n);
    const double s = 1.0 / (12.0 * g.dx());
    const double* u = f.data();
    for (int i = 2; i < n - 2; ++i)
        out[i] = s * (8.0 * (u[i + 1] - u[i - 1]) - (u[i + 2] - u[i - 2]));
    // one-sided fourth-order five-point rows, again in difference form
    out[0] = s * (48.0 * (u[1] - u[0]) - 36.0 * (u[2] - u[0]) + 16.0 * (u[3] - u[0]) -
                  3.0 * (u[4] - u[0]));
    out[1] = s * (-3.0 * (u[0] - u[1]) + 18.0 * (u[2] - u[1]) - 6.0 * (u[3] - u[1]) +
                  (u[4] - u[1]));
    out[n - 1] = -s * (48.0 * (u[n - 2] - u[n - 1]) - 36.0 * (u[n - 3] - u[n - 1]) +
                       16.0 * (u[n - 4] - u[n - 1]) - 3.0 * (u[n - 5] - u[n - 1]));
    out[n - 2] = -s * (-3.0 * (u[n - 1] - u[n - 2]) + 18.0 * (u[n - 3] - u[n - 2]) -
                       6.0 * (u[n - 4] - u[n - 2]) + (u[n - 5] - u[n - 2]));
    return out;
}

double quadrature_weight(int i, const Grid& g) {
    const int n = g.n();
    const double dx = g.dx();
    if (n % 2 == 1) {  // composite Simpson
        if (i == 0 || i == n - 1) return dx / 3.0;
        return (i % 2 == 1) ? 4.0 * dx / 3.0 : 2.0 * dx / 3.0;
    }
    return (i == 0 || i == n - 1) ? 0.5 * dx : dx;  // trapezoid fallback
}

double quadrature(std::span<const double> f, const Grid& g) {
    const int n = g.n();
    if (static_cast<int>(f.size()) != n)
        throw std::invalid_argument("quadrature: length mismatch");
    if (n % 2 == 1) {
        const double dx = g.dx();
        double s4 = 0.0, s2 = 0.0;
        for (int i = 1; i < n - 1; i += 2) s4 += f[i];
        for (int i = 2; i < n - 1; i += 2) s2 += f[i];
        return dx / 3.0 * (f[0] + f[n - 1] + 4.0 * s4 + 2.0 * s2);
    }
    double s = 0.5 * (f[0] + f[n - 1]);
    for (int i = 1; i < n - 1; ++i) s += f[i];
    return s * g.dx();
}

}  // namespace phi4trap
