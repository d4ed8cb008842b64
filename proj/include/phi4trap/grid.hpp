#pragma once

#include <span>
#include <vector>

namespace phi4trap {

struct SimParams;

/// Uniform symmetric grid on [-x_max, x_max]. Nodes are built as
/// (i - m)*dx with m = (n-1)/2, so x_i == -x_{n-1-i} bitwise; parity
/// checks in the tests rely on this.
class Grid {
public:
    Grid(double x_max, double dx);

    int n() const { return n_; }
    double dx() const { return dx_; }
    double x_min() const { return nodes_.front(); }
    double x_max() const { return nodes_.back(); }
    double node(int i) const { return nodes_[i]; }
    const std::vector<double>& nodes() const { return nodes_; }

    /// Index of the node closest to x.
    int nearest(double x) const;

private:
    double dx_;
    int n_;
    std::vector<double> nodes_;
};

Grid make_grid(const SimParams& p);

/// Fourth-order discrete second derivative.
///
/// Interior rows use the central stencil (-1, 16, -30, 16, -1)/(12 dx^2).
/// Two edge-row closures are provided:
///   one_sided     six-point fourth-order rows (no boundary constraint);
///                 used for stationary solves, quadrature-side work and
///                 spectra.
///   reflect_even  ghost nodes by even reflection (free ends, u_x = 0).
///                 The one-sided closure carries a weakly growing mode
///                 under u_tt = D2 u, so time evolution uses this one.
class StencilOperator {
public:
    enum class Closure { one_sided, reflect_even };

    StencilOperator(const Grid& g, Closure closure = Closure::one_sided);

    void apply(std::span<const double> f, std::span<double> out) const;
    std::vector<double> apply(const std::vector<double>& f) const;

    /// Visit every nonzero entry as fn(row, col, value); used to assemble
    /// Jacobians and linearization matrices.
    template <typename Fn>
    void for_each_entry(Fn&& fn) const {
        for (int i = 0; i < n_; ++i) {
            int cols[6];
            double vals[6];
            const int m = row_entries(i, cols, vals);
            for (int k = 0; k < m; ++k) fn(i, cols[k], vals[k]);
        }
    }

    int n() const { return n_; }
    Closure closure() const { return closure_; }

private:
    int row_entries(int i, int* cols, double* vals) const;

    int n_;
    double inv_dx2_;
    Closure closure_;
};

/// Fourth-order first derivative; centered in the interior, one-sided
/// five-point rows at the edges.
std::vector<double> first_derivative(std::span<const double> f, const Grid& g);

/// Composite Simpson integral of f over the grid (trapezoid fallback when
/// the point count is even). Integrands are assumed to decay before the
/// domain edge, which the SimParams domain margin guarantees.
double quadrature(std::span<const double> f, const Grid& g);

/// Simpson (or trapezoid) weight of node i, so that
/// quadrature(f) == sum_i f[i]*quadrature_weight(i).
double quadrature_weight(int i, const Grid& g);

}  // namespace phi4trap
