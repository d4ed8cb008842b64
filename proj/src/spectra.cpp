#include "phi4trap/spectra.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "phi4trap/model.hpp"

namespace phi4trap {

namespace {

// Spurious symmetrization artifacts live at |mu| ~ 1/dx^2 on the outermost
// nodes; physical mu are bounded by sup(-V'') <= 2. Used when eigenvectors
// are unavailable.
constexpr double kArtifactMuCut = 100.0;
constexpr int kEdgeBand = 6;

double edge_mass_fraction(const Eigen::VectorXd& v) {
    const int n = static_cast<int>(v.size());
    double total = v.squaredNorm();
    double edge = 0.0;
    for (int i = 0; i < kEdgeBand; ++i) edge += v[i] * v[i] + v[n - 1 - i] * v[n - 1 - i];
    return edge / total;
}

}  // namespace

std::vector<std::complex<double>> SpectrumResult::lambda_pairs() const {
    std::vector<std::complex<double>> out;
    out.reserve(2 * mu.size());
    for (double m : mu) {
        if (m >= 0.0) {
            const double r = std::sqrt(m);
            out.emplace_back(r, 0.0);
            out.emplace_back(-r, 0.0);
        } else {
            const double w = std::sqrt(-m);
            out.emplace_back(0.0, w);
            out.emplace_back(0.0, -w);
        }
    }
    return out;
}

SpectrumResult linearization_spectrum(const StationaryProfile& profile,
                                      double spectral_dx, bool want_vectors) {
    const Grid& fine = profile.grid;
    const double ratio = spectral_dx / fine.dx();
    const int stride = static_cast<int>(std::round(ratio));
    if (stride < 1 || std::abs(ratio - stride) > 1e-9)
        throw std::invalid_argument(
            "linearization_spectrum: spectral_dx must be an integer multiple of dx");
    if ((fine.n() - 1) % stride != 0)
        throw std::invalid_argument("linearization_spectrum: grid does not coarsen evenly");

    Grid g(fine.x_max(), fine.dx() * stride);
    const int n = g.n();
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = profile.u[i * stride];

    StencilOperator d2(g);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    d2.for_each_entry([&](int i, int j, double v) { L(i, j) += v; });
    for (int i = 0; i < n; ++i) L(i, i) -= potential_d2u(u[i], g.node(i), profile.omega);

    Eigen::MatrixXd M = 0.5 * (L + L.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.compute(M, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("linearization_spectrum: eigensolver failed");

    SpectrumResult out{g, profile.omega, {}, {}, 0, 0};
    const auto& ev = solver.eigenvalues();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return ev[a] > ev[b]; });

    for (int idx : order) {
        bool artifact;
        if (want_vectors)
            artifact = edge_mass_fraction(solver.eigenvectors().col(idx)) > 0.5;
        else
            artifact = std::abs(ev[idx]) > kArtifactMuCut;
        if (artifact) {
            ++out.n_filtered;
            continue;
        }
        out.mu.push_back(ev[idx]);
        if (want_vectors) {
            // unit L2 norm against the quadrature weights
            const auto col = solver.eigenvectors().col(idx);
            double norm2 = 0.0;
            for (int i = 0; i < n; ++i) norm2 += col[i] * col[i] * quadrature_weight(i, g);
            const double scale = 1.0 / std::sqrt(norm2);
            std::vector<double> chi(n);
            for (int i = 0; i < n; ++i) chi[i] = col[i] * scale;
            out.eigenvectors.push_back(std::move(chi));
        }
        if (ev[idx] > kMuZeroTol) ++out.n_unstable;
    }
    return out;
}

SpectrumResult stationary_kak_spectrum(const SimParams& p, double spectral_dx,
                                       bool want_vectors) {
    auto eq = find_equilibrium_separation(p);
    return linearization_spectrum(eq.state, spectral_dx, want_vectors);
}

std::vector<double> extract_chi1(const SpectrumResult& spec, int mode_index) {
    if (spec.eigenvectors.empty())
        throw std::invalid_argument("extract_chi1: spectrum computed without eigenvectors");
    if (spec.omega <= 0.0)
        throw std::domain_error("extract_chi1: needs a trapped (omega > 0) spectrum");
    const Grid& g = spec.grid;
    const int n = g.n();

    // The low-lying modes come in near-degenerate +-parity pairs and the
    // solver returns arbitrary mixtures of them; the symmetric collision
    // ansatz needs the odd member (chi1(x+X) - chi1(x-X) is then even), so
    // project onto odd parity and skip vectors that were purely even.
    int count = 0;
    for (std::size_t k = 0; k < spec.mu.size(); ++k) {
        if (spec.mu[k] >= -kMuZeroTol) continue;
        const auto& v = spec.eigenvectors[k];
        std::vector<double> chi(n);
        for (int i = 0; i < n; ++i) chi[i] = 0.5 * (v[i] - v[n - 1 - i]);
        double norm2 = 0.0;
        for (int i = 0; i < n; ++i) norm2 += chi[i] * chi[i] * quadrature_weight(i, g);
        if (norm2 < 0.05) continue;  // even member of the pair
        if (count++ < mode_index) continue;

        const double scale = 1.0 / std::sqrt(norm2);
        for (double& c : chi) c *= scale;
        if (chi[g.nearest(tf_support_radius(spec.omega))] < 0.0)
            for (double& c : chi) c = -c;
        return chi;
    }
    throw std::runtime_error("extract_chi1: no odd negative-mu mode found");
}

}  // namespace phi4trap
