#pragma once

#include <complex>
#include <vector>

#include "phi4trap/grid.hpp"
#include "phi4trap/sim_params.hpp"
#include "phi4trap/stationary.hpp"

namespace phi4trap {

/// Eigenvalues mu and eigenvectors chi of L = D2 - diag(V''(u*, x)).
/// Each mu maps to a lambda pair +-sqrt(mu): real for mu > 0 (instability),
/// imaginary for mu < 0 (oscillation at omega = sqrt(-mu)).
///
/// The one-sided edge rows make L slightly non-symmetric; L is symmetrized
/// as (L + L^T)/2 before the eigensolve. Symmetrization leaves the physical
/// modes untouched (they vanish near the boundary) but introduces a pair of
/// O(1/dx^2) artifacts localized on the outermost nodes; those are removed
/// by an edge-localization filter (or by magnitude when eigenvectors are
/// not computed) and counted in n_filtered.
struct SpectrumResult {
    Grid grid;                                   // spectral grid
    double omega = 0.0;
    std::vector<double> mu;                      // descending
    std::vector<std::vector<double>> eigenvectors;  // per mu, empty if not requested
    int n_unstable = 0;                          // count of mu > 1e-8
    int n_filtered = 0;                          // removed boundary artifacts

    /// Both members of every lambda pair, for the spectral-plane export.
    std::vector<std::complex<double>> lambda_pairs() const;
};

inline constexpr double kMuZeroTol = 1e-8;

/// Dense symmetric eigensolve of the linearization about a converged
/// profile, on a grid coarsened to spectral_dx (must be an integer multiple
/// of the profile dx). Eigenvectors are L2-normalized against the Simpson
/// weights when requested.
SpectrumResult linearization_spectrum(const StationaryProfile& profile,
                                      double spectral_dx,
                                      bool want_vectors = true);

/// Spectrum about the Newton-refined stationary kink-antikink state.
SpectrumResult stationary_kak_spectrum(const SimParams& p, double spectral_dx,
                                       bool want_vectors = false);

/// The eigenvector with the largest strictly negative mu (smallest positive
/// frequency), excluding the unstable pair and near-zero modes. Normalized
/// to unit L2 norm, sign fixed positive at the node nearest x = +x_s.
/// mode_index selects the k-th smallest positive frequency instead (0 = the
/// default choice); the kink internal-mode alternative is mode_index >= 1.
std::vector<double> extract_chi1(const SpectrumResult& kink_spectrum,
                                 int mode_index = 0);

}  // namespace phi4trap
