#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>
#include <vector>

#include "conjproc/estimate.hpp"

namespace conjproc {

/// Eigenpairs of the integral operator f ↦ ∫ K(·, y) f(y) μ(dy) on the grid.
/// Eigenfunctions are columns, normalized to unit L²(μ) norm (Euclidean norm √m),
/// with the entry of largest magnitude positive.
struct Spectrum {
  QuadratureGrid grid;
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenfunctions;
  int sweeps = 0;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  GridFunction eigenfunction(int j) const { return eigenfunctions.col(j); }
  nlohmann::json to_json() const;
};

struct JacobiOptions {
  /// Stop once the off-diagonal Frobenius norm falls below tol · ‖A‖_F.
  double tol = 1e-12;
  int max_sweeps = 100;
};

struct SymmetricEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // orthonormal columns
  int sweeps = 0;
};

/// Cyclic Jacobi diagonalization of a dense symmetric matrix.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, const JacobiOptions& options = {});

/// Diagonalizes A = values / m. Throws UsageError for non-R kernels or
/// asymmetry above 1e−9, NumericError when the sweep cap is reached.
Spectrum eigendecompose(const CovKernelGrid& kernel, const JacobiOptions& options = {});

/// sqrt((1/m²) Σ K(i, j)²).
double hs_norm(const CovKernelGrid& kernel);
double hs_distance(const CovKernelGrid& a, const CovKernelGrid& b);

struct SpectrumDistance {
  double sup_eigenvalue_gap = 0.0;
  std::vector<double> eigenfunction_gaps;  // min over signs of ‖ψ̂_j ∓ ψ_j‖_{L²(μ)}
};

/// Eigenvalue lists are aligned by index; the shorter one is padded with zeros.
SpectrumDistance spectrum_distance(const Spectrum& a, const Spectrum& b);

/// Sign-aligned L²(μ) distance between two eigenfunctions.
double eigenfunction_gap(const GridFunction& a, const GridFunction& b, const QuadratureGrid& grid);

/// Σ_j θ_j ψ_j ⊗ ψ_j as a kernel matrix (so that values/m rebuilds A).
Eigen::MatrixXd reconstruct(const Spectrum& spectrum);

}  // namespace conjproc
