#include "conjproc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "conjproc/errors.hpp"

namespace conjproc {

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

void check_same_grid(const QuadratureGrid& a, const QuadratureGrid& b) {
  if (!a.same_as(b)) throw UsageError("kernels live on different grids");
}

}  // namespace

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& input, const JacobiOptions& options) {
  const Eigen::Index m = input.rows();
  if (input.cols() != m) throw UsageError("jacobi_eigen needs a square matrix");
  Eigen::MatrixXd a = input;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(m, m);
  const double scale = a.norm();
  const double threshold = options.tol * scale;

  int sweep = 0;
  double off = off_diagonal_norm(a);
  while (off > threshold) {
    if (sweep == options.max_sweeps) {
      std::ostringstream msg;
      msg << "Jacobi iteration did not converge after " << sweep
          << " sweeps; off-diagonal residual " << off << " vs threshold " << threshold;
      throw NumericError(msg.str());
    }
    ++sweep;
    for (Eigen::Index p = 0; p < m - 1; ++p) {
      for (Eigen::Index q = p + 1; q < m; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle annihilating a(p, q) (Golub & Van Loan, Alg. 8.4.1).
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        const double app = a(p, p);
        const double aqq = a(q, q);
        for (Eigen::Index k = 0; k < m; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < m; ++k) {
          a(p, k) = a(k, p);
          a(q, k) = a(k, q);
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        for (Eigen::Index k = 0; k < m; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    off = off_diagonal_norm(a);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

  SymmetricEigen out;
  out.values.resize(m);
  out.vectors.resize(m, m);
  out.sweeps = sweep;
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values[k] = a(src, src);
    out.vectors.col(k) = v.col(src);
  }
  return out;
}

Spectrum eigendecompose(const CovKernelGrid& kernel, const JacobiOptions& options) {
  if (!is_r_kind(kernel.kind)) {
    throw UsageError("eigendecompose expects an R kernel, got " + std::string(to_string(kernel.kind)));
  }
  if (!(options.tol > 0.0)) throw UsageError("eigendecompose needs tol > 0");
  const int m = kernel.grid.size();
  if (kernel.values.rows() != m || kernel.values.cols() != m) {
    throw UsageError("kernel matrix does not match its grid");
  }
  const double asym = (kernel.values - kernel.values.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9) {
    std::ostringstream msg;
    msg << "eigendecompose needs a symmetric kernel; max asymmetry " << asym;
    throw UsageError(msg.str());
  }

  const auto md = static_cast<double>(m);
  SymmetricEigen eig = jacobi_eigen(kernel.values / md, options);
  Spectrum out{kernel.grid, std::move(eig.values), std::sqrt(md) * eig.vectors, eig.sweeps};
  for (int j = 0; j < m; ++j) {
    Eigen::Index arg = 0;
    out.eigenfunctions.col(j).cwiseAbs().maxCoeff(&arg);
    if (out.eigenfunctions(arg, j) < 0.0) out.eigenfunctions.col(j) *= -1.0;
  }
  return out;
}

double hs_norm(const CovKernelGrid& kernel) {
  return kernel.values.norm() / static_cast<double>(kernel.grid.size());
}

double hs_distance(const CovKernelGrid& a, const CovKernelGrid& b) {
  check_same_grid(a.grid, b.grid);
  return (a.values - b.values).norm() / static_cast<double>(a.grid.size());
}

double eigenfunction_gap(const GridFunction& a, const GridFunction& b, const QuadratureGrid& grid) {
  return std::min(l2_norm(a - b, grid), l2_norm(a + b, grid));
}

SpectrumDistance spectrum_distance(const Spectrum& a, const Spectrum& b) {
  check_same_grid(a.grid, b.grid);
  SpectrumDistance out;
  const int longest = std::max(a.size(), b.size());
  for (int j = 0; j < longest; ++j) {
    const double ta = j < a.size() ? a.eigenvalues[j] : 0.0;
    const double tb = j < b.size() ? b.eigenvalues[j] : 0.0;
    out.sup_eigenvalue_gap = std::max(out.sup_eigenvalue_gap, std::abs(ta - tb));
  }
  const int common = std::min(a.size(), b.size());
  out.eigenfunction_gaps.reserve(static_cast<std::size_t>(common));
  for (int j = 0; j < common; ++j) {
    out.eigenfunction_gaps.push_back(
        eigenfunction_gap(a.eigenfunction(j), b.eigenfunction(j), a.grid));
  }
  return out;
}

Eigen::MatrixXd reconstruct(const Spectrum& s) {
  // ψ ⊗ ψ / m in operator form; multiply back by m to get kernel values.
  return s.eigenfunctions * s.eigenvalues.asDiagonal() * s.eigenfunctions.transpose();
}

nlohmann::json Spectrum::to_json() const {
  nlohmann::json funcs = nlohmann::json::array();
  for (int j = 0; j < size(); ++j) {
    funcs.push_back(std::vector<double>(eigenfunctions.col(j).begin(), eigenfunctions.col(j).end()));
  }
  return {{"grid", grid.to_json()},
          {"eigenvalues", std::vector<double>(eigenvalues.begin(), eigenvalues.end())},
          {"eigenfunctions", std::move(funcs)},
          {"normalization", "L2(mu) unit norm; largest-magnitude entry positive"},
          {"sweeps", sweeps}};
}

}  // namespace conjproc
