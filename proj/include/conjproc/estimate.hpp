#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <span>
#include <string_view>
#include <vector>

#include "conjproc/latent.hpp"
#include "conjproc/measure.hpp"

namespace conjproc {

/// Right-continuous step function F̂(x) = #{i : X_i ≤ x} / q.
class EmpiricalCDF {
 public:
  explicit EmpiricalCDF(std::vector<double> sample);

  double operator()(double x) const;
  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted_sample() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

EmpiricalCDF empirical_cdf(std::vector<double> samples);
std::vector<EmpiricalCDF> empirical_cdfs(const std::vector<std::vector<double>>& per_cycle);

enum class KernelKind { C1Hat, RHat, C1True, RTrue };

std::string_view to_string(KernelKind kind);
bool is_r_kind(KernelKind kind);

/// A kernel sampled on a quadrature grid: values(i, j) = K(z_i, z_j).
struct CovKernelGrid {
  QuadratureGrid grid;
  Eigen::MatrixXd values;
  KernelKind kind;
  nlohmann::json provenance = nlohmann::json::object();

  void write_csv(std::ostream& os) const;
  nlohmann::json to_json() const;
};

/// Row t holds the CDF of cycle t evaluated at the grid points (n × m).
Eigen::MatrixXd project(std::span<const EmpiricalCDF> cdfs, const QuadratureGrid& grid);
/// Oracle mode: exact latent CDFs F_t on the grid.
Eigen::MatrixXd project(std::span<const LatentState> states, const QuadratureGrid& grid);

/// F̄_0 on the grid.
GridFunction mean_cdf(std::span<const EmpiricalCDF> cdfs, const QuadratureGrid& grid);

/// Ĉ_1 from an n × m projection matrix; divisor n − 1, no bias correction.
CovKernelGrid c1_hat(const Eigen::MatrixXd& projection, const QuadratureGrid& grid);
CovKernelGrid c1_hat(std::span<const EmpiricalCDF> cdfs, const QuadratureGrid& grid);

/// (1/(n−1)) Σ_{t<n} (f_x[t] − mean f_x)(f_y[t+1] − mean f_y): the lag-1
/// sample covariance of two aligned CDF value series.
double lag_one_covariance(std::span<const double> fx, std::span<const double> fy);

/// Ĉ_1(x, y) evaluated directly from its defining sum at an arbitrary point.
double c1_hat_at(std::span<const EmpiricalCDF> cdfs, double x, double y);
double c1_hat_at(std::span<const LatentState> states, double x, double y);

/// R(i, j) = (1/m) Σ_k C(i, k) C(j, k); exactly symmetric and PSD.
CovKernelGrid r_hat(const CovKernelGrid& c1);

/// Closed-form example kernels at the grid points.
CovKernelGrid true_c1_grid(const QuadratureGrid& grid);
CovKernelGrid true_r_grid(const QuadratureGrid& grid);

}  // namespace conjproc
