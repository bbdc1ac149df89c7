#include "conjproc/estimate.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "conjproc/errors.hpp"

namespace conjproc {

EmpiricalCDF::EmpiricalCDF(std::vector<double> sample) : sorted_(std::move(sample)) {
  if (sorted_.empty()) throw UsageError("empirical CDF needs at least one observation");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCDF::operator()(double x) const {
  auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

EmpiricalCDF empirical_cdf(std::vector<double> samples) { return EmpiricalCDF(std::move(samples)); }

std::vector<EmpiricalCDF> empirical_cdfs(const std::vector<std::vector<double>>& per_cycle) {
  std::vector<EmpiricalCDF> out;
  out.reserve(per_cycle.size());
  for (const auto& s : per_cycle) out.emplace_back(s);
  return out;
}

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::C1Hat: return "C1_hat";
    case KernelKind::RHat: return "R_hat";
    case KernelKind::C1True: return "C1_true";
    case KernelKind::RTrue: return "R_true";
  }
  return "unknown";
}

bool is_r_kind(KernelKind kind) { return kind == KernelKind::RHat || kind == KernelKind::RTrue; }

void CovKernelGrid::write_csv(std::ostream& os) const {
  os.precision(17);
  os << "z";
  for (int j = 0; j < grid.size(); ++j) os << ',' << grid[j];
  os << '\n';
  for (int i = 0; i < grid.size(); ++i) {
    os << grid[i];
    for (int j = 0; j < grid.size(); ++j) os << ',' << values(i, j);
    os << '\n';
  }
}

nlohmann::json CovKernelGrid::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < values.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(values.cols()));
    for (int j = 0; j < values.cols(); ++j) row[static_cast<std::size_t>(j)] = values(i, j);
    rows.push_back(std::move(row));
  }
  return {{"kind", to_string(kind)},
          {"grid", grid.to_json()},
          {"values", std::move(rows)},
          {"provenance", provenance}};
}

Eigen::MatrixXd project(std::span<const EmpiricalCDF> cdfs, const QuadratureGrid& grid) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(cdfs.size()), grid.size());
  for (std::size_t t = 0; t < cdfs.size(); ++t) {
    for (int i = 0; i < grid.size(); ++i) out(static_cast<Eigen::Index>(t), i) = cdfs[t](grid[i]);
  }
  return out;
}

Eigen::MatrixXd project(std::span<const LatentState> states, const QuadratureGrid& grid) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(states.size()), grid.size());
  for (std::size_t t = 0; t < states.size(); ++t) {
    for (int i = 0; i < grid.size(); ++i) out(static_cast<Eigen::Index>(t), i) = states[t].cdf(grid[i]);
  }
  return out;
}

GridFunction mean_cdf(std::span<const EmpiricalCDF> cdfs, const QuadratureGrid& grid) {
  if (cdfs.empty()) throw UsageError("mean_cdf needs at least one CDF");
  return project(cdfs, grid).colwise().mean().transpose();
}

CovKernelGrid c1_hat(const Eigen::MatrixXd& projection, const QuadratureGrid& grid) {
  const Eigen::Index n = projection.rows();
  if (n < 2) throw UsageError("c1_hat needs n >= 2 cycles, got " + std::to_string(n));
  if (projection.cols() != grid.size()) throw UsageError("projection width does not match the grid");
  const Eigen::RowVectorXd mean = projection.colwise().mean();
  const Eigen::MatrixXd centered = projection.rowwise() - mean;
  Eigen::MatrixXd values = centered.topRows(n - 1).transpose() * centered.bottomRows(n - 1);
  values /= static_cast<double>(n - 1);
  return CovKernelGrid{grid, std::move(values), KernelKind::C1Hat,
                       nlohmann::json{{"n", static_cast<long>(n)}}};
}

CovKernelGrid c1_hat(std::span<const EmpiricalCDF> cdfs, const QuadratureGrid& grid) {
  if (cdfs.size() < 2) throw UsageError("c1_hat needs n >= 2 cycles");
  return c1_hat(project(cdfs, grid), grid);
}

double lag_one_covariance(std::span<const double> fx, std::span<const double> fy) {
  const std::size_t n = fx.size();
  if (n < 2 || fy.size() != n) throw UsageError("lag-1 covariance needs two aligned series of length >= 2");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    mx += fx[t];
    my += fy[t];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t t = 0; t + 1 < n; ++t) acc += (fx[t] - mx) * (fy[t + 1] - my);
  return acc / static_cast<double>(n - 1);
}

namespace {

template <typename Cdf>
double c1_at(std::span<const Cdf> cdfs, double x, double y) {
  if (cdfs.size() < 2) throw UsageError("c1_hat_at needs n >= 2 cycles");
  std::vector<double> fx(cdfs.size());
  std::vector<double> fy(cdfs.size());
  for (std::size_t t = 0; t < cdfs.size(); ++t) {
    if constexpr (std::is_same_v<Cdf, LatentState>) {
      fx[t] = cdfs[t].cdf(x);
      fy[t] = cdfs[t].cdf(y);
    } else {
      fx[t] = cdfs[t](x);
      fy[t] = cdfs[t](y);
    }
  }
  return lag_one_covariance(fx, fy);
}

}  // namespace

double c1_hat_at(std::span<const EmpiricalCDF> cdfs, double x, double y) { return c1_at(cdfs, x, y); }

double c1_hat_at(std::span<const LatentState> states, double x, double y) {
  return c1_at(states, x, y);
}

CovKernelGrid r_hat(const CovKernelGrid& c1) {
  if (is_r_kind(c1.kind)) throw UsageError("r_hat expects a lag-1 covariance kernel, got " +
                                           std::string(to_string(c1.kind)));
  const Eigen::Index m = c1.grid.size();
  if (c1.values.rows() != m || c1.values.cols() != m) {
    throw UsageError("kernel matrix does not match its grid");
  }
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(m, m);
  values.selfadjointView<Eigen::Lower>().rankUpdate(c1.values, 1.0 / static_cast<double>(m));
  values.triangularView<Eigen::StrictlyUpper>() = values.transpose();
  return CovKernelGrid{c1.grid, std::move(values),
                       c1.kind == KernelKind::C1True ? KernelKind::RTrue : KernelKind::RHat,
                       c1.provenance};
}

CovKernelGrid true_c1_grid(const QuadratureGrid& grid) {
  const int m = grid.size();
  Eigen::MatrixXd values(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) values(i, j) = true_c1(grid[i], grid[j]);
  }
  return CovKernelGrid{grid, std::move(values), KernelKind::C1True,
                       nlohmann::json{{"source", "closed form"}}};
}

CovKernelGrid true_r_grid(const QuadratureGrid& grid) {
  const int m = grid.size();
  Eigen::MatrixXd values(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) values(i, j) = true_r_kernel(grid[i], grid[j], grid.measure());
  }
  return CovKernelGrid{grid, std::move(values), KernelKind::RTrue,
                       nlohmann::json{{"source", "closed form"}}};
}

}  // namespace conjproc
