#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace conjproc {

/// Reference probability measure on the real line. Logistic and Gaussian are
/// equivalent to Lebesgue measure; Uniform(a, b) is kept for quadrature
/// checks with an identity-like quantile.
class Measure {
 public:
  enum class Kind { Logistic, Gaussian, Uniform };

  static Measure logistic(double location = 0.5, double scale = 1.0);
  static Measure gaussian(double mean = 0.5, double sd = 1.0);
  static Measure uniform(double lower = 0.0, double upper = 1.0);

  /// {"name": "logistic", "location": 0.5, "scale": 1.0}; missing keys take
  /// the defaults above.
  static Measure from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double location() const { return a_; }
  double scale() const { return b_; }

  double cdf(double x) const;
  double quantile(double p) const;
  double density(double x) const;

  bool operator==(const Measure&) const = default;

 private:
  Measure(Kind kind, std::string name, double a, double b);

  Kind kind_;
  std::string name_;
  double a_;  // location / mean / lower
  double b_;  // scale / sd / upper
};

/// μ((a, b]) = cdf(b) − cdf(a). Infinite endpoints are allowed.
double measure_mass(const Measure& measure, double a, double b);

/// Midpoint-in-probability quadrature: z_i = quantile((i − 1/2)/m), weight 1/m.
class QuadratureGrid {
 public:
  QuadratureGrid(const Measure& measure, int m);

  int size() const { return static_cast<int>(points_.size()); }
  double weight() const { return 1.0 / static_cast<double>(points_.size()); }
  const Eigen::VectorXd& points() const { return points_; }
  double operator[](int i) const { return points_[i]; }
  const Measure& measure() const { return measure_; }

  /// Quadrature mass of [a, b): share of grid points falling in it.
  double mass(double a, double b) const;

  bool same_as(const QuadratureGrid& other) const {
    return measure_ == other.measure_ && points_.size() == other.points_.size();
  }

  nlohmann::json to_json() const;

 private:
  Measure measure_;
  Eigen::VectorXd points_;
};

/// Values of an L²(μ) element at the grid points.
using GridFunction = Eigen::VectorXd;

QuadratureGrid build_grid(const Measure& measure, int m);

double integrate(const GridFunction& f, const QuadratureGrid& grid);
double inner_product(const GridFunction& f, const GridFunction& g, const QuadratureGrid& grid);
double l2_norm(const GridFunction& f, const QuadratureGrid& grid);

/// Evaluate a callable at every grid point.
template <typename Fn>
GridFunction tabulate(const QuadratureGrid& grid, Fn&& fn) {
  GridFunction out(grid.size());
  for (int i = 0; i < grid.size(); ++i) out[i] = fn(grid[i]);
  return out;
}

}  // namespace conjproc
