#include "conjproc/measure.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "conjproc/errors.hpp"

namespace conjproc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_length(const GridFunction& f, const QuadratureGrid& grid) {
  if (f.size() != grid.size()) {
    throw UsageError("grid function has " + std::to_string(f.size()) +
                     " values but the grid has " + std::to_string(grid.size()) + " points");
  }
}

}  // namespace

Measure::Measure(Kind kind, std::string name, double a, double b)
    : kind_(kind), name_(std::move(name)), a_(a), b_(b) {
  if (!std::isfinite(a_) || !std::isfinite(b_)) {
    throw ConfigError("measure '" + name_ + "' has non-finite parameters");
  }
  if (kind_ == Kind::Uniform ? !(b_ > a_) : !(b_ > 0.0)) {
    throw ConfigError("measure '" + name_ + "' has a non-positive scale");
  }
}

Measure Measure::logistic(double location, double scale) {
  return Measure(Kind::Logistic, "logistic", location, scale);
}

Measure Measure::gaussian(double mean, double sd) {
  return Measure(Kind::Gaussian, "gaussian", mean, sd);
}

Measure Measure::uniform(double lower, double upper) {
  return Measure(Kind::Uniform, "uniform", lower, upper);
}

Measure Measure::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("measure must be a JSON object");
  const std::string name = j.value("name", std::string("logistic"));
  try {
    if (name == "logistic") {
      return logistic(j.value("location", 0.5), j.value("scale", 1.0));
    }
    if (name == "gaussian" || name == "normal") {
      return gaussian(j.value("location", j.value("mean", 0.5)),
                      j.value("scale", j.value("sd", 1.0)));
    }
    if (name == "uniform") {
      return uniform(j.value("lower", 0.0), j.value("upper", 1.0));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad measure parameters: ") + e.what());
  }
  throw ConfigError("unknown measure '" + name + "' (expected logistic, gaussian or uniform)");
}

nlohmann::json Measure::to_json() const {
  if (kind_ == Kind::Uniform) return {{"name", name_}, {"lower", a_}, {"upper", b_}};
  return {{"name", name_}, {"location", a_}, {"scale", b_}};
}

double Measure::cdf(double x) const {
  if (x == -kInf) return 0.0;
  if (x == kInf) return 1.0;
  switch (kind_) {
    case Kind::Logistic:
      return 1.0 / (1.0 + std::exp(-(x - a_) / b_));
    case Kind::Gaussian:
      return 0.5 * std::erfc(-(x - a_) / (b_ * std::sqrt(2.0)));
    case Kind::Uniform:
      if (x <= a_) return 0.0;
      if (x >= b_) return 1.0;
      return (x - a_) / (b_ - a_);
  }
  return 0.0;
}

double Measure::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    if (kind_ == Kind::Uniform && (p == 0.0 || p == 1.0)) return p == 0.0 ? a_ : b_;
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    return std::numeric_limits<double>::quiet_NaN();
  }
  switch (kind_) {
    case Kind::Logistic:
      return a_ + b_ * std::log(p / (1.0 - p));
    case Kind::Gaussian:
      return boost::math::quantile(boost::math::normal_distribution<double>(a_, b_), p);
    case Kind::Uniform:
      return a_ + p * (b_ - a_);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double Measure::density(double x) const {
  switch (kind_) {
    case Kind::Logistic: {
      const double e = std::exp(-std::abs(x - a_) / b_);
      return e / (b_ * (1.0 + e) * (1.0 + e));
    }
    case Kind::Gaussian: {
      const double u = (x - a_) / b_;
      return std::exp(-0.5 * u * u) / (b_ * std::sqrt(2.0 * M_PI));
    }
    case Kind::Uniform:
      return (x >= a_ && x <= b_) ? 1.0 / (b_ - a_) : 0.0;
  }
  return 0.0;
}

double measure_mass(const Measure& measure, double a, double b) {
  if (a > b) throw UsageError("measure_mass requires a <= b");
  if (a == b) return 0.0;
  return measure.cdf(b) - measure.cdf(a);
}

QuadratureGrid::QuadratureGrid(const Measure& measure, int m) : measure_(measure) {
  if (m < 1) throw ConfigError("grid size must be positive, got " + std::to_string(m));
  points_.resize(m);
  for (int i = 0; i < m; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    const double z = measure.quantile(p);
    if (!std::isfinite(z)) {
      throw ConfigError("quantile of measure '" + measure.name() + "' is not finite at grid index " +
                        std::to_string(i + 1));
    }
    points_[i] = z;
  }
}

double QuadratureGrid::mass(double a, double b) const {
  if (a > b) throw UsageError("QuadratureGrid::mass requires a <= b");
  int count = 0;
  for (double z : points_) count += (z >= a && z < b) ? 1 : 0;
  return static_cast<double>(count) * weight();
}

nlohmann::json QuadratureGrid::to_json() const {
  return {{"rule", "quantile-midpoint"},
          {"m", size()},
          {"measure", measure_.to_json()},
          {"points", std::vector<double>(points_.begin(), points_.end())}};
}

QuadratureGrid build_grid(const Measure& measure, int m) { return QuadratureGrid(measure, m); }

double integrate(const GridFunction& f, const QuadratureGrid& grid) {
  check_length(f, grid);
  return f.sum() / static_cast<double>(grid.size());
}

double inner_product(const GridFunction& f, const GridFunction& g, const QuadratureGrid& grid) {
  check_length(f, grid);
  check_length(g, grid);
  return f.dot(g) / static_cast<double>(grid.size());
}

double l2_norm(const GridFunction& f, const QuadratureGrid& grid) {
  return std::sqrt(inner_product(f, f, grid));
}

}  // namespace conjproc
