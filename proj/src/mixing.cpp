#include "conjproc/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "conjproc/errors.hpp"
#include "conjproc/rng.hpp"

namespace conjproc {

namespace {

constexpr double kLevelTol = 1e-12;

// base^exp, saturating at limit + 1.
std::size_t bounded_pow(std::size_t base, std::size_t exp, std::size_t limit) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > limit / std::max<std::size_t>(base, 1)) return limit + 1;
    out *= base;
  }
  return out;
}

// Everything the enumerations need about a model, precomputed once.
struct Enumerator {
  const FiniteConjugateModel& model;
  std::vector<double> levels;              // distinct ξ_t({0}) values
  std::vector<std::vector<int>> level_of;  // [ϑ_{t−1} index][ϑ_t index] → level

  explicit Enumerator(const FiniteConjugateModel& m) : model(m), levels(m.xi_levels()) {
    const std::size_t n = m.theta_levels.size();
    level_of.assign(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double xi = m.moving_average ? 0.5 * (m.theta_levels[i] + m.theta_levels[j])
                                           : m.theta_levels[j];
        auto it = std::lower_bound(levels.begin(), levels.end(), xi - kLevelTol);
        level_of[i][j] = static_cast<int>(it - levels.begin());
      }
    }
  }

  // Calls fn(probability, level per index) for every ϑ sequence on lo−1..hi.
  template <typename Fn>
  void for_each_sequence(const std::vector<long>& indices, Fn&& fn) const {
    const long lo = indices.front();
    const long hi = indices.back();
    const auto vars = static_cast<std::size_t>(hi - lo + 2);
    const std::size_t alphabet = model.theta_levels.size();
    const std::size_t count = bounded_pow(alphabet, vars, kMaxThetaSequences);
    if (count > kMaxThetaSequences) {
      throw ResourceError("enumeration over " + std::to_string(vars) + " theta variables with " +
                          std::to_string(alphabet) + " levels exceeds the guard of " +
                          std::to_string(kMaxThetaSequences) + " sequences");
    }
    std::vector<std::size_t> digit(vars, 0);
    std::vector<int> lv(indices.size());
    for (std::size_t s = 0; s < count; ++s) {
      double p = 1.0;
      for (std::size_t v = 0; v < vars; ++v) p *= model.theta_probs[digit[v]];
      for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto pos = static_cast<std::size_t>(indices[i] - lo);  // ϑ_{t−1} sits at pos
        lv[i] = level_of[digit[pos]][digit[pos + 1]];
      }
      fn(p, lv);
      for (std::size_t v = 0; v < vars; ++v) {
        if (++digit[v] < alphabet) break;
        digit[v] = 0;
      }
    }
  }
};

std::size_t radix(const Enumerator& e, Coordinates which) {
  switch (which) {
    case Coordinates::Latent: return e.levels.size();
    case Coordinates::Observed: return 2;
    case Coordinates::Both: return 2 * e.levels.size();
  }
  return 0;
}

void check_indices(const std::vector<long>& indices) {
  if (indices.empty()) throw UsageError("joint law needs at least one index");
  for (std::size_t i = 1; i < indices.size(); ++i) {
    if (indices[i] <= indices[i - 1]) throw UsageError("indices must be strictly increasing");
  }
}

// Dense joint table indexed by Σ_pos symbol_pos · r^pos.
std::vector<double> dense_joint(const Enumerator& e, const std::vector<long>& indices,
                                Coordinates which) {
  check_indices(indices);
  const std::size_t r = radix(e, which);
  const std::size_t cells = bounded_pow(r, indices.size(), kMaxTableCells);
  if (cells > kMaxTableCells) {
    throw ResourceError("joint table over " + std::to_string(indices.size()) +
                        " indices exceeds the guard of " + std::to_string(kMaxTableCells) + " cells");
  }
  std::vector<double> table(cells, 0.0);
  std::vector<std::size_t> place(indices.size());
  for (std::size_t i = 0, v = 1; i < indices.size(); ++i, v *= r) place[i] = v;

  e.for_each_sequence(indices, [&](double p, const std::vector<int>& lv) {
    if (which == Coordinates::Latent) {
      std::size_t code = 0;
      for (std::size_t i = 0; i < lv.size(); ++i) code += static_cast<std::size_t>(lv[i]) * place[i];
      table[code] += p;
      return;
    }
    // Integrate the conditionally independent per-cycle observations.
    const bool both = which == Coordinates::Both;
    auto expand = [&](auto&& self, std::size_t pos, std::size_t code, double w) -> void {
      if (w == 0.0) return;
      if (pos == lv.size()) {
        table[code] += w;
        return;
      }
      const double lambda = e.levels[static_cast<std::size_t>(lv[pos])];
      const std::size_t base = both ? 2 * static_cast<std::size_t>(lv[pos]) : 0;
      self(self, pos + 1, code + base * place[pos], w * lambda);
      self(self, pos + 1, code + (base + 1) * place[pos], w * (1.0 - lambda));
    };
    expand(expand, 0, 0, p);
  });
  return table;
}

std::vector<int> decode(std::size_t code, std::size_t r, std::size_t length) {
  std::vector<int> out(length);
  for (std::size_t i = 0; i < length; ++i, code /= r) out[i] = static_cast<int>(code % r);
  return out;
}

std::vector<long> window(long first, int w) {
  std::vector<long> out(static_cast<std::size_t>(w));
  std::iota(out.begin(), out.end(), first);
  return out;
}

nlohmann::json atom_to_json(const std::vector<int>& atom, Coordinates which,
                            const std::vector<double>& levels) {
  nlohmann::json out = nlohmann::json::array();
  for (int s : atom) {
    if (which == Coordinates::Latent) {
      out.push_back(levels[static_cast<std::size_t>(s)]);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

FiniteConjugateModel FiniteConjugateModel::toy() { return {{0.25, 0.75}, {0.5, 0.5}, true}; }

FiniteConjugateModel FiniteConjugateModel::from_json(const nlohmann::json& j) {
  FiniteConjugateModel m = toy();
  try {
    if (j.contains("theta_levels")) m.theta_levels = j.at("theta_levels").get<std::vector<double>>();
    if (j.contains("theta_probs")) {
      m.theta_probs = j.at("theta_probs").get<std::vector<double>>();
    } else if (j.contains("theta_levels")) {
      m.theta_probs.assign(m.theta_levels.size(), 1.0 / static_cast<double>(m.theta_levels.size()));
    }
    m.moving_average = j.value("moving_average", true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad mixing model: ") + e.what());
  }
  m.validate();
  return m;
}

nlohmann::json FiniteConjugateModel::to_json() const {
  return {{"theta_levels", theta_levels},
          {"theta_probs", theta_probs},
          {"moving_average", moving_average},
          {"xi_levels", xi_levels()}};
}

void FiniteConjugateModel::validate() const {
  if (theta_levels.empty() || theta_levels.size() != theta_probs.size()) {
    throw ConfigError("theta_levels and theta_probs must be nonempty and of equal length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < theta_levels.size(); ++i) {
    if (!(theta_levels[i] >= 0.0 && theta_levels[i] <= 1.0)) {
      throw ConfigError("theta levels must lie in [0, 1]");
    }
    if (!(theta_probs[i] > 0.0)) throw ConfigError("theta probabilities must be positive");
    total += theta_probs[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("theta probabilities must sum to 1");
}

std::vector<double> FiniteConjugateModel::xi_levels() const {
  std::vector<double> raw;
  for (double a : theta_levels) {
    for (double b : theta_levels) raw.push_back(moving_average ? 0.5 * (a + b) : b);
  }
  std::sort(raw.begin(), raw.end());
  std::vector<double> out;
  for (double x : raw) {
    if (out.empty() || x - out.back() > kLevelTol) out.push_back(x);
  }
  return out;
}

double JointLawTable::total() const {
  double s = 0.0;
  for (const auto& [atom, p] : atoms) s += p;
  return s;
}

double JointLawTable::probability(const std::vector<int>& atom) const {
  auto it = atoms.find(atom);
  return it == atoms.end() ? 0.0 : it->second;
}

JointLawTable joint_law(const FiniteConjugateModel& model, const std::vector<long>& indices,
                        Coordinates which) {
  model.validate();
  const Enumerator e(model);
  const std::vector<double> table = dense_joint(e, indices, which);
  JointLawTable out{indices, which, e.levels, {}};
  const std::size_t r = radix(e, which);
  for (std::size_t code = 0; code < table.size(); ++code) {
    if (table[code] > 0.0) out.atoms.emplace(decode(code, r, indices.size()), table[code]);
  }
  return out;
}

PsiEstimate psi_coefficient(const FiniteConjugateModel& model, int k, int w, Coordinates which) {
  if (k < 1 || w < 1) throw UsageError("psi_coefficient needs k >= 1 and w >= 1");
  if (which == Coordinates::Both) throw UsageError("psi_coefficient is defined for latent or observed symbols");
  model.validate();
  const Enumerator e(model);

  std::vector<long> indices = window(-w + 1, w);
  const std::vector<long> future = window(k, w);
  indices.insert(indices.end(), future.begin(), future.end());
  const std::vector<double> joint = dense_joint(e, indices, which);

  const std::size_t r = radix(e, which);
  const std::size_t side = bounded_pow(r, static_cast<std::size_t>(w), kMaxTableCells);
  std::vector<double> past_p(side, 0.0);
  std::vector<double> future_p(side, 0.0);
  for (std::size_t b = 0; b < side; ++b) {
    for (std::size_t a = 0; a < side; ++a) {
      const double p = joint[a + b * side];
      past_p[a] += p;
      future_p[b] += p;
    }
  }

  PsiEstimate out{k, w, 0.0, {}, {}};
  std::size_t best_a = 0;
  std::size_t best_b = 0;
  bool found = false;
  for (std::size_t b = 0; b < side; ++b) {
    if (future_p[b] <= 0.0) continue;
    for (std::size_t a = 0; a < side; ++a) {
      if (past_p[a] <= 0.0) continue;
      const double v = std::abs(1.0 - joint[a + b * side] / (past_p[a] * future_p[b]));
      if (!found || v > out.value) {
        out.value = v;
        best_a = a;
        best_b = b;
        found = true;
      }
    }
  }
  out.past_atom = decode(best_a, r, static_cast<std::size_t>(w));
  out.future_atom = decode(best_b, r, static_cast<std::size_t>(w));
  return out;
}

int max_window(const FiniteConjugateModel& model, int k) {
  const std::size_t alphabet = model.theta_levels.size();
  const std::size_t latent_radix = model.xi_levels().size();
  int best = 0;
  for (int w = 1; w < 64; ++w) {
    const auto vars = static_cast<std::size_t>(k + 2 * w);
    if (bounded_pow(alphabet, vars, kMaxThetaSequences) > kMaxThetaSequences) break;
    const auto cells = static_cast<std::size_t>(2 * w);
    if (bounded_pow(std::max<std::size_t>(latent_radix, 2), cells, kMaxTableCells) > kMaxTableCells) break;
    best = w;
  }
  return best;
}

Factorization verify_factorization(const FiniteConjugateModel& model, const std::vector<long>& t1,
                                   const std::vector<long>& t2,
                                   const std::vector<CylinderEvent>& events) {
  model.validate();
  if (t1.empty() || t2.empty()) throw UsageError("T1 and T2 must be nonempty");
  if (events.size() != t1.size() + t2.size()) {
    throw UsageError("need one cylinder event per index in T1 and T2");
  }
  std::map<long, CylinderEvent> by_index;
  std::vector<long> all(t1);
  all.insert(all.end(), t2.begin(), t2.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (events[i].index != all[i]) throw UsageError("events must follow the order of T1 then T2");
    if (!by_index.emplace(all[i], events[i]).second) throw UsageError("T1 and T2 must be disjoint");
  }
  std::vector<long> indices;
  for (const auto& [t, ev] : by_index) indices.push_back(t);

  Factorization out;
  const JointLawTable law = joint_law(model, indices, Coordinates::Observed);
  for (const auto& [atom, p] : law.atoms) {
    bool inside = true;
    for (std::size_t i = 0; i < atom.size() && inside; ++i) {
      const CylinderEvent& ev = by_index.at(indices[i]);
      inside = atom[i] == 0 ? ev.allows_zero : ev.allows_one;
    }
    if (inside) out.lhs += p;
  }

  const Enumerator e(model);
  e.for_each_sequence(indices, [&](double p, const std::vector<int>& lv) {
    double prod = p;
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const CylinderEvent& ev = by_index.at(indices[i]);
      const double lambda = e.levels[static_cast<std::size_t>(lv[i])];
      prod *= (ev.allows_zero ? lambda : 0.0) + (ev.allows_one ? 1.0 - lambda : 0.0);
    }
    out.rhs += prod;
  });
  return out;
}

bool MixingReport::inheritance_holds(double tol) const {
  for (const auto& row : rows) {
    auto it = latent_at_max_window.find(row.k);
    if (it == latent_at_max_window.end()) return false;
    if (row.observed.value > it->second.value + tol) return false;
  }
  return true;
}

nlohmann::json MixingReport::to_json(const FiniteConjugateModel& model) const {
  const std::vector<double> levels = model.xi_levels();
  nlohmann::json out;
  out["model"] = model.to_json();
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows) {
    rows_json.push_back(
        {{"k", row.k},
         {"w", row.w},
         {"psi_latent", row.latent.value},
         {"psi_observed", row.observed.value},
         {"attained_atoms",
          {{"latent",
            {{"past", atom_to_json(row.latent.past_atom, Coordinates::Latent, levels)},
             {"future", atom_to_json(row.latent.future_atom, Coordinates::Latent, levels)}}},
           {"observed",
            {{"past", atom_to_json(row.observed.past_atom, Coordinates::Observed, levels)},
             {"future", atom_to_json(row.observed.future_atom, Coordinates::Observed, levels)}}}}}});
  }
  out["rows"] = std::move(rows_json);
  nlohmann::json maxw = nlohmann::json::array();
  for (const auto& [k, est] : latent_at_max_window) {
    maxw.push_back({{"k", k}, {"w_max", est.w}, {"psi_latent", est.value}});
  }
  out["psi_latent_max_window"] = std::move(maxw);
  out["factorization_max_abs_gap"] = factorization_max_abs_gap;
  out["factorization_trials"] = factorization_trials;
  out["inheritance_holds"] = inheritance_holds();
  return out;
}

MixingReport mixing_report(const FiniteConjugateModel& model, const std::vector<int>& ks,
                           const std::vector<int>& ws, int factorization_trials,
                           std::uint64_t seed) {
  MixingReport report;
  for (int k : ks) {
    for (int w : ws) {
      report.rows.push_back({k, w, psi_coefficient(model, k, w, Coordinates::Latent),
                             psi_coefficient(model, k, w, Coordinates::Observed)});
    }
    const int wmax = max_window(model, k);
    if (wmax < 1) throw ResourceError("gap k = " + std::to_string(k) + " is beyond the enumeration guard");
    report.latent_at_max_window.emplace(k, psi_coefficient(model, k, wmax, Coordinates::Latent));
  }

  SplitMix64 rng(seed);
  auto pick = [&](int n) { return static_cast<int>(uniform01(rng) * n); };
  for (int trial = 0; trial < factorization_trials; ++trial) {
    const int k = 1 + pick(3);
    std::vector<long> t1;
    std::vector<long> t2;
    while (t1.empty()) {
      for (long t = -3; t <= 0; ++t) if (pick(2) == 1) t1.push_back(t);
    }
    while (t2.empty()) {
      for (long t = k; t <= k + 3; ++t) if (pick(2) == 1) t2.push_back(t);
    }
    std::vector<CylinderEvent> events;
    for (long t : t1) events.push_back({t, pick(2) == 1, pick(2) == 1});
    for (long t : t2) events.push_back({t, pick(2) == 1, pick(2) == 1});
    const Factorization f = verify_factorization(model, t1, t2, events);
    report.factorization_max_abs_gap = std::max(report.factorization_max_abs_gap, std::abs(f.lhs - f.rhs));
  }
  report.factorization_trials = factorization_trials;
  return report;
}

}  // namespace conjproc
