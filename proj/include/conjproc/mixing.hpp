#pragma once

#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <vector>

namespace conjproc {

/// Discretized example: ϑ_t iid on a finite alphabet, ξ_t({0}) = (ϑ_{t−1} + ϑ_t)/2
/// (or ϑ_t alone when moving_average is false), and one observation per cycle
/// with P(X_t = 0 | ξ) = ξ_t({0}).
struct FiniteConjugateModel {
  std::vector<double> theta_levels;
  std::vector<double> theta_probs;
  bool moving_average = true;

  /// Θ = {1/4, 3/4}, equiprobable.
  static FiniteConjugateModel toy();
  static FiniteConjugateModel from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;

  /// Distinct values of ξ_t({0}), ascending. Latent symbols index this list.
  std::vector<double> xi_levels() const;
};

enum class Coordinates { Latent, Observed, Both };

/// Exact law of the symbols at a set of time indices. Latent symbols are
/// indices into xi_levels; observed symbols are the state 0 or 1; Both
/// encodes (latent, observed) as 2 · latent + observed.
struct JointLawTable {
  std::vector<long> indices;  // strictly increasing
  Coordinates which = Coordinates::Latent;
  std::vector<double> xi_levels;
  std::map<std::vector<int>, double> atoms;  // positive-probability atoms only

  double total() const;
  double probability(const std::vector<int>& atom) const;
};

/// Enumeration cap on |Θ|^(number of ϑ variables); 2^13 allows a span of
/// 12 consecutive indices when |Θ| = 2.
inline constexpr std::size_t kMaxThetaSequences = std::size_t{1} << 13;
/// Cap on the number of cells in a dense joint table.
inline constexpr std::size_t kMaxTableCells = std::size_t{1} << 22;

JointLawTable joint_law(const FiniteConjugateModel& model, const std::vector<long>& indices,
                        Coordinates which);

struct PsiEstimate {
  int k = 0;
  int w = 0;
  double value = 0.0;
  std::vector<int> past_atom;    // symbols at −w+1..0
  std::vector<int> future_atom;  // symbols at k..k+w−1
};

/// Window-restricted ψ coefficient: max over atom pairs (a, b) with a at
/// indices −w+1..0 and b at k..k+w−1 of |1 − P(a ∩ b)/(P(a)P(b))|.
///
/// Restricting the supremum to atoms loses nothing: for events A, B that are
/// unions of atoms, P(A ∩ B)/(P(A)P(B)) is a convex combination of the atom
/// ratios P(a ∩ b)/(P(a)P(b)) with weights P(a)P(b)/(P(A)P(B)), so both its
/// sup and inf over events are attained at atoms.
PsiEstimate psi_coefficient(const FiniteConjugateModel& model, int k, int w, Coordinates which);

/// Largest window w for which gap k stays within the enumeration guard.
int max_window(const FiniteConjugateModel& model, int k);

/// A cylinder event [X_t ∈ C] with C ⊆ {0, 1}.
struct CylinderEvent {
  long index = 0;
  bool allows_zero = true;
  bool allows_one = true;
};

struct Factorization {
  double lhs = 0.0;  // P(∩ [X_t ∈ C_t]) from the joint observed law
  double rhs = 0.0;  // E ∏ g_t(ξ_t), g_t(λ) = P(X_t ∈ C_t | ξ_t = λ)
};

/// Events must be aligned with T1 followed by T2; T1 and T2 must be disjoint.
Factorization verify_factorization(const FiniteConjugateModel& model, const std::vector<long>& t1,
                                   const std::vector<long>& t2,
                                   const std::vector<CylinderEvent>& events);

struct MixingReport {
  struct Row {
    int k;
    int w;
    PsiEstimate latent;
    PsiEstimate observed;
  };
  std::vector<Row> rows;
  std::map<int, PsiEstimate> latent_at_max_window;  // keyed by k
  double factorization_max_abs_gap = 0.0;
  int factorization_trials = 0;

  /// Ψ_observed(k, w) ≤ Ψ_latent(k, w_max) + tol for every row.
  bool inheritance_holds(double tol = 1e-12) const;
  nlohmann::json to_json(const FiniteConjugateModel& model) const;
};

/// Ψ profiles over the (k, w) grid plus randomized factorization checks.
MixingReport mixing_report(const FiniteConjugateModel& model, const std::vector<int>& ks,
                           const std::vector<int>& ws, int factorization_trials,
                           std::uint64_t seed);

}  // namespace conjproc
