#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "afp/index.hpp"
#include "afp/rational.hpp"
#include "afp/sparse_vector.hpp"

namespace afp {

/// Measure on βℕ modelled as atoms on ℕ plus one scalar for all mass on
/// βℕ∖ℕ. The maps below only ever read μ(βℕ∖ℕ) and μ(A) for A ⊆ ℕ, so
/// this quotient is exact for them. Signed values are allowed so that
/// differences of measures live in the same type.
class FiniteMeasureModel {
 public:
  FiniteMeasureModel() = default;
  FiniteMeasureModel(SparseVector atoms, Rational diffuse)
      : atoms_(std::move(atoms)), diffuse_(std::move(diffuse)) {}

  static FiniteMeasureModel dirac(const Index& n) {
    return {SparseVector::unit(n), Rational(0)};
  }
  static FiniteMeasureModel pure_diffuse(const Rational& mass = Rational(1)) {
    return {SparseVector{}, mass};
  }

  const SparseVector& atoms() const { return atoms_; }
  const Rational& diffuse() const { return diffuse_; }

  Rational total() const { return diffuse_ + atoms_.sum(); }
  /// Total variation norm: Σ|atoms| + |diffuse|.
  Rational tv_norm() const { return atoms_.l1_norm() + abs(diffuse_); }
  bool is_nonnegative() const {
    return diffuse_ >= 0 && atoms_.is_nonnegative();
  }
  /// Element of the positive unit ball K.
  bool in_positive_ball() const { return is_nonnegative() && total() <= 1; }
  bool is_probability() const { return is_nonnegative() && total() == 1; }

  FiniteMeasureModel& operator+=(const FiniteMeasureModel& o) {
    atoms_ += o.atoms_;
    diffuse_ += o.diffuse_;
    return *this;
  }
  friend FiniteMeasureModel operator+(const FiniteMeasureModel& a,
                                      const FiniteMeasureModel& b) {
    return {a.atoms_ + b.atoms_, a.diffuse_ + b.diffuse_};
  }
  friend FiniteMeasureModel operator-(const FiniteMeasureModel& a,
                                      const FiniteMeasureModel& b) {
    return {a.atoms_ - b.atoms_, a.diffuse_ - b.diffuse_};
  }
  friend FiniteMeasureModel operator*(const FiniteMeasureModel& a,
                                      const Rational& t) {
    return {a.atoms_ * t, a.diffuse_ * t};
  }
  friend FiniteMeasureModel operator*(const Rational& t,
                                      const FiniteMeasureModel& a) {
    return a * t;
  }
  friend bool operator==(const FiniteMeasureModel&,
                         const FiniteMeasureModel&) = default;

 private:
  SparseVector atoms_;
  Rational diffuse_{0};
};

Rational tv_distance(const FiniteMeasureModel& a, const FiniteMeasureModel& b);

std::string to_string(const FiniteMeasureModel& mu);

/// Decomposition of ℕ into disjoint infinite classes A_1, A_2, ...
///
/// `class_of(n)` returns the j with n ∈ A_j. `first_outside(j, after)` is
/// the least n > after with n ∉ A_1 ∪ … ∪ A_j; rules without a closed form
/// fall back to a bounded linear scan.
class PartitionRule {
 public:
  using Membership = std::function<std::uint64_t(const Index&)>;
  using FirstOutside = std::function<Index(std::uint64_t, const Index&)>;

  PartitionRule(std::string name, Membership membership,
                FirstOutside first_outside = {});

  /// A_j = {n : ν₂(n) = j − 1}; A_1 is the odd numbers.
  static PartitionRule dyadic();
  /// A_j = {n : ν_p(n) = j − 1} for a prime p.
  static PartitionRule p_adic(std::uint64_t prime);

  const std::string& name() const { return name_; }
  std::uint64_t class_of(const Index& n) const { return membership_(n); }
  Index first_outside(std::uint64_t j, const Index& after) const;

  /// Spot check that each of A_1..A_classes is non-empty beyond `depth`
  /// members: finds `depth` members of every class by scanning.
  bool spot_check_infinite(std::uint64_t classes, std::uint64_t depth) const;

  static constexpr std::uint64_t kScanLimit = 1u << 24;

 private:
  std::string name_;
  Membership membership_;
  FirstOutside first_outside_;
};

/// The sequence k_1 < k_2 < … with k_1 ≥ 2, k_1 ∉ A_1 and
/// k_{j+1} ∉ A_1 ∪ … ∪ A_{j+1}, chosen greedily (smallest valid value).
/// Memoised; safe to share between threads.
class ForwardIndexRule {
 public:
  explicit ForwardIndexRule(PartitionRule partition);

  const PartitionRule& partition() const { return partition_; }
  /// Snapshot holding at least k_1..k_{count}; element 0 is k_1.
  std::shared_ptr<const std::vector<Index>> prefix(std::size_t count) const;
  Index k(std::size_t j) const { return (*prefix(j))[j - 1]; }

 private:
  struct Memo {
    std::mutex mutex;
    std::shared_ptr<const std::vector<Index>> values =
        std::make_shared<const std::vector<Index>>();
  };
  PartitionRule partition_;
  std::shared_ptr<Memo> memo_ = std::make_shared<Memo>();
};

/// k_1..k_{j_max}, re-verified against the two defining conditions.
std::vector<Index> forward_indices(const PartitionRule& rule,
                                   std::size_t j_max);

/// True when `k` (k[0] = k_1) satisfies both defining conditions.
bool satisfies_forward_conditions(const PartitionRule& rule,
                                  const std::vector<Index>& k);

/// f(μ) = μ(βℕ∖ℕ)·δ_1 + Σ_j μ(A_j)·δ_{k_j}: an affine, mass-preserving map
/// of the probability measures with no fixed point.
class Ex2Map {
 public:
  Ex2Map() : Ex2Map(PartitionRule::dyadic()) {}
  explicit Ex2Map(PartitionRule partition)
      : forward_(std::move(partition)) {}

  const PartitionRule& partition() const { return forward_.partition(); }
  const ForwardIndexRule& forward() const { return forward_; }

  FiniteMeasureModel operator()(const FiniteMeasureModel& mu) const;

 private:
  ForwardIndexRule forward_;
};

inline FiniteMeasureModel eval_f_ex2(const Ex2Map& map,
                                     const FiniteMeasureModel& mu) {
  return map(mu);
}

/// P(μ)(A) = μ(A ∩ ℕ): keeps the atoms and drops the diffuse part.
inline FiniteMeasureModel project_P(const FiniteMeasureModel& mu) {
  return {mu.atoms(), Rational(0)};
}

struct CertificateStep {
  std::string phase;     // "diffuse", "atom_one", "off_support", "minimal_j"
  std::string variable;  // "diffuse" or "atom:<n>"
  std::string equation;  // the fixed-point equation used, as text
  std::vector<std::string> premises;  // variables already forced to zero
  std::uint64_t j = 0;                // class index for minimal_j steps
  Rational value{0};                  // forced value
};

struct CertificateReport {
  std::size_t support_bound = 0;
  std::string partition;
  std::vector<Index> forward_indices;  // every k_j ≤ support_bound, plus one
  std::vector<CertificateStep> steps;
  bool complete = false;    // every variable was forced
  Rational forced_total{0};
  bool infeasible = false;  // forced total contradicts total mass 1
  std::string failure;      // set when a step could not be discharged
};

/// Runs the no-fixed-point argument as exact constraint propagation over
/// candidates with atoms in {1..N} plus diffuse mass: the diffuse equation,
/// then the atom at 1, then atoms off {k_j}, then the k_j in increasing j.
CertificateReport no_fixed_point_certificate(const Ex2Map& map,
                                             std::size_t support_bound);

/// TV norm of f(μ_k) − μ_k along the orbit μ_1 = μ0, μ_{k+1} = f(μ_k).
std::vector<std::pair<std::size_t, Rational>> orbit_displacement(
    const Ex2Map& map, const FiniteMeasureModel& mu0, std::size_t steps);

}  // namespace afp
