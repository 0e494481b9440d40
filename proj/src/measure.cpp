#include "afp/measure.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace afp {

Rational tv_distance(const FiniteMeasureModel& a, const FiniteMeasureModel& b) {
  return l1_distance(a.atoms(), b.atoms()) + abs(a.diffuse() - b.diffuse());
}

std::string to_string(const FiniteMeasureModel& mu) {
  return "{atoms: " + to_string(mu.atoms()) +
         ", diffuse: " + to_string(mu.diffuse()) + "}";
}

// ----------------------------------------------------------------------------
// PartitionRule

PartitionRule::PartitionRule(std::string name, Membership membership,
                             FirstOutside first_outside)
    : name_(std::move(name)),
      membership_(std::move(membership)),
      first_outside_(std::move(first_outside)) {}

PartitionRule PartitionRule::dyadic() {
  return PartitionRule(
      "dyadic", [](const Index& n) { return n.trailing_zeros() + 1; },
      [](std::uint64_t j, const Index& after) {
        // Least n > after with ν₂(n) ≥ j: next multiple of 2^j.
        mpz_class q = after.to_mpz();
        mpz_fdiv_q_2exp(q.get_mpz_t(), q.get_mpz_t(), j);
        q += 1;
        mpz_mul_2exp(q.get_mpz_t(), q.get_mpz_t(), j);
        return Index(q);
      });
}

PartitionRule PartitionRule::p_adic(std::uint64_t prime) {
  return PartitionRule(
      std::to_string(prime) + "-adic",
      [prime](const Index& n) { return n.valuation(prime) + 1; },
      [prime](std::uint64_t j, const Index& after) {
        mpz_class step;
        mpz_ui_pow_ui(step.get_mpz_t(), prime, j);
        mpz_class q = after.to_mpz();
        mpz_fdiv_q(q.get_mpz_t(), q.get_mpz_t(), step.get_mpz_t());
        return Index((q + 1) * step);
      });
}

Index PartitionRule::first_outside(std::uint64_t j, const Index& after) const {
  if (first_outside_) return first_outside_(j, after);
  Index n = after.successor();
  for (std::uint64_t scanned = 0; scanned < kScanLimit; ++scanned) {
    if (class_of(n) > j) return n;
    n = n.successor();
  }
  throw std::runtime_error("PartitionRule '" + name_ +
                           "': scan limit reached looking past class " +
                           std::to_string(j));
}

bool PartitionRule::spot_check_infinite(std::uint64_t classes,
                                        std::uint64_t depth) const {
  std::vector<std::uint64_t> found(classes + 1, 0);
  std::uint64_t satisfied = 0;
  Index n(1);
  for (std::uint64_t scanned = 0; scanned < kScanLimit && satisfied < classes;
       ++scanned, n = n.successor()) {
    const std::uint64_t j = class_of(n);
    if (j == 0) return false;
    if (j <= classes && ++found[j] == depth) ++satisfied;
  }
  return satisfied == classes;
}

// ----------------------------------------------------------------------------
// Forward indices

ForwardIndexRule::ForwardIndexRule(PartitionRule partition)
    : partition_(std::move(partition)) {}

std::shared_ptr<const std::vector<Index>> ForwardIndexRule::prefix(
    std::size_t count) const {
  std::lock_guard lock(memo_->mutex);
  if (memo_->values->size() >= count) return memo_->values;
  auto grown = std::make_shared<std::vector<Index>>(*memo_->values);
  // Grow geometrically so repeated small extensions stay amortised.
  const std::size_t target = std::max(count, 2 * grown->size());
  grown->reserve(target);
  while (grown->size() < target) {
    if (grown->empty()) {
      // k_1 ≥ 2 and k_1 ∉ A_1.
      grown->push_back(partition_.first_outside(1, Index(1)));
    } else {
      const std::uint64_t j = grown->size();  // computing k_{j+1}
      grown->push_back(partition_.first_outside(j + 1, grown->back()));
    }
  }
  memo_->values = std::move(grown);
  return memo_->values;
}

bool satisfies_forward_conditions(const PartitionRule& rule,
                                  const std::vector<Index>& k) {
  for (std::size_t i = 0; i < k.size(); ++i) {
    const std::uint64_t j = i + 1;
    if (i == 0) {
      if (k[0] < Index(2) || rule.class_of(k[0]) == 1) return false;
    } else {
      if (!(k[i - 1] < k[i])) return false;
      if (rule.class_of(k[i]) <= j) return false;
    }
  }
  return true;
}

std::vector<Index> forward_indices(const PartitionRule& rule,
                                   std::size_t j_max) {
  if (j_max < 1) throw std::invalid_argument("forward_indices: j_max < 1");
  ForwardIndexRule forward(rule);
  const auto snapshot = forward.prefix(j_max);
  std::vector<Index> out(snapshot->begin(),
                         snapshot->begin() + static_cast<std::ptrdiff_t>(j_max));
  if (!satisfies_forward_conditions(rule, out)) {
    throw std::logic_error("forward_indices: greedy choice failed re-check");
  }
  return out;
}

// ----------------------------------------------------------------------------
// The affine map

FiniteMeasureModel Ex2Map::operator()(const FiniteMeasureModel& mu) const {
  const auto atoms = mu.atoms().entries();
  std::vector<std::uint64_t> classes(atoms.size());
  std::uint64_t max_class = 1;
  bool increasing = true;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    classes[i] = partition().class_of(atoms[i].index);
    max_class = std::max(max_class, classes[i]);
    if (i > 0 && classes[i] <= classes[i - 1]) increasing = false;
  }
  const auto k = forward_.prefix(max_class);

  std::vector<SparseVector::Entry> out;
  out.reserve(atoms.size() + 1);
  // k_j ≥ 2, so the diffuse mass lands on the smallest index.
  if (mu.diffuse() != 0) out.push_back({Index(1), mu.diffuse()});
  if (increasing) {
    // Distinct classes in increasing order map to increasing k_j.
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      out.push_back({(*k)[classes[i] - 1], atoms[i].value});
    }
    return {SparseVector::from_sorted_unchecked(std::move(out)), Rational(0)};
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    out.push_back({(*k)[classes[i] - 1], atoms[i].value});
  }
  return {SparseVector::from_unsorted(std::move(out)), Rational(0)};
}

// ----------------------------------------------------------------------------
// No-fixed-point certificate

namespace {

std::string atom_name(const Index& n) { return "atom:" + n.to_string(); }

}  // namespace

CertificateReport no_fixed_point_certificate(const Ex2Map& map,
                                             std::size_t support_bound) {
  if (support_bound < 1) {
    throw std::invalid_argument("no_fixed_point_certificate: N < 1");
  }
  const std::uint64_t N = support_bound;
  CertificateReport report;
  report.support_bound = support_bound;
  report.partition = map.partition().name();

  // Forward indices up to the first one beyond N.
  std::vector<Index> k;
  for (std::size_t j = 1;; ++j) {
    k.push_back(map.forward().k(j));
    if (j > 1 && !(k[j - 2] < k[j - 1])) {
      report.forward_indices = k;
      report.failure = "forward indices are not strictly increasing at j = " +
                       std::to_string(j);
      return report;
    }
    if (Index(N) < k.back()) break;
  }
  report.forward_indices = k;

  // Fixed-point equations μ = f(μ) restricted to the candidate variables:
  //   diffuse:   D = 0
  //   atom n:    a_n = [n = 1]·D + Σ_{m ∈ A_j, m ≤ N} a_m   if n = k_j
  //              a_n = [n = 1]·D                           otherwise
  std::vector<std::uint64_t> cls(N + 1, 0);
  for (std::uint64_t m = 1; m <= N; ++m) cls[m] = map.partition().class_of(m);
  auto class_members = [&](std::uint64_t j) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t m = 1; m <= N; ++m) {
      if (cls[m] == j) out.push_back(m);
    }
    return out;
  };
  auto forward_position = [&](std::uint64_t n) -> std::uint64_t {
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (k[i] == Index(n)) return i + 1;
    }
    return 0;
  };

  std::vector<bool> zero(N + 1, false);  // zero[0] is the diffuse variable
  auto force = [&](CertificateStep step, std::uint64_t var) {
    zero[var] = true;
    report.steps.push_back(std::move(step));
  };

  // Step 1: the image has no diffuse mass, then its atom at 1 is μ(βℕ∖ℕ).
  {
    CertificateStep s;
    s.phase = "diffuse";
    s.variable = "diffuse";
    s.equation = "mu(bN\\N) = f(mu)(bN\\N) = 0";
    force(std::move(s), 0);
  }
  if (forward_position(1) != 0) {
    report.failure = "1 is a forward index; the atom at 1 has extra inflow";
    return report;
  }
  {
    CertificateStep s;
    s.phase = "atom_one";
    s.variable = atom_name(1);
    s.equation = "mu({1}) = f(mu)({1}) = mu(bN\\N)";
    s.premises = {"diffuse"};
    force(std::move(s), 1);
  }

  // Step 2: f(μ) is carried by {1} ∪ {k_j}, so other atoms vanish.
  for (std::uint64_t n = 2; n <= N; ++n) {
    if (forward_position(n) != 0) continue;
    CertificateStep s;
    s.phase = "off_support";
    s.variable = atom_name(n);
    s.equation = "mu({" + std::to_string(n) + "}) = f(mu)({" +
                 std::to_string(n) + "}) = 0";
    force(std::move(s), n);
  }

  // Step 3: the least j with μ({k_j}) ≠ 0 gives μ({k_j}) = μ(A_j) = 0,
  // because A_j meets the remaining support {k_l : l ≥ j} nowhere.
  for (std::size_t j = 1; j <= k.size(); ++j) {
    if (Index(N) < k[j - 1]) break;
    const std::uint64_t kj = k[j - 1].small_value();
    CertificateStep s;
    s.phase = "minimal_j";
    s.j = j;
    s.variable = atom_name(kj);
    s.equation = "mu({" + std::to_string(kj) + "}) = f(mu)({" +
                 std::to_string(kj) + "}) = mu(A_" + std::to_string(j) + ")";
    for (const std::uint64_t m : class_members(j)) {
      if (!zero[m]) {
        report.failure = "A_" + std::to_string(j) + " contains atom " +
                         std::to_string(m) + " not yet forced to zero";
        return report;
      }
      s.premises.push_back(atom_name(m));
    }
    force(std::move(s), kj);
  }

  report.complete = std::all_of(zero.begin(), zero.end(), [](bool z) { return z; });
  if (!report.complete) {
    report.failure = "some candidate variable was never forced";
    return report;
  }
  report.forced_total = 0;
  report.infeasible = report.forced_total != 1;
  return report;
}

std::vector<std::pair<std::size_t, Rational>> orbit_displacement(
    const Ex2Map& map, const FiniteMeasureModel& mu0, std::size_t steps) {
  if (mu0.total() != 1) {
    throw std::invalid_argument("orbit_displacement: start must have mass 1");
  }
  std::vector<std::pair<std::size_t, Rational>> out;
  out.reserve(steps);
  FiniteMeasureModel mu = mu0;
  for (std::size_t step = 1; step <= steps; ++step) {
    FiniteMeasureModel image = map(mu);
    out.emplace_back(step, tv_distance(image, mu));
    mu = std::move(image);
  }
  return out;
}

}  // namespace afp
