#include "afp/sparse_vector.hpp"

#include <algorithm>

namespace afp {

namespace {

using Entry = SparseVector::Entry;

bool index_less(const Entry& a, const Entry& b) { return a.index < b.index; }

// Merge a + scale_b * b, dropping zeros.
std::vector<Entry> merge(std::span<const Entry> a, std::span<const Entry> b,
                         int sign_b) {
  std::vector<Entry> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].index < b[j].index)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].index < a[i].index) {
      out.push_back({b[j].index, sign_b > 0 ? b[j].value : Rational(-b[j].value)});
      ++j;
    } else {
      if (sign_b < 0 && a[i].value == b[j].value) {
        ++i;
        ++j;
        continue;
      }
      Rational v = sign_b > 0 ? a[i].value + b[j].value
                              : a[i].value - b[j].value;
      if (v != 0) out.push_back({a[i].index, std::move(v)});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

SparseVector::SparseVector(
    std::initializer_list<std::pair<Index, Rational>> entries) {
  std::vector<Entry> raw;
  raw.reserve(entries.size());
  for (const auto& [n, v] : entries) raw.push_back({n, v});
  *this = from_unsorted(std::move(raw));
}

SparseVector SparseVector::from_unsorted(std::vector<Entry> entries) {
  if (!std::is_sorted(entries.begin(), entries.end(), index_less)) {
    std::stable_sort(entries.begin(), entries.end(), index_less);
  }
  SparseVector out;
  out.entries_.reserve(entries.size());
  for (auto& e : entries) {
    if (!out.entries_.empty() && out.entries_.back().index == e.index) {
      out.entries_.back().value += e.value;
      if (out.entries_.back().value == 0) out.entries_.pop_back();
    } else if (e.value != 0) {
      out.entries_.push_back(std::move(e));
    }
  }
  return out;
}

SparseVector SparseVector::from_sorted_unchecked(std::vector<Entry> entries) {
  SparseVector out;
  out.entries_ = std::move(entries);
  return out;
}

SparseVector SparseVector::from_dense(std::span<const Rational> values) {
  SparseVector out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0) out.entries_.push_back({Index(i + 1), values[i]});
  }
  return out;
}

SparseVector SparseVector::unit(const Index& n) {
  SparseVector out;
  out.entries_.push_back({n, Rational(1)});
  return out;
}

Rational SparseVector::get(const Index& n) const {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), n,
      [](const Entry& e, const Index& key) { return e.index < key; });
  if (it != entries_.end() && it->index == n) return it->value;
  return Rational(0);
}

void SparseVector::set(const Index& n, const Rational& value) {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), n,
      [](const Entry& e, const Index& key) { return e.index < key; });
  const bool present = it != entries_.end() && it->index == n;
  if (value == 0) {
    if (present) entries_.erase(it);
  } else if (present) {
    it->value = value;
  } else {
    entries_.insert(it, Entry{n, value});
  }
}

void SparseVector::add_to(const Index& n, const Rational& value) {
  set(n, get(n) + value);
}

std::vector<Rational> SparseVector::to_dense(std::size_t dimension) const {
  std::vector<Rational> out(dimension, Rational(0));
  for (const auto& e : entries_) {
    if (e.index.is_small() && e.index.small_value() >= 1 &&
        e.index.small_value() <= dimension) {
      out[e.index.small_value() - 1] = e.value;
    }
  }
  return out;
}

Rational SparseVector::l1_norm() const {
  Rational::Accumulator s;
  for (const auto& e : entries_) s.add(abs(e.value));
  return s.result();
}

Rational SparseVector::linf_norm() const {
  Rational s(0);
  for (const auto& e : entries_) {
    if (abs(e.value) > s) s = abs(e.value);
  }
  return s;
}

Rational SparseVector::sum() const {
  Rational::Accumulator s;
  for (const auto& e : entries_) s.add(e.value);
  return s.result();
}

Rational SparseVector::dot(const SparseVector& other) const {
  Rational s(0);
  std::size_t i = 0, j = 0;
  const auto& b = other.entries_;
  while (i < entries_.size() && j < b.size()) {
    if (entries_[i].index < b[j].index) {
      ++i;
    } else if (b[j].index < entries_[i].index) {
      ++j;
    } else {
      s += entries_[i].value * b[j].value;
      ++i;
      ++j;
    }
  }
  return s;
}

Index SparseVector::max_index() const {
  return entries_.empty() ? Index(0) : entries_.back().index;
}

bool SparseVector::is_nonnegative() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Entry& e) { return e.value > 0; });
}

SparseVector& SparseVector::operator+=(const SparseVector& other) {
  if (other.entries_.empty()) return *this;
  if (entries_.empty() || entries_.back().index < other.entries_.front().index) {
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
    return *this;
  }
  entries_ = merge(entries_, other.entries_, +1);
  return *this;
}

SparseVector& SparseVector::operator-=(const SparseVector& other) {
  entries_ = merge(entries_, other.entries_, -1);
  return *this;
}

SparseVector& SparseVector::operator*=(const Rational& scale) {
  if (scale == 0) {
    entries_.clear();
  } else {
    for (auto& e : entries_) e.value *= scale;
  }
  return *this;
}

SparseVector operator+(const SparseVector& a, const SparseVector& b) {
  return SparseVector::from_sorted_unchecked(merge(a.entries_, b.entries_, +1));
}

SparseVector operator-(const SparseVector& a, const SparseVector& b) {
  return SparseVector::from_sorted_unchecked(merge(a.entries_, b.entries_, -1));
}

SparseVector operator-(const SparseVector& a) {
  SparseVector out = a;
  for (auto& e : out.entries_) e.value = -e.value;
  return out;
}

SparseVector operator*(const SparseVector& a, const Rational& t) {
  SparseVector out;
  if (t == 0) return out;
  out.entries_.reserve(a.entries_.size());
  for (const auto& e : a.entries_) out.entries_.push_back({e.index, e.value * t});
  return out;
}

SparseVector operator*(const Rational& t, const SparseVector& a) {
  return a * t;
}

bool operator==(const SparseVector& a, const SparseVector& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    if (a.entries_[i].index != b.entries_[i].index ||
        a.entries_[i].value != b.entries_[i].value) {
      return false;
    }
  }
  return true;
}

Rational l1_distance(const SparseVector& a, const SparseVector& b) {
  const auto ea = a.entries();
  const auto eb = b.entries();
  Rational s(0);
  std::size_t i = 0, j = 0;
  while (i < ea.size() || j < eb.size()) {
    if (j == eb.size() || (i < ea.size() && ea[i].index < eb[j].index)) {
      s += abs(ea[i++].value);
    } else if (i == ea.size() || eb[j].index < ea[i].index) {
      s += abs(eb[j++].value);
    } else {
      if (ea[i].value != eb[j].value) s += abs(ea[i].value - eb[j].value);
      ++i;
      ++j;
    }
  }
  return s;
}

SparseVector lerp(const SparseVector& a, const SparseVector& b,
                  const Rational& t) {
  return a * Rational(1 - t) + b * t;
}

std::string to_string(const SparseVector& v) {
  std::string out = "{";
  bool first = true;
  for (const auto& e : v.entries()) {
    if (!first) out += ", ";
    first = false;
    out += e.index.to_string() + ": " + to_string(e.value);
  }
  return out + "}";
}

}  // namespace afp
