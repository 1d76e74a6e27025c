#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace senti {

/// Sparse row: (column, value) pairs, strictly increasing columns, no zeros.
struct SparseVector {
  std::vector<std::pair<std::uint32_t, double>> entries;

  bool operator==(const SparseVector&) const = default;

  std::size_t nnz() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }

  double at(std::uint32_t column) const {
    for (const auto& [c, v] : entries) {
      if (c == column) return v;
      if (c > column) break;
    }
    return 0.0;
  }
};

inline double dot(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  auto i = a.entries.begin();
  auto j = b.entries.begin();
  while (i != a.entries.end() && j != b.entries.end()) {
    if (i->first < j->first) ++i;
    else if (j->first < i->first) ++j;
    else {
      sum += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return sum;
}

inline double norm(const SparseVector& a) { return std::sqrt(dot(a, a)); }

/// Cosine similarity; 0 when either side has zero norm.
inline double cosine(const SparseVector& a, const SparseVector& b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

}  // namespace senti
