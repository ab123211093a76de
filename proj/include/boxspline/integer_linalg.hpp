#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace boxspline {

using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<long long, Eigen::Dynamic, 1>;

/// Fraction-free (Bareiss) determinant. Every intermediate is an exact minor
/// of the input, so the result is exact whenever it fits in `Int`.
template <typename Int, typename Derived>
Int determinant(const Eigen::MatrixBase<Derived>& input) {
  const Eigen::Index n = input.rows();
  if (n != input.cols()) throw std::invalid_argument("determinant: matrix must be square");
  if (n == 0) return Int{1};
  Eigen::Matrix<__int128, Eigen::Dynamic, Eigen::Dynamic> a = input.template cast<__int128>();
  __int128 prev = 1;
  int sign = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      Eigen::Index p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return Int{0};
      a.row(k).swap(a.row(p));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) {
        a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
      }
    }
    prev = a(k, k);
  }
  return static_cast<Int>(sign * a(n - 1, n - 1));
}

/// Exact rank of an integer matrix by fraction-free elimination.
template <typename Derived>
int integer_rank(const Eigen::MatrixBase<Derived>& input) {
  Eigen::Matrix<__int128, Eigen::Dynamic, Eigen::Dynamic> a = input.template cast<__int128>();
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  int rank = 0;
  for (Eigen::Index c = 0; c < cols && rank < rows; ++c) {
    Eigen::Index p = rank;
    while (p < rows && a(p, c) == 0) ++p;
    if (p == rows) continue;
    a.row(rank).swap(a.row(p));
    for (Eigen::Index i = rank + 1; i < rows; ++i) {
      if (a(i, c) == 0) continue;
      const __int128 f = a(i, c);
      const __int128 g = a(rank, c);
      for (Eigen::Index j = c; j < cols; ++j) a(i, j) = a(i, j) * g - a(rank, j) * f;
      // keep entries small: divide the row by its content
      __int128 content = 0;
      for (Eigen::Index j = c; j < cols; ++j) {
        __int128 v = a(i, j) < 0 ? -a(i, j) : a(i, j);
        while (v != 0) {
          __int128 t = content % v;
          content = v;
          v = t;
        }
      }
      if (content > 1)
        for (Eigen::Index j = c; j < cols; ++j) a(i, j) /= content;
    }
    ++rank;
  }
  return rank;
}

/// Divides by the gcd of the entries and flips sign so the first nonzero
/// entry is positive.
inline IntVector primitive(IntVector v) {
  long long g = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) g = std::gcd(g, v[i]);
  if (g > 1) v /= g;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0) {
      if (v[i] < 0) v = -v;
      break;
    }
  }
  return v;
}

/// Primitive integer normal of the hyperplane spanned by the d-1 columns of
/// `span` (d x (d-1)), via signed maximal minors. Zero if they are dependent.
inline IntVector hyperplane_normal(const IntMatrix& span) {
  const Eigen::Index d = span.rows();
  if (span.cols() != d - 1) throw std::invalid_argument("hyperplane_normal: need d-1 columns");
  IntVector n(d);
  IntMatrix minor(d - 1, d - 1);
  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::Index r = 0;
    for (Eigen::Index k = 0; k < d; ++k) {
      if (k == i) continue;
      minor.row(r++) = span.row(k);
    }
    const long long m = determinant<long long>(minor);
    n[i] = (i % 2 == 0) ? m : -m;
  }
  if (n.isZero()) return n;
  return primitive(n);
}

/// Lexicographic order on integer vectors, used for sets and maps.
struct IntVectorLess {
  bool operator()(const IntVector& a, const IntVector& b) const {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  }
};

struct IntVectorHash {
  std::size_t operator()(const IntVector& v) const {
    std::uint64_t h = 1469598103934665603ull;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      h ^= static_cast<std::uint64_t>(v[i]) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

struct IntVectorEqual {
  bool operator()(const IntVector& a, const IntVector& b) const { return a.size() == b.size() && a == b; }
};

/// All k-subsets of {0..n-1} in lexicographic order, visited by callback.
/// The callback returns false to stop early.
template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    if (!fn(static_cast<const std::vector<int>&>(idx))) return;
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace boxspline
