#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "polyham/error.hpp"

namespace polyham {

/// Default relative tolerance for entrywise comparisons. All tolerance-taking
/// predicates in this library scale by max(1, largest magnitude involved).
inline constexpr double kDefaultTol = 1e-9;

/// Global cap on dense tensor allocation, in entries (not bytes).
std::size_t tensor_entry_cap();
void set_tensor_entry_cap(std::size_t cap);

/// A bijection sigma on {1..k}, stored as images[i-1] = sigma(i).
class Permutation {
 public:
  explicit Permutation(std::vector<int> images);

  static Permutation identity(int k);
  /// The transposition of positions a and b (1-based) in S_k.
  static Permutation transposition(int k, int a, int b);

  int size() const { return static_cast<int>(images_.size()); }
  /// sigma(i) for 1-based i.
  int operator()(int i) const { return images_[static_cast<std::size_t>(i) - 1]; }
  const std::vector<int>& images() const { return images_; }

  bool is_identity() const;
  Permutation inverse() const;

  /// Invokes fn(sigma) for every sigma in S_k, in lexicographic image order.
  template <typename F>
  static void for_each(int k, F&& fn) {
    std::vector<int> images(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) images[static_cast<std::size_t>(i)] = i + 1;
    do {
      fn(Permutation(images));
    } while (std::next_permutation(images.begin(), images.end()));
  }

 private:
  std::vector<int> images_;
};

/// compose(tau, sigma)(i) = tau(sigma(i)).
Permutation compose(const Permutation& tau, const Permutation& sigma);

/// Dense order-k tensor with every mode of size n (a cubical tensor).
///
/// Entries are addressed externally by k indices, each in 1..n. Storage is
/// row-major with the first index slowest:
///
///   offset(i1,...,ik) = sum_j (i_j - 1) * n^(k-j)
///
/// so the slice at a fixed first index is one contiguous block of n^(k-1)
/// values, and the last index is the fastest-moving one. The index<->offset
/// map is bijective; offset() and unravel() expose both directions.
///
/// Order 0 is permitted as the result of a full contraction and holds a
/// single scalar. All operations are pure: no method mutates an existing
/// tensor after construction, so values are safe to share across threads.
class CubicalTensor {
 public:
  /// Zero tensor. order >= 0, dim >= 1, dim^order within the entry cap.
  CubicalTensor(int order, int dim);

  int order() const { return order_; }
  int dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }

  std::span<const double> entries() const { return entries_; }
  std::span<double> entries_mut() { return entries_; }

  double operator[](std::size_t offset) const { return entries_[offset]; }

  /// Entry at a 1-based index tuple (tuple length must equal order()).
  double at(std::span<const int> index) const { return entries_[offset(index)]; }
  double at(std::initializer_list<int> index) const {
    return at(std::span<const int>(index.begin(), index.size()));
  }
  void set(std::span<const int> index, double value) { entries_[offset(index)] = value; }
  void set(std::initializer_list<int> index, double value) {
    set(std::span<const int>(index.begin(), index.size()), value);
  }

  /// Offset of a 1-based index tuple; throws IndexOutOfRange / SizeMismatch.
  std::size_t offset(std::span<const int> index) const;
  /// Inverse of offset(): writes the 1-based index tuple for an offset.
  void unravel(std::size_t offset, std::span<int> index_out) const;

  /// Offset of the entry whose index tuple is the ascending sort of this
  /// offset's tuple. Constant exactly on permutation-equivalence classes.
  std::size_t canonical_offset(std::size_t offset) const;

  double max_abs() const;

  /// The scalar held by an order-0 tensor.
  double scalar() const;

  /// Order-2 / order-1 views as Eigen values.
  Eigen::MatrixXd to_matrix() const;
  Eigen::VectorXd to_vector() const;
  static CubicalTensor from_matrix(const Eigen::MatrixXd& m);

 private:
  int order_;
  int dim_;
  std::vector<double> entries_;
};

/// Builds an order/dim tensor from a sparse list of (1-based index tuple,
/// value) pairs; unspecified entries are zero. Duplicate tuples, non-finite
/// values, bad indices and cap violations are errors.
CubicalTensor make_tensor(
    int order, int dim,
    std::span<const std::pair<std::vector<int>, double>> sparse_entries);
CubicalTensor make_tensor(
    int order, int dim,
    std::initializer_list<std::pair<std::vector<int>, double>> sparse_entries);

/// Tensor-vector product contracting the last m indices of A against copies
/// of x: result(i1..i_{k-m}) = sum A(i1..ik) x(i_{k-m+1}) ... x(ik).
/// m = order gives an order-0 tensor (read it with scalar()); m = 0 returns
/// A unchanged.
CubicalTensor tvp(const CubicalTensor& a, const Eigen::VectorXd& x, int m);

/// Matrix-tensor product contracting R's second index against A's first:
/// (RA)(i1..ik) = sum_j R(i1,j) A(j,i2..ik). Coincides with R*A for order 2.
CubicalTensor mat_tensor(const Eigen::MatrixXd& r, const CubicalTensor& a);

/// Tensor transpose: result(i_{s(1)},...,i_{s(k)}) = A(i1,...,ik), i.e. the
/// entry at tuple I moves to the tuple T with T[s(m)] = I[m]. Accepts the
/// identity permutation (returns a copy). Satisfies
/// transpose(transpose(A, s), t) == transpose(A, compose(t, s)).
CubicalTensor transpose(const CubicalTensor& a, const Permutation& sigma);

/// Average of transpose(A, s) over all s in S_k; the unique supersymmetric
/// tensor with the same homogeneous form A x^k. Equals, entry by entry, the
/// mean of A over each index-permutation class.
CubicalTensor symmetrize(const CubicalTensor& a);

/// Symmetrizes each slice A[i,...] over its k-1 trailing indices, leaving
/// the first (output-coordinate) index alone. Preserves tvp(A, x, k-1).
CubicalTensor symmetrize_trailing(const CubicalTensor& a);

/// True iff A is invariant under every index permutation, within
/// tol * max(1, max|A|). Checked by comparing each entry against the entry
/// at its ascending-sorted index tuple, which is equivalent to the
/// all-permutations test: invariance under every sigma means entries are
/// constant on permutation classes, and each class contains exactly one
/// sorted tuple.
bool is_supersymmetric(const CubicalTensor& a, double tol = kDefaultTol);

/// Sum of the diagonal entries A(i,i,...,i).
double trace(const CubicalTensor& a);

/// Gradient of x -> B x^k for supersymmetric B: k * (B x^{k-1}).
Eigen::VectorXd grad_form(const CubicalTensor& b, const Eigen::VectorXd& x);

/// Gradient of x -> A x^k for arbitrary A:
/// A x^{k-1} + sum_{j=2..k} transpose(A, swap(1,j)) x^{k-1}.
Eigen::VectorXd grad_general(const CubicalTensor& a, const Eigen::VectorXd& x);

}  // namespace polyham
