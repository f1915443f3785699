#include "polyham/tensor.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace polyham {

namespace {

std::atomic<std::size_t> g_entry_cap{100'000'000};

// Largest order we ever address with stack-local index buffers.
constexpr int kMaxOrder = 48;

std::size_t checked_pow(int dim, int order) {
  std::size_t total = 1;
  const std::size_t cap = tensor_entry_cap();
  for (int i = 0; i < order; ++i) {
    if (total > cap / static_cast<std::size_t>(dim)) {
      throw Error(ErrorCode::MemoryCapExceeded,
                  "dim^order exceeds the entry cap of " + std::to_string(cap));
    }
    total *= static_cast<std::size_t>(dim);
  }
  return total;
}

using IndexBuf = std::array<int, kMaxOrder>;

}  // namespace

std::size_t tensor_entry_cap() { return g_entry_cap.load(std::memory_order_relaxed); }
void set_tensor_entry_cap(std::size_t cap) { g_entry_cap.store(cap, std::memory_order_relaxed); }

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  const int k = size();
  if (k < 1) throw Error(ErrorCode::SizeMismatch, "permutation must act on at least one element");
  std::vector<bool> seen(static_cast<std::size_t>(k), false);
  for (int v : images_) {
    if (v < 1 || v > k)
      throw Error(ErrorCode::IndexOutOfRange,
                  "permutation image " + std::to_string(v) + " outside 1.." + std::to_string(k));
    if (seen[static_cast<std::size_t>(v) - 1])
      throw Error(ErrorCode::DuplicateEntry, "permutation image " + std::to_string(v) + " repeated");
    seen[static_cast<std::size_t>(v) - 1] = true;
  }
}

Permutation Permutation::identity(int k) {
  std::vector<int> images(static_cast<std::size_t>(k));
  std::iota(images.begin(), images.end(), 1);
  return Permutation(std::move(images));
}

Permutation Permutation::transposition(int k, int a, int b) {
  Permutation p = identity(k);
  if (a < 1 || a > k || b < 1 || b > k)
    throw Error(ErrorCode::IndexOutOfRange, "transposition positions outside 1..k");
  std::swap(p.images_[static_cast<std::size_t>(a) - 1], p.images_[static_cast<std::size_t>(b) - 1]);
  return p;
}

bool Permutation::is_identity() const {
  for (int i = 1; i <= size(); ++i)
    if ((*this)(i) != i) return false;
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<int> images(images_.size());
  for (int i = 1; i <= size(); ++i) images[static_cast<std::size_t>((*this)(i)) - 1] = i;
  return Permutation(std::move(images));
}

Permutation compose(const Permutation& tau, const Permutation& sigma) {
  if (tau.size() != sigma.size())
    throw Error(ErrorCode::SizeMismatch, "composing permutations of different sizes");
  std::vector<int> images(static_cast<std::size_t>(tau.size()));
  for (int i = 1; i <= tau.size(); ++i) images[static_cast<std::size_t>(i) - 1] = tau(sigma(i));
  return Permutation(std::move(images));
}

CubicalTensor::CubicalTensor(int order, int dim) : order_(order), dim_(dim) {
  if (order < 0) throw Error(ErrorCode::OrderTooSmall, "tensor order must be non-negative");
  if (order > kMaxOrder)
    throw Error(ErrorCode::OrderCapExceeded,
                "tensor order " + std::to_string(order) + " exceeds the supported maximum of " +
                    std::to_string(kMaxOrder));
  if (dim < 1) throw Error(ErrorCode::DimensionMismatch, "tensor dim must be positive");
  entries_.assign(checked_pow(dim, order), 0.0);
}

std::size_t CubicalTensor::offset(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != order_)
    throw Error(ErrorCode::SizeMismatch,
                "index tuple has length " + std::to_string(index.size()) + ", tensor order is " +
                    std::to_string(order_));
  std::size_t off = 0;
  for (int component : index) {
    if (component < 1 || component > dim_)
      throw Error(ErrorCode::IndexOutOfRange,
                  "index component " + std::to_string(component) + " outside 1.." +
                      std::to_string(dim_));
    off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(component - 1);
  }
  return off;
}

void CubicalTensor::unravel(std::size_t offset, std::span<int> index_out) const {
  const auto n = static_cast<std::size_t>(dim_);
  for (int j = order_ - 1; j >= 0; --j) {
    index_out[static_cast<std::size_t>(j)] = static_cast<int>(offset % n) + 1;
    offset /= n;
  }
}

std::size_t CubicalTensor::canonical_offset(std::size_t offset) const {
  IndexBuf buf;
  auto idx = std::span<int>(buf.data(), static_cast<std::size_t>(order_));
  unravel(offset, idx);
  std::sort(idx.begin(), idx.end());
  std::size_t off = 0;
  for (int component : idx)
    off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(component - 1);
  return off;
}

double CubicalTensor::max_abs() const {
  double m = 0.0;
  for (double v : entries_) m = std::max(m, std::abs(v));
  return m;
}

double CubicalTensor::scalar() const {
  if (order_ != 0)
    throw Error(ErrorCode::SizeMismatch, "scalar() requires an order-0 tensor");
  return entries_[0];
}

Eigen::MatrixXd CubicalTensor::to_matrix() const {
  if (order_ != 2) throw Error(ErrorCode::SizeMismatch, "to_matrix() requires an order-2 tensor");
  Eigen::MatrixXd m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      m(i, j) = entries_[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim_) +
                         static_cast<std::size_t>(j)];
  return m;
}

Eigen::VectorXd CubicalTensor::to_vector() const {
  if (order_ != 1) throw Error(ErrorCode::SizeMismatch, "to_vector() requires an order-1 tensor");
  return Eigen::Map<const Eigen::VectorXd>(entries_.data(), dim_);
}

CubicalTensor CubicalTensor::from_matrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::DimensionMismatch, "from_matrix() requires a square matrix");
  CubicalTensor t(2, static_cast<int>(m.rows()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      t.entries_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m.cols()) +
                 static_cast<std::size_t>(j)] = m(i, j);
  return t;
}

CubicalTensor make_tensor(
    int order, int dim,
    std::span<const std::pair<std::vector<int>, double>> sparse_entries) {
  if (order < 1) throw Error(ErrorCode::OrderTooSmall, "make_tensor requires order >= 1");
  CubicalTensor t(order, dim);
  std::set<std::size_t> used;
  for (const auto& [index, value] : sparse_entries) {
    if (!std::isfinite(value))
      throw Error(ErrorCode::NonFiniteValue, "tensor entries must be finite");
    const std::size_t off = t.offset(index);
    if (!used.insert(off).second)
      throw Error(ErrorCode::DuplicateEntry, "index tuple listed twice");
    t.entries_mut()[off] = value;
  }
  return t;
}

CubicalTensor make_tensor(
    int order, int dim,
    std::initializer_list<std::pair<std::vector<int>, double>> sparse_entries) {
  return make_tensor(order, dim,
                     std::span<const std::pair<std::vector<int>, double>>(
                         sparse_entries.begin(), sparse_entries.size()));
}

CubicalTensor tvp(const CubicalTensor& a, const Eigen::VectorXd& x, int m) {
  const int k = a.order();
  const int n = a.dim();
  if (x.size() != n)
    throw Error(ErrorCode::DimensionMismatch,
                "vector length " + std::to_string(x.size()) + " != tensor dim " + std::to_string(n));
  if (m < 0 || m > k)
    throw Error(ErrorCode::DimensionMismatch,
                "contraction power " + std::to_string(m) + " outside 0..order");

  CubicalTensor result(k - m, n);
  if (m == 0) {
    std::copy(a.entries().begin(), a.entries().end(), result.entries_mut().begin());
    return result;
  }

  // Contract the fastest-moving (last) index m times; each pass is a GEMV
  // over contiguous rows of length n.
  std::vector<double> cur(a.entries().begin(), a.entries().end());
  std::size_t len = cur.size();
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  for (int pass = 0; pass < m; ++pass) {
    const std::size_t next_len = len / static_cast<std::size_t>(n);
    Eigen::Map<const RowMajor> mat(cur.data(), static_cast<Eigen::Index>(next_len), n);
    Eigen::VectorXd next = mat * x;
    cur.assign(next.data(), next.data() + next_len);
    len = next_len;
  }
  std::copy(cur.begin(), cur.end(), result.entries_mut().begin());
  return result;
}

CubicalTensor mat_tensor(const Eigen::MatrixXd& r, const CubicalTensor& a) {
  const int n = a.dim();
  if (r.rows() != n || r.cols() != n)
    throw Error(ErrorCode::DimensionMismatch,
                "matrix is " + std::to_string(r.rows()) + "x" + std::to_string(r.cols()) +
                    ", tensor dim is " + std::to_string(n));
  if (a.order() < 1)
    throw Error(ErrorCode::OrderTooSmall, "mat_tensor requires order >= 1");

  // Slices along the first index are contiguous blocks: block_i(RA) =
  // sum_j R(i,j) block_j(A), i.e. one GEMM with blocks as rows.
  const std::size_t block = a.size() / static_cast<std::size_t>(n);
  CubicalTensor result(a.order(), n);
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> in(a.entries().data(), n, static_cast<Eigen::Index>(block));
  Eigen::Map<RowMajor> out(result.entries_mut().data(), n, static_cast<Eigen::Index>(block));
  out.noalias() = r * in;
  return result;
}

CubicalTensor transpose(const CubicalTensor& a, const Permutation& sigma) {
  const int k = a.order();
  const int n = a.dim();
  if (sigma.size() != k)
    throw Error(ErrorCode::SizeMismatch,
                "permutation size " + std::to_string(sigma.size()) + " != tensor order " +
                    std::to_string(k));

  // Entry at tuple I lands at tuple T with T[sigma(m)] = I[m]; with the
  // row-major layout that is a fixed stride n^(k - sigma(m)) per position m.
  std::array<std::size_t, kMaxOrder> stride;
  for (int m = 1; m <= k; ++m) {
    std::size_t s = 1;
    for (int p = 0; p < k - sigma(m); ++p) s *= static_cast<std::size_t>(n);
    stride[static_cast<std::size_t>(m) - 1] = s;
  }

  CubicalTensor result(k, n);
  IndexBuf buf;
  auto idx = std::span<int>(buf.data(), static_cast<std::size_t>(k));
  for (std::size_t off = 0; off < a.size(); ++off) {
    a.unravel(off, idx);
    std::size_t out_off = 0;
    for (int m = 0; m < k; ++m)
      out_off += static_cast<std::size_t>(idx[static_cast<std::size_t>(m)] - 1) *
                 stride[static_cast<std::size_t>(m)];
    result.entries_mut()[out_off] = a[off];
  }
  return result;
}

CubicalTensor symmetrize(const CubicalTensor& a) {
  // The average of A over all k! transposes evaluates, at each tuple, to the
  // plain mean of A over that tuple's permutation class: every distinct
  // arrangement is hit by the same number of permutations.
  CubicalTensor result(a.order(), a.dim());
  if (a.order() <= 1) {
    std::copy(a.entries().begin(), a.entries().end(), result.entries_mut().begin());
    return result;
  }
  std::vector<double> class_sum(a.size(), 0.0);
  std::vector<std::uint32_t> class_count(a.size(), 0);
  for (std::size_t off = 0; off < a.size(); ++off) {
    const std::size_t c = a.canonical_offset(off);
    class_sum[c] += a[off];
    class_count[c] += 1;
  }
  for (std::size_t off = 0; off < a.size(); ++off) {
    const std::size_t c = a.canonical_offset(off);
    result.entries_mut()[off] = class_sum[c] / class_count[c];
  }
  return result;
}

CubicalTensor symmetrize_trailing(const CubicalTensor& a) {
  const int k = a.order();
  if (k < 2) throw Error(ErrorCode::OrderTooSmall, "symmetrize_trailing requires order >= 2");
  if (k == 2) return a;

  const int n = a.dim();
  CubicalTensor result(k, n);
  const std::size_t block = a.size() / static_cast<std::size_t>(n);

  // Each leading slice is a contiguous order-(k-1) tensor; reuse the
  // class-mean scheme on it.
  CubicalTensor scratch(k - 1, n);
  for (int i = 0; i < n; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * block;
    std::copy(a.entries().begin() + static_cast<std::ptrdiff_t>(base),
              a.entries().begin() + static_cast<std::ptrdiff_t>(base + block),
              scratch.entries_mut().begin());
    CubicalTensor sym = symmetrize(scratch);
    std::copy(sym.entries().begin(), sym.entries().end(),
              result.entries_mut().begin() + static_cast<std::ptrdiff_t>(base));
  }
  return result;
}

bool is_supersymmetric(const CubicalTensor& a, double tol) {
  if (tol < 0) throw Error(ErrorCode::UsageError, "tolerance must be non-negative");
  const double threshold = tol * std::max(1.0, a.max_abs());
  for (std::size_t off = 0; off < a.size(); ++off) {
    if (std::abs(a[off] - a[a.canonical_offset(off)]) > threshold) return false;
  }
  return true;
}

double trace(const CubicalTensor& a) {
  if (a.order() == 0) return a.scalar();
  const auto n = static_cast<std::size_t>(a.dim());
  std::size_t diag_stride = 0;
  std::size_t s = 1;
  for (int j = 0; j < a.order(); ++j) {
    diag_stride += s;
    s *= n;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i * diag_stride];
  return sum;
}

Eigen::VectorXd grad_form(const CubicalTensor& b, const Eigen::VectorXd& x) {
  const int k = b.order();
  if (k < 1) throw Error(ErrorCode::OrderTooSmall, "grad_form requires order >= 1");
  return static_cast<double>(k) * tvp(b, x, k - 1).to_vector();
}

Eigen::VectorXd grad_general(const CubicalTensor& a, const Eigen::VectorXd& x) {
  const int k = a.order();
  if (k < 1) throw Error(ErrorCode::OrderTooSmall, "grad_general requires order >= 1");
  Eigen::VectorXd g = tvp(a, x, k - 1).to_vector();
  for (int j = 2; j <= k; ++j)
    g += tvp(transpose(a, Permutation::transposition(k, 1, j)), x, k - 1).to_vector();
  return g;
}

}  // namespace polyham
