#include "bhtopo/sparse.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bhtopo {

SparseMatrix::SparseMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), row_ptr_(static_cast<std::size_t>(rows) + 1, 0) {
  if (rows < 0 || cols < 0) throw DimensionError("negative matrix dimension");
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::span<const Triplet> triplets) {
  SparseMatrix m(rows, cols);
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw std::out_of_range("triplet (" + std::to_string(t.row) + ", " +
                              std::to_string(t.col) + ") outside " + std::to_string(rows) +
                              "x" + std::to_string(cols));
    }
  }

  // Bucket by row; the counting sort keeps input order within a row.
  std::vector<int> count(static_cast<std::size_t>(rows) + 1, 0);
  for (const auto& t : triplets) ++count[t.row + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<int> order(triplets.size());
  {
    std::vector<int> next(count.begin(), count.end() - 1);
    for (std::size_t k = 0; k < triplets.size(); ++k) {
      order[next[triplets[k].row]++] =
          static_cast<int>(k);
    }
  }

  m.col_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  for (int r = 0; r < rows; ++r) {
    auto first = order.begin() + count[r];
    auto last = order.begin() + count[r + 1];
    std::stable_sort(first, last, [&](int a, int b) {
      return triplets[a].col < triplets[b].col;
    });
    for (auto it = first; it != last; ++it) {
      const Triplet& t = triplets[*it];
      const auto row_begin = static_cast<std::size_t>(m.row_ptr_[r]);
      if (m.col_idx_.size() > row_begin && m.col_idx_.back() == t.col) {
        m.values_.back() += t.value;
      } else {
        m.col_idx_.push_back(t.col);
        m.values_.push_back(t.value);
      }
    }
    m.row_ptr_[r + 1] = static_cast<int>(m.col_idx_.size());
  }
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  return diagonal(Vector::Ones(n));
}

SparseMatrix SparseMatrix::diagonal(const Vector& d) {
  const int n = static_cast<int>(d.size());
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t.push_back({i, i, d[i]});
  return from_triplets(n, n, t);
}

double SparseMatrix::coeff(int row, int col) const {
  const auto cols = row_indices(row);
  const auto it = std::lower_bound(cols.begin(), cols.end(), col);
  if (it == cols.end() || *it != col) return 0.0;
  return row_values(row)[static_cast<std::size_t>(it - cols.begin())];
}

Vector SparseMatrix::operator*(const Vector& x) const {
  if (x.size() != cols_) {
    throw DimensionError("matvec: expected length " + std::to_string(cols_) + ", got " +
                         std::to_string(x.size()));
  }
  Vector y = Vector::Zero(rows_);
  for (int r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      acc += values_[k] * x[col_idx_[k]];
    }
    y[r] = acc;
  }
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      t.push_back({col_idx_[k], r, values_[k]});
    }
  }
  return from_triplets(cols_, rows_, t);
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      d(r, col_idx_[k]) += values_[k];
    }
  }
  return d;
}

void SparseMatrix::append_triplets(std::vector<Triplet>& out, int row_offset, int col_offset,
                                   double scale) const {
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      out.push_back({r + row_offset, col_idx_[k] + col_offset,
                     scale * values_[k]});
    }
  }
}

std::span<const int> SparseMatrix::row_indices(int row) const {
  const auto b = static_cast<std::size_t>(row_ptr_.at(row));
  const auto e = static_cast<std::size_t>(row_ptr_.at(row + 1));
  return std::span<const int>(col_idx_).subspan(b, e - b);
}

std::span<const double> SparseMatrix::row_values(int row) const {
  const auto b = static_cast<std::size_t>(row_ptr_.at(row));
  const auto e = static_cast<std::size_t>(row_ptr_.at(row + 1));
  return std::span<const double>(values_).subspan(b, e - b);
}

namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// SparseLU keeps the diagonal of U inside the supernodal L storage; expose it
// so that tiny pivots can be judged against the largest one.
class PivotCheckedLU : public Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> {
 public:
  std::pair<double, double> pivot_range() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Eigen::Index j = 0; j < this->cols(); ++j) {
      double pivot = 0.0;
      for (SCMatrix::InnerIterator it(m_Lstore, j); it; ++it) {
        if (it.index() == j) {
          pivot = std::abs(it.value());
          break;
        }
      }
      lo = std::min(lo, pivot);
      hi = std::max(hi, pivot);
    }
    return {lo, hi};
  }
};

EigenSparse to_eigen(const SparseMatrix& a) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(a.nnz());
  for (int r = 0; r < a.rows(); ++r) {
    const auto cols = a.row_indices(r);
    const auto vals = a.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) t.emplace_back(r, cols[k], vals[k]);
  }
  EigenSparse m(a.rows(), a.cols());
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

Vector solve_direct(const SparseMatrix& a, const Vector& b) {
  if (a.rows() != a.cols()) {
    throw DimensionError("solve_direct: matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", not square");
  }
  if (b.size() != a.rows()) {
    throw DimensionError("solve_direct: right-hand side has length " + std::to_string(b.size()) +
                         ", expected " + std::to_string(a.rows()));
  }
  if (a.rows() == 0) return Vector(0);

  PivotCheckedLU lu;
  lu.compute(to_eigen(a));
  if (lu.info() != Eigen::Success) {
    throw SingularMatrixError("solve_direct: factorization failed (" + lu.lastErrorMessage() + ")");
  }
  const auto [lo, hi] = lu.pivot_range();
  if (!(hi > 0.0) || !(lo >= kSingularPivotRatio * hi)) {
    throw SingularMatrixError("solve_direct: pivot ratio " + std::to_string(lo / hi) +
                              " below threshold");
  }
  Vector x = lu.solve(b);
  if (!x.allFinite()) throw SingularMatrixError("solve_direct: non-finite solution");
  return x;
}

BlockSystem::BlockSystem(std::vector<BlockInfo> blocks) : blocks_(std::move(blocks)) {
  offsets_.reserve(blocks_.size() + 1);
  offsets_.push_back(0);
  for (const auto& b : blocks_) {
    if (b.size < 0) throw DimensionError("block '" + b.name + "' has negative size");
    offsets_.push_back(offsets_.back() + b.size);
  }
  entries_.resize(blocks_.size() * blocks_.size());
}

int BlockSystem::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].name == name) return static_cast<int>(i);
  }
  throw std::out_of_range("no block named '" + name + "'");
}

void BlockSystem::set(int row, int col, SparseMatrix m) {
  if (m.rows() != block_size(row) || m.cols() != block_size(col)) {
    throw DimensionError("block (" + name(row) + ", " + name(col) + ") expects " +
                         std::to_string(block_size(row)) + "x" + std::to_string(block_size(col)) +
                         ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  entries_[row * num_blocks() + col] = std::move(m);
}

void BlockSystem::set_diagonal(int row, int col, Vector d) {
  if (block_size(row) != block_size(col) || d.size() != block_size(row)) {
    throw DimensionError("diagonal block (" + name(row) + ", " + name(col) +
                         ") has inconsistent size");
  }
  entries_[row * num_blocks() + col] = std::move(d);
}

const BlockSystem::Block& BlockSystem::get(int row, int col) const {
  return entries_.at(row * num_blocks() + col);
}

SparseMatrix BlockSystem::assemble() const {
  std::size_t total = 0;
  for (const auto& e : entries_) {
    if (const auto* m = std::get_if<SparseMatrix>(&e)) total += m->nnz();
    if (const auto* d = std::get_if<Vector>(&e)) total += static_cast<std::size_t>(d->size());
  }
  std::vector<Triplet> t;
  t.reserve(total);
  for (int r = 0; r < num_blocks(); ++r) {
    for (int c = 0; c < num_blocks(); ++c) {
      const Block& e = get(r, c);
      if (const auto* m = std::get_if<SparseMatrix>(&e)) {
        m->append_triplets(t, offset(r), offset(c));
      } else if (const auto* d = std::get_if<Vector>(&e)) {
        for (Eigen::Index i = 0; i < d->size(); ++i) {
          t.push_back({offset(r) + static_cast<int>(i), offset(c) + static_cast<int>(i), (*d)[i]});
        }
      }
    }
  }
  return SparseMatrix::from_triplets(dimension(), dimension(), t);
}

SparseMatrix BlockSystem::extract(const SparseMatrix& global, int row, int col) const {
  if (global.rows() != dimension() || global.cols() != dimension()) {
    throw DimensionError("extract: matrix does not match block layout");
  }
  const int r0 = offset(row), c0 = offset(col);
  const int nr = block_size(row), nc = block_size(col);
  std::vector<Triplet> t;
  for (int r = r0; r < r0 + nr; ++r) {
    const auto cols = global.row_indices(r);
    const auto vals = global.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] >= c0 && cols[k] < c0 + nc) t.push_back({r - r0, cols[k] - c0, vals[k]});
    }
  }
  return SparseMatrix::from_triplets(nr, nc, t);
}

Vector BlockSystem::segment(const Vector& global, int block) const {
  if (global.size() != dimension()) throw DimensionError("segment: vector does not match layout");
  return global.segment(offset(block), block_size(block));
}

}  // namespace bhtopo
