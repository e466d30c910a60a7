#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace bhtopo {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

struct Triplet {
  int row;
  int col;
  double value;
};

/// Thrown by solve_direct when a pivot falls below the singularity threshold.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown on inconsistent operand sizes; distinct from SingularMatrixError.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Compressed sparse row matrix. Immutable once built.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols);  // all-zero matrix

  /// Sums duplicates in the order they appear in `triplets` and sorts column
  /// indices per row. Throws std::out_of_range on an index outside the shape.
  static SparseMatrix from_triplets(int rows, int cols, std::span<const Triplet> triplets);
  static SparseMatrix identity(int n);
  static SparseMatrix diagonal(const Vector& d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  /// Entry lookup by binary search; zero if not stored.
  double coeff(int row, int col) const;

  Vector operator*(const Vector& x) const;
  SparseMatrix transpose() const;
  double max_abs() const;
  DenseMatrix to_dense() const;

  /// Appends the stored entries, shifted by (row_offset, col_offset) and scaled.
  void append_triplets(std::vector<Triplet>& out, int row_offset = 0, int col_offset = 0,
                       double scale = 1.0) const;

  std::span<const int> row_indices(int row) const;
  std::span<const double> row_values(int row) const;

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

inline SparseMatrix finalize(int rows, int cols, std::span<const Triplet> triplets) {
  return SparseMatrix::from_triplets(rows, cols, triplets);
}

/// Pivots with |u_jj| < kSingularPivotRatio * max |u_jj| count as singular.
constexpr double kSingularPivotRatio = 1e-14;

/// Sparse LU with partial pivoting. Throws DimensionError on shape mismatch
/// and SingularMatrixError when the factorization hits a negligible pivot.
Vector solve_direct(const SparseMatrix& a, const Vector& b);

/// Square block matrix over a list of named row/column blocks. Each block is
/// either absent (zero), a general sparse matrix, or a diagonal given as a
/// vector.
class BlockSystem {
 public:
  using Block = std::variant<std::monostate, SparseMatrix, Vector>;

  struct BlockInfo {
    std::string name;
    int size;
  };

  explicit BlockSystem(std::vector<BlockInfo> blocks);

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int dimension() const { return offsets_.back(); }
  int offset(int block) const { return offsets_.at(block); }
  int block_size(int block) const { return blocks_.at(block).size; }
  const std::string& name(int block) const { return blocks_.at(block).name; }
  int index_of(const std::string& name) const;

  /// Throws DimensionError when the block shape does not match.
  void set(int row, int col, SparseMatrix m);
  void set_diagonal(int row, int col, Vector d);
  const Block& get(int row, int col) const;

  SparseMatrix assemble() const;

  /// Copies sub-block (row, col) out of a matrix laid out like this system.
  SparseMatrix extract(const SparseMatrix& global, int row, int col) const;

  /// Splits a vector laid out like this system into per-block segments.
  Vector segment(const Vector& global, int block) const;

 private:
  std::vector<BlockInfo> blocks_;
  std::vector<int> offsets_;
  std::vector<Block> entries_;
};

inline SparseMatrix assemble_block_system(const BlockSystem& blocks) {
  return blocks.assemble();
}

}  // namespace bhtopo
