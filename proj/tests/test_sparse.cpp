#include "bhtopo/sparse.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace bhtopo;

namespace {

std::vector<Triplet> random_triplets(std::mt19937_64& rng, int rows, int cols, int count) {
  std::uniform_int_distribution<int> r(0, rows - 1), c(0, cols - 1);
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  std::vector<Triplet> t;
  for (int k = 0; k < count; ++k) t.push_back({r(rng), c(rng), v(rng)});
  return t;
}

Vector random_vector(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = v(rng);
  return x;
}

oracle::Dense to_rows(const SparseMatrix& a) {
  oracle::Dense d(a.rows(), std::vector<double>(a.cols(), 0.0));
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) d[r][c] = a.coeff(r, c);
  }
  return d;
}

}  // namespace

TEST_CASE("duplicate triplets are summed") {
  const std::vector<Triplet> t{{0, 0, 1.0}, {0, 0, 2.0}};
  const SparseMatrix a = SparseMatrix::from_triplets(1, 1, t);
  CHECK(a.nnz() == 1);
  CHECK(a.coeff(0, 0) == 3.0);
}

TEST_CASE("empty triplets give the zero matrix") {
  const SparseMatrix a = SparseMatrix::from_triplets(3, 3, {});
  CHECK(a.nnz() == 0);
  CHECK((a * Vector::Ones(3)).isZero(0.0));
  CHECK(finalize(3, 3, {}).nnz() == 0);
}

TEST_CASE("identity matvec returns its argument") {
  std::mt19937_64 rng(1);
  const std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, 1.0}};
  const Vector v = random_vector(rng, 2);
  CHECK((SparseMatrix::from_triplets(2, 2, t) * v) == v);
  CHECK((SparseMatrix::identity(2) * v) == v);
}

TEST_CASE("out-of-range triplets are rejected") {
  const std::vector<Triplet> t{{2, 0, 1.0}};
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, t), std::out_of_range);
  const std::vector<Triplet> neg{{0, -1, 1.0}};
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, neg), std::out_of_range);
}

TEST_CASE("compressed rows have sorted unique columns") {
  std::mt19937_64 rng(2);
  const SparseMatrix a = SparseMatrix::from_triplets(20, 15, random_triplets(rng, 20, 15, 200));
  for (int r = 0; r < a.rows(); ++r) {
    const auto cols = a.row_indices(r);
    for (std::size_t k = 1; k < cols.size(); ++k) CHECK(cols[k - 1] < cols[k]);
  }
}

TEST_CASE("matvec agrees with triplet-wise accumulation") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto t = random_triplets(rng, 30, 25, 300);
    const Vector x = random_vector(rng, 25);
    Vector ref = Vector::Zero(30);
    for (const Triplet& e : t) ref[e.row] += e.value * x[e.col];
    const SparseMatrix a = SparseMatrix::from_triplets(30, 25, t);
    CHECK((a * x - ref).lpNorm<Eigen::Infinity>() <= 1e-13);
  }
}

TEST_CASE("duplicate summation follows input order and is deterministic") {
  const std::vector<Triplet> t{{0, 0, 1e16}, {0, 0, 1.0}, {0, 0, -1e16}};
  const double expected = (1e16 + 1.0) + -1e16;
  CHECK(SparseMatrix::from_triplets(1, 1, t).coeff(0, 0) == expected);
}

TEST_CASE("transpose and dense conversion") {
  std::mt19937_64 rng(4);
  const SparseMatrix a = SparseMatrix::from_triplets(7, 5, random_triplets(rng, 7, 5, 20));
  CHECK(a.transpose().to_dense() == a.to_dense().transpose());
  CHECK(a.max_abs() == a.to_dense().cwiseAbs().maxCoeff());
  CHECK_THROWS_AS(a * Vector::Ones(7), DimensionError);
}

TEST_CASE("solve_direct on small systems") {
  const Vector b = (Vector(3) << 1.5, -2.0, 7.0).finished();
  CHECK(solve_direct(SparseMatrix::identity(3), b) == b);

  const std::vector<Triplet> t{{0, 0, 2.0}, {1, 1, 4.0}};
  const Vector x = solve_direct(SparseMatrix::from_triplets(2, 2, t), Vector(Eigen::Vector2d(2.0, 8.0)));
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("random sparse SPD system matches a dense elimination oracle") {
  std::mt19937_64 rng(5);
  const int n = 50;
  auto t = random_triplets(rng, n, n, 150);
  // B + B^T + n I is symmetric and strictly diagonally dominant.
  std::vector<Triplet> spd;
  for (const Triplet& e : t) {
    spd.push_back(e);
    spd.push_back({e.col, e.row, e.value});
  }
  for (int i = 0; i < n; ++i) spd.push_back({i, i, static_cast<double>(n)});
  const SparseMatrix a = SparseMatrix::from_triplets(n, n, spd);
  const Vector b = random_vector(rng, n);

  const Vector x = solve_direct(a, b);
  const std::vector<double> ref = oracle::dense_solve(to_rows(a), {b.data(), b.data() + n});
  for (int i = 0; i < n; ++i) CHECK(std::abs(x[i] - ref[i]) <= 1e-10);
}

TEST_CASE("solve after matvec recovers the vector on nonsymmetric systems") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 40;
    auto t = random_triplets(rng, n, n, 120);
    for (int i = 0; i < n; ++i) t.push_back({i, i, 10.0});
    const SparseMatrix a = SparseMatrix::from_triplets(n, n, t);
    const Vector x = random_vector(rng, n);
    const Vector b = a * x;
    const Vector y = solve_direct(a, b);
    CHECK((a * y - b).norm() <= 1e-10 * (a.max_abs() * y.norm() + b.norm()));
    CHECK((y - x).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("singular and mis-shaped systems are reported distinctly") {
  const std::vector<Triplet> t{{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 4.0}};
  CHECK_THROWS_AS(solve_direct(SparseMatrix::from_triplets(2, 2, t), Vector::Ones(2)),
                  SingularMatrixError);
  CHECK_THROWS_AS(solve_direct(SparseMatrix(2, 2), Vector::Ones(2)), SingularMatrixError);

  const std::vector<Triplet> tiny{{0, 0, 1.0}, {1, 1, 1e-20}};
  CHECK_THROWS_AS(solve_direct(SparseMatrix::from_triplets(2, 2, tiny), Vector::Ones(2)),
                  SingularMatrixError);

  CHECK_THROWS_AS(solve_direct(SparseMatrix(2, 3), Vector::Ones(2)), DimensionError);
  CHECK_THROWS_AS(solve_direct(SparseMatrix::identity(2), Vector::Ones(3)), DimensionError);
}

TEST_CASE("solve_direct is deterministic") {
  std::mt19937_64 rng(7);
  auto t = random_triplets(rng, 30, 30, 100);
  for (int i = 0; i < 30; ++i) t.push_back({i, i, 5.0});
  const SparseMatrix a = SparseMatrix::from_triplets(30, 30, t);
  const Vector b = random_vector(rng, 30);
  CHECK(solve_direct(a, b) == solve_direct(a, b));
}

TEST_CASE("block system with diagonal blocks") {
  BlockSystem s({{"a", 1}, {"b", 1}});
  s.set_diagonal(0, 0, Vector::Constant(1, 3.0));
  s.set_diagonal(1, 1, Vector::Constant(1, 5.0));
  const DenseMatrix d = assemble_block_system(s).to_dense();
  CHECK(d(0, 0) == 3.0);
  CHECK(d(0, 1) == 0.0);
  CHECK(d(1, 0) == 0.0);
  CHECK(d(1, 1) == 5.0);
}

TEST_CASE("identity blocks everywhere on the diagonal give the identity") {
  BlockSystem s({{"x", 3}, {"y", 2}, {"z", 4}});
  for (int b = 0; b < 3; ++b) s.set(b, b, SparseMatrix::identity(s.block_size(b)));
  CHECK(s.assemble().to_dense() == DenseMatrix::Identity(9, 9));
  CHECK(s.dimension() == 9);
  CHECK(s.offset(2) == 5);
  CHECK(s.index_of("y") == 1);
  CHECK_THROWS_AS(s.index_of("w"), std::out_of_range);
}

TEST_CASE("scalar box Newton matrix matches hand assembly") {
  // n = 1: [[h, -1, 1], [za, ca, 0], [-zb, 0, cb]]
  const double h = 2.5, za = 0.7, zb = 1.3, ca = 0.4, cb = 1.1;
  BlockSystem s({{"x", 1}, {"za", 1}, {"zb", 1}});
  s.set(0, 0, SparseMatrix::diagonal(Vector::Constant(1, h)));
  s.set_diagonal(0, 1, Vector::Constant(1, -1.0));
  s.set_diagonal(0, 2, Vector::Constant(1, 1.0));
  s.set_diagonal(1, 0, Vector::Constant(1, za));
  s.set_diagonal(1, 1, Vector::Constant(1, ca));
  s.set_diagonal(2, 0, Vector::Constant(1, -zb));
  s.set_diagonal(2, 2, Vector::Constant(1, cb));
  DenseMatrix hand(3, 3);
  hand << h, -1, 1, za, ca, 0, -zb, 0, cb;
  CHECK(s.assemble().to_dense() == hand);
}

TEST_CASE("assembly then extraction round-trips every block") {
  std::mt19937_64 rng(8);
  const std::vector<int> sizes{4, 3, 5};
  BlockSystem s({{"a", 4}, {"b", 3}, {"c", 5}});
  std::vector<std::vector<SparseMatrix>> given(3, std::vector<SparseMatrix>(3));
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      given[r][c] = SparseMatrix::from_triplets(sizes[r], sizes[c],
                                                random_triplets(rng, sizes[r], sizes[c], 6));
      s.set(r, c, given[r][c]);
    }
  }
  const SparseMatrix global = s.assemble();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) CHECK(s.extract(global, r, c).to_dense() == given[r][c].to_dense());
  }
  const Vector v = random_vector(rng, 12);
  CHECK(s.segment(v, 1) == v.segment(4, 3));
}

TEST_CASE("block shape mismatches are rejected") {
  BlockSystem s({{"a", 2}, {"b", 3}});
  CHECK_THROWS_AS(s.set(0, 1, SparseMatrix(2, 2)), DimensionError);
  CHECK_THROWS_AS(s.set_diagonal(0, 1, Vector::Ones(2)), DimensionError);
  CHECK_THROWS_AS(s.set_diagonal(1, 1, Vector::Ones(2)), DimensionError);
  CHECK_THROWS_AS(s.segment(Vector::Ones(4), 0), DimensionError);
}
