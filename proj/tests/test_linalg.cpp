#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mrtime/error.hpp"
#include "mrtime/linalg.hpp"
#include "oracles.hpp"

using namespace mrtime;
using namespace mrtime::linalg;

TEST_CASE("matrix constructors reject bad shapes and non-finite data") {
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), Error);
  CHECK_THROWS_AS(Matrix(1, 1, std::vector<double>{std::nan("")}), Error);
  CHECK_THROWS_AS(Vector({1.0, std::numeric_limits<double>::infinity()}), Error);
  CHECK_THROWS_AS((Matrix{{1, 2}, {3}}), Error);
}

TEST_CASE("transpose") {
  CHECK(transpose(Matrix{{5}}) == Matrix{{5}});
  CHECK(transpose(Matrix{{1, 2, 3}, {4, 5, 6}}) == Matrix{{1, 4}, {2, 5}, {3, 6}});

  std::mt19937_64 gen(11);
  const auto m = oracle::random_matrix(7, 4, gen);
  const auto t = transpose(m);
  CHECK(t.rows() == 4);
  CHECK(t.cols() == 7);
  CHECK(transpose(t) == m);
}

TEST_CASE("matmul") {
  std::mt19937_64 gen(5);
  const auto m = oracle::random_matrix(3, 5, gen);
  CHECK(matmul(Matrix::identity(3), m) == m);
  CHECK(matmul(Matrix{{1, 2}, {3, 4}}, Matrix{{5}, {6}}) == Matrix{{17}, {39}});

  try {
    matmul(Matrix(2, 3), Matrix(2, 3));
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }

  SUBCASE("associativity and agreement with the triple loop") {
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = oracle::random_matrix(4, 4, gen);
      const auto b = oracle::random_matrix(4, 4, gen);
      const auto c = oracle::random_matrix(4, 4, gen);
      const auto left = matmul(matmul(a, b), c);
      const auto right = matmul(a, matmul(b, c));
      const auto ref = oracle::naive_matmul(oracle::naive_matmul(a, b), c);
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
          CHECK(std::abs(left(i, j) - right(i, j)) <= 1e-12);
          CHECK(std::abs(left(i, j) - ref(i, j)) <= 1e-12);
        }
    }
  }
}

TEST_CASE("solve_least_squares on exact systems") {
  const auto a = solve_least_squares(Matrix::identity(2), Vector{3, 7});
  CHECK(a[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(a[1] == doctest::Approx(7.0).epsilon(1e-15));

  const auto line = solve_least_squares(Matrix{{1, 1}, {1, 2}, {1, 3}}, Vector{3, 5, 7});
  CHECK(std::abs(line[0] - 1.0) < 1e-14);
  CHECK(std::abs(line[1] - 2.0) < 1e-14);
}

TEST_CASE("solve_least_squares recovers a known solution") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const auto p = oracle::random_matrix(20, 7, gen);
    const auto truth = oracle::random_vector(7, gen, -5.0, 5.0);
    const auto t = oracle::naive_matvec(p, truth);
    const auto a = solve_least_squares(p, t);
    CHECK(oracle::max_rel_diff(a, truth) < 1e-8);
  }
}

TEST_CASE("solve_least_squares satisfies residual orthogonality and minimality") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = oracle::random_matrix(20, 7, gen);
    const auto t = oracle::random_vector(20, gen, -10.0, 10.0);
    const auto a = solve_least_squares(p, t);

    const auto pa = oracle::naive_matvec(p, a);
    std::vector<double> res(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) res[i] = pa[i] - t[i];
    const auto grad = oracle::naive_matvec(transpose(p), Vector(res));
    CHECK(grad.norm_inf() <= 1e-8 * (p.norm_inf() * t.norm_inf() + 1.0));

    const double base = Vector(res).norm2();
    std::normal_distribution<double> n01;
    std::uniform_real_distribution<double> u01;
    for (int k = 0; k < 100; ++k) {
      std::vector<double> d(a.size());
      for (auto& x : d) x = n01(gen);
      const double len = Vector(d).norm2();
      const double radius = u01(gen) * (0.1 * a.norm2() + 0.1);
      std::vector<double> moved(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) moved[i] = a[i] + d[i] / len * radius;
      const auto pm = oracle::naive_matvec(p, Vector(moved));
      std::vector<double> r2(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) r2[i] = pm[i] - t[i];
      CHECK(Vector(r2).norm2() >= base - 1e-9);
    }
  }
}

TEST_CASE("solve_least_squares error paths") {
  SUBCASE("duplicated column reports its index") {
    Matrix p{{1, 2, 2}, {1, 3, 3}, {1, 5, 5}, {1, 7, 7}};
    try {
      solve_least_squares(p, Vector{1, 2, 3, 4});
      FAIL("expected RankDeficient");
    } catch (const RankDeficientError& e) {
      CHECK(e.kind() == ErrorKind::RankDeficient);
      CHECK(e.column() == 2);
    }
  }
  SUBCASE("zero matrix") {
    CHECK_THROWS_AS(solve_least_squares(Matrix(3, 2), Vector{1, 2, 3}), RankDeficientError);
  }
  SUBCASE("shape checks") {
    CHECK_THROWS_AS(solve_least_squares(Matrix(2, 3, 1.0), Vector{1, 2}), Error);
    CHECK_THROWS_AS(solve_least_squares(Matrix::identity(3), Vector{1, 2}), Error);
  }
}

TEST_CASE("svd reconstructs the input") {
  std::mt19937_64 gen(3);
  for (auto [r, c] : {std::pair{20, 7}, std::pair{4, 9}, std::pair{5, 5}}) {
    const auto m = oracle::random_matrix(r, c, gen);
    const auto s = svd(m);
    for (std::size_t i = 1; i < s.sigma.size(); ++i) CHECK(s.sigma[i] <= s.sigma[i - 1]);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) {
        double v = 0.0;
        for (std::size_t k = 0; k < s.sigma.size(); ++k) v += s.u(i, k) * s.sigma[k] * s.v(j, k);
        CHECK(std::abs(v - m(i, j)) < 1e-12);
      }
  }
}

TEST_CASE("pseudo_inverse_solve") {
  SUBCASE("agrees with QR on full-rank systems") {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 50; ++trial) {
      const auto p = oracle::random_matrix(20, 7, gen);
      const auto t = oracle::random_vector(20, gen, -3.0, 3.0);
      CHECK(oracle::max_rel_diff(pseudo_inverse_solve(p, t, 1e-12), solve_least_squares(p, t)) <
            1e-8);
    }
  }
  SUBCASE("duplicated columns share weight equally") {
    Matrix p{{1, 1, 2}, {2, 2, 0}, {3, 3, 1}, {0, 0, 4}};
    const auto x = pseudo_inverse_solve(p, Vector{1, 2, 3, 4}, 1e-12);
    CHECK(std::abs(x[0] - x[1]) < 1e-12);
    // Merging the pair into one column gives the same fit with weight x0 + x1.
    const auto merged = solve_least_squares(Matrix{{2, 2}, {4, 0}, {6, 1}, {0, 4}}, Vector{1, 2, 3, 4});
    CHECK(std::abs((x[0] + x[1]) - 2.0 * merged[0]) < 1e-10);
    CHECK(std::abs(x[2] - merged[1]) < 1e-10);
  }
  SUBCASE("zero matrix gives the zero vector") {
    const auto x = pseudo_inverse_solve(Matrix(3, 4), Vector{1, -2, 3}, 1e-12);
    CHECK(x == Vector(4));
  }
  SUBCASE("agrees with the normal equations on a scaled system") {
    std::mt19937_64 gen(4);
    const auto p = oracle::random_matrix(12, 4, gen);
    const auto t = oracle::random_vector(12, gen);
    CHECK(oracle::max_rel_diff(pseudo_inverse_solve(p, t), oracle::normal_equation_solve(p, t)) <
          1e-10);
  }
}
