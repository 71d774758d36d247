#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "covtest/eigen.hpp"
#include "covtest/rng.hpp"
#include "support.hpp"

using namespace covtest;

TEST_CASE("diagonal matrix") {
  Matrix m(3, 3);
  m(0, 0) = 3.0;
  m(1, 1) = 1.0;
  m(2, 2) = 2.0;
  const auto eig = symmetric_eigenvalues(m);
  REQUIRE(eig.size() == 3);
  CHECK(eig[0] == doctest::Approx(1.0));
  CHECK(eig[1] == doctest::Approx(2.0));
  CHECK(eig[2] == doctest::Approx(3.0));
}

TEST_CASE("2x2 with known eigenpair") {
  Matrix m(2, 2);
  m(0, 0) = 2.0;
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  m(1, 1) = 2.0;
  const auto eig = symmetric_eigenvalues(m);
  CHECK(eig[0] == doctest::Approx(1.0));
  CHECK(eig[1] == doctest::Approx(3.0));
}

TEST_CASE("random 8x8 matches the inertia-bisection oracle") {
  RandomStream stream = RandomStream::derive(17, {8});
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix m = testsupport::random_symmetric(8, stream);
    const auto ql = symmetric_eigenvalues(m);
    const auto oracle = testsupport::bisection_eigenvalues(m);
    REQUIRE(ql.size() == oracle.size());
    for (std::size_t i = 0; i < ql.size(); ++i)
      CHECK(ql[i] == doctest::Approx(oracle[i]).epsilon(0).scale(0).epsilon(1e-8));
  }
}

TEST_CASE("eigenvalue sum equals the trace") {
  RandomStream stream = RandomStream::derive(17, {9});
  for (int n : {5, 16, 40}) {
    const Matrix m = testsupport::random_symmetric(n, stream);
    const auto eig = symmetric_eigenvalues(m);
    const double sum = std::accumulate(eig.begin(), eig.end(), 0.0);
    CHECK(sum == doctest::Approx(trace(m)).epsilon(1e-9));
  }
}

TEST_CASE("ql and jacobi agree") {
  RandomStream stream = RandomStream::derive(17, {10});
  const Matrix m = testsupport::random_symmetric(20, stream);
  const auto ql = symmetric_eigenvalues(m, EigenMethod::ql);
  const auto jac = symmetric_eigenvalues(m, EigenMethod::jacobi);
  double radius = 0.0;
  for (double v : ql) radius = std::max(radius, std::fabs(v));
  for (std::size_t i = 0; i < ql.size(); ++i)
    CHECK(std::fabs(ql[i] - jac[i]) < 1e-10 * radius);
}

TEST_CASE("eigenvalues accurate to 1e-10 of the spectral radius") {
  RandomStream stream = RandomStream::derive(17, {11});
  const Matrix m = testsupport::random_symmetric(12, stream);
  const auto ql = symmetric_eigenvalues(m);
  const auto oracle = testsupport::bisection_eigenvalues(m, 1e-14);
  double radius = 0.0;
  for (double v : oracle) radius = std::max(radius, std::fabs(v));
  for (std::size_t i = 0; i < ql.size(); ++i)
    CHECK(std::fabs(ql[i] - oracle[i]) < 1e-10 * radius);
}

TEST_CASE("asymmetric input is rejected") {
  Matrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 2.0;
  CHECK_THROWS_AS(symmetric_eigenvalues(m), std::invalid_argument);
}

TEST_CASE("multiple and clustered eigenvalues") {
  // I + small rank-1 bump: p-1 eigenvalues exactly 1.
  const int n = 6;
  Matrix m = Matrix::identity(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) += 1e-3;
  const auto eig = symmetric_eigenvalues(m);
  for (int i = 0; i < n - 1; ++i) CHECK(eig[i] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig[n - 1] == doctest::Approx(1.0 + n * 1e-3).epsilon(1e-12));
}
