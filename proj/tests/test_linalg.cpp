#include <doctest.h>

#include <random>

#include "msb/linalg.hpp"
#include "support/random_spec.hpp"

using namespace msb;

TEST_CASE("power iteration matches the largest singular value") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix m(12, 9);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = testing::random_complex(rng);
    const double exact = Eigen::JacobiSVD<Matrix>(m).singularValues()[0];
    const auto est = operator_norm(m, 1e-12, 100000);
    CHECK(est.converged);
    CHECK(est.value == doctest::Approx(exact).epsilon(1e-6));
  }
}

TEST_CASE("power iteration on zero and diagonal maps") {
  CHECK(operator_norm(Matrix::Zero(4, 4)).value == 0.0);
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 1.0, Complex(0.0, -5.0), 2.0;
  CHECK(operator_norm(d).value == doctest::Approx(5.0).epsilon(1e-8));
}
