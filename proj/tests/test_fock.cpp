#include <doctest.h>

#include <random>

#include "msb/errors.hpp"
#include "msb/fock.hpp"
#include "support/random_spec.hpp"

using namespace msb;
using namespace msb::fock;

namespace {

field::DispersionGrid grid(std::vector<double> omega, std::vector<double> w) {
  std::vector<double> k(omega.size(), 0.0);
  return {k, std::move(w), std::move(omega), 0.5};
}

std::size_t binomial(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("basis enumeration order and dimension") {
  auto b1 = enumerate_basis(1, 2);
  CHECK(b1.states() == std::vector<Occupation>{{0}, {1}, {2}});

  auto b2 = enumerate_basis(2, 1);
  CHECK(b2.states() == std::vector<Occupation>{{0, 0}, {1, 0}, {0, 1}});

  auto b22 = enumerate_basis(2, 2);
  CHECK(b22.dimension() == 6);
  CHECK(b22.states() == std::vector<Occupation>{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}});

  CHECK_THROWS_AS(enumerate_basis(0, 2), ParameterError);

  for (std::size_t m = 1; m <= 5; ++m)
    for (int n = 0; n <= 4; ++n) {
      auto b = enumerate_basis(m, n);
      CHECK(b.dimension() == binomial(m + n, n));
      for (std::size_t i = 0; i < b.dimension(); ++i) CHECK(*b.index_of(b.state(i)) == i);
      CHECK(b.grade_begin(n + 1) == b.dimension());
    }
  CHECK_FALSE(b22.index_of({3, 0}).has_value());
}

TEST_CASE("number operator") {
  auto b = enumerate_basis(1, 2);
  Matrix d = Matrix(number_operator(grid({2.0}, {1.0}), b));
  CHECK(d.isApprox(RealVector((RealVector(3) << 0.0, 2.0, 4.0).finished()).cast<Complex>().asDiagonal().toDenseMatrix()));

  auto b2 = enumerate_basis(2, 2);
  OperatorMatrix d2 = number_operator(grid({1.0, 3.0}, {1.0, 1.0}), b2);
  CHECK(d2.coeff(0, 0) == Complex(0.0));
  CHECK(d2.coeff(static_cast<Eigen::Index>(*b2.index_of({1, 1})), static_cast<Eigen::Index>(*b2.index_of({1, 1}))) ==
        Complex(4.0));
  CHECK_THROWS_AS(number_operator(grid({1.0}, {1.0}), b2), ConfigError);
}

TEST_CASE("annihilation ladder amplitudes and vacuum") {
  auto b = enumerate_basis(1, 2);
  auto g = grid({2.0}, {1.0});
  Matrix a = Matrix(annihilation(field::FormFactor{{1.0}}, g, b));
  CHECK(std::abs(a(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(a(1, 2) - std::sqrt(2.0)) < 1e-15);
  CHECK(a.col(0).norm() == 0.0);

  std::mt19937_64 rng(3);
  auto bm = enumerate_basis(3, 3);
  auto gm = grid({1.0, 2.0, 3.0}, {0.3, 1.0, 2.0});
  field::FormFactor f{{testing::random_complex(rng), testing::random_complex(rng), testing::random_complex(rng)}};
  Matrix am = Matrix(annihilation(f, gm, bm));
  CHECK(am.col(0).norm() == 0.0);
  // antilinear: a(i f) = -i a(f)
  field::FormFactor fi = f;
  for (auto& x : fi.amplitudes) x *= Complex(0, 1);
  CHECK(max_abs_diff(Matrix(annihilation(fi, gm, bm)), Complex(0, -1) * am) < 1e-15);
}

TEST_CASE("creation is the exact adjoint and grades shift by one") {
  std::mt19937_64 rng(5);
  auto b = enumerate_basis(3, 3);
  auto g = grid({1.0, 1.5, 4.0}, {0.5, 1.0, 2.0});
  field::FormFactor f{{testing::random_complex(rng), testing::random_complex(rng), testing::random_complex(rng)}};
  OperatorMatrix a = annihilation(f, g, b);
  OperatorMatrix c = creation(f, g, b);
  CHECK(Matrix(c) == Matrix(a.adjoint()));
  for (Eigen::Index k = 0; k < a.outerSize(); ++k)
    for (OperatorMatrix::InnerIterator it(a, k); it; ++it)
      CHECK(b.grade(static_cast<std::size_t>(it.row())) + 1 == b.grade(static_cast<std::size_t>(it.col())));
  // dΓ commutes with every operator diagonal in occupation numbers
  Matrix d = Matrix(number_operator(g, b));
  Matrix n = Matrix(photon_count(b));
  CHECK(max_abs_diff(d * n, n * d) == 0.0);
}

TEST_CASE("canonical commutation holds below the truncation ceiling") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + trial % 3;
    const int nmax = 2 + trial % 3;
    auto b = enumerate_basis(m, nmax);
    field::DispersionGrid g;
    field::FormFactor f, h;
    for (std::size_t i = 0; i < m; ++i) {
      g.modes.push_back(0.0);
      g.omega.push_back(1.0 + i);
      g.weights.push_back(0.1 + 0.7 * i);
      f.amplitudes.push_back(testing::random_complex(rng));
      h.amplitudes.push_back(testing::random_complex(rng));
    }
    g.mass_gap = 1.0;
    Matrix a = Matrix(annihilation(f, g, b));
    Matrix ad = Matrix(creation(h, g, b));
    Matrix comm = a * ad - ad * a;
    const Complex expected = field::inner(f, h, g);
    const auto exact = static_cast<Eigen::Index>(b.grade_begin(nmax));
    Matrix target = expected * Matrix::Identity(exact, exact);
    CHECK(max_abs_diff(comm.topLeftCorner(exact, exact), target) < 1e-12);
    CHECK(comm.block(exact, 0, comm.rows() - exact, exact).norm() < 1e-12);
  }
}

TEST_CASE("annihilation is bounded relative to dGamma(omega)^(1/2)") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + trial % 4;
    auto b = enumerate_basis(m, 3);
    field::DispersionGrid g;
    field::FormFactor f;
    g.mass_gap = 0.5;
    for (std::size_t i = 0; i < m; ++i) {
      g.modes.push_back(0.0);
      g.omega.push_back(0.5 + 10.0 * u(rng));
      g.weights.push_back(0.1 + u(rng));
      f.amplitudes.push_back(testing::random_complex(rng));
    }
    const Matrix a = Matrix(annihilation(f, g, b));
    const OperatorMatrix d = number_operator(g, b);
    const double fm1 = field::norm_s(f, g, -1.0);
    for (int k = 0; k < 20; ++k) {
      const Vector psi = testing::random_vector(rng, a.cols());
      Vector half = psi;
      for (Eigen::Index i = 0; i < psi.size(); ++i) half[i] *= std::sqrt(d.coeff(i, i).real());
      CHECK((a * psi).norm() <= fm1 * half.norm() * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("Fock scale norm") {
  auto b = enumerate_basis(1, 2);
  auto g = grid({2.0}, {1.0});
  Vector psi(3);
  psi << 1.0, 1.0, 1.0;
  CHECK(fock_scale_norm(psi, g, b, 0.0) == doctest::Approx(std::sqrt(3.0)));
  CHECK(fock_scale_norm(psi, g, b, 2.0) == doctest::Approx(std::sqrt(1.0 + 9.0 + 25.0)));
}
