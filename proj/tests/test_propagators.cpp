#include <doctest.h>

#include <random>

#include "msb/errors.hpp"
#include "msb/propagators.hpp"
#include "support/random_spec.hpp"

using namespace msb;
using namespace msb::propagators;

namespace {

const Complex I(0.0, 1.0);

Matrix dense_block(const model::BlockedHamiltonian& b, const Matrix& m, int r, int c) {
  return m.block(static_cast<Eigen::Index>(b.sector_offsets[r]), static_cast<Eigen::Index>(b.sector_offsets[c]),
                 static_cast<Eigen::Index>(b.sector_dims[r]), static_cast<Eigen::Index>(b.sector_dims[c]));
}

Matrix inverse(const Matrix& m) { return m.fullPivLu().inverse(); }

}  // namespace

TEST_CASE("real spectral points are rejected") {
  CHECK_THROWS_AS(SpectralPoint(0.5), ParameterError);
  CHECK_THROWS_AS(SpectralPoint(Complex(1.0, 1e-9)), ParameterError);
  CHECK_NOTHROW(SpectralPoint(Complex(1.0, -1e-8)));
  const auto b = model::assemble(testing::single_spin());
  CHECK_THROWS_AS(resolvent_lu(b, SpectralPoint(Complex(0.5, 0.0))), ParameterError);
}

TEST_CASE("single-spin instance closed forms at z = i") {
  const auto b = model::assemble(testing::single_spin());
  const SpectralPoint z(I);
  const auto c = propagator_chain(b, z);
  // S_1(i) at (e,0): 1/(2 - i); G_1(i) = 1 - i - 1/(2 - i)
  CHECK(std::abs(c.S(1)(0, 0) - Complex(0.4, 0.2)) < 1e-12);
  CHECK(std::abs(c.G(1)(0, 0) - Complex(0.6, -1.2)) < 1e-12);
  CHECK(c.S(0).norm() == 0.0);

  const Matrix r = resolvent_lu(b, z);
  CHECK(std::abs(r(3, 3) - Complex(1.0 / 3.0, 2.0 / 3.0)) < 1e-12);
  // block formula: R_11 = G_1^{-1}
  CHECK(max_abs_diff(dense_block(b, r, 1, 1), c.G_inv(1)) < 1e-14);

  const auto direct = resolvent_direct(b, z);
  CHECK(std::abs(direct.inverse(3, 3) - Complex(1.0 / 3.0, 2.0 / 3.0)) < 1e-12);
  CHECK(direct.residual <= 1e-12 * 6);
  CHECK(operator_norm(direct.inverse).value <= 1.0 + 1e-12);
}

TEST_CASE("zero coupling collapses the recursion") {
  std::mt19937_64 rng(2);
  auto spec = testing::random_spec(rng, {3, 2, 2});
  for (auto& f : spec.form_factors)
    for (auto& a : f.amplitudes) a = 0.0;
  const auto b = model::assemble(spec);
  const SpectralPoint z(Complex(0.3, 1.1));
  const auto c = propagator_chain(b, z);
  for (int nu = 0; nu <= 3; ++nu) {
    CHECK(c.S(nu).norm() == 0.0);
    Matrix h = Matrix(b.H_blocks[nu]);
    h.diagonal().array() -= z.value();
    CHECK(max_abs_diff(c.G(nu), h) == 0.0);
  }
  const auto f = gamma_operators(c, b);
  const auto dim = static_cast<Eigen::Index>(b.dimension());
  CHECK(max_abs_diff(f.L_inv, Matrix::Identity(dim, dim)) == 0.0);
  CHECK(max_abs_diff(f.U_inv, Matrix::Identity(dim, dim)) == 0.0);
  Matrix free = Matrix(b.free);
  free.diagonal().array() -= z.value();
  CHECK(relative_frobenius(f.product, inverse(free)) < 1e-12);

  std::mt19937_64 vrng(3);
  const Vector phi = testing::random_vector(vrng, dim);
  CHECK((domain_lift(b, z, phi) - phi).norm() == 0.0);
  const auto images = implicit_domain_residual(b, z, phi);
  CHECK((images.via_free - phi).norm() == 0.0);
  CHECK((images.via_propagator - phi).norm() == 0.0);
}

TEST_CASE("two-spin self-energy matches a(f_i)(H_gg - z)^{-1}a*(f_j)") {
  std::mt19937_64 rng(6);
  auto spec = testing::random_spec(rng, {2, 3, 2});
  spec.spin.v.setZero();
  const auto b = model::assemble(spec);
  const SpectralPoint z(Complex(-0.4, 0.9));
  const auto c = propagator_chain(b, z);

  const auto dim_f = static_cast<Eigen::Index>(b.fock.dimension());
  Matrix h_gg = Matrix(fock::number_operator(spec.grid, b.fock));
  h_gg.diagonal().array() += spec.spin.g[0] + spec.spin.g[1] - z.value();
  const Matrix r_gg = inverse(h_gg);
  const Matrix a[2] = {Matrix(fock::annihilation(spec.form_factors[0], spec.grid, b.fock)),
                       Matrix(fock::annihilation(spec.form_factors[1], spec.grid, b.fock))};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Matrix expected = a[i] * r_gg * a[j].adjoint();
      CHECK(max_abs_diff(c.S(1).block(i * dim_f, j * dim_f, dim_f, dim_f), expected) < 1e-11);
    }
}

TEST_CASE("transfer operators") {
  std::mt19937_64 rng(10);
  SUBCASE("single step for one spin") {
    const auto b = model::assemble(testing::random_spec(rng, {1, 2, 3}));
    const SpectralPoint z(Complex(0.2, -0.8));
    const auto f = gamma_operators(propagator_chain(b, z), b);
    Matrix h0 = Matrix(b.H_blocks[0]);
    h0.diagonal().array() -= z.value();
    CHECK(max_abs_diff(f.gamma[0][1], -(Matrix(b.A_blocks[0]) * inverse(h0))) < 1e-13);
  }
  SUBCASE("concatenation order and inverse factors") {
    const auto b = model::assemble(testing::random_spec(rng, {3, 2, 2}));
    const SpectralPoint z(Complex(1.0, 0.7));
    const auto c = propagator_chain(b, z);
    const auto f = gamma_operators(c, b);
    CHECK(max_abs_diff(f.gamma[0][2], f.gamma[1][2] * f.gamma[0][1]) < 1e-14);
    CHECK(max_abs_diff(f.gamma[0][3], f.gamma[2][3] * f.gamma[1][2] * f.gamma[0][1]) < 1e-13);
    CHECK(max_abs_diff(f.gamma_dag[0][3], f.gamma_dag[0][1] * f.gamma_dag[1][2] * f.gamma_dag[2][3]) < 1e-13);
    // L^{-1} and U^{-1} invert the bidiagonal factors
    const auto lu = lu_factors(c, b);
    const auto dim = static_cast<Eigen::Index>(b.dimension());
    CHECK(max_abs_diff(f.L_inv * lu.L, Matrix::Identity(dim, dim)) < 1e-12);
    CHECK(max_abs_diff(lu.U * f.U_inv, Matrix::Identity(dim, dim)) < 1e-12);

    // γ†(z) = γ(z̄)*
    const auto fc = gamma_operators(propagator_chain(b, z.conj()), b);
    for (int nu = 0; nu < 3; ++nu)
      for (int top = nu + 1; top <= 3; ++top)
        CHECK(max_abs_diff(f.gamma_dag[nu][top], fc.gamma[nu][top].adjoint()) < 1e-13);
  }
}

TEST_CASE("block LU resolvent agrees with the direct oracle") {
  std::mt19937_64 rng(42);
  const Complex zs[] = {I, 2.0 * I, Complex(-1.0, 0.5), Complex(3.0, -2.0)};
  for (int trial = 0; trial < 12; ++trial) {
    const auto b = model::assemble(testing::random_spec(rng, testing::random_shape(rng)));
    for (Complex zv : zs) {
      const SpectralPoint z(zv);
      const Matrix r = resolvent_lu(b, z);
      const auto d = resolvent_direct(b, z);
      CHECK(relative_frobenius(r, d.inverse) <= 1e-10);
      CHECK(d.residual <= 1e-12 * static_cast<double>(b.dimension()));

      const auto c = propagator_chain(b, z);
      const auto lu = lu_factors(c, b);
      Matrix hz = Matrix(b.full);
      hz.diagonal().array() -= zv;
      CHECK(max_abs_diff(lu.L * lu.G * lu.U, hz) <= 1e-11 * hz.cwiseAbs().maxCoeff());

      // matrix-free path
      const BlockResolvent br(b, z);
      const Vector psi = testing::random_vector(rng, static_cast<Eigen::Index>(b.dimension()));
      CHECK((br.apply(psi) - r * psi).norm() <= 1e-11 * (r * psi).norm());
      const auto f = gamma_operators(c, b);
      CHECK((br.apply_L_inv(psi) - f.L_inv * psi).norm() <= 1e-11 * psi.norm());
      CHECK((br.apply_U_inv(psi) - f.U_inv * psi).norm() <= 1e-11 * (f.U_inv * psi).norm());
    }
  }
}

TEST_CASE("sign properties and norm bounds of the propagators") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 8; ++trial) {
    const auto b = model::assemble(testing::random_spec(rng, testing::random_shape(rng)));
    for (Complex zv : {Complex(0.5, 0.25), Complex(-2.0, -4.0), Complex(1.0, 1.0)}) {
      const SpectralPoint z(zv);
      const auto c = propagator_chain(b, z);
      const auto cc = propagator_chain(b, z.conj());
      for (int nu = 0; nu <= c.top(); ++nu) {
        CHECK(max_abs_diff(c.S(nu).adjoint(), cc.S(nu)) <= 1e-13);
        CHECK(max_abs_diff(c.G(nu).adjoint(), cc.G(nu)) <= 1e-13);
        const Matrix g_inv = c.G_inv(nu);
        CHECK(Eigen::JacobiSVD<Matrix>(g_inv).singularValues()[0] <= 1.0 / std::abs(zv.imag()) + 1e-12);
        for (int k = 0; k < 50; ++k) {
          Vector psi = testing::random_vector(rng, c.S(nu).rows());
          psi.normalize();
          CHECK(psi.dot(c.S(nu) * psi).imag() / zv.imag() >= -1e-12);
          CHECK(psi.dot(c.G(nu) * psi).imag() / zv.imag() <= -1.0 + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("resolvent identities") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 6; ++trial) {
    const auto b = model::assemble(testing::random_spec(rng, testing::random_shape(rng)));
    const SpectralPoint z(Complex(0.4, 1.5)), w(Complex(-1.0, -0.6));
    const Matrix rz = resolvent_lu(b, z);
    const Matrix rw = resolvent_lu(b, w);
    CHECK(relative_frobenius(rz.adjoint(), resolvent_lu(b, z.conj())) <= 1e-10);
    const Matrix lhs = rz - rw;
    const Matrix rhs = (z.value() - w.value()) * rz * rw;
    CHECK(relative_frobenius(lhs, rhs) <= 1e-10);
  }
}

TEST_CASE("domain lift") {
  std::mt19937_64 rng(15);
  const auto b = model::assemble(testing::random_spec(rng, {2, 2, 2}));
  const SpectralPoint z0(Complex(0.0, 1.0)), z1(Complex(2.0, -0.5));
  const auto f0 = gamma_operators(propagator_chain(b, z0), b);
  const auto dim = static_cast<Eigen::Index>(b.dimension());

  SUBCASE("top-sector input") {
    Vector tilde = Vector::Zero(dim);
    b.set_sector(tilde, 2, testing::random_vector(rng, static_cast<Eigen::Index>(b.sector_dims[2])));
    const Vector phi = domain_lift(b, z0, tilde);
    CHECK((b.sector(phi, 2) - b.sector(tilde, 2)).norm() == 0.0);
    for (int nu = 0; nu < 2; ++nu)
      CHECK((b.sector(phi, nu) - f0.gamma_dag[nu][2] * b.sector(tilde, 2)).norm() < 1e-12);
  }
  SUBCASE("general input matches the displayed components") {
    const Vector tilde = testing::random_vector(rng, dim);
    const Vector phi = domain_lift(b, z0, tilde);
    for (int nu = 0; nu <= 2; ++nu) {
      Vector expected = b.sector(tilde, nu);
      for (int top = nu + 1; top <= 2; ++top) expected += f0.gamma_dag[nu][top] * b.sector(tilde, top);
      CHECK((b.sector(phi, nu) - expected).norm() < 1e-12 * (1.0 + expected.norm()));
    }
  }
  SUBCASE("reference point does not change the range") {
    const BlockResolvent r1(b, z1);
    const auto f1 = gamma_operators(r1.chain(), b);
    const auto lu1 = lu_factors(r1.chain(), b);
    const Matrix transfer = lu1.U * f0.U_inv;  // U(z1) U(z0)^{-1}
    CHECK(transfer.fullPivLu().rank() == dim);
    CHECK(max_abs_diff(f1.U_inv * transfer, f0.U_inv) < 1e-11);
    const Vector tilde = testing::random_vector(rng, dim);
    const Vector phi = domain_lift(b, z0, tilde);
    // the same Φ is reached from z1 with Φ̃' = U(z1) Φ
    CHECK((domain_lift(b, z1, r1.apply_U(phi)) - phi).norm() < 1e-11 * phi.norm());
  }
}

TEST_CASE("implicit domain forms differ by the second-resolvent correction") {
  const auto b = model::assemble(testing::single_spin());
  const auto c = propagator_chain(b, SpectralPoint(I));
  CHECK(second_resolvent_residual(c, b, 1) <= 1e-12);

  std::mt19937_64 rng(19);
  const auto b2 = model::assemble(testing::random_spec(rng, {2, 2, 2}));
  const SpectralPoint z0(Complex(0.5, -1.0));
  const auto c2 = propagator_chain(b2, z0);
  const Vector phi = testing::random_vector(rng, static_cast<Eigen::Index>(b2.dimension()));
  const auto images = implicit_domain_residual(b2, z0, phi);
  CHECK(images.identity_residual <= 1e-11);
  const Vector a_adj = apply_coupling_adjoint(b2, phi);
  for (int nu = 0; nu <= 2; ++nu) {
    const Vector correction =
        -(c2.G_inv(nu) * c2.S(nu) * free_sector_resolvent(b2, nu, z0) * b2.sector(a_adj, nu));
    const Vector diff = b2.sector(images.via_free, nu) - b2.sector(images.via_propagator, nu);
    CHECK((diff - correction).cwiseAbs().maxCoeff() < 1e-12);
  }
  // the propagator image inverts the domain lift
  const Vector tilde = testing::random_vector(rng, static_cast<Eigen::Index>(b2.dimension()));
  const auto lifted = implicit_domain_residual(b2, z0, domain_lift(b2, z0, tilde));
  CHECK((lifted.via_propagator - tilde).norm() < 1e-12 * tilde.norm());
}
