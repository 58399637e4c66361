// propagators.hpp - concatenated propagators and the block-LU resolvent
//
// For z off the real axis the sector recursion
//
//   S_0(z) = 0
//   G_ν(z) = H_ν - z - S_ν(z)
//   S_ν(z) = A_{ν-1,ν} G_{ν-1}(z)^{-1} A_{ν-1,ν}^*
//
// yields H - z = L(z) G(z) U(z) with G block diagonal and L, U unit block
// bidiagonal, so that
//
//   (H - z)^{-1} = U(z)^{-1} G(z)^{-1} L(z)^{-1}.
//
// The inverse triangular factors are built from the transfer operators
//   γ_{ν,ν+1}(z)  = -A_{ν,ν+1} G_ν(z)^{-1}     (sector ν   -> ν+1)
//   γ†_{ν,ν+1}(z) = -G_ν(z)^{-1} A_{ν,ν+1}^*   (sector ν+1 -> ν)
// and their ordered products γ_{ν,ν'} = γ_{ν'-1,ν'} ... γ_{ν,ν+1}.
#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/LU>

#include "msb/linalg.hpp"
#include "msb/model.hpp"

namespace msb::propagators {

// A non-real spectral parameter. |Im z| below min_imag is rejected.
class SpectralPoint {
 public:
  static constexpr double min_imag = 1e-8;

  explicit SpectralPoint(Complex z);

  Complex value() const { return z_; }
  double imag() const { return z_.imag(); }
  SpectralPoint conj() const { return SpectralPoint(std::conj(z_)); }

 private:
  Complex z_;
};

class PropagatorChain {
 public:
  const SpectralPoint& z() const { return z_; }
  int top() const { return static_cast<int>(G_.size()) - 1; }

  const Matrix& S(int nu) const { return S_[static_cast<std::size_t>(nu)]; }
  const Matrix& G(int nu) const { return G_[static_cast<std::size_t>(nu)]; }

  // G_ν(z)^{-1} applied to a right-hand side, using the stored factorization.
  Matrix solve(int nu, const Matrix& rhs) const { return lu_[static_cast<std::size_t>(nu)].solve(rhs); }
  Vector solve(int nu, const Vector& rhs) const { return lu_[static_cast<std::size_t>(nu)].solve(rhs); }

  Matrix G_inv(int nu) const;
  double rcond(int nu) const { return lu_[static_cast<std::size_t>(nu)].rcond(); }

 private:
  friend PropagatorChain propagator_chain(const model::BlockedHamiltonian& b, SpectralPoint z);
  explicit PropagatorChain(SpectralPoint z) : z_(z) {}

  SpectralPoint z_;
  std::vector<Matrix> S_;
  std::vector<Matrix> G_;
  std::vector<Eigen::PartialPivLU<Matrix>> lu_;
};

// Throws NumericalError naming ν when a G_ν factorization is singular.
PropagatorChain propagator_chain(const model::BlockedHamiltonian& b, SpectralPoint z);

struct ResolventFactors {
  std::vector<std::size_t> offsets;
  // gamma[ν][ν'] and gamma_dag[ν][ν'] populated for ν < ν' only.
  std::vector<std::vector<Matrix>> gamma;
  std::vector<std::vector<Matrix>> gamma_dag;
  Matrix L_inv;
  Matrix U_inv;
  Matrix G_inv;
  Matrix product;  // U_inv * G_inv * L_inv
};

ResolventFactors gamma_operators(const PropagatorChain& c, const model::BlockedHamiltonian& b);

// Forward factors with L * G * U = H - z.
struct LuFactors {
  Matrix L;
  Matrix G;
  Matrix U;
};

LuFactors lu_factors(const PropagatorChain& c, const model::BlockedHamiltonian& b);

// Dense (H - z)^{-1} from the factorized form.
Matrix resolvent_lu(const model::BlockedHamiltonian& b, SpectralPoint z);

// Matrix-free resolvent: forward sweep with L^{-1}, sector solves with G^{-1},
// backward sweep with U^{-1}. Keeps a reference to `b`, which must outlive it.
class BlockResolvent {
 public:
  BlockResolvent(const model::BlockedHamiltonian& b, SpectralPoint z);

  const PropagatorChain& chain() const { return chain_; }

  Vector apply(const Vector& psi) const;
  Vector apply_L_inv(const Vector& psi) const;
  Vector apply_G_inv(const Vector& psi) const;
  Vector apply_U_inv(const Vector& psi) const;
  // U(z) = I + G(z)^{-1} A^*
  Vector apply_U(const Vector& psi) const;

 private:
  const model::BlockedHamiltonian* b_;
  PropagatorChain chain_;
};

struct DirectResolvent {
  Matrix inverse;
  double residual = 0.0;  // ||(H - z) X - I||_F
};

// Oracle: dense LU of the assembled H - z.
DirectResolvent resolvent_direct(const model::BlockedHamiltonian& b, SpectralPoint z);

// Φ = U(z0)^{-1} Φ̃, i.e. Φ_ν = Φ̃_ν + Σ_{ν'>ν} γ†_{ν,ν'}(z0) Φ̃_ν'.
Vector domain_lift(const model::BlockedHamiltonian& b, SpectralPoint z0, const Vector& phi_tilde);

// Both images of the implicit domain test. via_propagator is U(z0) Φ, so it
// undoes domain_lift; the two images differ by G^{-1} S (H_free - z0)^{-1} A^* Φ.
struct ImplicitDomainImages {
  Vector via_propagator;  // [I + G(z0)^{-1} A^*] Φ
  Vector via_free;        // [I + (H_free - z0)^{-1} A^*] Φ
  double identity_residual = 0.0;  // max over ν of second_resolvent_residual
};

ImplicitDomainImages implicit_domain_residual(const model::BlockedHamiltonian& b, SpectralPoint z0, const Vector& phi);

// Second resolvent identity G_ν^{-1} - (H_ν - z)^{-1} = G_ν^{-1} S_ν (H_ν - z)^{-1};
// returns the max entrywise residual.
double second_resolvent_residual(const PropagatorChain& c, const model::BlockedHamiltonian& b, int nu);

// (H_ν - z)^{-1}, dense.
Matrix free_sector_resolvent(const model::BlockedHamiltonian& b, int nu, SpectralPoint z);

// A^* Φ on the full space: (A^*Φ)_ν = A_{ν,ν+1}^* Φ_{ν+1}.
Vector apply_coupling_adjoint(const model::BlockedHamiltonian& b, const Vector& phi);

}  // namespace msb::propagators
