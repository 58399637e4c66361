#include "msb/propagators.hpp"

#include <cmath>
#include <sstream>

#include "msb/errors.hpp"

namespace msb::propagators {

SpectralPoint::SpectralPoint(Complex z) : z_(z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z.imag()) < min_imag) {
    std::ostringstream os;
    os << "Im z too small: z = " << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i needs |Im z| >= "
       << min_imag;
    throw ParameterError(os.str());
  }
}

Matrix PropagatorChain::G_inv(int nu) const {
  const auto n = G(nu).rows();
  return solve(nu, Matrix(Matrix::Identity(n, n)));
}

namespace {

Matrix shifted(const OperatorMatrix& h, Complex z) {
  Matrix m = Matrix(h);
  m.diagonal().array() -= z;
  return m;
}

}  // namespace

PropagatorChain propagator_chain(const model::BlockedHamiltonian& b, SpectralPoint z) {
  PropagatorChain c(z);
  const int n = b.spin_count();
  for (int nu = 0; nu <= n; ++nu) {
    const auto d = static_cast<Eigen::Index>(b.sector_dims[nu]);
    Matrix s = Matrix::Zero(d, d);
    if (nu > 0) {
      const OperatorMatrix& a = b.A_blocks[nu - 1];
      const Matrix a_adj = Matrix(a.adjoint());
      s = a * c.solve(nu - 1, a_adj);
    }
    Matrix g = shifted(b.H_blocks[nu], z.value()) - s;
    Eigen::PartialPivLU<Matrix> lu(g);
    const double rc = lu.rcond();
    if (!(rc > 1e-14) || !std::isfinite(rc)) {
      std::ostringstream os;
      os << "factorization of G_" << nu << "(z) failed: reciprocal condition estimate " << rc;
      throw NumericalError(os.str());
    }
    c.S_.push_back(std::move(s));
    c.G_.push_back(std::move(g));
    c.lu_.push_back(std::move(lu));
  }
  return c;
}

ResolventFactors gamma_operators(const PropagatorChain& c, const model::BlockedHamiltonian& b) {
  const int n = c.top();
  ResolventFactors f;
  f.offsets = b.sector_offsets;
  f.gamma.assign(n + 1, std::vector<Matrix>(n + 1));
  f.gamma_dag.assign(n + 1, std::vector<Matrix>(n + 1));

  std::vector<Matrix> g_inv;
  for (int nu = 0; nu <= n; ++nu) g_inv.push_back(c.G_inv(nu));

  for (int nu = 0; nu < n; ++nu) {
    const OperatorMatrix& a = b.A_blocks[nu];
    f.gamma[nu][nu + 1] = -(a * g_inv[nu]);
    f.gamma_dag[nu][nu + 1] = -(g_inv[nu] * Matrix(a.adjoint()));
  }
  // γ_{ν,ν'} = γ_{ν'-1,ν'} γ_{ν,ν'-1};  γ†_{ν,ν'} = γ†_{ν,ν+1} γ†_{ν+1,ν'}
  for (int span = 2; span <= n; ++span) {
    for (int nu = 0; nu + span <= n; ++nu) {
      const int top = nu + span;
      f.gamma[nu][top] = f.gamma[top - 1][top] * f.gamma[nu][top - 1];
      f.gamma_dag[nu][top] = f.gamma_dag[nu][nu + 1] * f.gamma_dag[nu + 1][top];
    }
  }

  const auto dim = static_cast<Eigen::Index>(b.dimension());
  f.L_inv = Matrix::Identity(dim, dim);
  f.U_inv = Matrix::Identity(dim, dim);
  f.G_inv = Matrix::Zero(dim, dim);
  auto off = [&](int nu) { return static_cast<Eigen::Index>(b.sector_offsets[nu]); };
  auto len = [&](int nu) { return static_cast<Eigen::Index>(b.sector_dims[nu]); };
  for (int nu = 0; nu <= n; ++nu) {
    f.G_inv.block(off(nu), off(nu), len(nu), len(nu)) = g_inv[nu];
    for (int top = nu + 1; top <= n; ++top) {
      f.L_inv.block(off(top), off(nu), len(top), len(nu)) = f.gamma[nu][top];
      f.U_inv.block(off(nu), off(top), len(nu), len(top)) = f.gamma_dag[nu][top];
    }
  }
  f.product = f.U_inv * f.G_inv * f.L_inv;
  return f;
}

LuFactors lu_factors(const PropagatorChain& c, const model::BlockedHamiltonian& b) {
  const int n = c.top();
  const auto dim = static_cast<Eigen::Index>(b.dimension());
  LuFactors f{Matrix::Identity(dim, dim), Matrix::Zero(dim, dim), Matrix::Identity(dim, dim)};
  auto off = [&](int nu) { return static_cast<Eigen::Index>(b.sector_offsets[nu]); };
  auto len = [&](int nu) { return static_cast<Eigen::Index>(b.sector_dims[nu]); };
  for (int nu = 0; nu <= n; ++nu) {
    f.G.block(off(nu), off(nu), len(nu), len(nu)) = c.G(nu);
    if (nu == n) continue;
    const OperatorMatrix& a = b.A_blocks[nu];
    // -γ_{ν,ν+1} = A G_ν^{-1};  -γ†_{ν,ν+1} = G_ν^{-1} A^*
    const Matrix g_inv = c.G_inv(nu);
    f.L.block(off(nu + 1), off(nu), len(nu + 1), len(nu)) = a * g_inv;
    f.U.block(off(nu), off(nu + 1), len(nu), len(nu + 1)) = g_inv * Matrix(a.adjoint());
  }
  return f;
}

Matrix resolvent_lu(const model::BlockedHamiltonian& b, SpectralPoint z) {
  return gamma_operators(propagator_chain(b, z), b).product;
}

BlockResolvent::BlockResolvent(const model::BlockedHamiltonian& b, SpectralPoint z)
    : b_(&b), chain_(propagator_chain(b, z)) {}

Vector BlockResolvent::apply_L_inv(const Vector& psi) const {
  // y_0 = ψ_0, y_{ν+1} = ψ_{ν+1} - A_{ν,ν+1} G_ν^{-1} y_ν
  Vector y = psi;
  for (int nu = 0; nu < chain_.top(); ++nu) {
    const Vector gy = chain_.solve(nu, b_->sector(y, nu));
    b_->set_sector(y, nu + 1, b_->sector(y, nu + 1) - b_->A_blocks[nu] * gy);
  }
  return y;
}

Vector BlockResolvent::apply_G_inv(const Vector& psi) const {
  Vector out(psi.size());
  for (int nu = 0; nu <= chain_.top(); ++nu) b_->set_sector(out, nu, chain_.solve(nu, b_->sector(psi, nu)));
  return out;
}

Vector BlockResolvent::apply_U_inv(const Vector& psi) const {
  // φ_N = ψ_N, φ_ν = ψ_ν - G_ν^{-1} A_{ν,ν+1}^* φ_{ν+1}
  Vector phi = psi;
  for (int nu = chain_.top() - 1; nu >= 0; --nu) {
    const Vector lifted = b_->A_blocks[nu].adjoint() * b_->sector(phi, nu + 1);
    b_->set_sector(phi, nu, b_->sector(phi, nu) - chain_.solve(nu, lifted));
  }
  return phi;
}

Vector BlockResolvent::apply_U(const Vector& psi) const {
  return psi + apply_G_inv(apply_coupling_adjoint(*b_, psi));
}

Vector BlockResolvent::apply(const Vector& psi) const {
  if (psi.size() != static_cast<Eigen::Index>(b_->dimension())) throw ParameterError("vector does not match model dimension");
  // forward sweep and sector solves share the G_ν^{-1} y_ν products
  Vector y = psi;
  Vector x(psi.size());
  for (int nu = 0; nu <= chain_.top(); ++nu) {
    const Vector gy = chain_.solve(nu, b_->sector(y, nu));
    b_->set_sector(x, nu, gy);
    if (nu < chain_.top()) b_->set_sector(y, nu + 1, b_->sector(y, nu + 1) - b_->A_blocks[nu] * gy);
  }
  return apply_U_inv(x);
}

DirectResolvent resolvent_direct(const model::BlockedHamiltonian& b, SpectralPoint z) {
  const Matrix shifted_full = shifted(b.full, z.value());
  Eigen::PartialPivLU<Matrix> lu(shifted_full);
  const double rc = lu.rcond();
  if (!(rc > 1e-14) || !std::isfinite(rc)) {
    std::ostringstream os;
    os << "direct factorization of H - z failed: reciprocal condition estimate " << rc;
    throw NumericalError(os.str());
  }
  const auto n = shifted_full.rows();
  DirectResolvent out;
  out.inverse = lu.solve(Matrix(Matrix::Identity(n, n)));
  out.residual = (shifted_full * out.inverse - Matrix::Identity(n, n)).norm();
  return out;
}

Vector domain_lift(const model::BlockedHamiltonian& b, SpectralPoint z0, const Vector& phi_tilde) {
  if (phi_tilde.size() != static_cast<Eigen::Index>(b.dimension()))
    throw ParameterError("vector does not match model dimension");
  return BlockResolvent(b, z0).apply_U_inv(phi_tilde);
}

Matrix free_sector_resolvent(const model::BlockedHamiltonian& b, int nu, SpectralPoint z) {
  const Matrix m = shifted(b.H_blocks[nu], z.value());
  return m.partialPivLu().solve(Matrix(Matrix::Identity(m.rows(), m.cols())));
}

Vector apply_coupling_adjoint(const model::BlockedHamiltonian& b, const Vector& phi) {
  return b.coupling.adjoint() * phi;
}

double second_resolvent_residual(const PropagatorChain& c, const model::BlockedHamiltonian& b, int nu) {
  const Matrix g_inv = c.G_inv(nu);
  const Matrix r0 = free_sector_resolvent(b, nu, c.z());
  const Matrix lhs = g_inv - r0;
  const Matrix rhs = g_inv * c.S(nu) * r0;
  return max_abs_diff(lhs, rhs);
}

ImplicitDomainImages implicit_domain_residual(const model::BlockedHamiltonian& b, SpectralPoint z0, const Vector& phi) {
  if (phi.size() != static_cast<Eigen::Index>(b.dimension())) throw ParameterError("vector does not match model dimension");
  const PropagatorChain c = propagator_chain(b, z0);
  const Vector a_adj_phi = apply_coupling_adjoint(b, phi);
  ImplicitDomainImages out;
  out.via_propagator = phi;
  out.via_free = phi;
  for (int nu = 0; nu <= c.top(); ++nu) {
    const Vector part = b.sector(a_adj_phi, nu);
    b.set_sector(out.via_propagator, nu, b.sector(phi, nu) + c.solve(nu, part));
    b.set_sector(out.via_free, nu, b.sector(phi, nu) + free_sector_resolvent(b, nu, z0) * part);
    out.identity_residual = std::max(out.identity_residual, second_resolvent_residual(c, b, nu));
  }
  return out;
}

}  // namespace msb::propagators
