#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "msb/errors.hpp"
#include "msb/experiments.hpp"
#include "parallel.hpp"

namespace msb::experiments {

using propagators::SpectralPoint;

namespace {

struct PointResult {
  std::vector<Check> checks;
  Matrix resolvent;
};

Matrix random_probes(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  Matrix p(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) p(r, c) = Complex(normal(rng), normal(rng));
    p.col(c).normalize();
  }
  return p;
}

Check make(std::string name, Complex z, int sector, double value, double tol, bool passed, std::string detail = "") {
  Check c;
  c.name = std::move(name);
  c.z = z;
  c.sector = sector;
  c.value = value;
  c.tolerance = tol;
  c.passed = passed;
  c.detail = std::move(detail);
  return c;
}

PointResult check_point(const model::BlockedHamiltonian& b, Complex zv, const Tolerances& tol, std::uint64_t seed) {
  PointResult out;
  auto& checks = out.checks;
  SpectralPoint z(zv);
  auto chain = propagators::propagator_chain(b, z);
  auto chain_bar = propagators::propagator_chain(b, z.conj());
  std::mt19937_64 rng(seed);
  const auto probes = static_cast<Eigen::Index>(tol.random_vectors);
  const double im = z.imag();

  for (int nu = 0; nu <= chain.top(); ++nu) {
    const Matrix& S = chain.S(nu);
    const Matrix& G = chain.G(nu);
    Matrix P = random_probes(rng, G.rows(), probes);
    Matrix SP = S * P, GP = G * P, GiP = chain.solve(nu, P);

    double herglotz = std::numeric_limits<double>::infinity();
    double dissipative = -std::numeric_limits<double>::infinity();
    double inv_ratio = 0.0;
    for (Eigen::Index c = 0; c < probes; ++c) {
      herglotz = std::min(herglotz, P.col(c).dot(SP.col(c)).imag() / im);
      dissipative = std::max(dissipative, P.col(c).dot(GP.col(c)).imag() / im + P.col(c).squaredNorm());
      inv_ratio = std::max(inv_ratio, GiP.col(c).norm());
    }
    checks.push_back(make("herglotz_sign", zv, nu, herglotz, tol.sign_slack, herglotz >= -tol.sign_slack,
                          "min Im<psi,S psi>/Im z over unit probes"));
    checks.push_back(make("dissipative_bound", zv, nu, dissipative, tol.sign_slack, dissipative <= tol.sign_slack,
                          "max Im<psi,G psi>/Im z + |psi|^2 over unit probes"));

    Eigen::BDCSVD<Matrix> svd(chain.G_inv(nu));
    double sigma = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    double excess = std::max(inv_ratio, sigma) - 1.0 / std::abs(im);
    std::ostringstream d;
    d.precision(17);
    d << "probe max " << inv_ratio << ", largest singular value " << sigma << ", bound " << 1.0 / std::abs(im);
    checks.push_back(make("inverse_norm_bound", zv, nu, excess, tol.sign_slack, excess <= tol.sign_slack, d.str()));

    double s_sym = max_abs_diff(S.adjoint(), chain_bar.S(nu));
    double g_sym = max_abs_diff(G.adjoint(), chain_bar.G(nu));
    checks.push_back(make("self_energy_symmetry", zv, nu, s_sym, tol.symmetry_abs, s_sym <= tol.symmetry_abs,
                          "max |S(z)* - S(conj z)|"));
    checks.push_back(make("propagator_symmetry", zv, nu, g_sym, tol.symmetry_abs, g_sym <= tol.symmetry_abs,
                          "max |G(z)* - G(conj z)|"));

    double second = propagators::second_resolvent_residual(chain, b, nu);
    checks.push_back(make("second_resolvent_identity", zv, nu, second, tol.second_resolvent_abs,
                          second <= tol.second_resolvent_abs, "max |G^-1 - R0 - G^-1 S R0|"));
  }

  const Matrix H = Matrix(b.full);
  const Matrix shifted = H - zv * Matrix::Identity(H.rows(), H.cols());

  auto lu = propagators::lu_factors(chain, b);
  double lu_rel = max_abs_diff(lu.L * lu.G * lu.U, shifted) / std::max(shifted.cwiseAbs().maxCoeff(), 1e-300);
  checks.push_back(make("lu_reconstruction", zv, -1, lu_rel, tol.lu_rel, lu_rel <= tol.lu_rel,
                        "max |L G U - (H - z)| / max |H - z|"));

  Matrix R = propagators::gamma_operators(chain, b).product;
  auto direct = propagators::resolvent_direct(b, z);
  double oracle = relative_frobenius(R, direct.inverse);
  checks.push_back(make("oracle_equivalence", zv, -1, oracle, tol.oracle_rel, oracle <= tol.oracle_rel,
                        "|R_lu - R_direct|_F / |R_direct|_F; block-LU and direct resolvent coincide"));

  const double dim = static_cast<double>(b.dimension());
  double residual = direct.residual / dim;
  checks.push_back(make("direct_residual", zv, -1, residual, tol.direct_residual_per_dim,
                        residual <= tol.direct_residual_per_dim, "|(H - z) X - I|_F / dim"));

  Matrix R_bar = propagators::gamma_operators(chain_bar, b).product;
  double adj = relative_frobenius(R.adjoint(), R_bar);
  checks.push_back(make("resolvent_adjoint", zv, -1, adj, tol.resolvent_identity_rel, adj <= tol.resolvent_identity_rel,
                        "|R(z)* - R(conj z)|_F / |R(conj z)|_F"));

  propagators::BlockResolvent matrix_free(b, z);
  Matrix P = random_probes(rng, R.rows(), std::min<Eigen::Index>(probes, 16));
  double apply_err = 0.0;
  for (Eigen::Index c = 0; c < P.cols(); ++c) {
    Vector x = matrix_free.apply(P.col(c));
    Vector y = R * P.col(c);
    apply_err = std::max(apply_err, (x - y).norm() / std::max(y.norm(), 1e-300));
  }
  checks.push_back(make("apply_path_consistency", zv, -1, apply_err, tol.oracle_rel, apply_err <= tol.oracle_rel,
                        "matrix-free sweep vs dense factor product on probes"));

  out.resolvent = std::move(R);
  return out;
}

}  // namespace

Json check_to_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  if (c.z) j["z"] = {c.z->real(), c.z->imag()};
  if (c.w) j["w"] = {c.w->real(), c.w->imag()};
  if (c.sector >= 0) j["sector"] = c.sector;
  j["passed"] = c.passed;
  j["value"] = c.value;
  j["tolerance"] = c.tolerance;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

VerificationReport run_verification(const StudyConfig& cfg, const RunOptions& opts) {
  return run_verification(cfg, model::assemble(cfg.model), opts);
}

VerificationReport run_verification(const StudyConfig& cfg, const model::BlockedHamiltonian& b,
                                    const RunOptions& opts) {
  if (cfg.z_points.empty()) throw ConfigError("no evaluation points", "/z_points");
  for (auto z : cfg.z_points) SpectralPoint{z};

  VerificationReport rep;
  rep.source = cfg.source;
  rep.dimension = b.dimension();
  rep.sector_dims = b.sector_dims;
  rep.warnings = b.spin.warnings;
  rep.tolerances = cfg.tolerances.entries();
  rep.structure = model::verify_structure(b);

  Check structure;
  structure.name = "structure";
  structure.passed = rep.structure.passed;
  structure.value = static_cast<double>(rep.structure.violations.size());
  for (const auto& v : rep.structure.violations) {
    if (!structure.detail.empty()) structure.detail += "; ";
    structure.detail += v.check + " at block (" + std::to_string(v.block_row) + "," + std::to_string(v.block_col) +
                        "): " + v.detail;
  }
  if (structure.detail.empty()) structure.detail = "tridiagonal, hermitian, block-consistent, excitation-conserving";
  rep.checks.push_back(structure);

  std::vector<PointResult> results(cfg.z_points.size());
  detail::parallel_for(results.size(), opts.threads, [&](std::size_t k) {
    results[k] = check_point(b, cfg.z_points[k], cfg.tolerances, opts.seed + 7919 * k);
  });
  for (auto& r : results)
    for (auto& c : r.checks) rep.checks.push_back(std::move(c));

  for (std::size_t a = 0; a < results.size(); ++a) {
    for (std::size_t c = a + 1; c < results.size(); ++c) {
      Complex z = cfg.z_points[a], w = cfg.z_points[c];
      if (z == w) continue;
      const Matrix& Rz = results[a].resolvent;
      const Matrix& Rw = results[c].resolvent;
      Matrix lhs = Rz - Rw;
      Matrix rhs = (z - w) * (Rz * Rw);
      double rel = relative_frobenius(rhs, lhs);
      Check chk = make("first_resolvent_identity", z, -1, rel, cfg.tolerances.resolvent_identity_rel,
                       rel <= cfg.tolerances.resolvent_identity_rel, "|R(z) - R(w) - (z - w) R(z) R(w)|_F / |R(z) - R(w)|_F");
      chk.w = w;
      rep.checks.push_back(chk);
    }
  }
  return rep;
}

bool VerificationReport::passed() const { return failures() == 0; }

std::size_t VerificationReport::failures() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.passed; }));
}

ResolveReport run_resolve(const StudyConfig& cfg, const RunOptions& opts) {
  if (cfg.z_points.empty()) throw ConfigError("no evaluation points", "/z_points");
  for (auto z : cfg.z_points) SpectralPoint{z};
  auto b = model::assemble(cfg.model);
  ResolveReport rep;
  rep.source = cfg.source;
  rep.tolerance = cfg.tolerances.oracle_rel;
  for (std::size_t i = 0; i < b.dimension(); ++i) rep.labels.push_back(b.label(i));
  rep.entries.resize(cfg.z_points.size());
  detail::parallel_for(rep.entries.size(), opts.threads, [&](std::size_t k) {
    SpectralPoint z(cfg.z_points[k]);
    Matrix R = propagators::resolvent_lu(b, z);
    auto direct = propagators::resolvent_direct(b, z);
    auto& e = rep.entries[k];
    e.z = z.value();
    e.lu_vs_direct = relative_frobenius(R, direct.inverse);
    e.direct_residual = direct.residual;
    for (Eigen::Index i = 0; i < R.rows(); ++i) e.diagonal.push_back(R(i, i));
  });
  return rep;
}

bool ResolveReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [&](const ResolveEntry& e) { return e.lu_vs_direct <= tolerance; });
}

}  // namespace msb::experiments
