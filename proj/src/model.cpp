#include "msb/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "msb/errors.hpp"

namespace msb::model {

void validate(const ModelSpec& spec) {
  const auto report = field::validate_grid(spec.grid);
  if (!report.passed) {
    const auto& v = report.violations.front();
    const std::string where = v.index < spec.grid.size() ? "/field/omega/" + std::to_string(v.index) : "/field";
    const bool weight = v.reason.find("weight") != std::string::npos;
    throw ConfigError(v.reason, weight ? "/field/weights/" + std::to_string(v.index) : where);
  }
  try {
    spin::check_params(spec.spin);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what(), "/spins");
  }
  const auto n = static_cast<std::size_t>(spec.spin.spin_count());
  if (spec.form_factors.size() != n)
    throw ConfigError("expected " + std::to_string(n) + " form factors, got " + std::to_string(spec.form_factors.size()),
                      "/form_factors");
  for (std::size_t j = 0; j < n; ++j)
    if (spec.form_factors[j].size() != spec.grid.size())
      throw ConfigError("form factor has " + std::to_string(spec.form_factors[j].size()) + " amplitudes, grid has " +
                            std::to_string(spec.grid.size()),
                        "/form_factors/" + std::to_string(j));
  if (spec.n_max < 0) throw ConfigError("photon truncation must be nonnegative", "/n_max");
}

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (Eigen::Index ka = 0; ka < a.outerSize(); ++ka)
    for (OperatorMatrix::InnerIterator ia(a, ka); ia; ++ia)
      for (Eigen::Index kb = 0; kb < b.outerSize(); ++kb)
        for (OperatorMatrix::InnerIterator ib(b, kb); ib; ++ib)
          entries.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(), ia.value() * ib.value());
  OperatorMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

namespace {

OperatorMatrix identity(std::size_t n) {
  OperatorMatrix id(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  id.setIdentity();
  return id;
}

OperatorMatrix slice(const OperatorMatrix& m, std::size_t r, std::size_t c, std::size_t rows, std::size_t cols) {
  return OperatorMatrix(m.block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c),
                                static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)));
}

bool same(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const OperatorMatrix d = a - b;
  for (Eigen::Index k = 0; k < d.outerSize(); ++k)
    for (OperatorMatrix::InnerIterator it(d, k); it; ++it)
      if (it.value() != Complex(0.0)) return false;
  return true;
}

}  // namespace

BlockedHamiltonian assemble(const ModelSpec& spec) {
  validate(spec);
  spin::SpinHamiltonian k = spin::build_spin_hamiltonian(spec.spin);
  fock::FockBasis fb = fock::enumerate_basis(spec.grid.size(), spec.n_max);
  BlockedHamiltonian b{std::move(k), std::move(fb), {}, {}, {}, {}, {}, {}, {}, {}, {}};

  const int n = b.spin_count();
  const std::size_t dim_f = b.fock.dimension();
  const std::size_t dim_s = b.spin.basis.dimension();

  b.free = kron(b.spin.full.sparseView(), identity(dim_f)) + kron(identity(dim_s), fock::number_operator(spec.grid, b.fock));

  b.coupling = OperatorMatrix(static_cast<Eigen::Index>(dim_s * dim_f), static_cast<Eigen::Index>(dim_s * dim_f));
  for (int j = 0; j < n; ++j)
    b.coupling += kron(spin::raising(b.spin.basis, j), fock::annihilation(spec.form_factors[j], spec.grid, b.fock));
  b.coupling.prune(Complex(0.0));

  b.full = b.free + b.coupling + OperatorMatrix(b.coupling.adjoint());

  for (int nu = 0; nu <= n; ++nu) {
    b.sector_offsets.push_back(b.spin.basis.group_begin(nu) * dim_f);
    b.sector_dims.push_back(b.spin.basis.group_size(nu) * dim_f);
  }
  b.sector_offsets.push_back(dim_s * dim_f);

  for (int nu = 0; nu <= n; ++nu) {
    const auto o = b.sector_offsets[nu];
    const auto d = b.sector_dims[nu];
    b.H_blocks.push_back(slice(b.free, o, o, d, d));
    if (nu < n) b.A_blocks.push_back(slice(b.coupling, b.sector_offsets[nu + 1], o, b.sector_dims[nu + 1], d));
  }

  b.total_excitation.resize(b.dimension());
  b.exact_region.resize(b.dimension());
  for (std::size_t i = 0; i < b.dimension(); ++i) {
    const int spins = spin::SpinBasis::excitations(b.spin.basis.config(i / dim_f));
    b.total_excitation[i] = spins + b.fock.grade(i % dim_f);
    b.exact_region[i] = b.total_excitation[i] <= spec.n_max;
  }
  return b;
}

int BlockedHamiltonian::sector_of(std::size_t index) const {
  const auto it = std::upper_bound(sector_offsets.begin(), sector_offsets.end(), index);
  return static_cast<int>(it - sector_offsets.begin()) - 1;
}

Vector BlockedHamiltonian::sector(const Vector& v, int nu) const {
  return v.segment(static_cast<Eigen::Index>(sector_offsets[nu]), static_cast<Eigen::Index>(sector_dims[nu]));
}

void BlockedHamiltonian::set_sector(Vector& v, int nu, const Vector& part) const {
  v.segment(static_cast<Eigen::Index>(sector_offsets[nu]), static_cast<Eigen::Index>(sector_dims[nu])) = part;
}

std::string BlockedHamiltonian::label(std::size_t index) const {
  const std::size_t dim_f = fock.dimension();
  const spin::Mask m = spin.basis.config(index / dim_f);
  std::ostringstream os;
  for (int j = 0; j < spin_count(); ++j) os << (j ? "," : "") << ((m >> j & 1U) ? 'e' : 'g');
  os << '|';
  const auto& occ = fock.state(index % dim_f);
  for (std::size_t i = 0; i < occ.size(); ++i) os << (i ? "," : "") << occ[i];
  return os.str();
}

StructureReport verify_structure(const BlockedHamiltonian& b) {
  StructureReport r;
  r.sector_count = b.sector_dims.size();
  auto fail = [&](std::string check, int br, int bc, std::string detail) {
    r.passed = false;
    r.violations.push_back({std::move(check), br, bc, std::move(detail)});
  };

  std::set<std::pair<int, int>> bad_blocks;
  std::set<std::pair<int, int>> leaking;
  for (Eigen::Index k = 0; k < b.full.outerSize(); ++k) {
    for (OperatorMatrix::InnerIterator it(b.full, k); it; ++it) {
      if (it.value() == Complex(0.0)) continue;
      const auto row = static_cast<std::size_t>(it.row());
      const auto col = static_cast<std::size_t>(it.col());
      const int sr = b.sector_of(row);
      const int sc = b.sector_of(col);
      if (std::abs(sr - sc) > 1) bad_blocks.emplace(sr, sc);
      if (b.exact_region[row] && b.exact_region[col] && b.total_excitation[row] != b.total_excitation[col])
        leaking.emplace(sr, sc);
    }
  }
  for (const auto& [sr, sc] : bad_blocks) {
    std::ostringstream os;
    os << "block (" << sr << "," << sc << ") must vanish: sectors differ by more than one excitation";
    fail("tridiagonal", sr, sc, os.str());
  }
  for (const auto& [sr, sc] : leaking) {
    std::ostringstream os;
    os << "block (" << sr << "," << sc << ") couples different total excitation numbers inside the exact region";
    fail("excitation_conservation", sr, sc, os.str());
  }

  if (!same(b.full, OperatorMatrix(b.full.adjoint()))) fail("hermitian", -1, -1, "full matrix is not Hermitian");

  const int n = static_cast<int>(b.H_blocks.size()) - 1;
  for (int nu = 0; nu <= n; ++nu) {
    const auto o = b.sector_offsets[nu];
    const auto d = b.sector_dims[nu];
    if (!same(slice(b.full, o, o, d, d), b.H_blocks[nu]))
      fail("block_consistency", nu, nu, "diagonal block (" + std::to_string(nu) + "," + std::to_string(nu) + ") differs from H_" + std::to_string(nu));
    if (nu == n) continue;
    const auto o1 = b.sector_offsets[nu + 1];
    const auto d1 = b.sector_dims[nu + 1];
    const std::string a_name = "A_{" + std::to_string(nu) + "," + std::to_string(nu + 1) + "}";
    if (!same(slice(b.full, o1, o, d1, d), b.A_blocks[nu]))
      fail("block_consistency", nu + 1, nu,
           "block (" + std::to_string(nu + 1) + "," + std::to_string(nu) + ") differs from " + a_name);
    if (!same(slice(b.full, o, o1, d, d1), OperatorMatrix(b.A_blocks[nu].adjoint())))
      fail("block_consistency", nu, nu + 1,
           "block (" + std::to_string(nu) + "," + std::to_string(nu + 1) + ") differs from the adjoint of " + a_name);
  }
  return r;
}

}  // namespace msb::model
