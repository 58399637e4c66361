#include "msb/spin.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "msb/errors.hpp"

namespace msb::spin {

SpinBasis::SpinBasis(int spin_count) : n_(spin_count) {
  if (spin_count < 1) throw ParameterError("need at least one spin");
  if (spin_count > 16) throw ParameterError("spin count " + std::to_string(spin_count) + " too large for dense 2^N matrices");
  const Mask total = Mask{1} << spin_count;
  position_.assign(total, 0);
  for (int nu = 0; nu <= n_; ++nu) {
    offsets_.push_back(configs_.size());
    for (Mask m = 0; m < total; ++m) {
      if (excitations(m) == nu) {
        position_[m] = configs_.size();
        configs_.push_back(m);
      }
    }
  }
  offsets_.push_back(configs_.size());
}

int SpinBasis::excitations(Mask m) { return std::popcount(m); }

void check_params(const SpinParams& p) {
  const auto n = static_cast<Eigen::Index>(p.e.size());
  if (n == 0) throw ParameterError("no spins");
  if (static_cast<Eigen::Index>(p.g.size()) != n) throw ParameterError("e and g must have the same length");
  if (p.v.rows() != n || p.v.cols() != n) throw ParameterError("v must be an N x N matrix");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (p.v(j, j) != Complex(0.0)) throw ParameterError("v must have zero diagonal (v_jj != 0 at j=" + std::to_string(j) + ")");
    for (Eigen::Index l = j + 1; l < n; ++l) {
      const double scale = 1.0 + std::abs(p.v(j, l));
      if (std::abs(p.v(l, j) - std::conj(p.v(j, l))) > 1e-12 * scale) {
        std::ostringstream os;
        os << "v must be Hermitian (v_lj = conj(v_jl)); violated at (" << j << "," << l << ")";
        throw ParameterError(os.str());
      }
    }
  }
}

SpinHamiltonian build_spin_hamiltonian(const SpinParams& p) {
  check_params(p);
  const int n = p.spin_count();
  SpinHamiltonian k{SpinBasis(n), {}, {}, true, 0.0, {}};
  const auto& basis = k.basis;
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  k.full = Matrix::Zero(dim, dim);

  for (std::size_t col = 0; col < basis.dimension(); ++col) {
    const Mask m = basis.config(col);
    double diag = 0.0;
    for (int j = 0; j < n; ++j) diag += (m >> j & 1U) ? p.e[j] : p.g[j];
    k.full(static_cast<Eigen::Index>(col), static_cast<Eigen::Index>(col)) += diag;

    // σ⁺_j σ⁻_l: l excited, j ground
    for (int l = 0; l < n; ++l) {
      if (!(m >> l & 1U)) continue;
      for (int j = 0; j < n; ++j) {
        if (j == l || (m >> j & 1U)) continue;
        const Complex vjl = p.v(j, l);
        if (vjl == Complex(0.0)) continue;
        const Mask target = (m & ~(Mask{1} << l)) | (Mask{1} << j);
        k.full(static_cast<Eigen::Index>(basis.index_of(target)), static_cast<Eigen::Index>(col)) += vjl;
      }
    }
  }

  k.blocks = decompose_blocks(basis, k.full);
  Eigen::SelfAdjointEigenSolver<Matrix> es(k.full, Eigen::EigenvaluesOnly);
  k.min_eigenvalue = es.eigenvalues().minCoeff();
  k.nonnegative = k.min_eigenvalue >= -1e-12;
  if (!k.nonnegative) {
    std::ostringstream os;
    os << "spin Hamiltonian is not nonnegative (min eigenvalue " << k.min_eigenvalue << ")";
    k.warnings.push_back(os.str());
  }
  return k;
}

OperatorMatrix excitation_number(int spin_count) {
  SpinBasis basis(spin_count);
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  std::vector<Triplet> entries;
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const int nu = SpinBasis::excitations(basis.config(i));
    if (nu != 0) entries.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), double(nu));
  }
  OperatorMatrix out(dim, dim);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

OperatorMatrix raising(const SpinBasis& basis, int j) {
  if (j < 0 || j >= basis.spin_count()) throw ParameterError("spin index out of range");
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  std::vector<Triplet> entries;
  for (std::size_t col = 0; col < basis.dimension(); ++col) {
    const Mask m = basis.config(col);
    if (m >> j & 1U) continue;
    entries.emplace_back(static_cast<Eigen::Index>(basis.index_of(m | (Mask{1} << j))), static_cast<Eigen::Index>(col),
                         1.0);
  }
  OperatorMatrix out(dim, dim);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

std::vector<Matrix> decompose_blocks(const SpinBasis& basis, const Matrix& full) {
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  if (full.rows() != dim || full.cols() != dim) throw StructureError("spin matrix has wrong dimension");
  for (Eigen::Index c = 0; c < dim; ++c) {
    const int nc = SpinBasis::excitations(basis.config(static_cast<std::size_t>(c)));
    for (Eigen::Index r = 0; r < dim; ++r) {
      if (full(r, c) == Complex(0.0)) continue;
      const int nr = SpinBasis::excitations(basis.config(static_cast<std::size_t>(r)));
      if (nr != nc) {
        std::ostringstream os;
        os << "entry (" << r << "," << c << ") couples excitation sectors " << nr << " and " << nc
           << "; K must commute with N_exc";
        throw StructureError(os.str());
      }
    }
  }
  std::vector<Matrix> blocks;
  for (int nu = 0; nu <= basis.spin_count(); ++nu) {
    const auto b = static_cast<Eigen::Index>(basis.group_begin(nu));
    const auto s = static_cast<Eigen::Index>(basis.group_size(nu));
    blocks.emplace_back(full.block(b, b, s, s));
  }
  return blocks;
}

}  // namespace msb::spin
