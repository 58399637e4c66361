// spin.hpp - N two-level systems, excitation-number sectors, spin Hamiltonian K
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "msb/linalg.hpp"

namespace msb::spin {

using Mask = std::uint32_t;  // bit j set <=> spin j+1 excited

// Configurations grouped by the number of excited spins ν = 0..N, ascending
// bitmask inside each group. This "grouped order" is used for every spin
// matrix in the library.
class SpinBasis {
 public:
  explicit SpinBasis(int spin_count);

  int spin_count() const { return n_; }
  std::size_t dimension() const { return configs_.size(); }

  Mask config(std::size_t i) const { return configs_[i]; }
  const std::vector<Mask>& configs() const { return configs_; }
  std::size_t index_of(Mask m) const { return position_[m]; }

  std::size_t group_begin(int nu) const { return offsets_[static_cast<std::size_t>(nu)]; }
  std::size_t group_size(int nu) const { return offsets_[static_cast<std::size_t>(nu) + 1] - group_begin(nu); }

  static int excitations(Mask m);

 private:
  int n_;
  std::vector<Mask> configs_;
  std::vector<std::size_t> position_;
  std::vector<std::size_t> offsets_;
};

struct SpinParams {
  std::vector<double> e;  // excited energies
  std::vector<double> g;  // ground energies
  Matrix v;               // v(j,l) couples σ⁺_j σ⁻_l; Hermitian with zero diagonal

  int spin_count() const { return static_cast<int>(e.size()); }
};

struct SpinHamiltonian {
  SpinBasis basis;
  Matrix full;                // grouped order
  std::vector<Matrix> blocks;  // K_ν
  bool nonnegative = true;
  double min_eigenvalue = 0.0;
  std::vector<std::string> warnings;
};

// K = Σ_j (e_j σ⁺_jσ⁻_j + g_j σ⁻_jσ⁺_j) + Σ_{j≠l} v_jl σ⁺_jσ⁻_l
SpinHamiltonian build_spin_hamiltonian(const SpinParams& p);

// Throws ParameterError unless sizes agree and v is Hermitian with zero diagonal.
void check_params(const SpinParams& p);

// N_exc in grouped order.
OperatorMatrix excitation_number(int spin_count);

// σ⁺_j (0-based j) in grouped order.
OperatorMatrix raising(const SpinBasis& basis, int j);

// Restrictions of `full` to each popcount group. Throws StructureError naming
// the first entry that couples different groups.
std::vector<Matrix> decompose_blocks(const SpinBasis& basis, const Matrix& full);

}  // namespace msb::spin
