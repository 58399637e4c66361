// model.hpp - truncated multi-spin-boson Hamiltonian and its sector blocks
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "msb/field.hpp"
#include "msb/fock.hpp"
#include "msb/linalg.hpp"
#include "msb/spin.hpp"

namespace msb::model {

struct ModelSpec {
  spin::SpinParams spin;
  field::DispersionGrid grid;
  std::vector<field::FormFactor> form_factors;  // one per spin
  int n_max = 0;                                 // photon truncation
};

// Throws ConfigError naming the offending field.
void validate(const ModelSpec& spec);

// Full space ordering: sector ν = 0..N, then spin configuration (grouped
// order), then Fock state. Global index = grouped_spin_index * dim(F) + fock_index.
struct BlockedHamiltonian {
  spin::SpinHamiltonian spin;
  fock::FockBasis fock;

  std::vector<std::size_t> sector_dims;     // dim H^(ν), ν = 0..N
  std::vector<std::size_t> sector_offsets;  // N + 2 entries, last == dimension()

  std::vector<OperatorMatrix> H_blocks;  // H_ν = K_ν ⊗ I + I ⊗ dΓ(ω)
  std::vector<OperatorMatrix> A_blocks;  // A_{ν,ν+1}: H^(ν) -> H^(ν+1)

  OperatorMatrix free;      // K ⊗ I + I ⊗ dΓ(ω)
  OperatorMatrix coupling;  // A = Σ_j σ⁺_j ⊗ a(f_j)
  OperatorMatrix full;      // free + A + A*

  std::vector<int> total_excitation;  // spin excitations + photons, per basis index
  std::vector<bool> exact_region;     // total_excitation <= n_max

  int spin_count() const { return spin.basis.spin_count(); }
  std::size_t dimension() const { return sector_offsets.back(); }
  int sector_of(std::size_t index) const;

  // Restriction of a full-space vector to sector ν, and its inverse embedding.
  Vector sector(const Vector& v, int nu) const;
  void set_sector(Vector& v, int nu, const Vector& part) const;

  // "(spin mask, occupation)" label for reports, e.g. "e,g|1,0".
  std::string label(std::size_t index) const;
};

BlockedHamiltonian assemble(const ModelSpec& spec);

struct StructureViolation {
  std::string check;  // "tridiagonal", "hermitian", "block_consistency", "excitation_conservation"
  int block_row = -1;
  int block_col = -1;
  std::string detail;
};

struct StructureReport {
  bool passed = true;
  std::size_t sector_count = 0;
  std::vector<StructureViolation> violations;
};

StructureReport verify_structure(const BlockedHamiltonian& b);

// Kronecker product of sparse matrices.
OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b);

}  // namespace msb::model
