// fock.hpp - truncated bosonic Fock space over a discretized mode set
#pragma once

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <vector>

#include "msb/field.hpp"
#include "msb/linalg.hpp"

namespace msb::fock {

using Occupation = std::vector<int>;

struct OccupationHash {
  std::size_t operator()(const Occupation& n) const noexcept;
};

// All occupation vectors with total photon number <= n_max, graded by total
// number and descending-lexicographic inside a grade:
//   M=2, n_max=2 -> (0,0) | (1,0) (0,1) | (2,0) (1,1) (0,2)
class FockBasis {
 public:
  FockBasis(std::size_t mode_count, int max_total_photons);

  std::size_t mode_count() const { return mode_count_; }
  int max_total_photons() const { return n_max_; }
  std::size_t dimension() const { return states_.size(); }

  const Occupation& state(std::size_t i) const { return states_[i]; }
  const std::vector<Occupation>& states() const { return states_; }
  int grade(std::size_t i) const { return grades_[i]; }

  std::optional<std::size_t> index_of(const Occupation& n) const;

  // First index of grade g; grade_begin(n_max + 1) == dimension().
  std::size_t grade_begin(int g) const { return grade_offsets_[static_cast<std::size_t>(g)]; }

 private:
  std::size_t mode_count_;
  int n_max_;
  std::vector<Occupation> states_;
  std::vector<int> grades_;
  std::vector<std::size_t> grade_offsets_;
  std::unordered_map<Occupation, std::size_t, OccupationHash> lookup_;
};

FockBasis enumerate_basis(std::size_t mode_count, int max_total_photons);

// dΓ(ω): diagonal with Σ_i ω_i n_i.
OperatorMatrix number_operator(const field::DispersionGrid& g, const FockBasis& b);

// Total photon count Σ_i n_i on the diagonal.
OperatorMatrix photon_count(const FockBasis& b);

// a(f) = Σ_i sqrt(w_i) conj(f_i) a_i, antilinear in f. Lowers the grade by one.
OperatorMatrix annihilation(const field::FormFactor& f, const field::DispersionGrid& g, const FockBasis& b);

// a†(f), defined as the conjugate transpose of annihilation(f). Photons that
// would leave the truncation are dropped.
OperatorMatrix creation(const field::FormFactor& f, const field::DispersionGrid& g, const FockBasis& b);

// ||(dΓ(ω)+1)^{s/2} Ψ||
double fock_scale_norm(const Vector& psi, const field::DispersionGrid& g, const FockBasis& b, double s);

}  // namespace msb::fock
