#include "msb/fock.hpp"

#include <cmath>

#include "msb/errors.hpp"

namespace msb::fock {

std::size_t OccupationHash::operator()(const Occupation& n) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (int x : n) {
    h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

namespace {

// Fill occupation[pos..] with `remaining` photons, larger leading entries first.
void emit_grade(Occupation& current, std::size_t pos, int remaining, std::vector<Occupation>& out) {
  if (pos + 1 == current.size()) {
    current[pos] = remaining;
    out.push_back(current);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    current[pos] = k;
    emit_grade(current, pos + 1, remaining - k, out);
  }
  current[pos] = 0;
}

}  // namespace

FockBasis::FockBasis(std::size_t mode_count, int max_total_photons) : mode_count_(mode_count), n_max_(max_total_photons) {
  if (mode_count == 0) throw ParameterError("Fock basis needs at least one mode");
  if (max_total_photons < 0) throw ParameterError("photon truncation must be nonnegative");
  Occupation current(mode_count, 0);
  for (int g = 0; g <= n_max_; ++g) {
    grade_offsets_.push_back(states_.size());
    emit_grade(current, 0, g, states_);
    grades_.resize(states_.size(), g);
  }
  grade_offsets_.push_back(states_.size());
  lookup_.reserve(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) lookup_.emplace(states_[i], i);
}

std::optional<std::size_t> FockBasis::index_of(const Occupation& n) const {
  auto it = lookup_.find(n);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

FockBasis enumerate_basis(std::size_t mode_count, int max_total_photons) {
  return FockBasis(mode_count, max_total_photons);
}

namespace {

void require_modes(const field::DispersionGrid& g, const FockBasis& b) {
  if (g.size() != b.mode_count())
    throw ConfigError("grid has " + std::to_string(g.size()) + " modes, Fock basis has " +
                      std::to_string(b.mode_count()));
}

}  // namespace

OperatorMatrix number_operator(const field::DispersionGrid& g, const FockBasis& b) {
  require_modes(g, b);
  const auto dim = static_cast<Eigen::Index>(b.dimension());
  std::vector<Triplet> entries;
  for (std::size_t i = 0; i < b.dimension(); ++i) {
    double e = 0.0;
    const auto& n = b.state(i);
    for (std::size_t m = 0; m < n.size(); ++m) e += g.omega[m] * n[m];
    if (e != 0.0) entries.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), e);
  }
  OperatorMatrix out(dim, dim);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

OperatorMatrix photon_count(const FockBasis& b) {
  const auto dim = static_cast<Eigen::Index>(b.dimension());
  std::vector<Triplet> entries;
  for (std::size_t i = 0; i < b.dimension(); ++i)
    if (b.grade(i) != 0)
      entries.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), double(b.grade(i)));
  OperatorMatrix out(dim, dim);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

OperatorMatrix annihilation(const field::FormFactor& f, const field::DispersionGrid& g, const FockBasis& b) {
  require_modes(g, b);
  if (f.size() != g.size())
    throw ConfigError("form factor has " + std::to_string(f.size()) + " amplitudes, grid has " +
                      std::to_string(g.size()) + " modes");
  std::vector<Complex> coupling(g.size());
  for (std::size_t m = 0; m < g.size(); ++m) coupling[m] = std::sqrt(g.weights[m]) * std::conj(f.amplitudes[m]);

  const auto dim = static_cast<Eigen::Index>(b.dimension());
  std::vector<Triplet> entries;
  Occupation lowered;
  for (std::size_t col = 0; col < b.dimension(); ++col) {
    const auto& n = b.state(col);
    for (std::size_t m = 0; m < n.size(); ++m) {
      if (n[m] == 0 || coupling[m] == Complex(0.0)) continue;
      lowered = n;
      --lowered[m];
      // lowering never leaves the truncated space
      const std::size_t row = *b.index_of(lowered);
      entries.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col),
                           coupling[m] * std::sqrt(static_cast<double>(n[m])));
    }
  }
  OperatorMatrix out(dim, dim);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

OperatorMatrix creation(const field::FormFactor& f, const field::DispersionGrid& g, const FockBasis& b) {
  return OperatorMatrix(annihilation(f, g, b).adjoint());
}

double fock_scale_norm(const Vector& psi, const field::DispersionGrid& g, const FockBasis& b, double s) {
  if (psi.size() != static_cast<Eigen::Index>(b.dimension())) throw ConfigError("vector does not match Fock basis");
  const OperatorMatrix d = number_operator(g, b);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double e = d.coeff(i, i).real();
    sum += std::pow(e + 1.0, s) * std::norm(psi[i]);
  }
  return std::sqrt(sum);
}

}  // namespace msb::fock
