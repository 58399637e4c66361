// field.hpp - discretized single-particle space, form factors and UV cutoffs
#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "msb/linalg.hpp"

namespace msb::field {

// Quadrature realization of the single-particle measure space: one entry per
// mode. Construction does not validate; call validate_grid() (or
// DispersionGrid::checked) before building operators on it.
struct DispersionGrid {
  std::vector<double> modes;    // k_i
  std::vector<double> weights;  // w_i > 0
  std::vector<double> omega;    // ω_i >= m
  double mass_gap = 1.0;        // m > 0

  std::size_t size() const { return omega.size(); }

  // Throws ConfigError naming the first violation.
  static DispersionGrid checked(std::vector<double> modes, std::vector<double> weights, std::vector<double> omega,
                                double mass_gap);
};

struct FormFactor {
  std::vector<Complex> amplitudes;

  std::size_t size() const { return amplitudes.size(); }
};

struct GridViolation {
  std::size_t index;
  std::string reason;
};

struct GridReport {
  bool passed = true;
  std::vector<GridViolation> violations;  // index == size() marks a grid-wide problem
};

GridReport validate_grid(const DispersionGrid& g);

// sqrt(Σ_i w_i ω_i^s |f_i|²)
double norm_s(const FormFactor& f, const DispersionGrid& g, double s);

// Σ_i w_i conj(f_i) h_i
Complex inner(const FormFactor& f, const FormFactor& h, const DispersionGrid& g);

FormFactor operator-(const FormFactor& a, const FormFactor& b);

// member(Λ) = profile on modes with ω_i <= Λ, zero above.
struct CutoffFamily {
  std::function<Complex(double k, double omega)> profile;
  std::vector<double> cutoffs;  // strictly ascending

  // Family whose profile is a fixed amplitude list on a given grid.
  static CutoffFamily from_form_factor(const FormFactor& f, const DispersionGrid& g, std::vector<double> cutoffs);
};

FormFactor cutoff_member(const CutoffFamily& c, const DispersionGrid& g, double lambda);

// Same truncation applied directly to an amplitude list.
FormFactor truncate(const FormFactor& f, const DispersionGrid& g, double lambda);

// ω_i = 2^i for i = 0..octaves, w_i = ln2 · ω_i^(measure_exponent+1): a
// log-spaced grid carrying the density ω^measure_exponent dω.
DispersionGrid geometric_grid(int octaves, double measure_exponent, double mass_gap = 1.0);

// f_i = scale · ω_i^(-alpha)
FormFactor power_law(const DispersionGrid& g, double alpha, Complex scale = 1.0);

}  // namespace msb::field
