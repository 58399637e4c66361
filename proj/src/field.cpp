#include "msb/field.hpp"

#include <cmath>
#include <sstream>

#include "msb/errors.hpp"

namespace msb::field {

DispersionGrid DispersionGrid::checked(std::vector<double> modes, std::vector<double> weights,
                                       std::vector<double> omega, double mass_gap) {
  DispersionGrid g{std::move(modes), std::move(weights), std::move(omega), mass_gap};
  const GridReport report = validate_grid(g);
  if (!report.passed) {
    const auto& v = report.violations.front();
    throw ConfigError("invalid dispersion grid at index " + std::to_string(v.index) + ": " + v.reason);
  }
  return g;
}

GridReport validate_grid(const DispersionGrid& g) {
  GridReport r;
  const std::size_t n = g.omega.size();
  auto fail = [&](std::size_t i, std::string why) {
    r.passed = false;
    r.violations.push_back({i, std::move(why)});
  };
  if (n == 0) fail(0, "grid has no modes");
  if (g.modes.size() != n || g.weights.size() != n)
    fail(n, "modes, weights and omega must have equal length");
  if (!(g.mass_gap > 0.0) || !std::isfinite(g.mass_gap))
    fail(n, "mass gap must be strictly positive (omega >= m > 0)");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(g.omega[i]) || g.omega[i] < g.mass_gap || g.omega[i] <= 0.0) {
      std::ostringstream os;
      os << "omega = " << g.omega[i];
      if (g.omega[i] <= 0.0) os << " is not strictly positive (omega >= m > 0 required)";
      else os << " below mass gap " << g.mass_gap << " (omega >= m > 0 required)";
      fail(i, os.str());
    }
  }
  for (std::size_t i = 0; i < g.weights.size(); ++i) {
    if (!(g.weights[i] > 0.0) || !std::isfinite(g.weights[i])) {
      std::ostringstream os;
      os << "weight = " << g.weights[i] << " is not positive";
      fail(i, os.str());
    }
  }
  return r;
}

namespace {

void require_compatible(const FormFactor& f, const DispersionGrid& g) {
  if (f.size() != g.size() || g.weights.size() != g.size())
    throw ConfigError("form factor has " + std::to_string(f.size()) + " amplitudes, grid has " +
                      std::to_string(g.size()) + " modes");
}

}  // namespace

double norm_s(const FormFactor& f, const DispersionGrid& g, double s) {
  require_compatible(f, g);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += g.weights[i] * std::pow(g.omega[i], s) * std::norm(f.amplitudes[i]);
  return std::sqrt(sum);
}

Complex inner(const FormFactor& f, const FormFactor& h, const DispersionGrid& g) {
  require_compatible(f, g);
  require_compatible(h, g);
  Complex sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += g.weights[i] * std::conj(f.amplitudes[i]) * h.amplitudes[i];
  return sum;
}

FormFactor operator-(const FormFactor& a, const FormFactor& b) {
  if (a.size() != b.size()) throw ConfigError("form factor length mismatch");
  FormFactor out;
  out.amplitudes.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.amplitudes[i] = a.amplitudes[i] - b.amplitudes[i];
  return out;
}

CutoffFamily CutoffFamily::from_form_factor(const FormFactor& f, const DispersionGrid& g, std::vector<double> cutoffs) {
  require_compatible(f, g);
  // Profile looked up by mode label; grids may repeat labels only with equal amplitudes.
  auto modes = g.modes;
  auto amps = f.amplitudes;
  CutoffFamily c;
  c.cutoffs = std::move(cutoffs);
  c.profile = [modes = std::move(modes), amps = std::move(amps)](double k, double) -> Complex {
    for (std::size_t i = 0; i < modes.size(); ++i)
      if (modes[i] == k) return amps[i];
    throw ParameterError("cutoff profile evaluated at unknown mode");
  };
  return c;
}

FormFactor cutoff_member(const CutoffFamily& c, const DispersionGrid& g, double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("cutoff must be positive, got " + std::to_string(lambda));
  FormFactor out;
  out.amplitudes.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    out.amplitudes[i] = g.omega[i] <= lambda ? c.profile(g.modes[i], g.omega[i]) : Complex(0.0);
  return out;
}

FormFactor truncate(const FormFactor& f, const DispersionGrid& g, double lambda) {
  require_compatible(f, g);
  if (!(lambda > 0.0)) throw ParameterError("cutoff must be positive, got " + std::to_string(lambda));
  FormFactor out = f;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.omega[i] > lambda) out.amplitudes[i] = 0.0;
  return out;
}

DispersionGrid geometric_grid(int octaves, double measure_exponent, double mass_gap) {
  if (octaves < 0) throw ParameterError("octaves must be nonnegative");
  DispersionGrid g;
  g.mass_gap = mass_gap;
  for (int i = 0; i <= octaves; ++i) {
    const double w = std::ldexp(1.0, i);
    g.modes.push_back(w);
    g.omega.push_back(w);
    g.weights.push_back(std::log(2.0) * std::pow(w, measure_exponent + 1.0));
  }
  return g;
}

FormFactor power_law(const DispersionGrid& g, double alpha, Complex scale) {
  FormFactor f;
  for (double w : g.omega) f.amplitudes.push_back(scale * std::pow(w, -alpha));
  return f;
}

}  // namespace msb::field
