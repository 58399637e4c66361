#include <algorithm>
#include <cmath>
#include <limits>

#include "msb/errors.hpp"
#include "msb/experiments.hpp"
#include "parallel.hpp"

namespace msb::experiments {

using propagators::SpectralPoint;

namespace {

double combined_norm(const std::vector<field::FormFactor>& f, const field::DispersionGrid& g, double s) {
  double sum = 0.0;
  for (const auto& fj : f) sum += std::pow(field::norm_s(fj, g, s), 2);
  return std::sqrt(sum);
}

double combined_gap(const std::vector<field::FormFactor>& a, const std::vector<field::FormFactor>& b,
                    const field::DispersionGrid& g, double s) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) sum += std::pow(field::norm_s(a[j] - b[j], g, s), 2);
  return std::sqrt(sum);
}

double ratio_of(double num, double den) {
  if (den > 0.0) return num / den;
  return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

ConvergenceReport run_convergence(const StudyConfig& cfg, const RunOptions& opts) {
  if (cfg.cutoffs.size() < 3)
    throw ParameterError("convergence study needs at least 3 cutoffs, got " + std::to_string(cfg.cutoffs.size()));
  if (cfg.z_points.empty()) throw ConfigError("no evaluation points", "/z_points");
  for (std::size_t i = 1; i < cfg.cutoffs.size(); ++i)
    if (!(cfg.cutoffs[i] > cfg.cutoffs[i - 1])) throw ParameterError("cutoffs must be strictly ascending");
  for (auto z : cfg.z_points) SpectralPoint{z};

  const auto& grid = cfg.model.grid;
  const std::size_t K = cfg.cutoffs.size();
  const std::size_t nz = cfg.z_points.size();
  const Tolerances& tol = cfg.tolerances;

  // Model index K is the reference (untruncated profile).
  std::vector<model::ModelSpec> specs(K + 1, cfg.model);
  for (std::size_t i = 0; i < K; ++i)
    for (auto& f : specs[i].form_factors) f = field::truncate(f, grid, cfg.cutoffs[i]);

  std::vector<model::BlockedHamiltonian> models;
  models.reserve(K + 1);
  for (const auto& s : specs) models.push_back(model::assemble(s));

  std::vector<Matrix> R(nz * (K + 1));
  detail::parallel_for(R.size(), opts.threads, [&](std::size_t t) {
    R[t] = propagators::resolvent_lu(models[t % (K + 1)], SpectralPoint(cfg.z_points[t / (K + 1)]));
  });
  auto resolvent = [&](std::size_t zi, std::size_t mi) -> const Matrix& { return R[zi * (K + 1) + mi]; };

  // All unordered pairs of models, reference included; the pairs (i, K) are the rows.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a <= K; ++a)
    for (std::size_t b = a + 1; b <= K; ++b) pairs.emplace_back(a, b);
  std::vector<PowerIterationResult> norms(nz * pairs.size());
  detail::parallel_for(norms.size(), opts.threads, [&](std::size_t t) {
    auto [a, b] = pairs[t % pairs.size()];
    std::size_t zi = t / pairs.size();
    norms[t] = operator_norm(resolvent(zi, a) - resolvent(zi, b), tol.power_rel, static_cast<int>(tol.power_max_iter));
  });

  ConvergenceReport rep;
  rep.source = cfg.source;
  rep.cutoffs = cfg.cutoffs;
  rep.tolerances = tol.entries();
  rep.reference_norm0 = combined_norm(cfg.model.form_factors, grid, 0.0);
  rep.reference_norm_minus1 = combined_norm(cfg.model.form_factors, grid, -1.0);

  for (std::size_t zi = 0; zi < nz; ++zi) {
    ConvergenceSeries series;
    series.z = cfg.z_points[zi];
    bool all_converged = true;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      auto [a, b] = pairs[p];
      const auto& pr = norms[zi * pairs.size() + p];
      all_converged = all_converged && pr.converged;
      double den = combined_gap(specs[a].form_factors, specs[b].form_factors, grid, -1.0);
      series.cauchy_constant = std::max(series.cauchy_constant, ratio_of(pr.value, den));
      if (b != K) continue;
      ConvergenceRow row;
      row.lambda = cfg.cutoffs[a];
      row.z = series.z;
      row.norm0_gap = combined_gap(specs[a].form_factors, cfg.model.form_factors, grid, 0.0);
      row.norm_minus1_gap = den;
      row.resolvent_gap = pr.value;
      row.ratio = ratio_of(pr.value, den);
      row.member_norm0 = combined_norm(specs[a].form_factors, grid, 0.0);
      row.member_norm_minus1 = combined_norm(specs[a].form_factors, grid, -1.0);
      row.power_iterations = pr.iterations;
      row.power_converged = pr.converged;
      series.rows.push_back(row);
    }
    // pairs are ordered by first index, so rows already follow the cutoffs
    std::vector<double> ratios;
    for (std::size_t i = 0; i < series.rows.size(); ++i) {
      const auto& r = series.rows[i];
      if (r.norm_minus1_gap > 0.0) ratios.push_back(r.ratio);
      if (i == 0) continue;
      double prev = series.rows[i - 1].resolvent_gap;
      if (r.resolvent_gap > prev + tol.monotone_slack) series.non_increasing = false;
      if (!(r.resolvent_gap < prev)) series.strictly_decreasing = false;
    }
    series.ratio_median = median(ratios);

    Check mono;
    mono.name = "gap_monotone";
    mono.z = series.z;
    mono.tolerance = tol.monotone_slack;
    mono.passed = series.non_increasing;
    for (std::size_t i = 1; i < series.rows.size(); ++i)
      mono.value = std::max(mono.value, series.rows[i].resolvent_gap - series.rows[i - 1].resolvent_gap);
    mono.detail = "largest increase of the resolvent gap between consecutive cutoffs";
    rep.checks.push_back(mono);

    Check cauchy;
    cauchy.name = "cauchy_constant";
    cauchy.z = series.z;
    cauchy.value = series.cauchy_constant;
    cauchy.tolerance = std::numeric_limits<double>::infinity();
    cauchy.passed = std::isfinite(series.cauchy_constant);
    cauchy.detail = "max over model pairs of |R_a - R_b| / |f_a - f_b|_-1";
    rep.checks.push_back(cauchy);

    Check power;
    power.name = "power_iteration_converged";
    power.z = series.z;
    power.tolerance = tol.power_rel;
    power.passed = all_converged;
    power.value = all_converged ? 0.0 : 1.0;
    power.detail = "every operator-norm estimate met the relative stopping rule";
    rep.checks.push_back(power);

    rep.series.push_back(std::move(series));
  }
  return rep;
}

bool ConvergenceReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

}  // namespace msb::experiments
