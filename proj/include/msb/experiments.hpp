// experiments.hpp - study configuration, verification suite, UV-cutoff
// convergence study and report emission
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "msb/model.hpp"
#include "msb/propagators.hpp"

namespace msb::experiments {

using Json = nlohmann::ordered_json;

// Named thresholds; every entry can be overridden from the config's
// "tolerances" object or with --tol name=value.
struct Tolerances {
  double oracle_rel = 1e-10;               // resolvent_lu vs resolvent_direct, relative Frobenius
  double lu_rel = 1e-11;                   // L G U vs H - z, relative entrywise
  double sign_slack = 1e-12;               // Herglotz / dissipative / inverse-norm slack
  double symmetry_abs = 1e-13;             // S(z)* = S(z̄), G(z)* = G(z̄), entrywise
  double resolvent_identity_rel = 1e-10;   // R(z)* = R(z̄) and first resolvent identity
  double second_resolvent_abs = 1e-11;     // second resolvent identity per sector
  double direct_residual_per_dim = 1e-12;  // ||(H - z) X - I||_F / dim
  double monotone_slack = 1e-12;           // convergence gap monotonicity
  double power_rel = 1e-8;                 // power-iteration stopping rule
  double power_max_iter = 10000;
  double random_vectors = 1000;            // probes per sector and z

  void set(const std::string& name, double value);  // ConfigError on unknown names
  std::vector<std::pair<std::string, double>> entries() const;
};

struct StudyConfig {
  model::ModelSpec model;
  std::vector<Complex> z_points;  // each |Im z| >= SpectralPoint::min_imag
  std::vector<double> cutoffs;    // strictly ascending; empty when absent
  Tolerances tolerances;
  std::string source;
};

StudyConfig parse_config(const std::filesystem::path& path);
StudyConfig parse_config_text(const std::string& text, const std::string& source = "<memory>");

// "1+2i", "-1-0.5i", "3i", "0.5" (real part only)
Complex parse_complex(const std::string& text);

struct RunOptions {
  int threads = 1;
  std::uint64_t seed = 0x5eed;
};

struct Check {
  std::string name;
  std::optional<Complex> z;
  std::optional<Complex> w;  // second point for pair checks
  int sector = -1;
  bool passed = true;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

Json check_to_json(const Check& c);

struct VerificationReport {
  std::string source;
  std::size_t dimension = 0;
  std::vector<std::size_t> sector_dims;
  model::StructureReport structure;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, double>> tolerances;
  std::vector<Check> checks;

  bool passed() const;
  std::size_t failures() const;
  Json to_json(const std::string& timestamp) const;
  std::string summary() const;
};

VerificationReport run_verification(const StudyConfig& cfg, const RunOptions& opts = {});
// Runs the suite on an already assembled (possibly hand-modified) model.
VerificationReport run_verification(const StudyConfig& cfg, const model::BlockedHamiltonian& b,
                                    const RunOptions& opts = {});

struct ConvergenceRow {
  double lambda = 0.0;
  double norm0_gap = 0.0;
  double norm_minus1_gap = 0.0;
  double resolvent_gap = 0.0;  // ||R_Λ(z) - R_ref(z)|| operator norm
  double ratio = 0.0;          // resolvent_gap / norm_minus1_gap (0 when both vanish)
  Complex z;
  double member_norm0 = 0.0;        // ||f_Λ||_0, combined over spins
  double member_norm_minus1 = 0.0;  // ||f_Λ||_{-1}
  int power_iterations = 0;
  bool power_converged = true;
};

struct ConvergenceSeries {
  Complex z;
  std::vector<ConvergenceRow> rows;
  double cauchy_constant = 0.0;  // max over all pairs of ||R_a - R_b|| / ||f_a - f_b||_{-1}
  double ratio_median = 0.0;
  bool non_increasing = true;
  bool strictly_decreasing = true;
};

struct ConvergenceReport {
  std::string source;
  std::vector<double> cutoffs;
  double reference_norm0 = 0.0;
  double reference_norm_minus1 = 0.0;
  std::vector<ConvergenceSeries> series;
  std::vector<std::pair<std::string, double>> tolerances;
  std::vector<Check> checks;

  bool passed() const;
  Json to_json(const std::string& timestamp) const;
  std::string to_csv() const;
  std::string summary() const;
};

// Reference model: the config's form factors on the full grid. Members: the
// same profiles truncated at each cutoff. Needs at least three cutoffs.
ConvergenceReport run_convergence(const StudyConfig& cfg, const RunOptions& opts = {});

struct ResolveEntry {
  Complex z;
  double lu_vs_direct = 0.0;
  double direct_residual = 0.0;
  std::vector<Complex> diagonal;
};

struct ResolveReport {
  std::string source;
  std::vector<std::string> labels;
  std::vector<ResolveEntry> entries;
  double tolerance = 0.0;

  bool passed() const;
  Json to_json(const std::string& timestamp) const;
  std::string summary() const;
};

ResolveReport run_resolve(const StudyConfig& cfg, const RunOptions& opts = {});

std::string utc_timestamp();

}  // namespace msb::experiments

namespace msb::cli {

// Exit codes: 0 pass, 1 invariant failure, 2 config error, 3 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace msb::cli
