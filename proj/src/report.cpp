#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>

#include "msb/experiments.hpp"

namespace msb::experiments {

namespace {

Json pair(Complex z) { return Json::array({z.real(), z.imag()}); }

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string z_text(Complex z) {
  std::ostringstream s;
  s << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return s.str();
}

Json tolerances_json(const std::vector<std::pair<std::string, double>>& entries) {
  Json t = Json::object();
  for (const auto& [k, v] : entries) t[k] = v;
  return t;
}

}  // namespace

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json VerificationReport::to_json(const std::string& timestamp) const {
  Json j;
  j["kind"] = "verification";
  j["timestamp"] = timestamp;
  j["source"] = source;
  j["passed"] = passed();
  j["failures"] = failures();
  j["dimension"] = dimension;
  j["sector_dims"] = sector_dims;
  j["warnings"] = warnings;
  j["tolerances"] = tolerances_json(tolerances);
  Json violations = Json::array();
  for (const auto& v : structure.violations)
    violations.push_back({{"check", v.check}, {"block_row", v.block_row}, {"block_col", v.block_col}, {"detail", v.detail}});
  j["structure"] = {{"passed", structure.passed}, {"sector_count", structure.sector_count}, {"violations", violations}};
  Json list = Json::array();
  for (const auto& c : checks) list.push_back(check_to_json(c));
  j["checks"] = list;
  return j;
}

std::string VerificationReport::summary() const {
  std::ostringstream s;
  s << "verification of " << source << ": dimension " << dimension << ", " << checks.size() << " checks, "
    << failures() << " failed\n";
  for (const auto& w : warnings) s << "  warning: " << w << "\n";
  for (const auto& c : checks) {
    if (c.passed) continue;
    s << "  FAIL " << c.name;
    if (c.z) s << " z=" << z_text(*c.z);
    if (c.w) s << " w=" << z_text(*c.w);
    if (c.sector >= 0) s << " sector=" << c.sector;
    s << " value=" << short_fmt(c.value) << " tol=" << short_fmt(c.tolerance);
    if (!c.detail.empty()) s << " (" << c.detail << ")";
    s << "\n";
  }
  s << (passed() ? "PASS" : "FAIL") << "\n";
  return s.str();
}

Json ConvergenceReport::to_json(const std::string& timestamp) const {
  Json j;
  j["kind"] = "convergence";
  j["timestamp"] = timestamp;
  j["source"] = source;
  j["reference"] =
      "untruncated form factors on the configured grid, i.e. the finest member of the cutoff family; a finite grid "
      "has no genuinely singular limit, so this member stands in for it";
  j["passed"] = passed();
  j["cutoffs"] = cutoffs;
  j["reference_norm0"] = reference_norm0;
  j["reference_norm_minus1"] = reference_norm_minus1;
  j["tolerances"] = tolerances_json(tolerances);
  Json all = Json::array();
  for (const auto& s : series) {
    Json rows = Json::array();
    for (const auto& r : s.rows) {
      Json row;
      row["lambda"] = r.lambda;
      row["norm0_gap"] = r.norm0_gap;
      row["norm_minus1_gap"] = r.norm_minus1_gap;
      row["resolvent_gap_opnorm"] = r.resolvent_gap;
      row["ratio"] = r.ratio;
      row["member_norm0"] = r.member_norm0;
      row["member_norm_minus1"] = r.member_norm_minus1;
      row["power_iterations"] = r.power_iterations;
      row["power_converged"] = r.power_converged;
      rows.push_back(row);
    }
    all.push_back({{"z", pair(s.z)},
                   {"cauchy_constant", s.cauchy_constant},
                   {"ratio_median", s.ratio_median},
                   {"non_increasing", s.non_increasing},
                   {"strictly_decreasing", s.strictly_decreasing},
                   {"rows", rows}});
  }
  j["series"] = all;
  Json list = Json::array();
  for (const auto& c : checks) list.push_back(check_to_json(c));
  j["checks"] = list;
  return j;
}

std::string ConvergenceReport::to_csv() const {
  std::ostringstream s;
  s << "lambda,norm0_gap,norm_minus1_gap,resolvent_gap_opnorm,ratio,z_re,z_im\n";
  for (const auto& ser : series)
    for (const auto& r : ser.rows)
      s << fmt(r.lambda) << ',' << fmt(r.norm0_gap) << ',' << fmt(r.norm_minus1_gap) << ',' << fmt(r.resolvent_gap)
        << ',' << fmt(r.ratio) << ',' << fmt(r.z.real()) << ',' << fmt(r.z.imag()) << '\n';
  return s.str();
}

std::string ConvergenceReport::summary() const {
  std::ostringstream s;
  s << "convergence study of " << source << ": " << cutoffs.size() << " cutoffs, reference |f|_0 = "
    << short_fmt(reference_norm0) << ", |f|_-1 = " << short_fmt(reference_norm_minus1) << "\n";
  for (const auto& ser : series) {
    s << "z = " << z_text(ser.z) << ": C(z) = " << short_fmt(ser.cauchy_constant)
      << ", median ratio = " << short_fmt(ser.ratio_median)
      << (ser.strictly_decreasing ? ", gaps strictly decreasing" : ser.non_increasing ? ", gaps non-increasing" : ", gaps NOT monotone")
      << "\n";
    s << "  lambda       |f_L|_0     |df|_0      |df|_-1     |dR|        ratio\n";
    for (const auto& r : ser.rows) {
      char line[160];
      std::snprintf(line, sizeof line, "  %-12g %-11.4e %-11.4e %-11.4e %-11.4e %-11.4e\n", r.lambda, r.member_norm0,
                    r.norm0_gap, r.norm_minus1_gap, r.resolvent_gap, r.ratio);
      s << line;
    }
  }
  for (const auto& c : checks)
    if (!c.passed) s << "  FAIL " << c.name << (c.z ? " z=" + z_text(*c.z) : "") << ": " << c.detail << "\n";
  s << (passed() ? "PASS" : "FAIL") << "\n";
  return s.str();
}

Json ResolveReport::to_json(const std::string& timestamp) const {
  Json j;
  j["kind"] = "resolve";
  j["timestamp"] = timestamp;
  j["source"] = source;
  j["passed"] = passed();
  j["tolerance"] = tolerance;
  j["labels"] = labels;
  Json list = Json::array();
  for (const auto& e : entries) {
    Json diag = Json::array();
    for (auto d : e.diagonal) diag.push_back(pair(d));
    list.push_back({{"z", pair(e.z)},
                    {"lu_vs_direct", e.lu_vs_direct},
                    {"direct_residual", e.direct_residual},
                    {"diagonal", diag}});
  }
  j["points"] = list;
  return j;
}

std::string ResolveReport::summary() const {
  std::ostringstream s;
  s << "resolvent of " << source << " (dimension " << labels.size() << ")\n";
  for (const auto& e : entries) {
    s << "z = " << z_text(e.z) << ": |R_lu - R_direct|/|R_direct| = " << short_fmt(e.lu_vs_direct)
      << ", direct residual = " << short_fmt(e.direct_residual) << "\n";
    for (std::size_t i = 0; i < e.diagonal.size() && i < 8; ++i) {
      char line[160];
      std::snprintf(line, sizeof line, "  <%s|R|%s> = %.12f %+.12fi\n", labels[i].c_str(), labels[i].c_str(),
                    e.diagonal[i].real(), e.diagonal[i].imag());
      s << line;
    }
    if (e.diagonal.size() > 8) s << "  ... (" << e.diagonal.size() - 8 << " more in the JSON report)\n";
  }
  s << (passed() ? "PASS" : "FAIL") << "\n";
  return s.str();
}

}  // namespace msb::experiments
