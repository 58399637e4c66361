#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "msb/errors.hpp"
#include "msb/experiments.hpp"

namespace msb::cli {

namespace {

using namespace msb::experiments;

struct Options {
  std::string config;
  std::string out;
  std::vector<std::string> z;
  std::vector<std::string> tol;
  int threads = 1;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON model/study file")->required();
  cmd->add_option("--out", o.out, "report directory (JSON report goes to stdout when omitted)");
  cmd->add_option("--z", o.z, "evaluation point <re>+<im>i, repeatable; replaces the config's z_points");
  cmd->add_option("--tol", o.tol, "tolerance override <name>=<value>, repeatable");
  cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
}

StudyConfig load(const Options& o) {
  StudyConfig cfg = parse_config(o.config);
  if (!o.z.empty()) {
    cfg.z_points.clear();
    for (const auto& text : o.z) {
      Complex z = parse_complex(text);
      if (std::abs(z.imag()) < propagators::SpectralPoint::min_imag)
        throw ConfigError("Im z too small (|Im z| >= 1e-8 required) in --z " + text);
      cfg.z_points.push_back(z);
    }
  }
  for (const auto& t : o.tol) {
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("expected --tol <name>=<value>, got '" + t + "'");
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(t.substr(eq + 1), &used);
      if (used != t.size() - eq - 1) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse tolerance value in '" + t + "'");
    }
    cfg.tolerances.set(t.substr(0, eq), value);
  }
  return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
}

template <class Report>
int emit(const Report& rep, const Options& o, const std::string& stem, std::ostream& out, std::ostream& err) {
  std::string json = rep.to_json(utc_timestamp()).dump(2) + "\n";
  if (o.out.empty()) {
    out << json;
    err << rep.summary();
  } else {
    std::filesystem::path dir(o.out);
    std::filesystem::create_directories(dir);
    write_file(dir / (stem + ".json"), json);
    if constexpr (std::is_same_v<Report, ConvergenceReport>) write_file(dir / (stem + ".csv"), rep.to_csv());
    out << rep.summary();
  }
  return rep.passed() ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Resolvents of truncated multi-spin-boson models via concatenated propagators"};
  app.require_subcommand(1);
  Options o;
  auto* verify = app.add_subcommand("verify", "run the invariant suite at every z");
  auto* converge = app.add_subcommand("converge", "UV-cutoff convergence study");
  auto* resolve = app.add_subcommand("resolve", "block-LU resolvent vs direct inversion");
  for (auto* cmd : {verify, converge, resolve}) add_common(cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    StudyConfig cfg = load(o);
    RunOptions run_opts;
    run_opts.threads = o.threads;
    if (verify->parsed()) return emit(run_verification(cfg, run_opts), o, "verification", out, err);
    if (converge->parsed()) return emit(run_convergence(cfg, run_opts), o, "convergence", out, err);
    return emit(run_resolve(cfg, run_opts), o, "resolvent", out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const StructureError& e) {
    err << "structure violation: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace msb::cli
