#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "msb/errors.hpp"
#include "msb/experiments.hpp"

namespace msb::experiments {

namespace {

using nlohmann::json;

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

void expect_keys(const json& obj, const std::string& ptr, const std::vector<std::string>& required,
                 const std::vector<std::string>& optional = {}) {
  if (!obj.is_object()) throw ConfigError("expected an object", ptr.empty() ? "/" : ptr);
  for (const auto& key : required)
    if (!obj.contains(key)) throw ConfigError("missing required field", child(ptr, key));
  for (const auto& [key, _] : obj.items()) {
    bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                 std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) throw ConfigError("unknown field", child(ptr, key));
  }
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw ConfigError("expected a number", ptr);
  double x = j.get<double>();
  if (!std::isfinite(x)) throw ConfigError("number must be finite", ptr);
  return x;
}

const json& array(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw ConfigError("expected an array", ptr);
  return j;
}

std::vector<double> numbers(const json& j, const std::string& ptr) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array(j, ptr).size(); ++i) out.push_back(number(j[i], child(ptr, i)));
  return out;
}

Complex complex_pair(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected a [re, im] pair", ptr);
  return {number(j[0], child(ptr, 0)), number(j[1], child(ptr, 1))};
}

std::vector<Complex> complex_list(const json& j, const std::string& ptr) {
  std::vector<Complex> out;
  for (std::size_t i = 0; i < array(j, ptr).size(); ++i) out.push_back(complex_pair(j[i], child(ptr, i)));
  return out;
}

// Byte offset -> 1-based line and column.
std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

StudyConfig from_json(const json& root) {
  expect_keys(root, "", {"spins", "field", "form_factors", "n_max", "z_points"}, {"cutoffs", "tolerances"});
  StudyConfig cfg;
  auto& m = cfg.model;

  const json& spins = root["spins"];
  expect_keys(spins, "/spins", {"e", "g", "v"});
  m.spin.e = numbers(spins["e"], "/spins/e");
  m.spin.g = numbers(spins["g"], "/spins/g");
  const std::size_t n = m.spin.e.size();
  if (n == 0) throw ConfigError("at least one spin is required", "/spins/e");
  if (m.spin.g.size() != n) throw ConfigError("length must match /spins/e", "/spins/g");
  auto v = complex_list(spins["v"], "/spins/v");
  if (v.size() != n * n) throw ConfigError("expected N*N = " + std::to_string(n * n) + " row-major entries", "/spins/v");
  m.spin.v = Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < n; ++l) m.spin.v(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = v[j * n + l];
  for (std::size_t j = 0; j < n; ++j) {
    if (v[j * n + j] != Complex(0.0))
      throw ConfigError("diagonal of v must vanish", child("/spins/v", j * n + j));
    for (std::size_t l = j + 1; l < n; ++l) {
      Complex a = v[j * n + l], b = std::conj(v[l * n + j]);
      if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(a)))
        throw ConfigError("v must be Hermitian (v_lj = conj(v_jl))", child("/spins/v", l * n + j));
    }
  }

  const json& field = root["field"];
  expect_keys(field, "/field", {"k", "omega", "weights", "mass_gap"});
  m.grid.modes = numbers(field["k"], "/field/k");
  m.grid.omega = numbers(field["omega"], "/field/omega");
  m.grid.weights = numbers(field["weights"], "/field/weights");
  m.grid.mass_gap = number(field["mass_gap"], "/field/mass_gap");
  if (m.grid.modes.size() != m.grid.omega.size())
    throw ConfigError("length must match /field/omega", "/field/k");

  const json& ff = array(root["form_factors"], "/form_factors");
  for (std::size_t j = 0; j < ff.size(); ++j)
    m.form_factors.push_back(field::FormFactor{complex_list(ff[j], child("/form_factors", j))});

  const json& nmax = root["n_max"];
  if (!nmax.is_number_integer()) throw ConfigError("expected an integer", "/n_max");
  m.n_max = nmax.get<int>();

  cfg.z_points = complex_list(root["z_points"], "/z_points");
  for (std::size_t i = 0; i < cfg.z_points.size(); ++i)
    if (std::abs(cfg.z_points[i].imag()) < propagators::SpectralPoint::min_imag)
      throw ConfigError("Im z too small (|Im z| >= 1e-8 required)", child("/z_points", i));

  if (root.contains("cutoffs")) {
    cfg.cutoffs = numbers(root["cutoffs"], "/cutoffs");
    for (std::size_t i = 0; i < cfg.cutoffs.size(); ++i) {
      if (cfg.cutoffs[i] <= 0.0) throw ConfigError("cutoff must be positive", child("/cutoffs", i));
      if (i > 0 && cfg.cutoffs[i] <= cfg.cutoffs[i - 1])
        throw ConfigError("cutoffs must be strictly ascending", child("/cutoffs", i));
    }
  }

  if (root.contains("tolerances")) {
    const json& tol = root["tolerances"];
    if (!tol.is_object()) throw ConfigError("expected an object", "/tolerances");
    for (const auto& [key, value] : tol.items()) {
      double x = number(value, child("/tolerances", key));
      try {
        cfg.tolerances.set(key, x);
      } catch (const ConfigError& e) {
        throw ConfigError(e.what(), child("/tolerances", key));
      }
    }
  }

  model::validate(m);
  return cfg;
}

}  // namespace

void Tolerances::set(const std::string& name, double value) {
  if (!std::isfinite(value) || value < 0.0) throw ConfigError("tolerance '" + name + "' must be finite and >= 0");
  double* slot = nullptr;
  if (name == "oracle_rel") slot = &oracle_rel;
  else if (name == "lu_rel") slot = &lu_rel;
  else if (name == "sign_slack") slot = &sign_slack;
  else if (name == "symmetry_abs") slot = &symmetry_abs;
  else if (name == "resolvent_identity_rel") slot = &resolvent_identity_rel;
  else if (name == "second_resolvent_abs") slot = &second_resolvent_abs;
  else if (name == "direct_residual_per_dim") slot = &direct_residual_per_dim;
  else if (name == "monotone_slack") slot = &monotone_slack;
  else if (name == "power_rel") slot = &power_rel;
  else if (name == "power_max_iter") slot = &power_max_iter;
  else if (name == "random_vectors") slot = &random_vectors;
  if (!slot) throw ConfigError("unknown tolerance '" + name + "'");
  if ((name == "power_max_iter" || name == "random_vectors") && (value < 1.0 || value != std::floor(value)))
    throw ConfigError("tolerance '" + name + "' must be a positive integer");
  *slot = value;
}

std::vector<std::pair<std::string, double>> Tolerances::entries() const {
  return {{"oracle_rel", oracle_rel},
          {"lu_rel", lu_rel},
          {"sign_slack", sign_slack},
          {"symmetry_abs", symmetry_abs},
          {"resolvent_identity_rel", resolvent_identity_rel},
          {"second_resolvent_abs", second_resolvent_abs},
          {"direct_residual_per_dim", direct_residual_per_dim},
          {"monotone_slack", monotone_slack},
          {"power_rel", power_rel},
          {"power_max_iter", power_max_iter},
          {"random_vectors", random_vectors}};
}

StudyConfig parse_config_text(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": invalid JSON (" +
                      e.what() + ")");
  }
  StudyConfig cfg = from_json(root);
  cfg.source = source;
  return cfg;
}

StudyConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

Complex parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  auto fail = [&] { return ParameterError("cannot parse complex number '" + text + "' (expected <re>+<im>i)"); };
  if (s.empty()) throw fail();
  auto to_double = [&](const std::string& part) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(part, &used);
    } catch (const std::exception&) {
      throw fail();
    }
    if (used != part.size() || !std::isfinite(x)) throw fail();
    return x;
  };
  if (s.back() != 'i') return {to_double(s), 0.0};
  s.pop_back();
  // Split at the last sign that is not part of an exponent and not leading.
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  auto imag_of = [&](const std::string& part) {
    if (part == "+" || part.empty()) return 1.0;
    if (part == "-") return -1.0;
    return to_double(part);
  };
  if (split == std::string::npos) return {0.0, imag_of(s)};
  return {to_double(s.substr(0, split)), imag_of(s.substr(split))};
}

}  // namespace msb::experiments
