#include "funnel/params.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace funnel {

namespace {

struct Field {
  const char* name;
  double SolverParams::*ref;
};

// Order fixed: emit/parse use it, and the config file reads top to bottom.
constexpr std::array<Field, 27> kFields{{
    {"kappa_n", &SolverParams::kappa_n},
    {"kappa_vm", &SolverParams::kappa_vm},
    {"kappa_ntn", &SolverParams::kappa_ntn},
    {"kappa_fm", &SolverParams::kappa_fm},
    {"kappa_st", &SolverParams::kappa_st},
    {"kappa_ntt", &SolverParams::kappa_ntt},
    {"kappa_v1", &SolverParams::kappa_v1},
    {"kappa_v2", &SolverParams::kappa_v2},
    {"kappa_rho_accept", &SolverParams::kappa_rho_accept},
    {"kappa_rho_funnel", &SolverParams::kappa_rho_funnel},
    {"gamma_c_F", &SolverParams::gamma_c_F},
    {"gamma_c_V", &SolverParams::gamma_c_V},
    {"kappa_p", &SolverParams::kappa_p},
    {"kappa_ht", &SolverParams::kappa_ht},
    {"kappa_hs", &SolverParams::kappa_hs},
    {"epsilon", &SolverParams::epsilon},
    {"sigma_min", &SolverParams::sigma_min},
    {"kappa_delta", &SolverParams::kappa_delta},
    {"gamma_e", &SolverParams::gamma_e},
    {"gamma_lambda", &SolverParams::gamma_lambda},
    {"sigma_max", &SolverParams::sigma_max},
    {"delta_v0", &SolverParams::delta_v0},
    {"delta_vmax0", &SolverParams::delta_vmax0},
    {"delta_f0", &SolverParams::delta_f0},
    {"feas_tol", &SolverParams::feas_tol},
    {"dual_tol", &SolverParams::dual_tol},
    {"infeas_ratio_tol", &SolverParams::infeas_ratio_tol},
}};

[[noreturn]] void bad(const std::string& field, const char* range) {
  throw std::invalid_argument("parameter " + field + " must lie in " + range);
}

void check_unit(double x, const char* name) {
  if (!(x > 0 && x < 1)) bad(name, "(0, 1)");
}

void check_pos(double x, const char* name) {
  if (!(x > 0) || !std::isfinite(x)) bad(name, "(0, inf)");
}

std::string fmt(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw std::runtime_error("parameter format failure");
  return std::string(buf, end);
}

double parse_double(const std::string& name, const std::string& text) {
  double x = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc{} || ptr != last)
    throw std::invalid_argument("parameter " + name + ": bad value '" + text +
                                "'");
  return x;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

void SolverParams::validate() const {
  check_unit(kappa_n, "kappa_n");
  check_unit(kappa_vm, "kappa_vm");
  check_unit(kappa_ntn, "kappa_ntn");
  check_unit(kappa_fm, "kappa_fm");
  check_unit(kappa_st, "kappa_st");
  check_unit(kappa_ntt, "kappa_ntt");
  check_unit(kappa_v1, "kappa_v1");
  check_unit(kappa_v2, "kappa_v2");
  check_unit(kappa_rho_accept, "kappa_rho_accept");
  check_unit(kappa_rho_funnel, "kappa_rho_funnel");
  check_unit(gamma_c_F, "gamma_c_F");
  check_unit(gamma_c_V, "gamma_c_V");
  check_pos(kappa_p, "kappa_p");
  check_pos(kappa_ht, "kappa_ht");
  check_pos(kappa_hs, "kappa_hs");
  check_pos(epsilon, "epsilon");
  check_pos(sigma_min, "sigma_min");
  if (!(kappa_delta > 1)) bad("kappa_delta", "(1, inf)");
  if (!(gamma_e > 1)) bad("gamma_e", "(1, inf)");
  if (!(gamma_lambda > 1)) bad("gamma_lambda", "(1, inf)");
  if (!(sigma_max >= sigma_min)) bad("sigma_max", "[sigma_min, inf)");
  check_pos(delta_v0, "delta_v0");
  check_pos(delta_vmax0, "delta_vmax0");
  check_pos(delta_f0, "delta_f0");
  if (!(delta_v0 <= delta_vmax0)) bad("delta_v0", "(0, delta_vmax0]");
  if (max_iter < 1) bad("max_iter", "[1, inf)");
  check_pos(feas_tol, "feas_tol");
  check_pos(dual_tol, "dual_tol");
  check_pos(infeas_ratio_tol, "infeas_ratio_tol");
}

std::string emit_params(const SolverParams& p) {
  std::ostringstream os;
  for (const auto& f : kFields) os << f.name << "=" << fmt(p.*(f.ref)) << "\n";
  os << "max_iter=" << p.max_iter << "\n";
  return os.str();
}

SolverParams params_from_kv(const std::map<std::string, std::string>& kv) {
  SolverParams p;
  for (const auto& [key, value] : kv) {
    if (key == "max_iter") {
      p.max_iter = static_cast<int>(parse_double(key, value));
      continue;
    }
    bool found = false;
    for (const auto& f : kFields) {
      if (key == f.name) {
        p.*(f.ref) = parse_double(key, value);
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("unknown parameter: " + key);
  }
  p.validate();
  return p;
}

SolverParams parse_params_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!kv.emplace(key, value).second)
      throw std::invalid_argument("duplicate parameter: " + key);
    kv[key] = value;
  }
  return params_from_kv(kv);
}

}  // namespace funnel
