#include "thermoslip/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <variant>

namespace thermoslip {

namespace {

std::string join(const std::vector<std::string>& errors) {
  std::string out = "invalid configuration:";
  for (const auto& e : errors) out += "\n  " + e;
  return out;
}

using Slot = std::variant<double*, int*, std::string*, bool*, std::uint64_t*, std::vector<double>*>;

struct Entry {
  const char* section;
  const char* key;
  Slot slot;
};

std::vector<Entry> registry(RunConfig& c) {
  return {
      {"domain", "dim", &c.domain.dim},
      {"domain", "extent_x", &c.domain.extent_x},
      {"domain", "extent_y", &c.domain.extent_y},
      {"domain", "height_kind", &c.domain.height_kind},
      {"domain", "h0", &c.domain.h0},
      {"domain", "slope_x", &c.domain.slope_x},
      {"domain", "slope_y", &c.domain.slope_y},
      {"domain", "height_samples", &c.domain.height_samples},
      {"domain", "sample_nx", &c.domain.sample_nx},
      {"domain", "sample_ny", &c.domain.sample_ny},
      {"domain", "nx", &c.domain.nx},
      {"domain", "ny", &c.domain.ny},
      {"domain", "nz", &c.domain.nz},
      {"rheology", "kind", &c.rheology.kind},
      {"rheology", "mu_const", &c.rheology.mu_const},
      {"rheology", "mu_inf", &c.rheology.mu_inf},
      {"rheology", "eta0", &c.rheology.eta0},
      {"rheology", "relax", &c.rheology.relax},
      {"rheology", "r_exp", &c.rheology.r_exp},
      {"rheology", "beta", &c.rheology.beta},
      {"rheology", "tau_y", &c.rheology.tau_y},
      {"rheology", "epsilon", &c.rheology.epsilon},
      {"rheology", "mu0", &c.rheology.mu0},
      {"rheology", "mu1", &c.rheology.mu1},
      {"rheology", "lipschitz_temp", &c.rheology.lipschitz_temp},
      {"rheology", "monotone_in_s", &c.rheology.monotone_in_s},
      {"conductivity", "k_const", &c.conductivity.k_const},
      {"conductivity", "k_grad_x", &c.conductivity.k_grad_x},
      {"conductivity", "k_grad_y", &c.conductivity.k_grad_y},
      {"conductivity", "k_grad_z", &c.conductivity.k_grad_z},
      {"conductivity", "k0", &c.conductivity.k0},
      {"conductivity", "k1", &c.conductivity.k1},
      {"source", "r0", &c.source.r0},
      {"source", "r_amp", &c.source.r_amp},
      {"source", "r_scale", &c.source.r_scale},
      {"friction", "k", &c.friction.k},
      {"friction", "s_x", &c.friction.s_x},
      {"friction", "s_y", &c.friction.s_y},
      {"bcs", "flow_rate", &c.bcs.flow_rate},
      {"bcs", "theta_omega", &c.bcs.theta_omega},
      {"flow", "tol_picard", &c.flow.tol_picard},
      {"flow", "max_picard", &c.flow.max_picard},
      {"flow", "max_uzawa", &c.flow.max_uzawa},
      {"flow", "tol_comp_rel", &c.flow.tol_comp_rel},
      {"flow", "rho_scale", &c.flow.rho_scale},
      {"flow", "body_force_x", &c.flow.body_force_x},
      {"flow", "body_force_y", &c.flow.body_force_y},
      {"flow", "body_force_z", &c.flow.body_force_z},
      {"flow", "gauge", &c.flow.gauge},
      {"flow", "friction_rule", &c.flow.friction_rule},
      {"flow", "cell_degree", &c.flow.cell_degree},
      {"flow", "facet_degree", &c.flow.facet_degree},
      {"heat", "artificial_diffusion", &c.heat.artificial_diffusion},
      {"coupling", "mode", &c.coupling.mode},
      {"coupling", "damping", &c.coupling.damping},
      {"coupling", "tol_outer", &c.coupling.tol_outer},
      {"coupling", "max_outer", &c.coupling.max_outer},
      {"coupling", "p_exponent", &c.coupling.p_exponent},
      {"coupling", "inner_tol", &c.coupling.inner_tol},
      {"coupling", "max_inner", &c.coupling.max_inner},
      {"coupling", "seed", &c.coupling.seed},
      {"coupling", "constant_samples", &c.coupling.constant_samples},
      {"output", "dir", &c.output.dir},
      {"output", "vtk", &c.output.vtk},
  };
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

template <typename Int>
bool parse_int(const std::string& s, Int& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string assign(const Slot& slot, const std::string& value) {
  return std::visit(
      [&](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          return parse_double(value, *p) ? "" : "expected a finite number, got '" + value + "'";
        } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
          return parse_int(value, *p) ? "" : "expected an integer, got '" + value + "'";
        } else if constexpr (std::is_same_v<T, bool>) {
          if (value == "true" || value == "1") *p = true;
          else if (value == "false" || value == "0") *p = false;
          else return "expected true or false, got '" + value + "'";
          return "";
        } else if constexpr (std::is_same_v<T, std::string>) {
          *p = value;
          return "";
        } else {
          p->clear();
          std::stringstream ss(value);
          std::string item;
          while (std::getline(ss, item, ',')) {
            double d = 0.0;
            if (!parse_double(trim(item), d)) return "expected a comma-separated list of numbers";
            p->push_back(d);
          }
          return "";
        }
      },
      slot);
}

std::string format(const Slot& slot) {
  return std::visit(
      [](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        std::ostringstream os;
        if constexpr (std::is_same_v<T, double>) {
          os << std::setprecision(17) << *p;
        } else if constexpr (std::is_same_v<T, bool>) {
          os << (*p ? "true" : "false");
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          for (std::size_t i = 0; i < p->size(); ++i) os << (i ? "," : "") << std::setprecision(17) << (*p)[i];
        } else {
          os << *p;
        }
        return os.str();
      },
      slot);
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors) : InvalidInput(join(errors)), errors_(std::move(errors)) {}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> e;
  const auto& d = c.domain;
  if (d.dim != 2 && d.dim != 3) e.push_back("domain.dim must be 2 or 3");
  if (!(d.extent_x > 0.0) || !(d.extent_y > 0.0)) e.push_back("domain extents must be positive");
  if (d.nx < 1 || d.ny < 1 || d.nz < 1) e.push_back("domain subdivisions must be at least 1");
  if (!one_of(d.height_kind, {"constant", "affine", "sampled"})) {
    e.push_back("domain.height_kind must be constant, affine or sampled");
  } else if (d.height_kind == "sampled") {
    if (d.sample_nx < 1 || d.sample_ny < 1 ||
        static_cast<std::size_t>(d.sample_nx) * d.sample_ny != d.height_samples.size()) {
      e.push_back("domain.height_samples must hold sample_nx * sample_ny values");
    }
    for (double h : d.height_samples) {
      if (!(h > 0.0)) {
        e.push_back("domain.height_samples must be positive");
        break;
      }
    }
  } else {
    const double ey = d.dim == 3 ? d.extent_y : 0.0;
    const double corners[4] = {d.h0, d.h0 + d.slope_x * d.extent_x, d.h0 + d.slope_y * ey,
                               d.h0 + d.slope_x * d.extent_x + d.slope_y * ey};
    const bool flat = d.height_kind == "constant";
    for (double h : corners) {
      if (!((flat ? d.h0 : h) > 0.0)) {
        e.push_back("domain height must be positive over omega");
        break;
      }
    }
  }

  const auto& r = c.rheology;
  if (!one_of(r.kind, {"constant", "carreau_clamped", "bingham_regularized", "power_clamped"})) {
    e.push_back("rheology.kind must be constant, carreau_clamped, bingham_regularized or power_clamped");
  }
  if (!(r.mu0 > 0.0)) e.push_back("rheology.mu0 must be positive (viscosity lower bound mu0 > 0)");
  if (!(r.mu1 >= r.mu0)) e.push_back("rheology.mu1 must be at least mu0");
  if (r.kind == "constant" && !(r.mu_const >= r.mu0 && r.mu_const <= r.mu1)) {
    e.push_back("rheology.mu_const must lie in [mu0, mu1]");
  }
  if (!(r.mu_inf > 0.0) || !(r.eta0 > 0.0)) e.push_back("rheology.mu_inf and eta0 must be positive");
  if (!(r.relax > 0.0)) e.push_back("rheology.relax must be positive");
  if (!(r.beta >= 0.0)) e.push_back("rheology.beta must be nonnegative");
  if (!(r.tau_y >= 0.0)) e.push_back("rheology.tau_y must be nonnegative");
  if (!(r.epsilon > 0.0)) e.push_back("rheology.epsilon must be positive");
  if (!r.monotone_in_s.empty() && !one_of(r.monotone_in_s, {"nondecreasing", "nonincreasing"})) {
    e.push_back("rheology.monotone_in_s must be nondecreasing or nonincreasing");
  }

  const auto& k = c.conductivity;
  if (!(k.k0 > 0.0)) e.push_back("conductivity.k0 must be positive");
  if (!(k.k1 >= k.k0)) e.push_back("conductivity.k1 must be at least k0");
  {
    // K is affine, so its extremes over the bounding box sit at the corners.
    double hmax = d.h0;
    if (d.height_kind == "affine") {
      hmax = std::max({d.h0, d.h0 + d.slope_x * d.extent_x, d.h0 + d.slope_y * d.extent_y,
                       d.h0 + d.slope_x * d.extent_x + d.slope_y * d.extent_y});
    } else if (d.height_kind == "sampled" && !d.height_samples.empty()) {
      hmax = *std::max_element(d.height_samples.begin(), d.height_samples.end());
    }
    const double ey = d.dim == 3 ? d.extent_y : 0.0;
    const double zmax = d.dim == 3 ? hmax : 0.0;
    const double ymax = d.dim == 3 ? ey : hmax;
    bool bad = false;
    for (double x : {0.0, d.extent_x}) {
      for (double y : {0.0, ymax}) {
        for (double z : {0.0, zmax}) {
          const double kv = k.k_const + k.k_grad_x * x + k.k_grad_y * y + k.k_grad_z * z;
          if (kv < k.k0 || kv > k.k1) bad = true;
        }
      }
    }
    if (bad) e.push_back("conductivity K(x) leaves [k0, k1] on the domain");
  }
  if (!(c.source.r_scale > 0.0)) e.push_back("source.r_scale must be positive");
  if (!(c.friction.k >= 0.0)) e.push_back("friction.k must be nonnegative");
  if (!(c.bcs.flow_rate == c.bcs.flow_rate)) e.push_back("bcs.flow_rate must be a number");

  const auto& f = c.flow;
  if (!(f.tol_picard > 0.0) || !(f.tol_comp_rel > 0.0)) e.push_back("flow tolerances must be positive");
  if (f.max_picard < 1 || f.max_uzawa < 1) e.push_back("flow iteration limits must be at least 1");
  if (!(f.rho_scale > 0.0)) e.push_back("flow.rho_scale must be positive");
  if (!one_of(f.gauge, {"mean_zero", "pin_first"})) e.push_back("flow.gauge must be mean_zero or pin_first");
  if (!one_of(f.friction_rule, {"nodal", "gauss"})) e.push_back("flow.friction_rule must be nodal or gauss");
  if (f.cell_degree < 4 || f.cell_degree > 20) e.push_back("flow.cell_degree must lie in [4, 20]");
  if (f.facet_degree < 3 || f.facet_degree > 20) e.push_back("flow.facet_degree must lie in [3, 20]");
  if (!(c.heat.artificial_diffusion >= 0.0)) e.push_back("heat.artificial_diffusion must be nonnegative");

  const auto& cp = c.coupling;
  if (!one_of(cp.mode, {"gauss_seidel", "paper_nested"})) e.push_back("coupling.mode must be gauss_seidel or paper_nested");
  if (!(cp.damping > 0.0 && cp.damping <= 1.0)) e.push_back("coupling.damping must lie in (0, 1]");
  if (!(cp.tol_outer > 0.0) || !(cp.inner_tol > 0.0)) e.push_back("coupling tolerances must be positive");
  if (cp.max_outer < 1 || cp.max_inner < 1) e.push_back("coupling iteration limits must be at least 1");
  if (!(cp.p_exponent >= 4.0)) e.push_back("coupling.p_exponent must be at least 4 (required by the heat analysis)");
  if (cp.constant_samples < 1) e.push_back("coupling.constant_samples must be at least 1");
  if (c.output.dir.empty()) e.push_back("output.dir must not be empty");
  return e;
}

RunConfig parse_config_string(const std::string& text) {
  RunConfig cfg;
  auto entries = registry(cfg);
  std::set<std::string> sections;
  for (const auto& en : entries) sections.insert(en.section);
  std::vector<std::string> errors;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where + "malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) errors.push_back(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      errors.push_back(where + "key '" + key + "' outside any section");
      continue;
    }
    if (!sections.count(section)) continue;
    auto it = std::find_if(entries.begin(), entries.end(),
                           [&](const Entry& en) { return section == en.section && key == en.key; });
    if (it == entries.end()) {
      errors.push_back(where + "unknown key '" + key + "' in [" + section + "]");
      continue;
    }
    if (!seen.insert(section + "." + key).second) {
      errors.push_back(where + "duplicate key " + section + "." + key);
      continue;
    }
    const std::string err = assign(it->slot, value);
    if (!err.empty()) errors.push_back(where + section + "." + key + ": " + err);
  }
  for (auto& e : validate(cfg)) errors.push_back(std::move(e));
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot read config file '" + path + "'"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str());
}

std::string to_ini(const RunConfig& cfg) {
  RunConfig copy = cfg;
  std::ostringstream os;
  std::string section;
  for (const auto& en : registry(copy)) {
    if (section != en.section) {
      if (!section.empty()) os << "\n";
      section = en.section;
      os << "[" << section << "]\n";
    }
    os << en.key << " = " << format(en.slot) << "\n";
  }
  return os.str();
}

}  // namespace thermoslip
