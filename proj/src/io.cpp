#include "thermoslip/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace thermoslip {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json series(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(number_or_null(x));
  return a;
}

}  // namespace

std::string csv_number(double x) { return num(x); }

void write_vtk(const std::filesystem::path& path, const Mesh& mesh, const std::vector<NamedField>& fields) {
  auto out = open_out(path);
  const int nv = static_cast<int>(mesh.vertices.size());
  const int vpc = mesh.vertices_per_cell();
  out << "# vtk DataFile Version 3.0\nthermoslip\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const auto& x : mesh.vertices) out << num(x[0]) << ' ' << num(x[1]) << ' ' << num(x[2]) << '\n';
  out << "CELLS " << mesh.num_cells() << ' ' << mesh.num_cells() * (vpc + 1) << '\n';
  for (const auto& c : mesh.cells) {
    out << vpc;
    for (int i = 0; i < vpc; ++i) out << ' ' << c[i];
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (int c = 0; c < mesh.num_cells(); ++c) out << (mesh.dim == 2 ? 5 : 10) << '\n';
  if (!fields.empty()) out << "POINT_DATA " << nv << '\n';
  for (const auto& nf : fields) {
    const Space& s = nf.field->sp();
    if (&s.mesh() != &mesh) throw InvalidInput("write_vtk: field '" + nf.name + "' is on another mesh");
    // Vertices are the first nodes of both the linear and the quadratic spaces.
    if (s.components() == 1) {
      out << "SCALARS " << nf.name << " double 1\nLOOKUP_TABLE default\n";
      for (int i = 0; i < nv; ++i) out << num(nf.field->values[i]) << '\n';
    } else {
      out << "VECTORS " << nf.name << " double\n";
      for (int i = 0; i < nv; ++i) {
        for (int c = 0; c < 3; ++c) {
          const double v = c < s.components() ? nf.field->values[s.dof(i, c)] : 0.0;
          out << (c ? " " : "") << num(v);
        }
        out << '\n';
      }
    }
  }
  finish(out, path);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  auto out = open_out(path);
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << quote_csv(cells[i]);
    out << "\r\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  finish(out, path);
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

Json to_json(const RunConfig& cfg) {
  Json j = Json::object();
  std::istringstream in(to_ini(cfg));
  std::string line, section;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      j[section] = Json::object();
      continue;
    }
    const auto eq = line.find(" = ");
    j[section][line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

Json to_json(const BoundReport& r) {
  return Json{{"norm_v", r.norm_v},     {"norm_G", r.norm_G}, {"norm_G_q", r.norm_G_q},
              {"norm_f", r.norm_f},     {"beta_emb", r.beta_emb}, {"j_G", r.j_G},
              {"lhs", r.lhs},           {"rhs", r.rhs},       {"slack", r.slack},
              {"C_bound", r.C_bound},   {"ok", r.ok()}};
}

Json to_json(const FlowReport& r) {
  return Json{{"converged", r.converged},
              {"message", r.message},
              {"picard_iters", r.picard_iters},
              {"uzawa_iters", r.uzawa_iters},
              {"complementarity", r.complementarity},
              {"tol_comp", r.tol_comp},
              {"momentum_residual", r.momentum_residual},
              {"pressure_mean", r.pressure_mean},
              {"max_lambda", r.max_lambda},
              {"uzawa_step", r.uzawa_step},
              {"picard_history", series(r.picard_history)},
              {"apriori", to_json(r.apriori)}};
}

Json to_json(const HeatReport& r) {
  return Json{{"coercivity_gap", r.coercivity_gap}, {"energy_balance", r.energy_balance},
              {"energy_scale", r.energy_scale},     {"linear_residual", r.linear_residual},
              {"added_diffusion", r.added_diffusion}, {"free_dofs", r.free_dofs}};
}

Json to_json(const EmbeddingConstants& c) {
  return Json{{"poincare", c.poincare},       {"trace", c.trace},   {"l4_sampled", c.l4_sampled},
              {"l4_analytic", c.l4_analytic}, {"l4", c.l4},         {"samples", c.samples},
              {"seed", c.seed}};
}

Json to_json(const LipschitzEstimate& e) {
  return Json{{"L_hat", e.L_hat}, {"C_star", e.C_star}, {"norm_D_p", e.norm_D_p},
              {"volume_factor", e.volume_factor}, {"flux_l2", e.flux_l2}};
}

std::vector<std::string> history_header() {
  return {"iter",         "delta",        "ratio",          "damping",     "picard_iters",
          "uzawa_iters",  "flow_converged", "complementarity", "tol_comp", "bound_slack", "bound_rhs",
          "C_bound",      "norm_v",       "heat_balance",   "inner_iters", "inner_max_ratio"};
}

std::vector<std::vector<std::string>> history_rows(const CoupledState& state) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : state.history) {
    rows.push_back({std::to_string(r.iter), num(r.delta), num(r.ratio), num(r.damping),
                    std::to_string(r.picard_iters), std::to_string(r.uzawa_iters),
                    r.flow_converged ? "1" : "0", num(r.complementarity), num(r.tol_comp), num(r.bound_slack),
                    num(r.bound_rhs), num(r.C_bound), num(r.norm_v), num(r.heat_balance),
                    std::to_string(r.inner_iters), num(r.inner_max_ratio)});
  }
  return rows;
}

std::vector<std::filesystem::path> export_state(const CoupledState& state, const Scenario& scenario,
                                                const EmbeddingConstants& constants,
                                                const LipschitzEstimate& lipschitz,
                                                const std::filesystem::path& dir, bool vtk) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  const Mesh& mesh = *scenario.mesh;
  if (vtk) {
    const std::pair<const char*, const Field*> items[] = {
        {"velocity", &state.v}, {"pressure", &state.pi}, {"temperature", &state.theta}};
    for (const auto& [name, field] : items) {
      if (field->space == nullptr) continue;
      const auto p = dir / (std::string(name) + ".vtk");
      write_vtk(p, mesh, {{name, field}});
      written.push_back(p);
    }
  }
  const auto csv = dir / "history.csv";
  write_csv(csv, history_header(), history_rows(state));
  written.push_back(csv);

  Json doc;
  doc["converged"] = state.converged;
  doc["message"] = state.message;
  doc["outer_iterations"] = state.history.size();
  doc["seed"] = scenario.config.coupling.seed;
  doc["mesh"] = Json{{"dim", mesh.dim},
                     {"vertices", mesh.vertices.size()},
                     {"cells", mesh.num_cells()},
                     {"volume", mesh.volume()},
                     {"h_max", mesh.h_max()}};
  doc["config"] = to_json(scenario.config);
  doc["viscosity"] = Json{{"kind", std::string(to_string(scenario.models.viscosity.kind))},
                          {"mu0", scenario.models.viscosity.mu0},
                          {"mu1", scenario.models.viscosity.mu1},
                          {"C_mu", scenario.models.viscosity.lipschitz_temp},
                          {"monotone_in_s", std::string(to_string(scenario.models.viscosity.monotone_in_s))}};
  doc["source"] = Json{{"r1", scenario.models.source.bound()}, {"C_r", scenario.models.source.lipschitz()}};
  doc["constants"] = to_json(constants);
  doc["lipschitz"] = to_json(lipschitz);
  doc["flow"] = to_json(state.flow);
  doc["heat"] = to_json(state.heat);
  Json hist = Json::array();
  for (const auto& r : state.history) hist.push_back(r.delta);
  doc["delta_history"] = hist;
  doc["inner_ratios"] = series(state.inner_ratios);
  const auto js = dir / "report.json";
  write_json(js, doc);
  written.push_back(js);
  return written;
}

}  // namespace thermoslip
