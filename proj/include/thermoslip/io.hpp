#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermoslip/coupling.hpp"
#include "thermoslip/scenario.hpp"

namespace thermoslip {

/// File-system failure, with the offending path in the message.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

/// Legacy-VTK ASCII unstructured grid; fields are sampled at the mesh
/// vertices (POINT_DATA). Vector fields are written as VECTORS, scalars as SCALARS.
struct NamedField {
  std::string name;
  const Field* field;
};
void write_vtk(const std::filesystem::path& path, const Mesh& mesh, const std::vector<NamedField>& fields);

/// RFC-4180 CSV: header row, fields quoted when they contain ',', '"' or newlines.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
std::string csv_number(double x);

void write_json(const std::filesystem::path& path, const Json& doc);

Json to_json(const RunConfig& cfg);
Json to_json(const BoundReport& r);
Json to_json(const FlowReport& r);
Json to_json(const HeatReport& r);
Json to_json(const EmbeddingConstants& c);
Json to_json(const LipschitzEstimate& e);

std::vector<std::string> history_header();
std::vector<std::vector<std::string>> history_rows(const CoupledState& state);

/// Writes velocity.vtk, pressure.vtk, temperature.vtk, history.csv and
/// report.json into `dir` (created if missing). Returns the written paths.
std::vector<std::filesystem::path> export_state(const CoupledState& state, const Scenario& scenario,
                                                const EmbeddingConstants& constants,
                                                const LipschitzEstimate& lipschitz,
                                                const std::filesystem::path& dir, bool vtk = true);

}  // namespace thermoslip
