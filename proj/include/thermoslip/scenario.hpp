#pragma once

#include <memory>

#include "thermoslip/config.hpp"
#include "thermoslip/coupling.hpp"

namespace thermoslip {

/// Everything needed to run the coupled problem, assembled from a RunConfig.
struct Scenario {
  RunConfig config;
  std::shared_ptr<const Mesh> mesh;
  Discretization disc;
  MaterialModels models;
  FlowProblem flow_problem;
  FlowConfig flow_config;
  HeatBCs heat_bcs;
  HeatOptions heat_options;
  CouplingConfig coupling;
};

ViscosityModel make_viscosity(const RheologyConfig& cfg);
DomainSpec make_domain(const DomainConfig& cfg);

/// Lateral Dirichlet profile g = Q (3/2) (1 - (z/h)^2) / h e1, z the vertical
/// coordinate: carries flow rate Q per unit width through every vertical
/// section and vanishes on the top surface.
VectorFunction lateral_profile(double flow_rate, const HeightFunction& height, int dim);

Scenario build_scenario(const RunConfig& cfg);

}  // namespace thermoslip
