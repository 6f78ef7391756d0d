#pragma once

#include <utility>
#include <vector>

#include "fadforge/fem.hpp"
#include "fadforge/meshgen.hpp"

namespace fadforge {

struct JIntegralResult {
  std::vector<double> per_domain;
  double J = 0.0;       // mean over the domains
  double spread = 0.0;  // (max-min)/mean path-independence diagnostic
};

/// Equivalent-domain-integral J around the crack tip. Domains are
/// (inner_layer, outer_layer) pairs counted in node layers from the tip; the
/// q-function is 1 up to the inner layer and decays linearly to 0 at the
/// outer layer. The strain energy density is the accumulated stress work, so
/// elastic states give the elastic J and proportional elastic-plastic states
/// give the deformation-theory J. Spread above 5% emits a warning flag via
/// the return value; domains touching the outer boundary throw.
JIntegralResult j_integral(const Simulation& sim, const CrackTipInfo& tip,
                           const std::vector<std::pair<int, int>>& domains);

/// K_eff = sqrt(E' J), plane strain.
double k_from_j(double J, double E, double nu);

struct MixedModeResult {
  double theta_star = 0.0;  // kink angle from the maximum-tangential-stress criterion
  double k_eq = 0.0;
};

/// Equivalent SIF for a kinked crack under mixed-mode loading.
MixedModeResult mixed_mode_keq(double K_I, double K_II);

struct InteractionResult {
  double K_I = 0.0;
  double K_II = 0.0;
  std::vector<double> K_I_per_domain;
  std::vector<double> K_II_per_domain;
};

/// Mode-separated SIFs by the interaction integral with plane-strain Williams
/// auxiliary fields. Requires a linear elastic state.
InteractionResult interaction_integral_k(const Simulation& sim, const CrackTipInfo& tip,
                                         const std::vector<std::pair<int, int>>& domains);

/// Node layers (graph distance through elements) from the tip node; helper
/// shared by the domain integrals and exposed for tests.
std::vector<int> node_layers_from_tip(const Mesh& mesh, int tip_node, int max_layer);

}  // namespace fadforge
