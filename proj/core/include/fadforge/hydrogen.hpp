#pragma once

#include <vector>

#include "fadforge/fem.hpp"

namespace fadforge {

/// Volume-weighted projection of the quadrature-point hydrostatic stress onto
/// the nodes; feeds the drift term of the transport equation.
void update_nodal_sigma_h(Simulation& sim);

/// One backward-Euler step of
///   dC/dt = div( D grad C - (D C / (R T)) Vh grad sigma_h ),
/// with the drift handled by Picard iteration (relative increment < 1e-8).
/// Halves dt recursively when the Picard loop diverges.
void diffusion_step(Simulation& sim, double dt);

/// Steady transport solve (time derivative dropped); requires at least one
/// prescribed-concentration boundary.
void stationary_concentration(Simulation& sim);

/// Hydrogen-degraded toughness Gc^H = f(C) Gc per quadrature point, flattened
/// as 4 entries per element.
std::vector<double> toughness_field(const Simulation& sim);

}  // namespace fadforge
