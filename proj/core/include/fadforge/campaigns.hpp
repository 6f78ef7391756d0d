#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fadforge/fad.hpp"
#include "fadforge/fem.hpp"
#include "fadforge/io.hpp"
#include "fadforge/meshgen.hpp"

namespace fadforge {

struct SentSetup {
  double W = 5.0;
  double L = 50.0;
  double a0 = 1.5;
  MaterialParams mat;
  SolverConfig solver;
  double h_fine = 0.0;            // defaults to ell/4
  double max_displacement = 0.0;  // defaults to an estimate from the material
  // Optional hydrogen charging: fixed concentration on the left/right faces.
  bool hydrogen = false;
  HydrogenParams hyd;
  double C_faces = 0.0;
};

struct SentOutcome {
  double load = 0.0;  // failure load, or the saturation peak when !failed
  bool failed = false;
  std::string criterion;
  RunResult result;
  bool mesh_ok = true;  // ell/4 preflight along the crack path
};

/// Clamped SENT under displacement control (grips: u_x = 0, u_y prescribed).
std::unique_ptr<Simulation> make_sent_simulation(const SentSetup& s);
SentOutcome run_sent_to_failure(const SentSetup& s);

struct RCurvePoint {
  double K = 0.0;   // applied boundary-layer SIF
  double J = 0.0;   // K^2 / E'
  double da = 0.0;  // crack extension
};

struct RCurveSetup {
  double R = 60.0;  // domain half-size
  double K_max = 0.0;
  MaterialParams mat;
  SolverConfig solver;
  double h_fine = 0.0;
  double da_max = 0.0;  // truncate the curve (default 0.4 R)
};

std::vector<RCurvePoint> boundary_layer_rcurve(const RCurveSetup& s);

/// Named defect presets approximating typical weld defect locations; the
/// parameters are plain data and can be overridden from the run config.
PipeDefect pipe_defect_preset(const std::string& name, double length);

/// Synthetic heterogeneous weld field: bainitic V-groove + HAZ bands with
/// elevated yield stress and a self-equilibrated residual hoop stress.
PropertyFieldMap make_synthetic_weld_field(const Mesh& mesh, const RunConfig& cfg);

/// Applies overrides (and the x_b-blended hydrogen degradation sets) to a
/// simulation; returns the residual-stress re-equilibration correction norm
/// (0 when the map has no residual field).
double apply_property_field(Simulation& sim, const PropertyFieldMap& map,
                            const MaterialParams& base_mat, const MaterialParams& weld_mat,
                            const HydrogenParams& base_h, const HydrogenParams& weld_h);

struct CampaignResult {
  std::vector<std::string> files;
  std::vector<std::pair<std::string, std::string>> summary;
};

CampaignResult run_sent_fal_sweep(const RunConfig& cfg, const std::string& out_dir, int jobs = 1);
CampaignResult run_sent_hydrogen_sweep(const RunConfig& cfg, const std::string& out_dir,
                                       int jobs = 1);
CampaignResult run_transition_flaw_sweep(const RunConfig& cfg, const std::string& out_dir,
                                         int jobs = 1);
CampaignResult run_rcurve_campaign(const RunConfig& cfg, const std::string& out_dir);
CampaignResult run_pipeline_campaign(const RunConfig& cfg, const std::string& out_dir,
                                     int jobs = 1);
CampaignResult run_onedim(const RunConfig& cfg, const std::string& out_dir);

/// Mean hoop stress over an element set (pipe nominal section probe).
double mean_hoop_stress(const Simulation& sim, const std::string& elset);

/// Full command-line interface. Returns 0 on success, 2 on validation or
/// usage errors, 3 on solver failures.
int cli(int argc, const char* const* argv);

}  // namespace fadforge
