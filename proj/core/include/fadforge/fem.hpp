#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fadforge/material.hpp"
#include "fadforge/mesh.hpp"

namespace fadforge {

class Simulation;

struct SolverConfig {
  double stagger_tol = 1e-4;  // max nodal |dphi| between staggered passes
  double newton_tol = 1e-8;   // residual norm relative to the reaction scale
  int max_stagger = 400;
  int max_newton = 30;
  int n_steps = 100;            // initial load step count
  double min_step_frac = 1e-4;  // abort threshold for step halving
  double step_growth = 1.5;     // growth after three clean steps
  double max_step_factor = 5.0; // cap on step growth, times the initial step
  double phi_failure_threshold = 0.95;
  double front_advance_scale = 2.0;  // failure when the front advances this many ell
  double reaction_drop = 0.01;       // relative drop below the running max
  bool enable_phase_field = true;
  bool enable_hydrogen = false;
  bool hydrogen_stationary = true;  // stationary diffusion each staggered pass
  double dt = 1.0;                  // transient diffusion step size [s]
};

/// Frame-local prescribed displacement component; value = scale * lambda.
struct DirichletBC {
  int node;
  int comp;
  double scale;
  bool driving = false;  // reactions of driving BCs are reported as "the load"
};

/// Frame-local nodal force; value = scale * lambda.
struct NodalForce {
  int node;
  int comp;
  double scale;
};

struct ConcentrationBC {
  std::vector<int> nodes;
  std::function<double(const Simulation&)> value;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> residuals;
};

struct StaggerReport {
  bool converged = false;
  int passes = 0;
  double last_dphi = 0.0;
  SolveReport last_newton;
};

struct StepRecord {
  double lambda = 0.0;
  double reaction = 0.0;       // driving reaction force
  double probe = 0.0;          // user-defined load measure (e.g. pipe pressure)
  double front_advance = 0.0;  // phi front distance beyond the initial crack
  double max_phi = 0.0;
  double work_external = 0.0;
  double energy_elastic = 0.0;
  double energy_plastic = 0.0;
  double energy_fracture = 0.0;
  int stagger_passes = 0;
};

struct FailureEvent {
  bool failed = false;
  int step = -1;
  double lambda = 0.0;
  double load = 0.0;
  double probe = 0.0;
  std::string criterion;  // "front" or "reaction-drop"
};

struct RunResult {
  std::vector<StepRecord> records;
  FailureEvent failure;
  bool aborted = false;
  std::string abort_reason;

  double peak_reaction() const;
};

struct LimitLoadResult {
  double Py = 0.0;
  double lambda = 0.0;
  double stiffness_ratio = 0.0;
  std::vector<StepRecord> records;
};

struct SimulationState {
  Eigen::VectorXd u;        // frame-local nodal displacements (2N)
  Eigen::VectorXd phi;      // nodal damage
  Eigen::VectorXd conc;     // nodal hydrogen concentration
  Eigen::VectorXd sigma_h;  // volume-averaged nodal hydrostatic stress
  Eigen::VectorXd f_int;    // internal force at the last converged solve
  std::vector<std::array<PointState, 4>> qp;
  double lambda = 0.0;
  double reaction = 0.0;
};

/// One plane-strain coupled simulation: displacement problem with the degraded
/// elastic-plastic response, AT2 phase-field problem, optional hydrogen
/// transport, alternate-minimization staggering and failure detection.
/// A Simulation owns its state exclusively; independent instances may run in
/// parallel.
class Simulation {
 public:
  Simulation(Mesh mesh, MaterialParams base, SolverConfig config);

  const Mesh& mesh() const { return mesh_; }
  SimulationState& state() { return state_; }
  const SimulationState& state() const { return state_; }
  SolverConfig& config() { return config_; }
  const MaterialParams& material(int elem) const { return mat_[elem]; }
  MaterialParams& material(int elem) { return mat_[elem]; }
  const HydrogenParams& hydrogen_params(int elem) const { return hyd_[elem]; }

  void set_hydrogen(const HydrogenParams& base);
  void set_hydrogen_degradation(int elem, double f_min, double q1, double q2);
  void add_concentration_bc(ConcentrationBC bc) { conc_bcs_.push_back(std::move(bc)); }
  const std::vector<ConcentrationBC>& concentration_bcs() const { return conc_bcs_; }

  /// Assigns a rotated local frame (angle in radians) to a node; BC components
  /// and reactions for that node refer to the rotated axes.
  void set_node_frame(int node, double angle);

  void add_dirichlet(int node, int comp, double scale, bool driving = false);
  void add_dirichlet(const std::vector<int>& nodes, int comp, double scale, bool driving = false);
  void add_nodal_force(int node, int comp, double scale);
  /// Consistent nodal loads for a uniform traction on the boundary edges whose
  /// end nodes both belong to the set.
  void add_edge_traction(const std::string& nset, double tx, double ty);
  /// Pressure loading on a boundary node set: traction scale * n, with n the
  /// edge normal pointing into the material. Call after node frames are set.
  void add_normal_pressure(const std::string& nset, double scale);
  /// Pins phi = 1 on the given nodes (band-style initial crack).
  void pin_phi(const std::vector<int>& nodes);

  void set_crack_tip(double x, double y);

  /// Scalar load measure recorded per step and interpolated at failure
  /// (e.g. the thin-wall pressure recovered from the nominal hoop stress).
  void set_probe(std::function<double(const Simulation&)> probe) { probe_ = std::move(probe); }

  /// Seeds the committed state with an initial equivalent plastic strain
  /// (work-hardened weld import).
  void set_initial_plastic_strain(int elem, double eps_p_eq);

  /// Records the current phi >= threshold node set as the initial crack for
  /// front-advance measurements. Called automatically on the first run step.
  void freeze_initial_front();

  SolveReport solve_displacement(double lambda);
  void update_history();
  void solve_phase_field();
  StaggerReport staggered_step(double lambda);

  /// Adaptive displacement-controlled ramp to lambda = 1 with failure
  /// detection. Stops at the first failure event.
  RunResult run();

  /// Displacement ramp with perfectly plastic response (n = 0, damage off);
  /// returns the load plateau. Throws when no plateau is reached.
  LimitLoadResult run_limit_load();

  /// Warns (returns false) when the smallest element edge in the given set
  /// exceeds ell/4.
  bool preflight_mesh(const std::string& elset, double ell) const;

  double min_ell() const;

  /// Sum of driving reactions at the current state.
  double driving_reaction() const;

  /// Interpolated nodal phi and hydrogen concentration at a quadrature point.
  double phi_at(int elem, int q) const;
  double conc_at(int elem, int q) const;
  double gc_hydrogen_at(int elem, int q) const;

  /// Nodal displacement in the global frame (undoes any local node frame).
  std::pair<double, double> global_displacement(int node) const;

  const std::array<IsoMap, 4>& geometry(int elem) const { return geom_[elem]; }

  /// Applies per-element overrides and an initial stress field; returns the
  /// relative correction norm of the re-equilibration solve.
  double initialize_residual_stress(const std::vector<SymTensor2>& sigma0_per_elem);

 private:
  friend void update_nodal_sigma_h(Simulation&);
  friend void diffusion_step(Simulation&, double dt);
  friend void stationary_concentration(Simulation&);

  void assemble_displacement(double lambda, Eigen::SparseMatrix<double>& K,
                             Eigen::VectorXd& rhs, Eigen::VectorXd& f_int,
                             const Eigen::VectorXd& delta_presc,
                             const std::vector<char>& constrained);
  void commit();
  double front_advance() const;
  StepRecord make_record(int stagger_passes);

  Mesh mesh_;
  SolverConfig config_;
  std::vector<MaterialParams> mat_;
  std::vector<HydrogenParams> hyd_;
  HydrogenParams hyd_base_;
  bool has_hydrogen_params_ = false;

  std::vector<DirichletBC> dirichlet_;
  std::vector<NodalForce> forces_;
  std::vector<ConcentrationBC> conc_bcs_;
  std::vector<int> phi_pinned_;
  std::vector<double> frame_angle_;
  std::vector<char> has_frame_;

  std::vector<std::array<IsoMap, 4>> geom_;
  SimulationState state_;
  std::vector<std::array<PointState, 4>> qp_committed_;

  double tip_x_ = 0.0, tip_y_ = 0.0;
  bool has_tip_ = false;
  std::function<double(const Simulation&)> probe_;
  std::vector<int> initial_front_;
  bool front_frozen_ = false;

  double work_external_ = 0.0;
  double lambda_committed_ = 0.0;
  Eigen::VectorXd u_committed_;
  Eigen::VectorXd f_int_committed_;
};

}  // namespace fadforge
