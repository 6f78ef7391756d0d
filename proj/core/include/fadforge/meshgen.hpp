#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fadforge/mesh.hpp"

namespace fadforge {

/// One graded interval: element size runs geometrically from h0 at x0 to h1
/// at x1.
struct AxisSegment {
  double x0, x1, h0, h1;
};

/// Monotone coordinate array covering the segments; every segment boundary is
/// a grid point.
std::vector<double> graded_axis(const std::vector<AxisSegment>& segments);

/// Tensor-product quad mesh builder with optional coordinate transform and
/// crack seams along grid lines. Seam node sets are emitted as <name>_a
/// (original side), <name>_b (duplicated side), <name>_tip / <name>_tip2.
/// Boundary node sets bottom/top/left/right refer to the logical grid.
class StructuredMeshBuilder {
 public:
  StructuredMeshBuilder(std::vector<double> xs, std::vector<double> ys);

  void set_transform(std::function<Node(double, double)> t) { transform_ = std::move(t); }

  /// Seam along row j (y = ys[j]) for columns [i_from, i_to]. A tip end keeps
  /// a single shared node; a non-tip end is open (surface-breaking).
  void add_row_seam(const std::string& name, int j, int i_from, int i_to, bool tip_from,
                    bool tip_to);
  void add_col_seam(const std::string& name, int i, int j_from, int j_to, bool tip_from,
                    bool tip_to);

  int index_of_x(double x) const;
  int index_of_y(double y) const;
  int nx() const { return int(xs_.size()) - 1; }
  int ny() const { return int(ys_.size()) - 1; }

  Mesh build() const;

 private:
  struct Seam {
    std::string name;
    bool row;
    int line, from, to;
    bool tip_from, tip_to;
  };
  std::vector<double> xs_, ys_;
  std::function<Node(double, double)> transform_;
  std::vector<Seam> seams_;
};

/// Elements whose centroid satisfies the predicate.
std::vector<int> select_elements(const Mesh& mesh,
                                 const std::function<bool(double, double)>& pred);

struct SentRefinement {
  double h_fine = 0.1;    // element size near and ahead of the tip
  double band = -1.0;     // fine band half height (default 8 h_fine)
  double x_back = -1.0;   // fine extent behind the tip (default 6 h_fine)
  double x_ahead = -1.0;  // fine extent ahead of the tip (default 30 h_fine)
  double h_max = -1.0;    // far-field size (default W/10)
  double growth_limited_h_max_y = -1.0;  // far size along the length (default L/16)
  std::size_t max_elements = 500000;
};

/// SENT plate [0,W] x [-L/2, L/2] with an edge crack seam at y = 0,
/// x in [0, a0]. Node sets: bottom, top, left, right, crack_a, crack_b,
/// crack_tip. Element set path_band covers the refined strip.
Mesh generate_sent_mesh(double W, double L, double a0, const SentRefinement& r);

struct SsyOptions {
  double R = 100.0;      // half-size of the square boundary-layer domain
  double h_fine = 0.25;
  double band = -1.0;    // default 8 h_fine
  double ahead = -1.0;   // fine zone ahead of the tip (default 40 h_fine)
  double back = -1.0;    // fine zone behind the tip (default 10 h_fine)
  double h_max = -1.0;   // default R/8
  std::size_t max_elements = 500000;
};

/// Small-scale-yielding domain [-R,R]^2 with a crack seam along y = 0,
/// x in [-R, 0] and the tip at the origin. Node set "outer" collects the
/// boundary for prescribed K-field displacements.
Mesh generate_ssy_mesh(const SsyOptions& o);

struct PipeDefect {
  enum class Kind { inner_surface, outer_surface, embedded };
  Kind kind = Kind::embedded;
  double length = 2.0;       // seam length [mm]
  double depth_frac = 0.5;   // centre depth fraction through the wall (embedded)
  double tilt = 0.0;         // tangent of the inclination from the radial direction
  double offset_arc = 0.0;   // arc-length offset of the defect from the weld centre [mm]
};

struct PipeMeshOptions {
  double OD = 762.0;
  double t = 12.7;
  double sector = 0.5235987755982988;  // 30 degrees
  PipeDefect defect;
  double h_fine = 0.25;
  double band = -1.0;       // fine half-extent around the defect (default 8 h_fine)
  double h_max_arc = -1.0;  // far size along the arc (default sector arc / 60)
  double h_max_r = -1.0;    // far size through the wall (default t/10)
  double weld_root_width = 6.0;   // V-groove width at the inner surface
  double weld_cap_width = 14.0;   // V-groove width at the outer surface
  double haz_width = 2.5;
  std::size_t max_elements = 500000;
};

/// Plane-strain ring sector with a seam defect near the weld centre line.
/// Node sets: inner, outer, cut0, cut1, crack_a, crack_b, crack_tip
/// (+ crack_tip2 for embedded defects). Element sets: weld, haz, base,
/// nominal_section, path_band.
Mesh generate_pipe_section_mesh(const PipeMeshOptions& o);

struct CrackTipInfo {
  int tip_node = -1;
  double x = 0.0, y = 0.0;
  double dir_x = 1.0, dir_y = 0.0;  // unit vector pointing ahead of the crack
};

/// Tip position and crack direction recovered from the seam node sets
/// (<prefix>_tip plus the adjacent seam pair).
CrackTipInfo crack_tip_info(const Mesh& mesh, const std::string& prefix = "crack",
                            const std::string& tip_set = "crack_tip");

}  // namespace fadforge
