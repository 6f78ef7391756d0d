#include "fadforge/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fadforge {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::domain_error(msg);
}

void append_segment(std::vector<double>& coords, const AxisSegment& s) {
  const double L = s.x1 - s.x0;
  require(L > 0.0 && s.h0 > 0.0 && s.h1 > 0.0, "graded_axis: malformed segment");
  std::vector<double> h;
  if (L <= 1.0001 * std::max(s.h0, s.h1)) {
    const int n = std::max<int>(1, std::lround(L / std::min(s.h0, s.h1)));
    h.assign(n, L / n);
  } else if (std::abs(s.h1 - s.h0) <= 1e-9 * s.h0) {
    const int n = std::max<int>(1, std::lround(L / s.h0));
    h.assign(n, L / n);
  } else {
    const double r = (L - s.h0) / (L - s.h1);
    const int n = std::max<int>(1, std::lround(std::log(s.h1 / s.h0) / std::log(r)));
    h.resize(n);
    double sum = 0.0, hk = s.h0;
    for (int k = 0; k < n; ++k, hk *= r) {
      h[k] = hk;
      sum += hk;
    }
    for (double& v : h) v *= L / sum;  // exact fit
  }
  double x = s.x0;
  for (double v : h) {
    x += v;
    coords.push_back(x);
  }
  coords.back() = s.x1;
}

}  // namespace

std::vector<double> graded_axis(const std::vector<AxisSegment>& segments) {
  require(!segments.empty(), "graded_axis: no segments");
  std::vector<double> coords{segments.front().x0};
  double expect = segments.front().x0;
  for (const auto& s : segments) {
    require(std::abs(s.x0 - expect) < 1e-9 * std::max(1.0, std::abs(expect)),
            "graded_axis: segments must tile contiguously");
    append_segment(coords, s);
    expect = s.x1;
  }
  return coords;
}

StructuredMeshBuilder::StructuredMeshBuilder(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  require(xs_.size() >= 2 && ys_.size() >= 2, "StructuredMeshBuilder: degenerate axes");
}

namespace {
int locate(const std::vector<double>& v, double x, const char* what) {
  int best = 0;
  double dist = std::abs(v[0] - x);
  for (size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i] - x) < dist) {
      dist = std::abs(v[i] - x);
      best = int(i);
    }
  const double span = v.back() - v.front();
  require(dist <= 1e-6 * span, std::string(what) + ": coordinate is not a grid point");
  return best;
}
}  // namespace

int StructuredMeshBuilder::index_of_x(double x) const { return locate(xs_, x, "index_of_x"); }
int StructuredMeshBuilder::index_of_y(double y) const { return locate(ys_, y, "index_of_y"); }

void StructuredMeshBuilder::add_row_seam(const std::string& name, int j, int i_from, int i_to,
                                         bool tip_from, bool tip_to) {
  require(j > 0 && j < ny(), "add_row_seam: seam row must be interior");
  require(i_from >= 0 && i_to > i_from && i_to <= nx(), "add_row_seam: bad column range");
  seams_.push_back({name, true, j, i_from, i_to, tip_from, tip_to});
}

void StructuredMeshBuilder::add_col_seam(const std::string& name, int i, int j_from, int j_to,
                                         bool tip_from, bool tip_to) {
  require(i > 0 && i < nx(), "add_col_seam: seam column must be interior");
  require(j_from >= 0 && j_to > j_from && j_to <= ny(), "add_col_seam: bad row range");
  seams_.push_back({name, false, i, j_from, j_to, tip_from, tip_to});
}

Mesh StructuredMeshBuilder::build() const {
  const int nxn = int(xs_.size());
  const int nyn = int(ys_.size());
  auto gid = [&](int i, int j) { return j * nxn + i; };

  Mesh mesh;
  mesh.nodes.resize(size_t(nxn) * nyn);
  std::vector<std::pair<int, int>> node_grid(mesh.nodes.size());
  for (int j = 0; j < nyn; ++j)
    for (int i = 0; i < nxn; ++i) {
      const int id = gid(i, j);
      mesh.nodes[id] = transform_ ? transform_(xs_[i], ys_[j]) : Node{xs_[i], ys_[j]};
      node_grid[id] = {i, j};
    }

  const int nex = nxn - 1, ney = nyn - 1;
  mesh.elems.reserve(size_t(nex) * ney);
  for (int j = 0; j < ney; ++j)
    for (int i = 0; i < nex; ++i)
      mesh.elems.push_back({gid(i, j), gid(i + 1, j), gid(i + 1, j + 1), gid(i, j + 1)});
  auto eid = [&](int i, int j) { return j * nex + i; };

  for (const auto& s : seams_) {
    std::vector<int> side_a, side_b, tips;
    for (int k = s.from; k <= s.to; ++k) {
      const bool is_tip = (k == s.from && s.tip_from) || (k == s.to && s.tip_to);
      const int orig = s.row ? gid(k, s.line) : gid(s.line, k);
      if (is_tip) {
        tips.push_back(orig);
        continue;
      }
      const int twin = int(mesh.nodes.size());
      mesh.nodes.push_back(mesh.nodes[orig]);
      node_grid.push_back(node_grid[orig]);
      if (s.row) {
        // Elements whose bottom edge lies on the seam switch to the twin.
        for (int ei : {k - 1, k})
          if (ei >= 0 && ei < nex && s.line < nyn - 1)
            for (int& a : mesh.elems[eid(ei, s.line)])
              if (a == orig) a = twin;
      } else {
        // Elements on the positive-x side of the seam column.
        for (int ej : {k - 1, k})
          if (ej >= 0 && ej < ney && s.line < nxn - 1)
            for (int& a : mesh.elems[eid(s.line, ej)])
              if (a == orig) a = twin;
      }
      mesh.seams.push_back({orig, twin});
      side_a.push_back(orig);
      side_b.push_back(twin);
    }
    mesh.nsets[s.name + "_a"] = side_a;
    mesh.nsets[s.name + "_b"] = side_b;
    if (!tips.empty()) mesh.nsets[s.name + "_tip"] = {tips.front()};
    if (tips.size() > 1) mesh.nsets[s.name + "_tip2"] = {tips.back()};
  }

  std::vector<int> bottom, top, left, right;
  for (int id = 0; id < int(mesh.nodes.size()); ++id) {
    const auto [i, j] = node_grid[id];
    if (j == 0) bottom.push_back(id);
    if (j == nyn - 1) top.push_back(id);
    if (i == 0) left.push_back(id);
    if (i == nxn - 1) right.push_back(id);
  }
  mesh.nsets["bottom"] = bottom;
  mesh.nsets["top"] = top;
  mesh.nsets["left"] = left;
  mesh.nsets["right"] = right;
  return mesh;
}

std::vector<int> select_elements(const Mesh& mesh,
                                 const std::function<bool(double, double)>& pred) {
  std::vector<int> out;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    double cx = 0, cy = 0;
    for (int a : mesh.elems[e]) {
      cx += mesh.nodes[a].x;
      cy += mesh.nodes[a].y;
    }
    if (pred(0.25 * cx, 0.25 * cy)) out.push_back(e);
  }
  return out;
}

Mesh generate_sent_mesh(double W, double L, double a0, const SentRefinement& r) {
  require(W > 0.0 && L > 0.0, "generate_sent_mesh: W and L must be positive");
  require(a0 > 0.0 && a0 < W, "generate_sent_mesh: need 0 < a0 < W");
  const double h = r.h_fine;
  require(h > 0.0, "generate_sent_mesh: h_fine must be positive");
  const double band = r.band > 0.0 ? r.band : 8.0 * h;
  const double back = r.x_back > 0.0 ? r.x_back : 6.0 * h;
  const double ahead = r.x_ahead > 0.0 ? r.x_ahead : 30.0 * h;
  const double h_max = r.h_max > 0.0 ? r.h_max : W / 10.0;
  const double h_max_y = r.growth_limited_h_max_y > 0.0 ? r.growth_limited_h_max_y : L / 16.0;

  const double xf0 = std::max(0.0, a0 - back);
  const double xf1 = std::min(W, a0 + ahead);
  std::vector<AxisSegment> xsegs;
  if (xf0 > 0.0) xsegs.push_back({0.0, xf0, std::min(h_max, xf0), h});
  if (xf0 < a0) xsegs.push_back({xf0, a0, h, h});
  xsegs.push_back({a0, xf1, h, h});
  if (xf1 < W) xsegs.push_back({xf1, W, h, std::min(h_max, W - xf1)});
  const auto xs = graded_axis(xsegs);

  std::vector<AxisSegment> ypos;
  ypos.push_back({0.0, band, h, h});
  if (band < 0.5 * L) ypos.push_back({band, 0.5 * L, h, std::min(h_max_y, 0.5 * L - band)});
  const auto yhalf = graded_axis(ypos);
  std::vector<double> ys;
  for (auto it = yhalf.rbegin(); it != yhalf.rend(); ++it) ys.push_back(-*it);
  for (size_t i = 1; i < yhalf.size(); ++i) ys.push_back(yhalf[i]);

  if ((xs.size() - 1) * (ys.size() - 1) > r.max_elements)
    throw std::runtime_error("generate_sent_mesh: refinement budget exceeded");

  StructuredMeshBuilder b(xs, ys);
  b.add_row_seam("crack", b.index_of_y(0.0), 0, b.index_of_x(a0), false, true);
  Mesh mesh = b.build();
  mesh.elsets["path_band"] = select_elements(mesh, [&](double x, double y) {
    return std::abs(y) <= band && x >= xf0 - 1e-9 && x <= xf1 + 1e-9;
  });
  mesh.validate();
  return mesh;
}

Mesh generate_ssy_mesh(const SsyOptions& o) {
  const double h = o.h_fine;
  require(o.R > 0.0 && h > 0.0, "generate_ssy_mesh: R and h_fine must be positive");
  const double band = o.band > 0.0 ? o.band : 8.0 * h;
  const double ahead = o.ahead > 0.0 ? o.ahead : 40.0 * h;
  const double back = o.back > 0.0 ? o.back : 10.0 * h;
  const double h_max = o.h_max > 0.0 ? o.h_max : o.R / 8.0;
  require(ahead < o.R && back < o.R, "generate_ssy_mesh: fine zone exceeds the domain");

  std::vector<AxisSegment> xsegs;
  xsegs.push_back({-o.R, -back, h_max, h});
  xsegs.push_back({-back, 0.0, h, h});
  xsegs.push_back({0.0, ahead, h, h});
  xsegs.push_back({ahead, o.R, h, h_max});
  const auto xs = graded_axis(xsegs);

  std::vector<AxisSegment> ypos;
  ypos.push_back({0.0, band, h, h});
  ypos.push_back({band, o.R, h, h_max});
  const auto yhalf = graded_axis(ypos);
  std::vector<double> ys;
  for (auto it = yhalf.rbegin(); it != yhalf.rend(); ++it) ys.push_back(-*it);
  for (size_t i = 1; i < yhalf.size(); ++i) ys.push_back(yhalf[i]);

  if ((xs.size() - 1) * (ys.size() - 1) > o.max_elements)
    throw std::runtime_error("generate_ssy_mesh: refinement budget exceeded");

  StructuredMeshBuilder b(xs, ys);
  b.add_row_seam("crack", b.index_of_y(0.0), 0, b.index_of_x(0.0), false, true);
  Mesh mesh = b.build();
  std::vector<int> outer;
  for (const char* s : {"bottom", "top", "left", "right"})
    for (int n : mesh.nset(s)) outer.push_back(n);
  std::sort(outer.begin(), outer.end());
  outer.erase(std::unique(outer.begin(), outer.end()), outer.end());
  mesh.nsets["outer"] = outer;
  mesh.elsets["path_band"] = select_elements(mesh, [&](double x, double y) {
    return std::abs(y) <= band && x >= -back && x <= ahead;
  });
  mesh.validate();
  return mesh;
}

Mesh generate_pipe_section_mesh(const PipeMeshOptions& o) {
  const double r_out = 0.5 * o.OD;
  const double r_in = r_out - o.t;
  require(r_in > 0.0 && o.t > 0.0, "generate_pipe_section_mesh: bad pipe geometry");
  const double r_mid = 0.5 * (r_in + r_out);
  const double U = o.sector * r_mid;
  const double h = o.h_fine;
  require(h > 0.0, "generate_pipe_section_mesh: h_fine must be positive");
  const double band = o.band > 0.0 ? o.band : 8.0 * h;
  const double h_arc = o.h_max_arc > 0.0 ? o.h_max_arc : U / 60.0;
  const double h_r = o.h_max_r > 0.0 ? o.h_max_r : o.t / 10.0;

  const PipeDefect& d = o.defect;
  require(d.length > 0.0, "generate_pipe_section_mesh: zero-length defect");
  const double cos_t = 1.0 / std::sqrt(1.0 + d.tilt * d.tilt);
  const double span = d.length * cos_t;  // radial extent of the seam
  double v0, v1;
  bool tip_from = true, tip_to = true;
  switch (d.kind) {
    case PipeDefect::Kind::inner_surface:
      v0 = 0.0;
      v1 = span;
      tip_from = false;
      break;
    case PipeDefect::Kind::outer_surface:
      v0 = o.t - span;
      v1 = o.t;
      tip_to = false;
      break;
    case PipeDefect::Kind::embedded:
    default:
      v0 = d.depth_frac * o.t - 0.5 * span;
      v1 = d.depth_frac * o.t + 0.5 * span;
      break;
  }
  require(v0 >= -1e-9 && v1 <= o.t + 1e-9, "generate_pipe_section_mesh: defect outside wall");
  v0 = std::max(0.0, v0);
  v1 = std::min(o.t, v1);

  const double u_c = 0.5 * U + d.offset_arc;
  require(u_c > band && u_c < U - band, "generate_pipe_section_mesh: defect too close to the cut faces");

  const double vf0 = std::max(0.0, v0 - band);
  const double vf1 = std::min(o.t, v1 + band);
  std::vector<AxisSegment> vsegs;
  if (vf0 > 0.0) vsegs.push_back({0.0, vf0, std::min(h_r, vf0), h});
  if (vf0 < v0) vsegs.push_back({vf0, v0, h, h});
  vsegs.push_back({v0, v1, h, h});
  if (v1 < vf1) vsegs.push_back({v1, vf1, h, h});
  if (vf1 < o.t) vsegs.push_back({vf1, o.t, h, std::min(h_r, o.t - vf1)});
  const auto vs = graded_axis(vsegs);

  std::vector<AxisSegment> usegs;
  usegs.push_back({0.0, u_c - band, h_arc, h});
  usegs.push_back({u_c - band, u_c, h, h});
  usegs.push_back({u_c, u_c + band, h, h});
  usegs.push_back({u_c + band, U, h, h_arc});
  const auto us = graded_axis(usegs);

  if ((us.size() - 1) * (vs.size() - 1) > o.max_elements)
    throw std::runtime_error("generate_pipe_section_mesh: refinement budget exceeded");

  // Logical shear tilts the seam column near the defect, fading out before the
  // cut faces so they stay radial.
  const double s = d.tilt;
  const double v_c = 0.5 * (v0 + v1);
  const double w0 = band + 1e-9;
  const double w1 = w0 + std::max(2.0 * std::abs(s) * o.t, 4.0 * band);
  require(w1 < 0.5 * U, "generate_pipe_section_mesh: tilt fade exceeds the sector");
  auto fade = [=](double du) {
    const double a = (std::abs(du) - w0) / (w1 - w0);
    if (a <= 0.0) return 1.0;
    if (a >= 1.0) return 0.0;
    return 1.0 - (3.0 * a * a - 2.0 * a * a * a);
  };
  auto transform = [=](double u, double v) {
    const double up = u + s * (v - v_c) * fade(u - u_c);
    const double theta = 0.5 * o.sector - up / r_mid;
    const double r = r_in + v;
    return Node{r * std::cos(theta), r * std::sin(theta)};
  };

  StructuredMeshBuilder b(us, vs);
  b.set_transform(transform);
  b.add_col_seam("crack", b.index_of_x(u_c), b.index_of_y(v0), b.index_of_y(v1), tip_from,
                 tip_to);
  Mesh mesh = b.build();

  // Logical boundaries: bottom = inner surface, top = outer, left/right = cuts.
  mesh.nsets["inner"] = mesh.nsets["bottom"];
  mesh.nsets["outer_surface"] = mesh.nsets["top"];
  mesh.nsets["cut0"] = mesh.nsets["left"];
  mesh.nsets["cut1"] = mesh.nsets["right"];
  mesh.nsets.erase("bottom");
  mesh.nsets.erase("top");
  mesh.nsets.erase("left");
  mesh.nsets.erase("right");

  auto arc_of = [&](double x, double y) {
    const double theta = std::atan2(y, x);
    const double u = (0.5 * o.sector - theta) * r_mid;
    return u - 0.5 * U;  // signed arc distance from the weld centre line
  };
  std::vector<int> weld, haz, base;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    double cx = 0, cy = 0;
    for (int a : mesh.elems[e]) {
      cx += mesh.nodes[a].x;
      cy += mesh.nodes[a].y;
    }
    cx *= 0.25;
    cy *= 0.25;
    const double v = std::hypot(cx, cy) - r_in;
    const double sa = std::abs(arc_of(cx, cy));
    const double half = 0.5 * (o.weld_root_width +
                               (o.weld_cap_width - o.weld_root_width) * std::clamp(v / o.t, 0.0, 1.0));
    if (sa <= half)
      weld.push_back(e);
    else if (sa <= half + o.haz_width)
      haz.push_back(e);
    else
      base.push_back(e);
  }
  mesh.elsets["weld"] = weld;
  mesh.elsets["haz"] = haz;
  mesh.elsets["base"] = base;
  mesh.elsets["nominal_section"] = select_elements(mesh, [&](double x, double y) {
    return std::abs(arc_of(x, y)) >= 0.38 * U;
  });
  const double dx0 = (r_in + v_c);
  const Node centre{dx0 * std::cos(0.5 * o.sector - (u_c / r_mid)),
                    dx0 * std::sin(0.5 * o.sector - (u_c / r_mid))};
  mesh.elsets["path_band"] = select_elements(mesh, [&](double x, double y) {
    return std::hypot(x - centre.x, y - centre.y) <= 0.5 * d.length + band;
  });
  mesh.validate();
  return mesh;
}

CrackTipInfo crack_tip_info(const Mesh& mesh, const std::string& prefix,
                            const std::string& tip_set) {
  const auto& tips = mesh.nset(tip_set);
  require(tips.size() == 1, "crack_tip_info: tip set must contain exactly one node");
  CrackTipInfo info;
  info.tip_node = tips.front();
  info.x = mesh.nodes[info.tip_node].x;
  info.y = mesh.nodes[info.tip_node].y;
  const auto& face = mesh.nset(prefix + "_a");
  double best = -1.0;
  for (int n : face) {
    const double dx = info.x - mesh.nodes[n].x;
    const double dy = info.y - mesh.nodes[n].y;
    const double d2 = dx * dx + dy * dy;
    if (d2 > 1e-20 && (best < 0.0 || d2 < best)) {
      best = d2;
      info.dir_x = dx;
      info.dir_y = dy;
    }
  }
  require(best > 0.0, "crack_tip_info: could not infer the crack direction");
  const double norm = std::hypot(info.dir_x, info.dir_y);
  info.dir_x /= norm;
  info.dir_y /= norm;
  return info;
}

}  // namespace fadforge
