#include "fadforge/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fadforge {

const std::vector<int>& Mesh::nset(const std::string& name) const {
  auto it = nsets.find(name);
  if (it == nsets.end()) throw std::domain_error("Mesh: unknown node set '" + name + "'");
  return it->second;
}

const std::vector<int>& Mesh::elset(const std::string& name) const {
  auto it = elsets.find(name);
  if (it == elsets.end()) throw std::domain_error("Mesh: unknown element set '" + name + "'");
  return it->second;
}

void Mesh::validate() const {
  const int nn = n_nodes();
  for (const auto& e : elems)
    for (int a : e)
      if (a < 0 || a >= nn) throw std::domain_error("Mesh: element references missing node");
  for (const auto& [name, set] : nsets)
    for (int a : set)
      if (a < 0 || a >= nn) throw std::domain_error("Mesh: node set '" + name + "' dangles");
  for (const auto& [name, set] : elsets)
    for (int e : set)
      if (e < 0 || e >= n_elems())
        throw std::domain_error("Mesh: element set '" + name + "' dangles");
  for (auto [a, b] : seams)
    if (a < 0 || a >= nn || b < 0 || b >= nn)
      throw std::domain_error("Mesh: seam references missing node");
  for (int e = 0; e < n_elems(); ++e)
    for (const auto& gp : QuadShape::gauss_points())
      if (iso_map(*this, e, gp[0], gp[1]).detJ <= 0.0)
        throw std::domain_error("Mesh: non-positive Jacobian in element " + std::to_string(e));
}

double Mesh::min_edge_length(const std::string& elset_name) const {
  double best = std::numeric_limits<double>::max();
  auto edge = [&](int a, int b) {
    const double dx = nodes[a].x - nodes[b].x;
    const double dy = nodes[a].y - nodes[b].y;
    best = std::min(best, std::hypot(dx, dy));
  };
  auto scan = [&](const Quad& q) {
    for (int k = 0; k < 4; ++k) edge(q[k], q[(k + 1) % 4]);
  };
  if (elset_name.empty()) {
    for (const auto& q : elems) scan(q);
  } else {
    for (int e : elset(elset_name)) scan(elems[e]);
  }
  return best;
}

std::vector<std::pair<int, int>> Mesh::boundary_edges() const {
  std::map<std::pair<int, int>, int> count;
  for (const auto& q : elems)
    for (int k = 0; k < 4; ++k) {
      int a = q[k], b = q[(k + 1) % 4];
      count[{std::min(a, b), std::max(a, b)}]++;
    }
  std::vector<std::pair<int, int>> out;
  for (const auto& [e, c] : count)
    if (c == 1) out.push_back(e);
  return out;
}

void QuadShape::eval(double xi, double eta, double N[4], double dN[4][2]) {
  N[0] = 0.25 * (1 - xi) * (1 - eta);
  N[1] = 0.25 * (1 + xi) * (1 - eta);
  N[2] = 0.25 * (1 + xi) * (1 + eta);
  N[3] = 0.25 * (1 - xi) * (1 + eta);
  dN[0][0] = -0.25 * (1 - eta);
  dN[0][1] = -0.25 * (1 - xi);
  dN[1][0] = 0.25 * (1 - eta);
  dN[1][1] = -0.25 * (1 + xi);
  dN[2][0] = 0.25 * (1 + eta);
  dN[2][1] = 0.25 * (1 + xi);
  dN[3][0] = -0.25 * (1 + eta);
  dN[3][1] = 0.25 * (1 - xi);
}

const std::array<std::array<double, 2>, 4>& QuadShape::gauss_points() {
  static const double g = 1.0 / std::sqrt(3.0);
  static const std::array<std::array<double, 2>, 4> pts = {
      {{-g, -g}, {g, -g}, {g, g}, {-g, g}}};
  return pts;
}

double QuadShape::gauss_weight() { return 1.0; }

IsoMap iso_map(const Mesh& mesh, int elem, double xi, double eta) {
  double N[4], dN[4][2];
  QuadShape::eval(xi, eta, N, dN);
  const Quad& q = mesh.elems[elem];
  double j[2][2] = {{0, 0}, {0, 0}};
  IsoMap out{};
  for (int a = 0; a < 4; ++a) {
    const Node& nd = mesh.nodes[q[a]];
    j[0][0] += dN[a][0] * nd.x;
    j[0][1] += dN[a][0] * nd.y;
    j[1][0] += dN[a][1] * nd.x;
    j[1][1] += dN[a][1] * nd.y;
    out.x += N[a] * nd.x;
    out.y += N[a] * nd.y;
  }
  out.detJ = j[0][0] * j[1][1] - j[0][1] * j[1][0];
  const double inv = 1.0 / out.detJ;
  const double ji[2][2] = {{j[1][1] * inv, -j[0][1] * inv}, {-j[1][0] * inv, j[0][0] * inv}};
  for (int a = 0; a < 4; ++a) {
    out.dNdx[a][0] = ji[0][0] * dN[a][0] + ji[0][1] * dN[a][1];
    out.dNdx[a][1] = ji[1][0] * dN[a][0] + ji[1][1] * dN[a][1];
  }
  out.weight = out.detJ * QuadShape::gauss_weight();
  return out;
}

}  // namespace fadforge
