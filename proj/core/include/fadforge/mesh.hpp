#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

namespace fadforge {

struct Node {
  double x = 0.0;
  double y = 0.0;
};

/// 4-node quadrilateral, counter-clockwise node ordering.
using Quad = std::array<int, 4>;

/// 2D quad mesh with named node/element sets and crack seams represented by
/// duplicated node pairs (lower/left copy first).
struct Mesh {
  std::vector<Node> nodes;
  std::vector<Quad> elems;
  std::map<std::string, std::vector<int>> nsets;
  std::map<std::string, std::vector<int>> elsets;
  std::vector<std::pair<int, int>> seams;

  int n_nodes() const { return int(nodes.size()); }
  int n_elems() const { return int(elems.size()); }

  const std::vector<int>& nset(const std::string& name) const;
  const std::vector<int>& elset(const std::string& name) const;
  bool has_nset(const std::string& name) const { return nsets.count(name) > 0; }
  bool has_elset(const std::string& name) const { return elsets.count(name) > 0; }

  /// Throws when ids are out of range, sets dangle, or any element has a
  /// non-positive Jacobian at a 2x2 Gauss point.
  void validate() const;

  /// Smallest element edge length within the given element set (whole mesh
  /// when the set name is empty).
  double min_edge_length(const std::string& elset_name = {}) const;

  /// Boundary edges (pairs of node indices) appearing in exactly one element.
  std::vector<std::pair<int, int>> boundary_edges() const;
};

/// Bilinear quad shape machinery shared by assembly and post-processing.
struct QuadShape {
  // Shape values and parent-space gradients at a parent point (xi, eta).
  static void eval(double xi, double eta, double N[4], double dN[4][2]);
  // 2x2 Gauss rule on the parent square.
  static const std::array<std::array<double, 2>, 4>& gauss_points();
  static double gauss_weight();
};

/// Jacobian, physical shape gradients and integration weight of an element at
/// one parent-space quadrature point.
struct IsoMap {
  double dNdx[4][2];
  double detJ;
  double weight;  // detJ * gauss weight
  double x, y;    // physical coordinates of the point
};

IsoMap iso_map(const Mesh& mesh, int elem, double xi, double eta);

}  // namespace fadforge
