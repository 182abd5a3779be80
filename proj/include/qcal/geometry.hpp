#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace qcal {

using Point2 = Eigen::Vector2d;

/// One electrode arc on the circle boundary, angles in radians.
/// `start` may exceed `end` numerically when the arc wraps through angle 0;
/// membership is always tested modulo 2*pi.
struct ElectrodeArc {
  double start = 0.0;
  double end = 0.0;
  double center = 0.0;
  double length = 0.0;  // arc length on the circle of the layout radius

  bool contains(double theta, double tol = 1e-12) const;
};

struct ElectrodeLayout {
  int count = 0;
  double radius = 1.0;
  double coverage = 0.5;
  std::vector<ElectrodeArc> arcs;
  std::vector<double> contact_impedance;

  /// Electrode center angles, one per electrode, in layout order.
  std::vector<double> center_angles() const;
  /// Boundary length per electrode slot (2*pi*radius / L); the quadrature
  /// weight used when electrode samples stand in for boundary integrals.
  double slot_length() const;
  void validate() const;
};

/// L equispaced electrodes, electrode l centered at 2*pi*l/L, all sharing
/// one contact impedance.
ElectrodeLayout place_electrodes(int count, double coverage, double contact_impedance,
                                 double radius = 1.0);

struct Mesh {
  std::vector<Point2> nodes;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<int> boundary_nodes;            // counterclockwise loop
  std::vector<double> boundary_angles;        // angle of each boundary node in [0, 2*pi)

  int node_count() const { return static_cast<int>(nodes.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }

  double signed_area(int tri) const;
  Point2 centroid(int tri) const;
  double max_edge_length() const;
  double min_area() const;
};

/// Boundary edge (consecutive boundary nodes) attributed to an electrode.
struct ElectrodeEdge {
  int electrode;
  int a;
  int b;
  double length;
};

/// Structured polar triangulation of the disk: concentric rings zipped
/// together, with every electrode endpoint placed on the boundary ring.
Mesh build_disk_mesh(double radius, double target_h, const ElectrodeLayout& layout);

/// Throws NumericalError describing the first violated invariant:
/// non-positive area, open boundary loop, non-increasing boundary angles,
/// or an edge not shared by exactly two triangles (interior) / one (boundary).
void validate_mesh(const Mesh& mesh);

/// Boundary edges lying under an electrode, grouped by electrode index.
std::vector<std::vector<ElectrodeEdge>> electrode_edges(const Mesh& mesh,
                                                        const ElectrodeLayout& layout);

/// Plain-text mesh format:
///   qcal-mesh 1
///   nodes <N>            followed by N lines "x y"
///   triangles <T>        followed by T lines "i j k" (zero-based)
///   boundary <B>         followed by B lines "index angle"
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

}  // namespace qcal
