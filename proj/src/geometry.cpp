#include "qcal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <utility>

#include "qcal/errors.hpp"

namespace qcal {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double t) {
  double w = std::fmod(t, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

// Signed difference a - b folded into (-pi, pi].
double signed_angle_diff(double a, double b) {
  double d = wrap_angle(a - b);
  return d > std::numbers::pi ? d - kTwoPi : d;
}

Point2 polar(double r, double t) { return {r * std::cos(t), r * std::sin(t)}; }

// Triangulate the band between two concentric rings whose node angles are
// sorted ascending in [0, 2*pi).
void zip_rings(const std::vector<int>& inner, const std::vector<double>& inner_angle, double r_in,
               const std::vector<int>& outer, const std::vector<double>& outer_angle, double r_out,
               std::vector<std::array<int, 3>>& out) {
  const int p = static_cast<int>(inner.size());
  const int q = static_cast<int>(outer.size());
  int j0 = 0;
  double best = 10.0;
  for (int j = 0; j < q; ++j) {
    double d = std::abs(signed_angle_diff(outer_angle[j], inner_angle[0]));
    if (d < best) {
      best = d;
      j0 = j;
    }
  }
  std::vector<double> a(p + 1), b(q + 1);
  for (int i = 0; i < p; ++i) a[i] = inner_angle[i];
  a[p] = inner_angle[0] + kTwoPi;
  b[0] = inner_angle[0] + signed_angle_diff(outer_angle[j0], inner_angle[0]);
  for (int k = 1; k <= q; ++k) {
    double step = wrap_angle(outer_angle[(j0 + k) % q] - outer_angle[(j0 + k - 1) % q]);
    b[k] = b[k - 1] + (k == q ? kTwoPi - (b[q - 1] - b[0]) : step);
  }
  int i = 0, j = 0;
  while (i < p || j < q) {
    bool advance_inner;
    if (i == p) advance_inner = false;
    else if (j == q) advance_inner = true;
    else {
      // Take the shorter of the two candidate diagonals.
      auto chord2 = [&](double ta, double tb) {
        return r_in * r_in + r_out * r_out - 2.0 * r_in * r_out * std::cos(ta - tb);
      };
      advance_inner = chord2(a[i + 1], b[j]) < chord2(a[i], b[j + 1]);
    }
    if (advance_inner) {
      out.push_back({inner[i % p], outer[(j0 + j) % q], inner[(i + 1) % p]});
      ++i;
    } else {
      out.push_back({inner[i % p], outer[(j0 + j) % q], outer[(j0 + j + 1) % q]});
      ++j;
    }
  }
}

}  // namespace

bool ElectrodeArc::contains(double theta, double tol) const {
  double span = wrap_angle(end - start);
  double d = wrap_angle(theta - start);
  return d <= span + tol || d >= kTwoPi - tol;
}

std::vector<double> ElectrodeLayout::center_angles() const {
  std::vector<double> c;
  c.reserve(arcs.size());
  for (const auto& a : arcs) c.push_back(a.center);
  return c;
}

double ElectrodeLayout::slot_length() const { return kTwoPi * radius / count; }

void ElectrodeLayout::validate() const {
  if (count < 4 || count % 2 != 0)
    throw ConfigError("electrode count must be even and >= 4, got " + std::to_string(count));
  if (static_cast<int>(arcs.size()) != count ||
      static_cast<int>(contact_impedance.size()) != count)
    throw ConfigError("electrode layout arrays do not match the electrode count");
  for (int l = 0; l < count; ++l) {
    if (!(contact_impedance[l] > 0.0))
      throw ConfigError("contact impedance of electrode " + std::to_string(l) + " must be positive");
    if (!(arcs[l].length > 0.0))
      throw ConfigError("electrode " + std::to_string(l) + " has non-positive arc length");
  }
  for (int l = 0; l < count; ++l) {
    const auto& cur = arcs[l];
    const auto& next = arcs[(l + 1) % count];
    double gap = wrap_angle(next.start - cur.end);
    double sweep = wrap_angle(next.center - cur.center);
    if (gap <= 0.0 || gap >= sweep)
      throw ConfigError("electrode arcs " + std::to_string(l) + " and " +
                        std::to_string((l + 1) % count) + " overlap or are out of order");
  }
}

ElectrodeLayout place_electrodes(int count, double coverage, double contact_impedance,
                                 double radius) {
  if (count < 4) throw ConfigError("place_electrodes: need at least 4 electrodes");
  if (count % 2 != 0)
    throw ConfigError("place_electrodes: electrode count must be even (trigonometric patterns "
                      "split the basis in halves), got " + std::to_string(count));
  if (!(coverage > 0.0 && coverage < 1.0))
    throw ConfigError("place_electrodes: coverage must lie in (0, 1)");
  if (!(contact_impedance > 0.0)) throw ConfigError("place_electrodes: contact impedance must be > 0");
  if (!(radius > 0.0)) throw ConfigError("place_electrodes: radius must be > 0");

  ElectrodeLayout layout;
  layout.count = count;
  layout.radius = radius;
  layout.coverage = coverage;
  const double half = 0.5 * coverage * kTwoPi / count;
  for (int l = 0; l < count; ++l) {
    double c = kTwoPi * l / count;
    layout.arcs.push_back({wrap_angle(c - half), wrap_angle(c + half), c, 2.0 * half * radius});
  }
  layout.contact_impedance.assign(count, contact_impedance);
  return layout;
}

double Mesh::signed_area(int tri) const {
  const auto& t = triangles[tri];
  const Point2 e1 = nodes[t[1]] - nodes[t[0]];
  const Point2 e2 = nodes[t[2]] - nodes[t[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

Point2 Mesh::centroid(int tri) const {
  const auto& t = triangles[tri];
  return (nodes[t[0]] + nodes[t[1]] + nodes[t[2]]) / 3.0;
}

double Mesh::max_edge_length() const {
  double m = 0.0;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) m = std::max(m, (nodes[t[k]] - nodes[t[(k + 1) % 3]]).norm());
  return m;
}

double Mesh::min_area() const {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < triangle_count(); ++i) m = std::min(m, signed_area(i));
  return m;
}

Mesh build_disk_mesh(double radius, double target_h, const ElectrodeLayout& layout) {
  if (!(radius > 0.0) || !(target_h > 0.0))
    throw ConfigError("build_disk_mesh: radius and target_h must be positive");
  if (!(target_h < radius)) throw ConfigError("build_disk_mesh: target_h must be smaller than radius");
  layout.validate();
  if (std::abs(layout.radius - radius) > 1e-12 * radius)
    throw ConfigError("build_disk_mesh: electrode layout radius differs from the mesh radius");
  for (int l = 0; l < layout.count; ++l) {
    // A boundary spacing of target_h snaps both ends of a shorter arc onto
    // the same node, leaving the electrode without a boundary edge.
    if (layout.arcs[l].length < 0.5 * target_h)
      throw ConfigError("build_disk_mesh: target_h " + std::to_string(target_h) +
                        " is too coarse to resolve electrode " + std::to_string(l) +
                        " (arc length " + std::to_string(layout.arcs[l].length) + ")");
  }

  // Boundary ring: subdivide each electrode arc and each gap separately.
  std::vector<double> breaks;
  for (const auto& a : layout.arcs) {
    breaks.push_back(a.start);
    breaks.push_back(a.end);
  }
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> bangles;
  for (size_t k = 0; k < breaks.size(); ++k) {
    double t0 = breaks[k];
    double t1 = k + 1 < breaks.size() ? breaks[k + 1] : breaks[0] + kTwoPi;
    double span = t1 - t0;
    int m = std::max(1, static_cast<int>(std::ceil(radius * span / target_h - 1e-9)));
    for (int s = 0; s < m; ++s) bangles.push_back(wrap_angle(t0 + span * s / m));
  }
  std::sort(bangles.begin(), bangles.end());

  Mesh mesh;
  mesh.nodes.push_back({0.0, 0.0});
  const int rings = static_cast<int>(std::ceil(radius / target_h - 1e-9));

  std::vector<int> prev_idx;
  std::vector<double> prev_ang;
  double prev_r = 0.0;
  for (int i = 1; i <= rings; ++i) {
    std::vector<double> ang;
    const double r = radius * i / rings;
    if (i == rings) {
      ang = bangles;
    } else {
      int n = std::max(6, static_cast<int>(std::ceil(kTwoPi * r / target_h - 1e-9)));
      double offset = (i % 2 == 1) ? 0.5 * kTwoPi / n : 0.0;
      for (int k = 0; k < n; ++k) ang.push_back(wrap_angle(offset + kTwoPi * k / n));
      std::sort(ang.begin(), ang.end());
    }
    std::vector<int> idx;
    for (double t : ang) {
      idx.push_back(mesh.node_count());
      mesh.nodes.push_back(i == rings ? polar(radius, t) : polar(r, t));
    }
    if (i == 1) {
      const int n = static_cast<int>(idx.size());
      for (int k = 0; k < n; ++k) mesh.triangles.push_back({0, idx[k], idx[(k + 1) % n]});
    } else {
      zip_rings(prev_idx, prev_ang, prev_r, idx, ang, r, mesh.triangles);
    }
    prev_idx = std::move(idx);
    prev_ang = std::move(ang);
    prev_r = r;
  }
  mesh.boundary_nodes = prev_idx;
  mesh.boundary_angles = prev_ang;

  for (int t = 0; t < mesh.triangle_count(); ++t) {
    double a = mesh.signed_area(t);
    if (a < 0.0) std::swap(mesh.triangles[t][1], mesh.triangles[t][2]);
  }
  validate_mesh(mesh);
  return mesh;
}

void validate_mesh(const Mesh& mesh) {
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    for (int k : mesh.triangles[t])
      if (k < 0 || k >= mesh.node_count())
        throw NumericalError("mesh: triangle " + std::to_string(t) + " references a missing node");
    if (!(mesh.signed_area(t) > 0.0))
      throw NumericalError("mesh: triangle " + std::to_string(t) + " has non-positive area");
  }
  const auto& bn = mesh.boundary_nodes;
  if (bn.size() < 3 || bn.size() != mesh.boundary_angles.size())
    throw NumericalError("mesh: boundary loop is missing or inconsistent");
  for (size_t k = 1; k < mesh.boundary_angles.size(); ++k)
    if (!(mesh.boundary_angles[k] > mesh.boundary_angles[k - 1]))
      throw NumericalError("mesh: boundary angles are not strictly increasing at position " +
                           std::to_string(k));
  if (mesh.boundary_angles.front() < 0.0 || mesh.boundary_angles.back() >= kTwoPi)
    throw NumericalError("mesh: boundary angles outside [0, 2*pi)");

  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      ++edge_count[{std::min(a, b), std::max(a, b)}];
    }
  std::map<std::pair<int, int>, bool> boundary_edge;
  for (size_t k = 0; k < bn.size(); ++k) {
    int a = bn[k], b = bn[(k + 1) % bn.size()];
    boundary_edge[{std::min(a, b), std::max(a, b)}] = true;
  }
  for (const auto& [e, c] : boundary_edge) {
    auto it = edge_count.find(e);
    if (it == edge_count.end() || it->second != 1)
      throw NumericalError("mesh: boundary loop edge (" + std::to_string(e.first) + "," +
                           std::to_string(e.second) + ") is not a single-triangle edge");
  }
  for (const auto& [e, c] : edge_count) {
    bool on_boundary = boundary_edge.count(e) > 0;
    if (!on_boundary && c != 2)
      throw NumericalError("mesh: interior edge (" + std::to_string(e.first) + "," +
                           std::to_string(e.second) + ") shared by " + std::to_string(c) +
                           " triangles");
  }
}

std::vector<std::vector<ElectrodeEdge>> electrode_edges(const Mesh& mesh,
                                                        const ElectrodeLayout& layout) {
  std::vector<std::vector<ElectrodeEdge>> out(layout.count);
  const auto& bn = mesh.boundary_nodes;
  const auto& ba = mesh.boundary_angles;
  const size_t nb = bn.size();
  for (size_t k = 0; k < nb; ++k) {
    size_t k1 = (k + 1) % nb;
    double mid = wrap_angle(ba[k] + 0.5 * wrap_angle(ba[k1] - ba[k]));
    for (int l = 0; l < layout.count; ++l) {
      if (layout.arcs[l].contains(mid, 0.0)) {
        out[l].push_back({l, bn[k], bn[k1], (mesh.nodes[bn[k1]] - mesh.nodes[bn[k]]).norm()});
        break;
      }
    }
  }
  for (int l = 0; l < layout.count; ++l)
    if (out[l].empty())
      throw ConfigError("mesh does not resolve electrode " + std::to_string(l) +
                        ": no boundary edge under the arc");
  return out;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "qcal-mesh 1\n";
  buf << "nodes " << mesh.nodes.size() << '\n';
  for (const auto& p : mesh.nodes) buf << p.x() << ' ' << p.y() << '\n';
  buf << "triangles " << mesh.triangles.size() << '\n';
  for (const auto& t : mesh.triangles) buf << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  buf << "boundary " << mesh.boundary_nodes.size() << '\n';
  for (size_t k = 0; k < mesh.boundary_nodes.size(); ++k)
    buf << mesh.boundary_nodes[k] << ' ' << mesh.boundary_angles[k] << '\n';
  os << buf.str();
}

Mesh read_mesh(std::istream& is) {
  auto expect = [&](const std::string& word) {
    std::string w;
    if (!(is >> w) || w != word) throw ConfigError("read_mesh: expected '" + word + "'");
  };
  expect("qcal-mesh");
  int version = 0;
  is >> version;
  if (version != 1) throw ConfigError("read_mesh: unsupported version");
  Mesh mesh;
  size_t n = 0;
  expect("nodes");
  is >> n;
  mesh.nodes.resize(n);
  for (auto& p : mesh.nodes) is >> p.x() >> p.y();
  expect("triangles");
  is >> n;
  mesh.triangles.resize(n);
  for (auto& t : mesh.triangles) is >> t[0] >> t[1] >> t[2];
  expect("boundary");
  is >> n;
  mesh.boundary_nodes.resize(n);
  mesh.boundary_angles.resize(n);
  for (size_t k = 0; k < n; ++k) is >> mesh.boundary_nodes[k] >> mesh.boundary_angles[k];
  if (!is) throw ConfigError("read_mesh: truncated input");
  validate_mesh(mesh);
  return mesh;
}

}  // namespace qcal
