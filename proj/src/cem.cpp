#include "qcal/cem.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "qcal/errors.hpp"
#include "qcal/rng.hpp"

namespace qcal {

struct CemSystem::Factorization {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

Eigen::MatrixXd CurrentPatternSet::normalized() const {
  Eigen::MatrixXd t = currents;
  for (int k = 0; k < t.cols(); ++k) t.col(k) /= norms(k);
  return t;
}

CurrentPatternSet trig_current_patterns(const std::vector<double>& angles, double amplitude) {
  const int l_count = static_cast<int>(angles.size());
  if (l_count < 4 || l_count % 2 != 0)
    throw ConfigError("trig_current_patterns: electrode count must be even and >= 4");
  if (!(amplitude != 0.0) || !std::isfinite(amplitude))
    throw ConfigError("trig_current_patterns: amplitude must be finite and nonzero");
  CurrentPatternSet set;
  set.electrodes = l_count;
  set.amplitude = amplitude;
  const int half = l_count / 2;
  set.currents.resize(l_count, l_count - 1);
  for (int k = 1; k <= l_count - 1; ++k) {
    const bool cosine = k <= half;
    const int freq = cosine ? k : k - half;
    set.frequency.push_back(freq);
    set.is_cosine.push_back(cosine);
    for (int l = 0; l < l_count; ++l) {
      double arg = freq * angles[l];
      set.currents(l, k - 1) = amplitude * (cosine ? std::cos(arg) : std::sin(arg));
    }
  }
  set.norms = set.currents.colwise().norm().transpose();
  return set;
}

CurrentPatternSet trig_current_patterns(int electrodes, double amplitude) {
  if (electrodes < 4 || electrodes % 2 != 0)
    throw ConfigError("trig_current_patterns: electrode count must be even and >= 4");
  std::vector<double> angles(electrodes);
  for (int l = 0; l < electrodes; ++l) angles[l] = 2.0 * std::numbers::pi * l / electrodes;
  return trig_current_patterns(angles, amplitude);
}

Eigen::Matrix3d element_stiffness(const Point2& p0, const Point2& p1, const Point2& p2,
                                  const Tensor2& a) {
  const double det = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
  const double area = 0.5 * det;
  // Gradients of the barycentric basis functions.
  Eigen::Matrix<double, 3, 2> g;
  g << p1.y() - p2.y(), p2.x() - p1.x(),
       p2.y() - p0.y(), p0.x() - p2.x(),
       p0.y() - p1.y(), p1.x() - p0.x();
  g /= det;
  return area * g * a * g.transpose();
}

CemSystem assemble_cem_system(const Mesh& mesh, const ConductivityTensorField& a,
                              const ElectrodeLayout& layout) {
  layout.validate();
  const int n = mesh.node_count();
  const int l_count = layout.count;
  const auto edges = electrode_edges(mesh, layout);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh.triangle_count() + 8 * mesh.boundary_nodes.size() * l_count);

  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.signed_area(t);
    if (!(area > 1e-14 * mesh.max_edge_length() * mesh.max_edge_length()))
      throw NumericalError("assemble_cem_system: triangle " + std::to_string(t) + " (nodes " +
                           std::to_string(tri[0]) + ", " + std::to_string(tri[1]) + ", " +
                           std::to_string(tri[2]) + ") has area " + std::to_string(area));
    const Tensor2 coeff = a(mesh.centroid(t));
    const Eigen::Matrix3d ke =
        element_stiffness(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]], coeff);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], ke(i, j));
  }

  CemSystem sys;
  sys.nodes_ = n;
  sys.electrodes_ = l_count;
  sys.contact_impedance_ = layout.contact_impedance;
  sys.electrode_lengths_.assign(l_count, 0.0);

  for (int l = 0; l < l_count; ++l) {
    const double inv_z = 1.0 / layout.contact_impedance[l];
    for (const auto& e : edges[l]) {
      sys.electrode_lengths_[l] += e.length;
      // B: boundary mass (1/z) * len/6 * [[2,1],[1,2]]
      const double m = inv_z * e.length / 6.0;
      trip.emplace_back(e.a, e.a, 2.0 * m);
      trip.emplace_back(e.b, e.b, 2.0 * m);
      trip.emplace_back(e.a, e.b, m);
      trip.emplace_back(e.b, e.a, m);
      // C: -(1/z_l) int_{e_l} phi_k (n_j)_l with (n_j)_0 = 1, (n_j)_j = -1.
      const double s = inv_z * e.length / 2.0;
      for (int node : {e.a, e.b}) {
        if (l == 0) {
          for (int j = 1; j < l_count; ++j) {
            trip.emplace_back(node, n + j - 1, -s);
            trip.emplace_back(n + j - 1, node, -s);
          }
        } else {
          trip.emplace_back(node, n + l - 1, s);
          trip.emplace_back(n + l - 1, node, s);
        }
      }
    }
  }
  const double d0 = sys.electrode_lengths_[0] / layout.contact_impedance[0];
  for (int i = 1; i < l_count; ++i)
    for (int j = 1; j < l_count; ++j)
      trip.emplace_back(n + i - 1, n + j - 1,
                        d0 + (i == j ? sys.electrode_lengths_[i] / layout.contact_impedance[i] : 0.0));

  sys.matrix_.resize(n + l_count - 1, n + l_count - 1);
  sys.matrix_.setFromTriplets(trip.begin(), trip.end());

  auto f = std::make_shared<CemSystem::Factorization>();
  f->ldlt.compute(sys.matrix_);
  if (f->ldlt.info() != Eigen::Success)
    throw NumericalError("assemble_cem_system: sparse LDL^T factorization failed");
  sys.factor_ = std::move(f);
  return sys;
}

Eigen::VectorXd CemSystem::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = factor_->ldlt.solve(rhs);
  const double rn = rhs.norm();
  const double res = (matrix_ * x - rhs).norm() / (rn > 0.0 ? rn : 1.0);
  if (!(res <= 1e-10))
    throw NumericalError("CEM solve: relative residual " + std::to_string(res) + " exceeds 1e-10");
  return x;
}

Eigen::VectorXd ground_voltages(const Eigen::VectorXd& beta) {
  Eigen::VectorXd u(beta.size() + 1);
  u(0) = beta.sum();
  u.tail(beta.size()) = -beta;
  return u;
}

ForwardSolution solve_forward(const CemSystem& system, const Eigen::VectorXd& currents) {
  const int l_count = system.electrode_count();
  if (currents.size() != l_count)
    throw ConfigError("solve_forward: current vector length does not match electrode count");
  const double scale = currents.cwiseAbs().maxCoeff();
  if (std::abs(currents.sum()) > 1e-10 * std::max(scale, 1.0))
    throw ConfigError("solve_forward: currents violate Kirchhoff's law (sum " +
                      std::to_string(currents.sum()) + ")");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(system.size());
  for (int j = 1; j < l_count; ++j) rhs(system.node_count() + j - 1) = currents(0) - currents(j);
  Eigen::VectorXd b = system.solve(rhs);
  return {b.head(system.node_count()), ground_voltages(b.tail(l_count - 1))};
}

VoltageData simulate_voltages(const Mesh& mesh, const ConductivityTensorField& a,
                              const ElectrodeLayout& layout, const CurrentPatternSet& patterns,
                              const NoiseSpec& noise) {
  if (patterns.electrodes != layout.count)
    throw ConfigError("simulate_voltages: pattern set and electrode layout disagree on L");
  if (!(noise.relative_std >= 0.0)) throw ConfigError("simulate_voltages: noise level must be >= 0");
  const CemSystem sys = assemble_cem_system(mesh, a, layout);
  VoltageData data;
  data.patterns = patterns;
  data.voltages.resize(layout.count, patterns.pattern_count());
  for (int k = 0; k < patterns.pattern_count(); ++k)
    data.voltages.col(k) = solve_forward(sys, patterns.currents.col(k)).voltages;
  if (noise.relative_std > 0.0) {
    const CounterNormal normal(noise.seed);
    const double sd = noise.relative_std * data.voltages.cwiseAbs().maxCoeff();
    std::uint64_t counter = 0;
    for (int k = 0; k < data.voltages.cols(); ++k) {
      for (int l = 0; l < data.voltages.rows(); ++l) data.voltages(l, k) += sd * normal(counter++);
      data.voltages.col(k).array() -= data.voltages.col(k).mean();
    }
  }
  data.electrode_angles = layout.center_angles();
  data.contact_impedance = layout.contact_impedance;
  data.radius = layout.radius;
  data.coverage = layout.coverage;
  data.noise = noise.relative_std;
  data.seed = noise.seed;
  return data;
}

Eigen::MatrixXd DnMatrix::basis() const {
  return trig_current_patterns(electrode_angles).normalized();
}

DnMatrix dn_matrix(const VoltageData& data) {
  const auto& p = data.patterns;
  const int l_count = p.electrodes;
  if (data.voltages.rows() != l_count || data.voltages.cols() != l_count - 1)
    throw ConfigError("dn_matrix: voltage data must cover the full trigonometric basis");
  Eigen::MatrixXd r = p.currents.transpose() * data.voltages;
  for (int m = 0; m < r.rows(); ++m)
    for (int n = 0; n < r.cols(); ++n) r(m, n) /= p.norms(m) * p.norms(n);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!(cond <= 1e12))
    throw NumericalError("dn_matrix: ND matrix condition number " + std::to_string(cond) +
                         " exceeds 1e12 (degenerate data)");
  Eigen::MatrixXd lam = r.inverse();

  DnMatrix dn;
  dn.electrodes = l_count;
  dn.nd = r;
  dn.condition = cond;
  dn.asymmetry = (lam - lam.transpose()).norm() / lam.norm();
  dn.lambda = 0.5 * (lam + lam.transpose());
  dn.electrode_angles = data.electrode_angles;
  dn.frequency = p.frequency;
  dn.is_cosine = p.is_cosine;
  dn.radius = data.radius;
  dn.coverage = data.coverage;
  dn.slot_length = 2.0 * std::numbers::pi * data.radius / l_count;
  return dn;
}

}  // namespace qcal
