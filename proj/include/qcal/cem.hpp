#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Sparse>

#include "qcal/geometry.hpp"
#include "qcal/tensor.hpp"

namespace qcal {

/// Trigonometric current patterns, column k-1 holding pattern k = 1..L-1:
/// cos(k theta_l) for k <= L/2, sin((k - L/2) theta_l) above.
struct CurrentPatternSet {
  int electrodes = 0;
  double amplitude = 1.0;
  Eigen::MatrixXd currents;          // L x (L-1)
  Eigen::VectorXd norms;             // Euclidean norm of each column
  std::vector<int> frequency;        // angular frequency of each column
  std::vector<bool> is_cosine;

  Eigen::MatrixXd normalized() const;  // orthonormal columns
  int pattern_count() const { return static_cast<int>(currents.cols()); }
};

CurrentPatternSet trig_current_patterns(int electrodes, double amplitude = 1.0);
CurrentPatternSet trig_current_patterns(const std::vector<double>& electrode_angles,
                                        double amplitude = 1.0);

/// Element stiffness of a linear triangle for a constant tensor:
/// area * G * A * G^T with G the 3x2 matrix of basis gradients.
Eigen::Matrix3d element_stiffness(const Point2& p0, const Point2& p1, const Point2& p2,
                                  const Tensor2& a);

class CemSystem {
 public:
  int node_count() const { return nodes_; }
  int electrode_count() const { return electrodes_; }
  int size() const { return nodes_ + electrodes_ - 1; }

  /// Full block matrix [[B, C], [C^T, D]].
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
  /// Discrete electrode lengths (sum of boundary edge lengths under each arc).
  const std::vector<double>& electrode_lengths() const { return electrode_lengths_; }
  const std::vector<double>& contact_impedance() const { return contact_impedance_; }

  /// Solves M b = (0, I_1 - I_2, ..., I_1 - I_L)^T.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  friend CemSystem assemble_cem_system(const Mesh&, const ConductivityTensorField&,
                                       const ElectrodeLayout&);
  struct Factorization;
  int nodes_ = 0;
  int electrodes_ = 0;
  Eigen::SparseMatrix<double> matrix_;
  std::vector<double> electrode_lengths_;
  std::vector<double> contact_impedance_;
  std::shared_ptr<const Factorization> factor_;
};

/// Assembles the Complete Electrode Model system with the conductivity
/// sampled at each triangle centroid and factorizes it.
CemSystem assemble_cem_system(const Mesh& mesh, const ConductivityTensorField& a,
                              const ElectrodeLayout& layout);

struct ForwardSolution {
  Eigen::VectorXd potential;  // nodal interior potential
  Eigen::VectorXd voltages;   // electrode voltages, sum zero
};

/// Maps beta to electrode voltages: U_1 = sum(beta), U_{j+1} = -beta_j.
Eigen::VectorXd ground_voltages(const Eigen::VectorXd& beta);

ForwardSolution solve_forward(const CemSystem& system, const Eigen::VectorXd& currents);

struct VoltageData {
  CurrentPatternSet patterns;
  Eigen::MatrixXd voltages;  // L x (L-1), column k for pattern k
  std::vector<double> electrode_angles;
  std::vector<double> contact_impedance;
  double radius = 1.0;
  double coverage = 0.5;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

struct NoiseSpec {
  double relative_std = 0.0;
  std::uint64_t seed = 0;
};

/// Runs solve_forward on every pattern column. Noise, when requested, is
/// additive Gaussian with standard deviation relative_std * max|U| and the
/// columns are re-grounded to sum zero afterwards.
VoltageData simulate_voltages(const Mesh& mesh, const ConductivityTensorField& a,
                              const ElectrodeLayout& layout, const CurrentPatternSet& patterns,
                              const NoiseSpec& noise = {});

/// Discrete DN map in the normalized trigonometric basis.
struct DnMatrix {
  int electrodes = 0;
  Eigen::MatrixXd lambda;   // symmetrized (Lambda + Lambda^T)/2, electrode units
  Eigen::MatrixXd nd;       // R with R_mn = t_m . U(t_n)
  double asymmetry = 0.0;   // ||Lambda - Lambda^T|| / ||Lambda|| before symmetrizing
  double condition = 0.0;   // 2-norm condition number of R
  std::vector<double> electrode_angles;
  std::vector<int> frequency;
  std::vector<bool> is_cosine;
  double radius = 1.0;
  double coverage = 0.5;
  double slot_length = 0.0;  // 2*pi*radius / L
  std::string normalization = "euclidean";

  /// Lambda per unit boundary length, comparable with the continuum DN
  /// eigenvalues sigma*|k| on the unit disk.
  Eigen::MatrixXd continuum() const { return lambda / slot_length; }
  /// Orthonormal discrete basis used for rows/columns (L x (L-1)).
  Eigen::MatrixXd basis() const;
};

DnMatrix dn_matrix(const VoltageData& data);

}  // namespace qcal
