#pragma once

#include <cstdint>

#include "chern/tensor.hpp"

namespace chern {

/// Holomorphic sectional curvature H(X) = R(X,Xbar,X,Xbar)/|X|^4 for R given
/// in a unitary frame (|X| is the Euclidean norm of the frame coefficients).
double hsc(const Tensor<4>& r_frame, const Eigen::VectorXcd& x);

/// Real bisectional curvature B = a^T Q a / |a|^2 with Q_{ij} = R_{i ibar j jbar}.
double rbc(const Tensor<4>& r_frame, const Eigen::VectorXd& a);

/// The matrix Q_{ij} = Re R_{i ibar j jbar}; each entry is real by conjugate
/// symmetry (the imaginary part is checked against `im_tol`).
Eigen::MatrixXd rbc_matrix(const Tensor<4>& r_frame, double im_tol = 1e-10);

/// First, second, or third Ricci tensor (kind = 1, 2, 3) in a unitary frame.
Eigen::MatrixXcd ricci(const Tensor<4>& r_frame, int kind);

/// Gauduchon torsion one-form components eta_i = sum_r T^r_{ri}.
Eigen::VectorXcd gauduchon_eta(const Tensor<3>& t_frame);

/// f = sum |T^j_{ik}|^2, frame invariant.
double torsion_norm(const Tensor<3>& t_frame);

struct RbcOptions {
  int restarts = 32;         // per extreme
  int max_iterations = 500;
  double gradient_tol = 1e-9;
  std::uint64_t seed = 0x5eed0001;
  int grid_subdivisions = 32;  // n=3 safeguard: 33 weight points per simplex edge
};

struct BisectionalSpectrum {
  double min_value = 0.0;
  double max_value = 0.0;
  Eigen::MatrixXcd argmin_frame, argmax_frame;  // unitary rotations of the base frame
  Eigen::VectorXd argmin_weights, argmax_weights;
  int restarts = 0;
  bool converged = false;
};

/// Extremizes B over unitary rotations of the frame and nonnegative unit
/// weight vectors, by projected-gradient ascent/descent with multi-start and
/// (for n = 3) a coarse weight-grid safeguard.
BisectionalSpectrum rbc_extremes(const Tensor<4>& r_frame, const RbcOptions& options = {});

/// B evaluated at an explicit (rotation, weights) pair; used to reproduce the
/// reported extremes from the stored arguments.
double rbc_at(const Tensor<4>& r_frame, const Eigen::MatrixXcd& rotation,
              const Eigen::VectorXd& weights);

}  // namespace chern
