#pragma once

#include "chern/calculus.hpp"

namespace chern {

/// W A W^T = D with W unitary and D real diagonal, nonnegative, sorted
/// descending; D holds the singular values of the complex symmetric input.
struct TakagiFactorization {
  Eigen::MatrixXcd w;
  Eigen::VectorXd d;
};

/// Congruence diagonalization of a complex symmetric matrix: unitarily
/// diagonalize A A^*, split B = U A U^T into commuting real and imaginary
/// parts, simultaneously diagonalize them by a real orthogonal matrix
/// (blockwise within singular-value clusters), then fix phases and sort.
/// Throws std::invalid_argument when A is not symmetric within symmetry_tol.
TakagiFactorization takagi(const Eigen::MatrixXcd& a, double symmetry_tol = 1e-8);

/// The 3x3 matrix A_{i alpha} = T^alpha_{jk} where (i j k) is the cyclic
/// permutation of (1 2 3) starting at i. Symmetric exactly when eta(T) = 0.
Eigen::Matrix3cd torsion_matrix(const Tensor<3>& t);

struct FrameNormalization {
  UnitaryFrame frame;          // input frame composed with the rotation
  Eigen::MatrixXcd rotation;   // columns = new frame vectors in the old frame
  TorsionAtPoint torsion;      // input torsion transformed by the rotation
};

/// Builds a unitary frame in which T^1_{1k} = T^2_{2k} = T^3_{3k} = 0, for a
/// balanced threefold torsion. When the torsion matrix is already diagonal the
/// input frame is returned unchanged. Throws when n != 3 or eta exceeds
/// balanced_tol.
FrameNormalization normalize_frame(const UnitaryFrame& e, const TorsionAtPoint& t_frame,
                                   double balanced_tol = 1e-8);

}  // namespace chern
