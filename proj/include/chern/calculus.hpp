#pragma once

#include "chern/metric.hpp"
#include "chern/tensor.hpp"

namespace chern {

/// Chern connection coefficients in the coordinate frame.
/// gamma(k,i,j) = Gamma^k_{ij} = sum_l g^{k lbar} d_i g_{j lbar}; dgamma and
/// dbar_gamma hold d_m Gamma^k_{ij} and dbar_m Gamma^k_{ij} in slot 4.
struct ConnectionAtPoint {
  int n = 0;
  Tensor<3> gamma;
  Tensor<4> dgamma;
  Tensor<4> dbar_gamma;
};

/// Torsion components T^j_{ik} = t(j,i,k) plus Chern covariant derivatives.
/// Comma indices are ordered leftmost-first: d_bu(j,i,k,l,m) = T^j_{ik,lbar m}
/// applies the lbar derivative first, then m.
struct TorsionAtPoint {
  int n = 0;
  Tensor<3> t;
  bool has_first_derivatives = false;
  bool has_second_derivatives = false;
  Tensor<4> d_u;   // T^j_{ik,m}
  Tensor<4> d_b;   // T^j_{ik,lbar}
  Tensor<5> d_bu;  // T^j_{ik,lbar m}
  Tensor<5> d_ub;  // T^j_{ik,m lbar}
  Tensor<5> d_bb;  // T^j_{ik,l1bar l2bar}
};

/// Curvature components R_{i jbar k lbar} = r(i,j,k,l) plus the first
/// holomorphic covariant derivative d_u(i,j,k,l,m) = R_{i jbar k lbar, m}.
struct CurvatureAtPoint {
  int n = 0;
  Tensor<4> r;
  bool has_first_derivative = false;
  Tensor<5> d_u;
};

/// Invertible matrix whose columns are frame vectors in coordinate
/// components, with e^* g e = I at the anchoring point.
struct UnitaryFrame {
  Eigen::MatrixXcd e;
};

ConnectionAtPoint chern_connection(const MetricJet& jet);

/// T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji} (components only).
TorsionAtPoint torsion(const ConnectionAtPoint& conn);

/// R_{i jbar k lbar} = -d_i dbar_j g_{k lbar}
///                     + sum_{p,q} g^{p qbar} (d_i g_{k qbar})(dbar_j g_{p lbar}).
CurvatureAtPoint curvature(const MetricJet& jet);

/// Same curvature through -dbar Gamma contracted with g; used as a second
/// algebraic route in tests.
CurvatureAtPoint curvature_from_connection(const ConnectionAtPoint& conn, const MetricJet& jet);

/// Fills all five covariant-derivative arrays (requires jet order 3).
TorsionAtPoint covariant_derivatives_T(const ConnectionAtPoint& conn, TorsionAtPoint t,
                                       const MetricJet& jet);

/// Fills R_{i jbar k lbar, m} (requires jet order 3).
CurvatureAtPoint covariant_derivative_R(const ConnectionAtPoint& conn, CurvatureAtPoint r,
                                        const MetricJet& jet);

/// Deterministic unitary frame: e = F^{-1} where g = F^* F with F lower
/// triangular and positive diagonal, so e is lower triangular with positive
/// diagonal and e^* g e = I.
UnitaryFrame unitary_frame_at(const MetricJet& jet);

/// Frame transforms of full tensor bundles (all filled derivative slots
/// transform as pointwise tensors).
TorsionAtPoint to_frame(const TorsionAtPoint& t, const Eigen::MatrixXcd& frame);
CurvatureAtPoint to_frame(const CurvatureAtPoint& r, const Eigen::MatrixXcd& frame);

/// Everything the identity suite needs at one point, in one call:
/// coordinate-frame tensors transformed to the deterministic unitary frame.
struct PointTensors {
  MetricJet jet;
  ConnectionAtPoint conn;
  UnitaryFrame frame;
  TorsionAtPoint torsion_frame;
  CurvatureAtPoint curvature_frame;
};

PointTensors compute_point_tensors(const MetricJet& jet);

}  // namespace chern
