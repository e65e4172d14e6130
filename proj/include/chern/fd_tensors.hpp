#pragma once

#include "chern/calculus.hpp"

namespace chern {

/// Point tensors with every derivative taken by central finite differences of
/// step `step`: metric derivatives by local stencils, covariant derivatives by
/// differencing the connection/torsion/curvature fields at shifted points.
/// Unlike the symbolic pipeline, the derivative data entering the two sides of
/// each curvature identity has independent provenance here, so identity
/// residuals expose the O(step^2) truncation error and shrink by ~4x when the
/// step halves. All arithmetic up to the final rounding runs in quad
/// precision, keeping the residuals truncation-dominated.
class FdTensorEngine {
 public:
  FdTensorEngine(MetricSpec spec, double step);

  PointTensors at(const Eigen::VectorXcd& z) const;

  double step() const { return step_; }

 private:
  MetricSpec spec_;
  double step_;
};

}  // namespace chern
