#pragma once

#include "chern/metric.hpp"

namespace chern {

/// Metric jets by central finite differences of the evaluated entries, with
/// step `step` in each variable. Derivatives are built from O(h^2) stencils
/// applied per variable (w treated as an independent coordinate, so every
/// stencil differences a holomorphic function). Evaluation runs in quad
/// precision so that the result is truncation-dominated: halving the step
/// divides the error by ~4, which is what the convergence checks measure.
class FdMetricJetEngine {
 public:
  FdMetricJetEngine(MetricSpec spec, double step, int order = 3);

  MetricJet at(const Eigen::VectorXcd& z) const;

  double step() const { return step_; }
  const MetricSpec& spec() const { return spec_; }

 private:
  MetricSpec spec_;
  double step_;
  int order_;
};

/// Quad-precision evaluation of an expression at independent (z, w) bindings,
/// rounded to double at the end. Exposed for test oracles.
std::complex<double> evaluate_quad(const ExprPtr& e, std::span<const std::complex<double>> z,
                                   std::span<const std::complex<double>> w);

/// Single central-difference Wirtinger derivative of an expression (order 1)
/// in quad precision: d/dz_k or d/dw_k at the point with w bound to conj(z).
std::complex<double> fd_wirtinger_derivative(const ExprPtr& e, WirtingerVar var,
                                             const Eigen::VectorXcd& z, double step);

}  // namespace chern
