#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chern/expression.hpp"

namespace chern {

/// Raised when a metric fails Hermitian / positive-definiteness validation or
/// a jet cannot be computed at a point.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& message) : std::runtime_error(message) {}
};

/// An n x n matrix of expressions defining g_{i \bar j}(z, w).
struct MetricSpec {
  int n = 0;
  std::string name;
  std::vector<std::vector<ExprPtr>> entries;  // entries[i][j] = g_{i \bar j}, 0-based
};

MetricSpec make_metric_spec(std::string name, int n,
                            const std::vector<std::vector<std::string>>& sources);

/// Checks Hermitian symmetry (numerically, within herm_tol) and positive
/// definiteness of the evaluated metric at each point. Throws ValidationError
/// naming the first offending point.
void validate_metric(const MetricSpec& spec, std::span<const Eigen::VectorXcd> points,
                     double herm_tol = 1e-12);

Eigen::MatrixXcd evaluate_metric(const MetricSpec& spec, const Eigen::VectorXcd& z);

/// Values of g and its Wirtinger derivatives up to total order <= 3 at a
/// point. Multi-indices are sorted lists of 0-based coordinate indices; alpha
/// differentiates in z, beta in w.
struct MetricJet {
  int n = 0;
  int order = 0;
  Eigen::VectorXcd point;
  Eigen::MatrixXcd g, g_inv;

  std::map<std::pair<std::vector<int>, std::vector<int>>, Eigen::MatrixXcd> derivatives;

  const Eigen::MatrixXcd& deriv(std::vector<int> alpha, std::vector<int> beta) const;

  const Eigen::MatrixXcd& dz(int i) const { return deriv({i}, {}); }
  const Eigen::MatrixXcd& dw(int j) const { return deriv({}, {j}); }
  const Eigen::MatrixXcd& dzz(int i, int j) const { return deriv({i, j}, {}); }
  const Eigen::MatrixXcd& dzw(int i, int j) const { return deriv({i}, {j}); }
  const Eigen::MatrixXcd& dww(int i, int j) const { return deriv({}, {i, j}); }
  const Eigen::MatrixXcd& dzzw(int i, int j, int k) const { return deriv({i, j}, {k}); }
  const Eigen::MatrixXcd& dzww(int i, int j, int k) const { return deriv({i}, {j, k}); }
};

/// Differentiates the metric entries symbolically once per spec; evaluating
/// the jet at a point is then pure expression evaluation.
class MetricJetEngine {
 public:
  explicit MetricJetEngine(MetricSpec spec, int order = 3);

  MetricJet at(const Eigen::VectorXcd& z) const;

  const MetricSpec& spec() const { return spec_; }
  int order() const { return order_; }

 private:
  using Key = std::pair<std::vector<int>, std::vector<int>>;
  MetricSpec spec_;
  int order_;
  std::map<Key, std::vector<std::vector<ExprPtr>>> deriv_exprs_;
};

/// Enumerates all (alpha, beta) multi-index pairs with |alpha|+|beta| <= order
/// over n coordinates, each sorted ascending.
std::vector<std::pair<std::vector<int>, std::vector<int>>> jet_multi_indices(int n, int order);

/// Shared post-construction checks: inverse, positive definiteness.
void finalize_jet(MetricJet& jet);

}  // namespace chern
