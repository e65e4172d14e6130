#include "chern/metric.hpp"

#include <algorithm>
#include <sstream>

namespace chern {

namespace {

std::string format_point(const Eigen::VectorXcd& z) {
  std::ostringstream os;
  os << "(";
  for (int k = 0; k < z.size(); ++k) {
    if (k) os << ", ";
    os << z[k].real() << (z[k].imag() < 0 ? "-" : "+") << std::abs(z[k].imag()) << "i";
  }
  os << ")";
  return os.str();
}

}  // namespace

MetricSpec make_metric_spec(std::string name, int n,
                            const std::vector<std::vector<std::string>>& sources) {
  if (n <= 0) throw ValidationError("metric dimension must be positive");
  if (static_cast<int>(sources.size()) != n)
    throw ValidationError("metric entry matrix must be " + std::to_string(n) + "x" +
                          std::to_string(n));
  MetricSpec spec;
  spec.n = n;
  spec.name = std::move(name);
  spec.entries.resize(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(sources[i].size()) != n)
      throw ValidationError("metric entry matrix must be square");
    spec.entries[i].resize(n);
    for (int j = 0; j < n; ++j) spec.entries[i][j] = parse_expression(sources[i][j], n);
  }
  return spec;
}

Eigen::MatrixXcd evaluate_metric(const MetricSpec& spec, const Eigen::VectorXcd& z) {
  Eigen::MatrixXcd g(spec.n, spec.n);
  std::vector<std::complex<double>> zs(z.data(), z.data() + z.size());
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      g(i, j) = evaluate(spec.entries[i][j], zs);
  return g;
}

void validate_metric(const MetricSpec& spec, std::span<const Eigen::VectorXcd> points,
                     double herm_tol) {
  for (const Eigen::VectorXcd& z : points) {
    const Eigen::MatrixXcd g = evaluate_metric(spec, z);
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    const double herm = (g - g.adjoint()).cwiseAbs().maxCoeff();
    if (herm > herm_tol * scale)
      throw ValidationError("metric '" + spec.name + "' is not Hermitian at point " +
                            format_point(z) + " (deviation " + std::to_string(herm) + ")");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (g + g.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw ValidationError("metric '" + spec.name + "' is not positive definite at point " +
                            format_point(z));
  }
}

const Eigen::MatrixXcd& MetricJet::deriv(std::vector<int> alpha, std::vector<int> beta) const {
  std::sort(alpha.begin(), alpha.end());
  std::sort(beta.begin(), beta.end());
  const auto it = derivatives.find({alpha, beta});
  if (it == derivatives.end())
    throw std::out_of_range("jet does not hold the requested derivative (insufficient order)");
  return it->second;
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> jet_multi_indices(int n, int order) {
  // Sorted multisets of size k over {0..n-1}, for every split between z and w.
  std::vector<std::vector<std::vector<int>>> multisets(static_cast<std::size_t>(order) + 1);
  multisets[0] = {{}};
  for (int k = 1; k <= order; ++k) {
    for (const auto& base : multisets[static_cast<std::size_t>(k) - 1]) {
      const int lo = base.empty() ? 0 : base.back();
      for (int v = lo; v < n; ++v) {
        auto next = base;
        next.push_back(v);
        multisets[static_cast<std::size_t>(k)].push_back(std::move(next));
      }
    }
  }
  std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
  for (int total = 0; total <= order; ++total)
    for (int a = total; a >= 0; --a)
      for (const auto& alpha : multisets[static_cast<std::size_t>(a)])
        for (const auto& beta : multisets[static_cast<std::size_t>(total - a)])
          out.emplace_back(alpha, beta);
  return out;
}

void finalize_jet(MetricJet& jet) {
  const double scale = std::max(1.0, jet.g.cwiseAbs().maxCoeff());
  if ((jet.g - jet.g.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw ValidationError("metric is not Hermitian at point " + format_point(jet.point));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (jet.g + jet.g.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw ValidationError("metric is not positive definite at point " + format_point(jet.point));
  jet.g_inv = jet.g.inverse();
}

MetricJetEngine::MetricJetEngine(MetricSpec spec, int order) : spec_(std::move(spec)), order_(order) {
  if (order_ < 1 || order_ > 3) throw ValidationError("jet order must be between 1 and 3");
  const int n = spec_.n;
  deriv_exprs_[{{}, {}}] = spec_.entries;
  for (const auto& key : jet_multi_indices(n, order_)) {
    if (deriv_exprs_.count(key)) continue;
    // Differentiate from the parent index obtained by dropping the largest
    // entry of beta (or of alpha when beta is empty).
    Key parent = key;
    WirtingerVar var;
    if (!parent.second.empty()) {
      var = {true, parent.second.back() + 1};
      parent.second.pop_back();
    } else {
      var = {false, parent.first.back() + 1};
      parent.first.pop_back();
    }
    const auto& parent_entries = deriv_exprs_.at(parent);
    std::vector<std::vector<ExprPtr>> entries(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      entries[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j)
        entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            differentiate(parent_entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], var);
    }
    deriv_exprs_[key] = std::move(entries);
  }
}

MetricJet MetricJetEngine::at(const Eigen::VectorXcd& z) const {
  const int n = spec_.n;
  if (z.size() != n) throw ValidationError("point dimension mismatch");
  std::vector<std::complex<double>> zs(z.data(), z.data() + z.size());

  MetricJet jet;
  jet.n = n;
  jet.order = order_;
  jet.point = z;
  for (const auto& [key, entries] : deriv_exprs_) {
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m(i, j) = evaluate(entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], zs);
    if (key.first.empty() && key.second.empty())
      jet.g = m;
    else
      jet.derivatives[key] = std::move(m);
  }
  finalize_jet(jet);
  return jet;
}

}  // namespace chern
