#include "chern/fd_jet.hpp"

#include <boost/multiprecision/cpp_complex.hpp>

namespace chern {

namespace {

using Quad = boost::multiprecision::cpp_complex_quad;

std::vector<Quad> to_quad(const Eigen::VectorXcd& z) {
  std::vector<Quad> out(static_cast<std::size_t>(z.size()));
  for (int k = 0; k < z.size(); ++k) out[static_cast<std::size_t>(k)] = Quad(z[k].real(), z[k].imag());
  return out;
}

std::complex<double> to_double(const Quad& v) {
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

struct StencilPoint {
  int offset;
  double weight;  // in units of 1/h^order
};

// Central stencils with O(h^2) leading truncation error.
const std::vector<StencilPoint>& stencil(int order) {
  static const std::vector<StencilPoint> s1 = {{1, 0.5}, {-1, -0.5}};
  static const std::vector<StencilPoint> s2 = {{1, 1.0}, {0, -2.0}, {-1, 1.0}};
  static const std::vector<StencilPoint> s3 = {{2, 0.5}, {1, -1.0}, {-1, 1.0}, {-2, -0.5}};
  switch (order) {
    case 1: return s1;
    case 2: return s2;
    default: return s3;
  }
}

}  // namespace

FdMetricJetEngine::FdMetricJetEngine(MetricSpec spec, double step, int order)
    : spec_(std::move(spec)), step_(step), order_(order) {
  if (order_ < 1 || order_ > 3) throw ValidationError("jet order must be between 1 and 3");
  if (!(step_ > 0)) throw ValidationError("finite-difference step must be positive");
}

MetricJet FdMetricJetEngine::at(const Eigen::VectorXcd& z) const {
  const int n = spec_.n;
  if (z.size() != n) throw ValidationError("point dimension mismatch");

  const std::vector<Quad> z0 = to_quad(z);
  std::vector<Quad> w0(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) w0[static_cast<std::size_t>(k)] = conj(z0[static_cast<std::size_t>(k)]);
  const Quad h(step_, 0.0);

  MetricJet jet;
  jet.n = n;
  jet.order = order_;
  jet.point = z;
  jet.g = Eigen::MatrixXcd(n, n);
  {
    std::span<const Quad> zs(z0), ws(w0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        jet.g(i, j) = to_double(evaluate_unbound<Quad>(spec_.entries[i][j], zs, ws));
  }

  for (const auto& key : jet_multi_indices(n, order_)) {
    if (key.first.empty() && key.second.empty()) continue;
    // Per-variable derivative orders; variables 0..n-1 are z, n..2n-1 are w.
    std::vector<int> var_order(static_cast<std::size_t>(2 * n), 0);
    for (int v : key.first) ++var_order[static_cast<std::size_t>(v)];
    for (int v : key.second) ++var_order[static_cast<std::size_t>(n + v)];
    std::vector<int> vars;
    for (int v = 0; v < 2 * n; ++v)
      if (var_order[static_cast<std::size_t>(v)] > 0) vars.push_back(v);

    const int total = static_cast<int>(key.first.size() + key.second.size());
    Quad inv_h_pow(1.0, 0.0);
    for (int k = 0; k < total; ++k) inv_h_pow /= h;

    std::vector<std::vector<Quad>> acc(static_cast<std::size_t>(n),
                                       std::vector<Quad>(static_cast<std::size_t>(n), Quad(0)));
    // Tensor product of the per-variable stencils.
    std::vector<std::size_t> cursor(vars.size(), 0);
    for (;;) {
      double weight = 1.0;
      std::vector<Quad> zs = z0, ws = w0;
      for (std::size_t s = 0; s < vars.size(); ++s) {
        const int v = vars[s];
        const StencilPoint& p = stencil(var_order[static_cast<std::size_t>(v)])[cursor[s]];
        weight *= p.weight;
        if (v < n)
          zs[static_cast<std::size_t>(v)] += Quad(p.offset, 0) * h;
        else
          ws[static_cast<std::size_t>(v - n)] += Quad(p.offset, 0) * h;
      }
      if (weight != 0.0) {
        std::span<const Quad> zspan(zs), wspan(ws);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            acc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                Quad(weight, 0) * evaluate_unbound<Quad>(spec_.entries[i][j], zspan, wspan);
      }
      std::size_t s = 0;
      for (; s < vars.size(); ++s) {
        if (++cursor[s] < stencil(var_order[static_cast<std::size_t>(vars[s])]).size()) break;
        cursor[s] = 0;
      }
      if (s == vars.size()) break;
    }

    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m(i, j) = to_double(acc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * inv_h_pow);
    jet.derivatives[key] = std::move(m);
  }

  finalize_jet(jet);
  return jet;
}

std::complex<double> evaluate_quad(const ExprPtr& e, std::span<const std::complex<double>> z,
                                   std::span<const std::complex<double>> w) {
  std::vector<Quad> zq(z.size()), wq(w.size());
  for (std::size_t k = 0; k < z.size(); ++k) zq[k] = Quad(z[k].real(), z[k].imag());
  for (std::size_t k = 0; k < w.size(); ++k) wq[k] = Quad(w[k].real(), w[k].imag());
  return to_double(evaluate_unbound<Quad>(e, std::span<const Quad>(zq), std::span<const Quad>(wq)));
}

std::complex<double> fd_wirtinger_derivative(const ExprPtr& e, WirtingerVar var,
                                             const Eigen::VectorXcd& z, double step) {
  std::vector<Quad> z0 = to_quad(z);
  std::vector<Quad> w0(z0.size());
  for (std::size_t k = 0; k < z0.size(); ++k) w0[k] = conj(z0[k]);
  const std::size_t k = static_cast<std::size_t>(var.index - 1);
  const Quad h(step, 0.0);

  auto shifted = [&](int offset) {
    std::vector<Quad> zs = z0, ws = w0;
    (var.is_conjugate ? ws : zs)[k] += Quad(offset, 0) * h;
    return evaluate_unbound<Quad>(e, std::span<const Quad>(zs), std::span<const Quad>(ws));
  };
  return to_double((shifted(1) - shifted(-1)) / (Quad(2, 0) * h));
}

}  // namespace chern
