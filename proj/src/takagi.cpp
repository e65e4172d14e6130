#include "chern/takagi.hpp"

#include <algorithm>
#include <numeric>

#include "chern/functionals.hpp"

namespace chern {

namespace {

// Contiguous clusters of a descending-sorted nonnegative sequence, split
// where the gap exceeds rel_tol * max.
std::vector<std::pair<int, int>> cluster_ranges(const Eigen::VectorXd& values, double rel_tol) {
  const int n = static_cast<int>(values.size());
  const double scale = n > 0 ? std::max(values.maxCoeff(), 0.0) : 0.0;
  std::vector<std::pair<int, int>> ranges;
  int begin = 0;
  for (int k = 1; k <= n; ++k) {
    if (k == n || values[k - 1] - values[k] > rel_tol * std::max(scale, 1e-300)) {
      ranges.emplace_back(begin, k);
      begin = k;
    }
  }
  return ranges;
}

// Simultaneous diagonalization of commuting real symmetric matrices:
// diagonalize b1, then diagonalize the restriction of b2 within each
// eigenvalue cluster of b1.
Eigen::MatrixXd simultaneous_diagonalize(const Eigen::MatrixXd& b1, const Eigen::MatrixXd& b2,
                                         double rel_tol) {
  const int n = static_cast<int>(b1.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es1(b1);
  Eigen::MatrixXd v = es1.eigenvectors();
  Eigen::VectorXd ev = es1.eigenvalues();

  // Descending for deterministic cluster layout.
  v = v.rowwise().reverse().eval();
  ev = ev.reverse().eval();

  const double scale = std::max({std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()), 1e-300});
  std::vector<std::pair<int, int>> ranges;
  int begin = 0;
  for (int k = 1; k <= n; ++k) {
    if (k == n || ev[k - 1] - ev[k] > rel_tol * scale) {
      ranges.emplace_back(begin, k);
      begin = k;
    }
  }

  for (const auto& [lo, hi] : ranges) {
    const int len = hi - lo;
    if (len <= 1) continue;
    const Eigen::MatrixXd block =
        v.middleCols(lo, len).transpose() * b2 * v.middleCols(lo, len);
    if (block.cwiseAbs().maxCoeff() <= 1e-300) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(0.5 * (block + block.transpose()));
    v.middleCols(lo, len) = v.middleCols(lo, len) * es2.eigenvectors();
  }
  return v;
}

}  // namespace

TakagiFactorization takagi(const Eigen::MatrixXcd& a, double symmetry_tol) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw std::invalid_argument("takagi: matrix must be square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > symmetry_tol * scale)
    throw std::invalid_argument("takagi: input is not complex symmetric within tolerance");

  TakagiFactorization out;
  if (a.cwiseAbs().maxCoeff() == 0.0) {
    out.w = Eigen::MatrixXcd::Identity(n, n);
    out.d = Eigen::VectorXd::Zero(n);
    return out;
  }

  // Step 1: unitarily diagonalize A A^* with descending eigenvalues.
  const Eigen::MatrixXcd aa = a * a.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (aa + aa.adjoint()));
  Eigen::MatrixXcd q = es.eigenvectors().rowwise().reverse();
  Eigen::VectorXd sv = es.eigenvalues().reverse();
  for (int k = 0; k < n; ++k) sv[k] = std::sqrt(std::max(sv[k], 0.0));
  const Eigen::MatrixXcd u = q.adjoint();  // U (A A^*) U^* diagonal

  // Step 2: B = U A U^T is complex symmetric with B conj(B) diagonal, hence
  // block diagonal over singular-value clusters.
  Eigen::MatrixXcd b = u * a * u.transpose();
  b = 0.5 * (b + b.transpose()).eval();

  // Step 3: simultaneously diagonalize Re B and Im B blockwise. The cluster
  // threshold is 1e-6 relative: below that, eigenvector leakage across close
  // singular values would exceed the factorization tolerance, and the exact
  // blockwise treatment takes over.
  constexpr double kClusterRelTol = 1e-6;
  const double zero_floor = 1e-14 * sv.maxCoeff();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  for (const auto& [lo, hi] : cluster_ranges(sv, kClusterRelTol)) {
    const int len = hi - lo;
    if (sv[lo] <= zero_floor) continue;  // zero block: keep identity
    if (len == 1) continue;
    const Eigen::MatrixXcd block = b.block(lo, lo, len, len);
    const Eigen::MatrixXd block_v =
        simultaneous_diagonalize(block.real(), block.imag(), kClusterRelTol);
    v.block(lo, lo, len, len) = block_v.transpose();
  }

  Eigen::MatrixXcd w = v * u;
  const Eigen::MatrixXcd diag = v * b * v.transpose();

  // Step 4: phase fixing, making the diagonal real nonnegative.
  Eigen::VectorXd d(n);
  for (int k = 0; k < n; ++k) {
    const Complex entry = diag(k, k);
    d[k] = std::abs(entry);
    if (d[k] > 0.0) {
      const double theta = std::arg(entry);
      w.row(k) *= std::exp(Complex(0.0, -0.5 * theta));
    }
  }

  // Step 5: sort descending and canonicalize row signs.
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int x, int y) { return d[x] > d[y]; });
  Eigen::MatrixXcd w_sorted(n, n);
  Eigen::VectorXd d_sorted(n);
  for (int k = 0; k < n; ++k) {
    w_sorted.row(k) = w.row(perm[static_cast<std::size_t>(k)]);
    d_sorted[k] = d[perm[static_cast<std::size_t>(k)]];
  }
  for (int k = 0; k < n; ++k) {
    const double row_scale = w_sorted.row(k).cwiseAbs().maxCoeff();
    for (int c = 0; c < n; ++c) {
      const Complex v0 = w_sorted(k, c);
      if (std::abs(v0) > 1e-12 * row_scale) {
        if (v0.real() < 0.0 || (v0.real() == 0.0 && v0.imag() < 0.0)) w_sorted.row(k) *= -1.0;
        break;
      }
    }
  }

  out.w = std::move(w_sorted);
  out.d = std::move(d_sorted);
  return out;
}

Eigen::Matrix3cd torsion_matrix(const Tensor<3>& t) {
  if (t.dim() != 3) throw std::invalid_argument("torsion_matrix: requires n = 3");
  Eigen::Matrix3cd a;
  // Rows follow the cyclic rule (i j k): (1 2 3), (2 3 1), (3 1 2).
  for (int alpha = 0; alpha < 3; ++alpha) {
    a(0, alpha) = t(alpha, 1, 2);
    a(1, alpha) = t(alpha, 2, 0);
    a(2, alpha) = t(alpha, 0, 1);
  }
  return a;
}

FrameNormalization normalize_frame(const UnitaryFrame& e, const TorsionAtPoint& t_frame,
                                   double balanced_tol) {
  if (t_frame.n != 3) throw std::invalid_argument("normalize_frame: requires n = 3");
  const Eigen::VectorXcd eta = gauduchon_eta(t_frame.t);
  const double eta_inf = eta.cwiseAbs().maxCoeff();
  if (eta_inf > balanced_tol)
    throw std::invalid_argument("normalize_frame: torsion is not balanced (||eta||_inf = " +
                                std::to_string(eta_inf) + ")");

  const Eigen::Matrix3cd a = torsion_matrix(t_frame.t);

  FrameNormalization out;
  double offdiag = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) offdiag = std::max(offdiag, std::abs(a(i, j)));

  if (offdiag <= 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
    out.rotation = Eigen::MatrixXcd::Identity(3, 3);
    out.frame = e;
    out.torsion = t_frame;
    return out;
  }

  const TakagiFactorization fac = takagi(a, balanced_tol * 10);
  // A congruence A -> W A W^T corresponds to rotating the frame by the matrix
  // M = conj(W): the new components give A' = det(M) conj(M) A conj(M)^T.
  // In column convention the rotation is M^T = W^*.
  out.rotation = fac.w.adjoint();
  out.frame.e = e.e * out.rotation;
  out.torsion = to_frame(t_frame, out.rotation);

  double residual = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) residual = std::max(residual, std::abs(out.torsion.t(i, i, k)));
  if (residual > 1e-8)
    throw std::runtime_error("normalize_frame: normalization failed, max |T'^i_{ik}| = " +
                             std::to_string(residual));
  return out;
}

}  // namespace chern
