#include "chern/calculus.hpp"

namespace chern {

namespace {

void require_order(const MetricJet& jet, int order, const char* op) {
  if (jet.order < order)
    throw std::invalid_argument(std::string(op) + " requires a jet of order >= " +
                                std::to_string(order) + ", got " + std::to_string(jet.order));
}

// dGinv_m = -Ginv (d_m G) Ginv, and the barred analogue.
Eigen::MatrixXcd dginv_z(const MetricJet& jet, int m) {
  return -jet.g_inv * jet.dz(m) * jet.g_inv;
}

Eigen::MatrixXcd dginv_w(const MetricJet& jet, int m) {
  return -jet.g_inv * jet.dw(m) * jet.g_inv;
}

// d_m dbar_l Ginv.
Eigen::MatrixXcd dginv_zw(const MetricJet& jet, int m, int l) {
  const Eigen::MatrixXcd dm = dginv_z(jet, m);
  return -(dm * jet.dw(l) * jet.g_inv + jet.g_inv * jet.dzw(m, l) * jet.g_inv +
           jet.g_inv * jet.dw(l) * dm);
}

// dbar_a dbar_b Ginv.
Eigen::MatrixXcd dginv_ww(const MetricJet& jet, int a, int b) {
  const Eigen::MatrixXcd db = dginv_w(jet, b);
  return -(db * jet.dw(a) * jet.g_inv + jet.g_inv * jet.dww(a, b) * jet.g_inv +
           jet.g_inv * jet.dw(a) * db);
}

// d_m dbar_l Gamma^k_{ij}, stored as (k,i,j,m,l).
Tensor<5> d2gamma_ub(const MetricJet& jet) {
  const int n = jet.n;
  Tensor<5> out(n);
  for (int m = 0; m < n; ++m) {
    const Eigen::MatrixXcd dgm = dginv_z(jet, m);
    for (int l = 0; l < n; ++l) {
      const Eigen::MatrixXcd dgl = dginv_w(jet, l);
      const Eigen::MatrixXcd dgml = dginv_zw(jet, m, l);
      for (int i = 0; i < n; ++i) {
        const Eigen::MatrixXcd term = jet.dzzw(m, i, l) * jet.g_inv + jet.dzw(i, l) * dgm +
                                      jet.dzz(m, i) * dgl + jet.dz(i) * dgml;
        for (int k = 0; k < n; ++k)
          for (int j = 0; j < n; ++j) out(k, i, j, m, l) = term(j, k);
      }
    }
  }
  return out;
}

// dbar_a dbar_b Gamma^k_{ij}, stored as (k,i,j,a,b).
Tensor<5> d2gamma_bb(const MetricJet& jet) {
  const int n = jet.n;
  Tensor<5> out(n);
  for (int a = 0; a < n; ++a) {
    const Eigen::MatrixXcd dga = dginv_w(jet, a);
    for (int b = 0; b < n; ++b) {
      const Eigen::MatrixXcd dgb = dginv_w(jet, b);
      const Eigen::MatrixXcd dgab = dginv_ww(jet, a, b);
      for (int i = 0; i < n; ++i) {
        const Eigen::MatrixXcd term = jet.dzww(i, a, b) * jet.g_inv + jet.dzw(i, a) * dgb +
                                      jet.dzw(i, b) * dga + jet.dz(i) * dgab;
        for (int k = 0; k < n; ++k)
          for (int j = 0; j < n; ++j) out(k, i, j, a, b) = term(j, k);
      }
    }
  }
  return out;
}

}  // namespace

ConnectionAtPoint chern_connection(const MetricJet& jet) {
  require_order(jet, 2, "chern_connection");
  const int n = jet.n;
  ConnectionAtPoint conn;
  conn.n = n;
  conn.gamma = Tensor<3>(n);
  conn.dgamma = Tensor<4>(n);
  conn.dbar_gamma = Tensor<4>(n);

  for (int i = 0; i < n; ++i) {
    // Gamma^k_{ij} = [(d_i G) Ginv]_{jk}.
    const Eigen::MatrixXcd gi = jet.dz(i) * jet.g_inv;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) conn.gamma(k, i, j) = gi(j, k);

    for (int m = 0; m < n; ++m) {
      const Eigen::MatrixXcd dm = jet.dzz(m, i) * jet.g_inv + jet.dz(i) * dginv_z(jet, m);
      const Eigen::MatrixXcd dmb = jet.dzw(i, m) * jet.g_inv + jet.dz(i) * dginv_w(jet, m);
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
          conn.dgamma(k, i, j, m) = dm(j, k);
          conn.dbar_gamma(k, i, j, m) = dmb(j, k);
        }
    }
  }
  return conn;
}

TorsionAtPoint torsion(const ConnectionAtPoint& conn) {
  const int n = conn.n;
  TorsionAtPoint t;
  t.n = n;
  t.t = Tensor<3>(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) t.t(j, i, k) = conn.gamma(j, i, k) - conn.gamma(j, k, i);
  return t;
}

CurvatureAtPoint curvature(const MetricJet& jet) {
  require_order(jet, 2, "curvature");
  const int n = jet.n;
  CurvatureAtPoint out;
  out.n = n;
  out.r = Tensor<4>(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Eigen::MatrixXcd second = jet.dz(i) * jet.g_inv * jet.dw(j);
      const Eigen::MatrixXcd& mixed = jet.dzw(i, j);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) out.r(i, j, k, l) = -mixed(k, l) + second(k, l);
    }
  return out;
}

CurvatureAtPoint curvature_from_connection(const ConnectionAtPoint& conn, const MetricJet& jet) {
  const int n = jet.n;
  CurvatureAtPoint out;
  out.n = n;
  out.r = Tensor<4>(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Complex acc = 0.0;
          for (int m = 0; m < n; ++m) acc += conn.dbar_gamma(m, i, k, j) * jet.g(m, l);
          out.r(i, j, k, l) = -acc;
        }
  return out;
}

TorsionAtPoint covariant_derivatives_T(const ConnectionAtPoint& conn, TorsionAtPoint t,
                                       const MetricJet& jet) {
  require_order(jet, 3, "covariant_derivatives_T");
  const int n = t.n;
  const Tensor<3>& T = t.t;
  const Tensor<3>& G = conn.gamma;

  t.d_u = Tensor<4>(n);
  t.d_b = Tensor<4>(n);

  // First order. In the coordinate frame the frame field is holomorphic, so
  // barred derivatives are plain partials and unbarred ones act through Gamma.
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
          Complex du = conn.dgamma(j, i, k, m) - conn.dgamma(j, k, i, m);
          for (int r = 0; r < n; ++r)
            du += G(j, m, r) * T(r, i, k) - G(r, m, i) * T(j, r, k) - G(r, m, k) * T(j, i, r);
          t.d_u(j, i, k, m) = du;
          t.d_b(j, i, k, m) = conn.dbar_gamma(j, i, k, m) - conn.dbar_gamma(j, k, i, m);
        }
  t.has_first_derivatives = true;

  const Tensor<5> g_ub = d2gamma_ub(jet);  // d_m dbar_l Gamma
  const Tensor<5> g_bb = d2gamma_bb(jet);  // dbar_a dbar_b Gamma

  t.d_bu = Tensor<5>(n);
  t.d_ub = Tensor<5>(n);
  t.d_bb = Tensor<5>(n);

  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          // d_m dbar_l T^j_{ik} (mixed partial, order-independent).
          for (int m = 0; m < n; ++m) {
            const Complex d2t = g_ub(j, i, k, m, l) - g_ub(j, k, i, m, l);

            // T^j_{ik,lbar m}: apply dbar_l then nabla_m to the rank-4 tensor
            // S = dbar T; the barred slot picks up no Gamma under unbarred m.
            Complex bu = d2t;
            for (int r = 0; r < n; ++r)
              bu += G(j, m, r) * t.d_b(r, i, k, l) - G(r, m, i) * t.d_b(j, r, k, l) -
                    G(r, m, k) * t.d_b(j, i, r, l);
            t.d_bu(j, i, k, l, m) = bu;

            // T^j_{ik,m lbar}: dbar_l of the first-order covariant derivative;
            // all slots are unbarred or up, so this is a plain partial.
            Complex ub = d2t;
            for (int r = 0; r < n; ++r)
              ub += conn.dbar_gamma(j, m, r, l) * T(r, i, k) + G(j, m, r) * t.d_b(r, i, k, l) -
                    conn.dbar_gamma(r, m, i, l) * T(j, r, k) - G(r, m, i) * t.d_b(j, r, k, l) -
                    conn.dbar_gamma(r, m, k, l) * T(j, i, r) - G(r, m, k) * t.d_b(j, i, r, l);
            t.d_ub(j, i, k, m, l) = ub;
          }

          // T^j_{ik,l1bar l2bar}: the barred slot transforms with conj(Gamma).
          for (int l2 = 0; l2 < n; ++l2) {
            Complex bb = g_bb(j, i, k, l, l2) - g_bb(j, k, i, l, l2);
            for (int s = 0; s < n; ++s) bb -= std::conj(G(s, l2, l)) * t.d_b(j, i, k, s);
            t.d_bb(j, i, k, l, l2) = bb;
          }
        }
  t.has_second_derivatives = true;
  return t;
}

CurvatureAtPoint covariant_derivative_R(const ConnectionAtPoint& conn, CurvatureAtPoint r,
                                        const MetricJet& jet) {
  require_order(jet, 3, "covariant_derivative_R");
  const int n = r.n;
  r.d_u = Tensor<5>(n);

  for (int m = 0; m < n; ++m) {
    const Eigen::MatrixXcd dginv_m = -jet.g_inv * jet.dz(m) * jet.g_inv;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        // d_m of -d_i dbar_j G + (d_i G) Ginv (dbar_j G).
        const Eigen::MatrixXcd dm = -jet.dzzw(m, i, j) + jet.dzz(m, i) * jet.g_inv * jet.dw(j) +
                                    jet.dz(i) * dginv_m * jet.dw(j) +
                                    jet.dz(i) * jet.g_inv * jet.dzw(m, j);
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            Complex v = dm(k, l);
            for (int p = 0; p < n; ++p)
              v -= conn.gamma(p, m, i) * r.r(p, j, k, l) + conn.gamma(p, m, k) * r.r(i, j, p, l);
            r.d_u(i, j, k, l, m) = v;
          }
      }
  }
  r.has_first_derivative = true;
  return r;
}

UnitaryFrame unitary_frame_at(const MetricJet& jet) {
  const int n = jet.n;
  // g = F^* F with F lower triangular: factor the index-reversed metric by
  // Cholesky, so that e = F^{-1} is lower triangular with positive diagonal.
  const Eigen::MatrixXcd grev = jet.g.reverse();
  Eigen::LLT<Eigen::MatrixXcd> llt(0.5 * (grev + grev.adjoint()));
  if (llt.info() != Eigen::Success)
    throw ValidationError("metric is not positive definite; no unitary frame");
  const Eigen::MatrixXcd upper = Eigen::MatrixXcd(llt.matrixL()).reverse();  // g = U U^*
  const Eigen::MatrixXcd f = upper.adjoint();
  UnitaryFrame frame;
  frame.e = f.triangularView<Eigen::Lower>().solve(Eigen::MatrixXcd::Identity(n, n));
  return frame;
}

TorsionAtPoint to_frame(const TorsionAtPoint& t, const Eigen::MatrixXcd& frame) {
  TorsionAtPoint out = t;
  using S = Slot;
  out.t = to_frame(t.t, frame, {S::Up, S::Down, S::Down});
  if (t.has_first_derivatives) {
    out.d_u = to_frame(t.d_u, frame, {S::Up, S::Down, S::Down, S::Down});
    out.d_b = to_frame(t.d_b, frame, {S::Up, S::Down, S::Down, S::DownBar});
  }
  if (t.has_second_derivatives) {
    out.d_bu = to_frame(t.d_bu, frame, {S::Up, S::Down, S::Down, S::DownBar, S::Down});
    out.d_ub = to_frame(t.d_ub, frame, {S::Up, S::Down, S::Down, S::Down, S::DownBar});
    out.d_bb = to_frame(t.d_bb, frame, {S::Up, S::Down, S::Down, S::DownBar, S::DownBar});
  }
  return out;
}

CurvatureAtPoint to_frame(const CurvatureAtPoint& r, const Eigen::MatrixXcd& frame) {
  CurvatureAtPoint out = r;
  using S = Slot;
  out.r = to_frame(r.r, frame, {S::Down, S::DownBar, S::Down, S::DownBar});
  if (r.has_first_derivative)
    out.d_u = to_frame(r.d_u, frame, {S::Down, S::DownBar, S::Down, S::DownBar, S::Down});
  return out;
}

PointTensors compute_point_tensors(const MetricJet& jet) {
  PointTensors pt;
  pt.jet = jet;
  pt.conn = chern_connection(jet);
  pt.frame = unitary_frame_at(jet);

  TorsionAtPoint t = torsion(pt.conn);
  CurvatureAtPoint r = curvature(jet);
  if (jet.order >= 3) {
    t = covariant_derivatives_T(pt.conn, std::move(t), jet);
    r = covariant_derivative_R(pt.conn, std::move(r), jet);
  }
  pt.torsion_frame = to_frame(t, pt.frame.e);
  pt.curvature_frame = to_frame(r, pt.frame.e);
  return pt;
}

}  // namespace chern
