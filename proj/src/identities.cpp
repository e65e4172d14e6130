#include "chern/identities.hpp"

#include <functional>

namespace chern {

std::string_view identity_name(IdentityId id) {
  switch (id) {
    case IdentityId::B1: return "B1";
    case IdentityId::B2: return "B2";
    case IdentityId::C1: return "C1";
    case IdentityId::C2: return "C2";
    case IdentityId::C3: return "C3";
    case IdentityId::EQ11: return "EQ11";
    case IdentityId::EQ31: return "EQ31";
    case IdentityId::EQ32: return "EQ32";
    case IdentityId::EQ33: return "EQ33";
    case IdentityId::EQ36A: return "EQ36A";
    case IdentityId::EQ36B: return "EQ36B";
    case IdentityId::EQ37: return "EQ37";
    case IdentityId::EQ38: return "EQ38";
    case IdentityId::PVANISH: return "P_VANISH";
  }
  return "?";
}

std::vector<std::string> identity_variants(IdentityId id) {
  switch (id) {
    case IdentityId::B2: return {"as-printed", "standard"};
    case IdentityId::C2: return {"as-printed", "uniform-barred"};
    default: return {};
  }
}

namespace {

void require_first(const TorsionAtPoint& t, const char* what) {
  if (!t.has_first_derivatives)
    throw std::invalid_argument(std::string(what) + ": torsion covariant derivatives missing");
}

void require_second(const TorsionAtPoint& t, const char* what) {
  if (!t.has_second_derivatives)
    throw std::invalid_argument(std::string(what) +
                                ": second torsion covariant derivatives missing");
}

void require_dr(const CurvatureAtPoint& r, const char* what) {
  if (!r.has_first_derivative)
    throw std::invalid_argument(std::string(what) + ": curvature covariant derivative missing");
}

/// Runs |formula| over all index tuples of the given arity and records the max.
template <int Arity>
ResidualReport max_residual(int n, IdentityId id, std::string variant, double tolerance,
                            const std::function<Complex(const std::array<int, Arity>&)>& formula) {
  ResidualReport rep;
  rep.identity = id;
  rep.variant = std::move(variant);
  rep.tolerance = tolerance;
  std::array<int, Arity> idx{};
  do {
    const double v = std::abs(formula(idx));
    if (v > rep.max_abs_residual) {
      rep.max_abs_residual = v;
      rep.argmax_indices.assign(idx.begin(), idx.end());
      for (int& x : rep.argmax_indices) ++x;
    }
  } while (advance_index<Arity>(idx, n));
  if (rep.argmax_indices.empty()) rep.argmax_indices.assign(Arity, 1);
  rep.pass = rep.max_abs_residual <= tolerance;
  return rep;
}

double kron(int a, int b) { return a == b ? 1.0 : 0.0; }

}  // namespace

ResidualReport residual_bianchi(BianchiKind kind, const TorsionAtPoint& t,
                                const CurvatureAtPoint& r, std::string_view variant,
                                double tolerance) {
  const int n = r.n;
  if (kind == BianchiKind::First) {
    require_first(t, "residual_bianchi(first)");
    return max_residual<4>(n, IdentityId::B1, "", tolerance, [&](const std::array<int, 4>& x) {
      const auto [i, j, k, l] = std::tuple(x[0], x[1], x[2], x[3]);
      return r.r(k, j, i, l) - r.r(i, j, k, l) - t.d_b(l, i, k, j);
    });
  }

  require_dr(r, "residual_bianchi(second)");
  const bool printed = variant == "as-printed";
  if (!printed && variant != "standard")
    throw std::invalid_argument("residual_bianchi: unknown variant '" + std::string(variant) + "'");
  return max_residual<5>(n, IdentityId::B2, std::string(variant), tolerance,
                         [&](const std::array<int, 5>& x) {
                           const auto [i, j, k, l, m] = std::tuple(x[0], x[1], x[2], x[3], x[4]);
                           Complex acc = printed ? r.d_u(k, j, i, l, m) : r.d_u(i, j, k, l, m);
                           acc -= r.d_u(m, j, k, l, i);
                           for (int rr = 0; rr < n; ++rr)
                             acc -= t.t(rr, i, m) *
                                    (printed ? r.r(rr, j, i, l) : r.r(rr, j, k, l));
                           return acc;
                         });
}

ResidualReport residual_commutation(CommutationKind kind, const TorsionAtPoint& t,
                                    const CurvatureAtPoint& r, std::string_view variant,
                                    double tolerance) {
  const int n = t.n;
  switch (kind) {
    case CommutationKind::C1: {
      require_second(t, "residual_commutation(C1)");
      return max_residual<5>(n, IdentityId::C1, "", tolerance, [&](const std::array<int, 5>& x) {
        const auto [i, j, k, l, m] = std::tuple(x[0], x[1], x[2], x[3], x[4]);
        Complex acc = t.d_bb(k, j, l, i, m) - t.d_bb(k, j, l, m, i);
        for (int rr = 0; rr < n; ++rr) acc -= std::conj(t.t(rr, i, m)) * t.d_b(k, j, l, rr);
        return acc;
      });
    }
    case CommutationKind::C2: {
      require_second(t, "residual_commutation(C2)");
      const bool printed = variant == "as-printed";
      if (!printed && variant != "uniform-barred")
        throw std::invalid_argument("residual_commutation: unknown variant '" +
                                    std::string(variant) + "'");
      return max_residual<5>(n, IdentityId::C2, std::string(variant), tolerance,
                             [&](const std::array<int, 5>& x) {
                               const auto [i, j, k, l, m] = std::tuple(x[0], x[1], x[2], x[3], x[4]);
                               Complex acc = t.d_bu(j, i, k, l, m) - t.d_ub(j, i, k, m, l);
                               for (int rr = 0; rr < n; ++rr) {
                                 const Complex head = printed ? r.r(m, l, rr, j) : r.r(m, l, j, rr);
                                 acc -= t.t(rr, i, k) * head - t.t(j, rr, k) * r.r(m, l, i, rr) -
                                        t.t(j, i, rr) * r.r(m, l, k, rr);
                               }
                               return acc;
                             });
    }
    case CommutationKind::C3: {
      require_second(t, "residual_commutation(C3)");
      Eigen::MatrixXcd rho2(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          Complex acc = 0.0;
          for (int s = 0; s < n; ++s) acc += r.r(s, s, i, j);
          rho2(i, j) = acc;
        }
      return max_residual<3>(n, IdentityId::C3, "", tolerance, [&](const std::array<int, 3>& x) {
        const auto [i, j, k] = std::tuple(x[0], x[1], x[2]);
        Complex acc = 0.0;
        for (int l = 0; l < n; ++l) acc += t.d_bu(j, i, k, l, l) - t.d_ub(j, i, k, l, l);
        for (int rr = 0; rr < n; ++rr)
          acc -= t.t(rr, i, k) * rho2(rr, j) - t.t(j, rr, k) * rho2(i, rr) -
                 t.t(j, i, rr) * rho2(k, rr);
        return acc;
      });
    }
  }
  throw std::invalid_argument("residual_commutation: bad kind");
}

ResidualReport residual_rbc_constant(const CurvatureAtPoint& r, double c, double tolerance) {
  const int n = r.n;
  const IdentityId id = c == 0.0 ? IdentityId::EQ11 : IdentityId::EQ31;
  return max_residual<4>(n, id, "c=" + std::to_string(c), tolerance,
                         [&](const std::array<int, 4>& x) {
                           const auto [i, j, k, l] = std::tuple(x[0], x[1], x[2], x[3]);
                           return r.r(i, j, k, l) + r.r(k, l, i, j) -
                                  Complex(2.0 * c * kron(i, l) * kron(k, j));
                         });
}

ResidualReport residual_lemma(IdentityId id, const TorsionAtPoint& t, const CurvatureAtPoint& r,
                              double c, double tolerance) {
  const int n = t.n;
  const std::string variant = "c=" + std::to_string(c);
  switch (id) {
    case IdentityId::EQ32:
      require_first(t, "residual_lemma(EQ32)");
      return max_residual<4>(n, id, variant, tolerance, [&](const std::array<int, 4>& x) {
        const auto [i, j, k, l] = std::tuple(x[0], x[1], x[2], x[3]);
        return t.d_b(l, i, k, j) - t.d_b(j, i, k, l) -
               Complex(2.0 * c * (kron(i, j) * kron(k, l) - kron(i, l) * kron(k, j)));
      });
    case IdentityId::EQ33:
      require_first(t, "residual_lemma(EQ33)");
      return max_residual<4>(n, id, variant, tolerance, [&](const std::array<int, 4>& x) {
        const auto [i, j, k, l] = std::tuple(x[0], x[1], x[2], x[3]);
        return 2.0 * r.r(i, j, k, l) - Complex(2.0 * c * kron(i, j) * kron(k, l)) +
               t.d_b(l, i, k, j) + std::conj(t.d_b(k, j, l, i));
      });
    case IdentityId::EQ36A:
      require_first(t, "residual_lemma(EQ36A)");
      return max_residual<2>(n, id, "", tolerance, [&](const std::array<int, 2>& x) {
        const auto [i, j] = std::tuple(x[0], x[1]);
        Complex acc = 0.0;
        for (int s = 0; s < n; ++s) acc += t.d_b(j, i, s, s);
        return acc;
      });
    case IdentityId::EQ36B:
      require_second(t, "residual_lemma(EQ36B)");
      return max_residual<3>(n, id, "", tolerance, [&](const std::array<int, 3>& x) {
        const auto [i, j, k] = std::tuple(x[0], x[1], x[2]);
        Complex acc = 0.0;
        for (int s = 0; s < n; ++s) acc += t.d_bu(j, i, k, s, s);
        for (int rr = 0; rr < n; ++rr)
          for (int s = 0; s < n; ++s) acc -= t.t(rr, i, s) * t.d_b(j, rr, k, s);
        return acc;
      });
    case IdentityId::EQ37:
      require_second(t, "residual_lemma(EQ37)");
      return max_residual<5>(n, id, "", tolerance, [&](const std::array<int, 5>& x) {
        const auto [i, j, k, l, m] = std::tuple(x[0], x[1], x[2], x[3], x[4]);
        Complex acc = t.d_bu(l, m, k, j, i) - t.d_bu(l, i, k, j, m);
        for (int rr = 0; rr < n; ++rr) acc += t.t(rr, i, m) * t.d_b(l, rr, k, j);
        return acc;
      });
    case IdentityId::EQ38:
      require_second(t, "residual_lemma(EQ38)");
      return max_residual<3>(n, id, "", tolerance, [&](const std::array<int, 3>& x) {
        const auto [i, j, k] = std::tuple(x[0], x[1], x[2]);
        Complex acc = 0.0;
        for (int s = 0; s < n; ++s) acc += t.d_bu(j, i, k, s, s) - t.d_ub(j, i, k, s, s);
        return acc;
      });
    default:
      throw std::invalid_argument("residual_lemma: id must be one of EQ32..EQ38");
  }
}

BochnerQuantities bochner_quantities(const TorsionAtPoint& t) {
  require_first(t, "bochner_quantities");
  const int n = t.n;
  BochnerQuantities q;
  q.f = 0.0;
  for (const Complex& v : t.t.data()) q.f += std::norm(v);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int s = 0; s < n; ++s)
          q.first_sum += std::norm(t.d_u(j, i, k, s)) + std::norm(t.d_b(j, i, k, s));

  Complex cross = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int s = 0; s < n; ++s)
          for (int rr = 0; rr < n; ++rr)
            cross += t.t(rr, i, s) * t.d_b(j, rr, k, s) * std::conj(t.t(j, i, k));
  q.p = 2.0 * cross.real();
  q.lf_reconstructed = q.first_sum + q.p;
  return q;
}

ResidualReport p_vanishing_check(const TorsionAtPoint& t, double normalization_tol,
                                 double tolerance) {
  const int n = t.n;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (std::abs(t.t(i, i, k)) > normalization_tol)
        throw std::invalid_argument("p_vanishing_check: frame not normalized, |T^" +
                                    std::to_string(i + 1) + "_{" + std::to_string(i + 1) +
                                    std::to_string(k + 1) +
                                    "}| = " + std::to_string(std::abs(t.t(i, i, k))));

  // Only tuples with i, j, k pairwise distinct enter the Bochner cross term:
  // in a normalized frame conj(T^j_{ik}) vanishes on all the others.
  return max_residual<4>(n, IdentityId::PVANISH, "", tolerance,
                         [&](const std::array<int, 4>& x) {
                           const auto [i, j, k, s] = std::tuple(x[0], x[1], x[2], x[3]);
                           if (i == j || j == k || i == k) return Complex(0.0);
                           Complex acc = 0.0;
                           for (int rr = 0; rr < n; ++rr) acc += t.t(rr, i, s) * t.t(j, rr, k);
                           return acc;
                         });
}

}  // namespace chern
