#include "chern/functionals.hpp"

#include <stdexcept>

#include "chern/rng.hpp"

namespace chern {

namespace {

void check_imag(double im, double scale, double tol, const char* what) {
  if (im > tol * std::max(1.0, scale))
    throw std::runtime_error(std::string(what) + ": imaginary part " + std::to_string(im) +
                             " exceeds tolerance");
}

}  // namespace

double hsc(const Tensor<4>& r_frame, const Eigen::VectorXcd& x) {
  const int n = r_frame.dim();
  const double norm2 = x.squaredNorm();
  if (!(norm2 > 0)) throw std::invalid_argument("hsc: zero direction vector");
  Complex acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          acc += r_frame(i, j, k, l) * x[i] * std::conj(x[j]) * x[k] * std::conj(x[l]);
  check_imag(std::abs(acc.imag()), std::abs(acc.real()), 1e-10, "hsc");
  return acc.real() / (norm2 * norm2);
}

Eigen::MatrixXd rbc_matrix(const Tensor<4>& r_frame, double im_tol) {
  const int n = r_frame.dim();
  Eigen::MatrixXd q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Complex v = r_frame(i, i, j, j);
      check_imag(std::abs(v.imag()), std::abs(v.real()), im_tol, "rbc_matrix");
      q(i, j) = v.real();
    }
  return q;
}

double rbc(const Tensor<4>& r_frame, const Eigen::VectorXd& a) {
  const double norm2 = a.squaredNorm();
  if (!(norm2 > 0)) throw std::invalid_argument("rbc: zero weight vector");
  const Eigen::MatrixXd q = rbc_matrix(r_frame);
  return a.dot(q * a) / norm2;
}

Eigen::MatrixXcd ricci(const Tensor<4>& r_frame, int kind) {
  const int n = r_frame.dim();
  Eigen::MatrixXcd rho(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Complex acc = 0.0;
      for (int r = 0; r < n; ++r) {
        switch (kind) {
          case 1: acc += r_frame(i, j, r, r); break;
          case 2: acc += r_frame(r, r, i, j); break;
          case 3: acc += r_frame(r, j, i, r); break;
          default: throw std::invalid_argument("ricci: kind must be 1, 2 or 3");
        }
      }
      rho(i, j) = acc;
    }
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  check_imag(herm, rho.cwiseAbs().maxCoeff(), 1e-10, "ricci hermitian check");
  return rho;
}

Eigen::VectorXcd gauduchon_eta(const Tensor<3>& t_frame) {
  const int n = t_frame.dim();
  Eigen::VectorXcd eta(n);
  for (int i = 0; i < n; ++i) {
    Complex acc = 0.0;
    for (int r = 0; r < n; ++r) acc += t_frame(r, r, i);
    eta[i] = acc;
  }
  return eta;
}

double torsion_norm(const Tensor<3>& t_frame) {
  double acc = 0.0;
  for (const Complex& v : t_frame.data()) acc += std::norm(v);
  return acc;
}

double rbc_at(const Tensor<4>& r_frame, const Eigen::MatrixXcd& rotation,
              const Eigen::VectorXd& weights) {
  const Tensor<4> rotated =
      to_frame(r_frame, rotation, {Slot::Down, Slot::DownBar, Slot::Down, Slot::DownBar});
  return rbc(rotated, weights);
}

namespace {

// exp(S) for skew-Hermitian S via the eigendecomposition of iS.
Eigen::MatrixXcd exp_skew_hermitian(const Eigen::MatrixXcd& s) {
  const Complex iu(0.0, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(iu * s);
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (int k = 0; k < phases.size(); ++k)
    phases[k] = std::exp(Complex(0.0, -es.eigenvalues()[k]));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

struct Objective {
  const Tensor<4>& r;
  int n;

  double value(const Eigen::MatrixXcd& u, const Eigen::VectorXd& a) const {
    const Tensor<4> rot = to_frame(r, u, {Slot::Down, Slot::DownBar, Slot::Down, Slot::DownBar});
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc += rot(i, i, j, j).real() * a[i] * a[j];
    return acc;
  }

  // Wirtinger gradient with respect to conj(U), plus the weight gradient.
  void gradients(const Eigen::MatrixXcd& u, const Eigen::VectorXd& a, Eigen::MatrixXcd& grad_u,
                 Eigen::VectorXd& grad_a) const {
    grad_u = Eigen::MatrixXcd::Zero(n, n);
    grad_a = Eigen::VectorXd::Zero(n);

    // Contractions of R against one, two, or three columns of U.
    for (int al = 0; al < n; ++al)
      for (int be = 0; be < n; ++be) {
        const double w = a[al] * a[be];
        if (w == 0.0) continue;
        for (int p = 0; p < n; ++p) {
          Complex first = 0.0;   // sum R_{i pbar k lbar} U_{i al} U_{k be} conj(U_{l be})
          Complex second = 0.0;  // sum R_{i jbar k pbar} U_{i al} conj(U_{j al}) U_{k be}
          for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
              for (int l = 0; l < n; ++l) {
                first += r(i, p, k, l) * u(i, al) * u(k, be) * std::conj(u(l, be));
                second += r(i, l, k, p) * u(i, al) * std::conj(u(l, al)) * u(k, be);
              }
          grad_u(p, al) += w * first;
          grad_u(p, be) += w * second;
        }
      }

    const Tensor<4> rot = to_frame(r, u, {Slot::Down, Slot::DownBar, Slot::Down, Slot::DownBar});
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += rot(i, i, j, j).real() * a[j];
      grad_a[i] = 2.0 * acc;
    }
  }
};

Eigen::VectorXd retract_weights(Eigen::VectorXd a) {
  for (int i = 0; i < a.size(); ++i) a[i] = std::max(0.0, a[i]);
  const double norm = a.norm();
  if (norm < 1e-14) {
    a.setZero();
    a[0] = 1.0;
    return a;
  }
  return a / norm;
}

struct LocalResult {
  double value = 0.0;
  Eigen::MatrixXcd u;
  Eigen::VectorXd a;
  bool converged = false;
};

// Projected-gradient ascent of sign*B over (U, a) with backtracking line
// search; the unitary factor moves along exp of skew-Hermitian tangents.
LocalResult optimize(const Objective& obj, double sign, Eigen::MatrixXcd u, Eigen::VectorXd a,
                     const RbcOptions& opt) {
  const int n = obj.n;
  a = retract_weights(std::move(a));
  double value = obj.value(u, a);

  LocalResult res;
  res.converged = false;
  Eigen::MatrixXcd grad_u(n, n);
  Eigen::VectorXd grad_a(n);

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    obj.gradients(u, a, grad_u, grad_a);
    grad_u *= sign;
    grad_a *= sign;

    // Riemannian (skew-Hermitian) direction for U.
    const Eigen::MatrixXcd uhg = u.adjoint() * grad_u;
    const Eigen::MatrixXcd skew = 0.5 * (uhg - uhg.adjoint());

    // Tangent + active-set projected direction for a.
    Eigen::VectorXd da = grad_a - grad_a.dot(a) * a;
    for (int i = 0; i < n; ++i)
      if (a[i] <= 0.0 && da[i] < 0.0) da[i] = 0.0;
    da -= da.dot(a) * a;

    const double gnorm2 = skew.squaredNorm() + da.squaredNorm();
    if (std::sqrt(gnorm2) <= opt.gradient_tol) {
      res.converged = true;
      break;
    }

    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      const Eigen::MatrixXcd u_next = u * exp_skew_hermitian(step * skew);
      const Eigen::VectorXd a_next = retract_weights(a + step * da);
      const double v_next = obj.value(u_next, a_next);
      if (sign * v_next >= sign * value + 1e-4 * step * gnorm2) {
        u = u_next;
        a = a_next;
        value = v_next;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No ascent direction at line-search resolution: treat as converged.
      res.converged = true;
      break;
    }
  }

  res.value = value;
  res.u = std::move(u);
  res.a = std::move(a);
  return res;
}

Eigen::MatrixXcd random_unitary(int n, Rng& rng) {
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.gaussian_complex();
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const Complex d = rmat(k, k);
    if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

Eigen::VectorXd random_weights(int n, Rng& rng) {
  Eigen::VectorXd a(n);
  for (int i = 0; i < n; ++i) a[i] = std::abs(rng.gaussian());
  return retract_weights(std::move(a));
}

}  // namespace

BisectionalSpectrum rbc_extremes(const Tensor<4>& r_frame, const RbcOptions& options) {
  const int n = r_frame.dim();
  const Objective obj{r_frame, n};
  Rng rng(options.seed);

  struct Best {
    double value;
    Eigen::MatrixXcd u;
    Eigen::VectorXd a;
    bool converged = false;
  };

  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n, n);
  Best best_max{-std::numeric_limits<double>::infinity(), eye, Eigen::VectorXd(), false};
  Best best_min{std::numeric_limits<double>::infinity(), eye, Eigen::VectorXd(), false};

  auto consider = [&](double sign, const LocalResult& r) {
    Best& slot = sign > 0 ? best_max : best_min;
    if (sign * r.value > sign * slot.value) {
      slot.value = r.value;
      slot.u = r.u;
      slot.a = r.a;
      slot.converged = r.converged;
    }
  };

  // Coarse weight grid under the identity rotation (n = 3 safeguard); the best
  // grid points also seed extra polish runs below.
  std::vector<Eigen::VectorXd> grid_seeds_max, grid_seeds_min;
  if (n == 3 && options.grid_subdivisions > 0) {
    const int s = options.grid_subdivisions;
    double grid_best_max = -std::numeric_limits<double>::infinity();
    double grid_best_min = std::numeric_limits<double>::infinity();
    Eigen::VectorXd arg_max(n), arg_min(n);
    for (int p = 0; p <= s; ++p)
      for (int q = 0; p + q <= s; ++q) {
        const int rr = s - p - q;
        Eigen::VectorXd a(3);
        a << p, q, rr;
        if (a.norm() == 0.0) continue;
        a /= a.norm();
        const double v = obj.value(eye, a);
        if (v > grid_best_max) {
          grid_best_max = v;
          arg_max = a;
        }
        if (v < grid_best_min) {
          grid_best_min = v;
          arg_min = a;
        }
      }
    consider(+1.0, {grid_best_max, eye, arg_max, true});
    consider(-1.0, {grid_best_min, eye, arg_min, true});
    grid_seeds_max.push_back(arg_max);
    grid_seeds_min.push_back(arg_min);
  }

  int restarts_done = 0;
  for (double sign : {+1.0, -1.0}) {
    auto& seeds = sign > 0 ? grid_seeds_max : grid_seeds_min;
    for (const Eigen::VectorXd& a0 : seeds) {
      consider(sign, optimize(obj, sign, eye, a0, options));
      ++restarts_done;
    }
    for (int r = 0; r < options.restarts; ++r) {
      const Eigen::MatrixXcd u0 = (r == 0) ? eye : random_unitary(n, rng);
      const Eigen::VectorXd a0 = random_weights(n, rng);
      consider(sign, optimize(obj, sign, u0, a0, options));
      ++restarts_done;
    }
  }

  BisectionalSpectrum spec;
  spec.restarts = restarts_done;
  spec.converged = best_max.converged && best_min.converged;
  spec.argmax_frame = best_max.u;
  spec.argmax_weights = best_max.a;
  spec.argmin_frame = best_min.u;
  spec.argmin_weights = best_min.a;
  // Report values recomputed from the stored arguments so they are
  // reproducible by construction.
  spec.max_value = rbc_at(r_frame, spec.argmax_frame, spec.argmax_weights);
  spec.min_value = rbc_at(r_frame, spec.argmin_frame, spec.argmin_weights);
  return spec;
}

}  // namespace chern
