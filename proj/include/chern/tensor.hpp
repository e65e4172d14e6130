#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace chern {

using Complex = std::complex<double>;

/// Dense rank-R tensor whose slots all run over the same index range 0..n-1.
/// Row-major storage; value semantics throughout.
template <int Rank, typename Scalar = Complex>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(int n) : n_(n), data_(total_size(n), Scalar{}) {}

  int dim() const { return n_; }
  bool empty() const { return data_.empty(); }

  template <typename... I>
    requires(sizeof...(I) == Rank)
  Scalar& operator()(I... i) {
    return data_[flat(std::array<int, Rank>{static_cast<int>(i)...})];
  }

  template <typename... I>
    requires(sizeof...(I) == Rank)
  const Scalar& operator()(I... i) const {
    return data_[flat(std::array<int, Rank>{static_cast<int>(i)...})];
  }

  Scalar& at(const std::array<int, Rank>& idx) { return data_[flat(idx)]; }
  const Scalar& at(const std::array<int, Rank>& idx) const { return data_[flat(idx)]; }

  double max_abs() const {
    double m = 0.0;
    for (const Scalar& v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  const std::vector<Scalar>& data() const { return data_; }
  std::vector<Scalar>& data() { return data_; }

 private:
  static std::size_t total_size(int n) {
    std::size_t s = 1;
    for (int r = 0; r < Rank; ++r) s *= static_cast<std::size_t>(n);
    return s;
  }

  std::size_t flat(const std::array<int, Rank>& idx) const {
    std::size_t f = 0;
    for (int r = 0; r < Rank; ++r) f = f * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx[r]);
    return f;
  }

  int n_ = 0;
  std::vector<Scalar> data_;
};

template <int Rank>
bool advance_index(std::array<int, Rank>& idx, int n) {
  for (int r = Rank - 1; r >= 0; --r) {
    if (++idx[r] < n) return true;
    idx[r] = 0;
  }
  return false;
}

/// Index-slot variance of a tensor slot under a frame change.
enum class Slot { Up, Down, DownBar };

namespace detail {

// out[.. a ..] = sum_i coeff(a, i) * in[.. i ..] on one slot.
template <int Rank, typename Scalar>
Tensor<Rank, Scalar> contract_slot(const Tensor<Rank, Scalar>& t, const Eigen::MatrixXcd& coeff,
                                   int slot) {
  const int n = t.dim();
  Tensor<Rank, Scalar> out(n);
  std::array<int, Rank> idx{};
  do {
    Scalar acc{};
    std::array<int, Rank> probe = idx;
    for (int i = 0; i < n; ++i) {
      probe[slot] = i;
      acc += coeff(idx[slot], i) * t.at(probe);
    }
    out.at(idx) = acc;
  } while (advance_index<Rank>(idx, n));
  return out;
}

}  // namespace detail

/// Transforms tensor components from the basis in which they are expressed to
/// the basis given by the columns of `frame` (new basis vectors in old
/// coordinates). Up slots contract with frame^-1, unbarred down slots with
/// frame, barred down slots with conj(frame). Covariant-derivative slots are
/// Down / DownBar like any other lower slot.
template <int Rank, typename Scalar>
Tensor<Rank, Scalar> to_frame(const Tensor<Rank, Scalar>& t, const Eigen::MatrixXcd& frame,
                              const std::array<Slot, Rank>& signature) {
  Eigen::MatrixXcd inv;
  Tensor<Rank, Scalar> out = t;
  for (int s = 0; s < Rank; ++s) {
    switch (signature[s]) {
      case Slot::Up:
        if (inv.size() == 0) inv = frame.inverse();
        out = detail::contract_slot<Rank, Scalar>(out, inv, s);
        break;
      case Slot::Down:
        out = detail::contract_slot<Rank, Scalar>(out, frame.transpose(), s);
        break;
      case Slot::DownBar:
        out = detail::contract_slot<Rank, Scalar>(out, frame.adjoint(), s);
        break;
    }
  }
  return out;
}

}  // namespace chern
