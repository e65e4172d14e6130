#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "chern/calculus.hpp"

namespace chern {

enum class IdentityId { B1, B2, C1, C2, C3, EQ11, EQ31, EQ32, EQ33, EQ36A, EQ36B, EQ37, EQ38, PVANISH };

std::string_view identity_name(IdentityId id);

/// Registered index-convention variants for the identities whose printed
/// index patterns are ambiguous. Empty for identities with a single form.
std::vector<std::string> identity_variants(IdentityId id);

/// Per-identity maximum residual magnitude over all index tuples.
struct ResidualReport {
  IdentityId identity{};
  std::string variant;
  double max_abs_residual = 0.0;
  std::vector<int> argmax_indices;  // 1-based
  double tolerance = 0.0;
  bool pass = false;
};

enum class BianchiKind { First, Second };

/// First Bianchi: R_{k jbar i lbar} - R_{i jbar k lbar} - T^l_{ik,jbar}.
/// Second Bianchi in two registered variants:
///   "standard":   R_{i jbar k lbar,m} - R_{m jbar k lbar,i} - sum_r T^r_{im} R_{r jbar k lbar}
///   "as-printed": R_{k jbar i lbar,m} - R_{m jbar k lbar,i} - sum_r T^r_{im} R_{r jbar i lbar}
ResidualReport residual_bianchi(BianchiKind kind, const TorsionAtPoint& t,
                                const CurvatureAtPoint& r, std::string_view variant,
                                double tolerance);

enum class CommutationKind { C1, C2, C3 };

/// C1: T^k_{jl,ibar mbar} - T^k_{jl,mbar ibar} - sum_r conj(T^r_{im}) T^k_{jl,rbar}.
/// C2 (variant "as-printed"):
///   T^j_{ik,lbar m} - T^j_{ik,m lbar}
///     - sum_r (T^r_{ik} R_{m lbar r jbar} - T^j_{rk} R_{m lbar i rbar} - T^j_{ir} R_{m lbar k rbar});
/// variant "uniform-barred" replaces the first summand by T^r_{ik} R_{m lbar j rbar}.
/// C3: the m=l contraction of C2 against the second Ricci tensor.
ResidualReport residual_commutation(CommutationKind kind, const TorsionAtPoint& t,
                                    const CurvatureAtPoint& r, std::string_view variant,
                                    double tolerance);

/// R_{i jbar k lbar} + R_{k lbar i jbar} - 2c delta_{il} delta_{kj} (EQ31; c = 0 is EQ11).
ResidualReport residual_rbc_constant(const CurvatureAtPoint& r, double c, double tolerance);

/// The constant-B consequences EQ32, EQ33, EQ36A, EQ36B, EQ37, EQ38
/// (c enters EQ32/EQ33 only; the others presuppose c = 0).
ResidualReport residual_lemma(IdentityId id, const TorsionAtPoint& t, const CurvatureAtPoint& r,
                              double c, double tolerance);

struct BochnerQuantities {
  double f = 0.0;          // sum |T^j_{ik}|^2
  double first_sum = 0.0;  // sum (|T^j_{ik,s}|^2 + |T^j_{ik,sbar}|^2)
  double p = 0.0;          // 2 Re sum T^r_{is} T^j_{rk,sbar} conj(T^j_{ik})
  double lf_reconstructed = 0.0;  // first_sum + p
};

BochnerQuantities bochner_quantities(const TorsionAtPoint& t_frame);

/// In a frame with T^i_{ik} = 0, the sums entering the Bochner cross term
/// vanish: residual = max over pairwise-distinct (i,j,k) and s of
/// |sum_r T^r_{is} T^j_{rk}|. Throws if the frame is not normalized.
ResidualReport p_vanishing_check(const TorsionAtPoint& t_frame, double normalization_tol = 1e-8,
                                 double tolerance = 1e-12);

}  // namespace chern
