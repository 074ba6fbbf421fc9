// Closed forms used as independent oracles: pairing tables, derivative kernels at the
// concentric configuration, the origin Jacobian of the PT in the shell coefficients, and
// the radial solution for concentric balls.
//
// Table indices: l, l' in 1..3 (field and moment), j in 1..6 (W6 coefficient). All tables
// are symmetric in (l, l').
#pragma once

#include <array>

#include <Eigen/Dense>

#include "ptv/bie.hpp"

namespace ptv::analytic {

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Table = std::array<std::array<std::array<double, 6>, 3>, 3>;  // [l-1][l'-1][j-1]

/// Constants of the neutral concentric pair.
struct Origin {
  double r_i = 0, r_e = 0, rho = 0;
  double lambda = 0, mu = 0;
  double gamma1 = 0;  // 1 / (rho^3 (1/2 + mu)(1/2 - mu))
  double gamma2 = 0;  // 1 / (rho (1/2 + mu))
};
/// Throws InfeasibleMaterial, or std::invalid_argument if r_e / r_i deviates from the
/// neutral ratio by more than 1e-10 relative.
Origin origin_constants(const MaterialParams& mat, double r_i, double r_e);

/// Row of (l, l') in the flattened PT (m11, m22, m33, m12, m13, m23).
int flat_index(int l, int lp);

// ---- closed-form tables -----------------------------------------------------------
//
// Two versions exist for the B pairing and everything built on it. The stated form
// evaluates the odd moment int (y-x)_i (y-x)_k (y-x)_l / |x-y|^3 dS(y) with the sign of
// the (x-y) moment, giving <x_l', dB[x_l]> = -(4pi/(45 r_e)) G^j_{l'l}. The moment is odd
// in (x - y), so the correct value is +(4pi/(15 r_e)) G^j_{l'l}; the *_corrected
// functions carry that. Kernel quadrature and finite differences of the BIE PT both
// agree with the corrected values.

/// C^j_{ll'} = int x_l x_l' Y_j dS.
double table_c(int l, int lp, int j);
/// <x_l', dB(0)/db_j [x_l]>, stated form.
double table_b(int l, int lp, int j, double r_e);
/// (4pi/(15 r_e)) G^j_{l'l} for j >= 2, zero for j = 1.
double table_b_corrected(int l, int lp, int j, double r_e);
/// <x_l', dC(0,0)/db_j [x_l] + rho dD(0,0)/db_j [x_l]>.
double table_cd(int l, int lp, int j, double rho, double r_e);
/// <psi_l' V2, dg^(l)/db_j> at the origin.
double table_g(int l, int lp, int j, const Origin& o);
/// <psi_l' V2, dA(0,0)/db_j [f^(l)]>, stated form.
double table_f(int l, int lp, int j, const Origin& o);
/// Identically zero: -CD + rho^2 B cancels once the B pairing is corrected.
double table_f_corrected(int l, int lp, int j, const Origin& o);
/// dm_ll'/db_j (0,0), stated entry list.
double jacobian_entry(int l, int lp, int j, const Origin& o);
/// Same j = 1 column; for j >= 2 the entry is pi rho^3 r_e^2 gamma1 (4/15) G^j_{ll'}.
double jacobian_entry_corrected(int l, int lp, int j, const Origin& o);

/// 6 x 6 Jacobian, rows in flatten order, columns b_1..b_6 (stated entries).
Matrix6 origin_jacobian(const Origin& o);
Matrix6 origin_jacobian(const MaterialParams& mat, double r_i, double r_e);
Matrix6 corrected_origin_jacobian(const Origin& o);
Matrix6 corrected_origin_jacobian(const MaterialParams& mat, double r_i, double r_e);

/// |det| in product form: (pi rho^3 r_e^2 gamma1)^6 (4/(3 sqrt15)) |1/2 + 3 mu| (28/45)^4
/// (28/(45 sqrt3)) 6.
double origin_determinant_magnitude(const Origin& o);
/// The same product for the corrected entries: 28/45 -> 4/15, 28/(45 sqrt3) -> 4/(15 sqrt3).
double corrected_determinant_magnitude(const Origin& o);
/// Stated product with prefactor (pi rho r_e^2 gamma1)^6, for the core-coefficient
/// Jacobian of the role-swapped structure.
double swapped_determinant_magnitude(const Origin& o);

/// G^j_{l'l} with the Hessians of the W6 harmonics.
double hessian_entry(int l, int lp, int j);

// ---- 2 x 2 action on span{psi_l (1,0), psi_l (0,1)} ------------------------------

Eigen::Matrix2d origin_operator(const MaterialParams& mat, double rho);
/// gamma1 [[-mu + 1/6, rho^2/3], [-2 rho/3, rho^3 (mu + 1/6)]].
Eigen::Matrix2d origin_inverse(const Origin& o);
/// f^(l) = psi_l V1 at the origin.
Eigen::Vector2d v1_vector(const Origin& o);
/// (A(0,0)^{-1})^* [psi_l' p(0,0)] = psi_l' V2.
Eigen::Vector2d v2_vector(const Origin& o);

// ---- derivative kernels at the concentric configuration ---------------------------

/// dB_b(x, y)/db_j at b = 0, simplified form with the Hessian G^j. Zero for j = 1.
double deriv_kernel_b0(int j, const Vec3& x, const Vec3& y, double r_e);
/// The unsimplified form with the tangential gradient.
double deriv_kernel_b0_tangential(int j, const Vec3& x, const Vec3& y, double r_e);
double deriv_kernel_c00(int j, const Vec3& x, const Vec3& y, double r_i, double r_e);
double deriv_kernel_d00(int j, const Vec3& x, const Vec3& y, double r_i, double r_e);
double kernel_e(int j, const Vec3& x, const Vec3& y, double r_i, double r_e);

/// Central difference in b_j of the actual kernel of block B, C or D at (0, b_j e_j).
double deriv_kernel_fd(Block which, int j, const Vec3& x, const Vec3& y, double r_i, double r_e,
                       double step);

// ---- the same tables by quadrature of the kernels ---------------------------------

struct PairingTables {
  Table c{};       // int x_l x_l' Y_j
  Table b{};       // from deriv_kernel_b0
  Table b_tan{};   // from deriv_kernel_b0_tangential
  Table cd{};      // from deriv_kernel_c00 + rho deriv_kernel_d00
  Table e{};       // <x_l', E_j[x_l]>
  Table g{};       // <psi_l' V2, dg^(l)/db_j>
  Table f{};       // <psi_l' V2, dA [f^(l)]>
  Matrix6 jacobian = Matrix6::Zero();  // gamma2 r_e^2 rho C + g - f
};

/// Double integrals: outer tensor grid with n_outer rings, inner polar rule about each
/// outer node.
PairingTables quadrature_pairings(const Origin& o, int n_outer = 8, int n_polar = 64);

// ---- radial oracle ----------------------------------------------------------------

/// PT of concentric balls from the degree-1 transmission problem
///   core A r cos t, shell (B r + C / r^2) cos t, matrix (r + E / r^2) cos t,
/// with M = -4 pi E I (so u - a.x ~ -(1/4pi) <M a, x> / |x|^3).
Mat3 concentric_pt(double r_i, double r_e, const MaterialParams& mat);

}  // namespace ptv::analytic
