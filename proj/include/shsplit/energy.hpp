#pragma once

// Discrete Swift-Hohenberg energy, its gradient, the truncated quartic and the
// constants that bound solutions in the max norm.

#include "shsplit/calculus.hpp"
#include "shsplit/linsolve.hpp"

#include <array>
#include <optional>
#include <vector>

namespace shsplit {

struct PhysParams {
  double epsilon = 1.0;
  double eta = 0.0;

  void validate() const;
};

struct BoundParams {
  double zeta = 0.0;
  double c_grid = 0.0;   ///< grid Sobolev constant
  double m_trunc = 0.0;  ///< truncation level M
};

struct EnergyBreakdown {
  double phi1 = 0, phi2 = 0, phi3 = 0, phi4 = 0, total_H = 0;
  std::optional<double> phi1_tilde, total_H_tilde;
};

/// phi1 = sum U^4/4, phi2 = (1-eta)/2 |U|^2, phi3 = |DU|^2, phi4 = eps/2 |Lap U|^2,
/// H = phi1 + phi2 - phi3 + phi4. With `m_trunc` the truncated variants are filled too.
EnergyBreakdown energy_parts(const FieldD& u, const PhysParams& p, std::optional<double> m_trunc = {});

double phi1(const FieldD& u);
double phi1_tilde(const FieldD& u, double m);
double phi2(const FieldD& u, const PhysParams& p);
double phi3(const FieldD& u);
double phi4(const FieldD& u, const PhysParams& p);

struct EnergyGradients {
  FieldD g1, g2, g3, g4;

  /// Gradient of H: g1 + g2 - g3 + g4.
  FieldD total() const { return g1 + g2 - g3 + g4; }
};

EnergyGradients grad_energy_parts(const FieldD& u, const PhysParams& p);

FieldD grad_phi1(const FieldD& u);
FieldD grad_phi1_tilde(const FieldD& u, double m);
FieldD grad_phi2(const FieldD& u, const PhysParams& p);
FieldD grad_phi3(const FieldD& u);
FieldD grad_phi4(const FieldD& u, const PhysParams& p);

struct PsiValue {
  double value;
  double derivative;
};

/// x^4/4 on [-M, M], continued by the matching quadratics outside.
PsiValue psi_trunc(double x, double m);

struct StabilityConstant {
  double c;      ///< C_{eps,eta,zeta}
  double omega;
};

/// Lower bound on zeta: 1/eps + eta - 1.
double zeta_threshold(const PhysParams& p);
/// max(0, threshold) + 1.
double default_zeta(const PhysParams& p);

/// Throws std::domain_error unless zeta > 1/eps + eta - 1.
StabilityConstant c_eps_eta_zeta(const PhysParams& p, double zeta);

enum class SobolevMode { dense, probe, manual };

struct SobolevOptions {
  SobolevMode mode = SobolevMode::dense;
  std::size_t dense_limit = 4096;
  std::vector<std::array<int, 3>> probes;  ///< empty: corner, centre, face centre, edge midpoint
  double manual_value = 0.0;
  CGConfig cg{1e-10, 1e-300, 0};
};

struct SobolevResult {
  double c = 0.0;
  SobolevMode mode = SobolevMode::dense;
  std::array<int, 3> argmax{0, 0, 0};
  FieldD maximizer;  ///< attains |U_p| = C sqrt(Q(U)) at argmax (empty in manual mode)
  std::vector<std::pair<std::array<int, 3>, double>> probe_values;  ///< (node, C_p^2), probe mode only
};

/// |U|^2 + |DU|^2 + |Lap U|^2.
double sobolev_quadratic_form(const FieldD& u);

/// Sharp constant of max|U| <= C sqrt(|U|^2 + |DU|^2 + |Lap U|^2) on this grid.
/// Dense mode inverts the assembled form and throws std::length_error above
/// the node limit; probe mode solves one system per probe node.
SobolevResult sobolev_constant(const GridSpec& grid, const SobolevOptions& opts = {});

struct MBound {
  double m;
  double sup_bound;
};

/// M = max(sqrt(max(0, zeta)), sup_bound), sup_bound = sqrt(C^2/C_{eps,eta,zeta} (H(U0) + zeta^2 V/4)).
MBound bound_M(const FieldD& u0, const PhysParams& p, double zeta, double c_grid);

struct BoundSides {
  double lhs;
  double rhs;
};

/// lhs = H(U), rhs = C_{eps,eta,zeta}/C^2 |U|_inf^2 - zeta^2 V/4.
BoundSides energy_lower_bound(const FieldD& u, const PhysParams& p, double zeta, double c_grid);
/// Same bound for the truncated energy; requires zeta <= M^2.
BoundSides energy_lower_bound_tilde(const FieldD& u, const PhysParams& p, double zeta, double c_grid, double m);

/// Largest admissible step 2/(3M^2 - |1-eta|); empty when unbounded.
std::optional<double> sh_dt_limit(double m, double eta);

}  // namespace shsplit
