#pragma once

// Empirical convergence studies: temporal self-convergence against a fine-step
// reference, and spatial refinement against a manufactured solution.

#include "shsplit/sh_scheme.hpp"

#include <array>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace shsplit::verify {

enum class StudyMode { temporal, spatial };

struct ConvergenceLevel {
  double step = 0.0;  ///< dt (temporal) or max spacing (spatial)
  double error = 0.0;
  std::optional<double> ratio;  ///< previous error / this error
  std::optional<double> order;
  std::optional<double> defect;  ///< max over steps of |gamma|, spatial only
  std::optional<double> defect_ratio;
  std::optional<double> defect_order;
  double sobolev_constant = 0.0;  ///< grid constant (temporal) or 0 when not computed
};

struct ConvergenceStudy {
  StudyMode mode = StudyMode::temporal;
  std::vector<ConvergenceLevel> levels;

  /// Observed orders of successive pairs.
  std::vector<double> orders() const;
  std::vector<double> defect_ratios() const;
};

void write_study_csv(std::ostream& os, const ConvergenceStudy& study);

struct TemporalConfig {
  FieldD u0;
  PhysParams params;
  double final_time = 0.5;
  std::vector<double> dt_ladder;
  double reference_dt = 0.0;
  SchemeOptions scheme;
  bool monitors = true;
};

/// Errors |U_dt(T) - U_ref(T)| on one grid. Throws std::invalid_argument when
/// the ladder has fewer than 3 levels, a dt exceeds the stability limit, T is
/// not a multiple of a step, or reference_dt > min(ladder)/20.
ConvergenceStudy temporal_convergence(const TemporalConfig& cfg);

/// u*(x,t) = a(t) prod cos(pi m_a x_a / l_a), a(t) = amplitude cos(omega t).
struct MMSProblem {
  PhysParams params;
  double amplitude = 0.5;
  double omega = 1.0;
  std::array<int, 3> modes{1, 1, 1};

  double a(double t) const;
  double a_dot(double t) const;
  /// k^2 = sum (pi m_a / l_a)^2, so Lap u* = -k^2 u*.
  double wavenumber_sq(const GridSpec& g) const;
  /// prod cos(pi m_a x_a / l_a) at the nodes.
  FieldD shape(const GridSpec& g) const;
  FieldD exact(const GridSpec& g, double t) const;
  /// du/dt + u^3 + (1-eta) u + eps Lap^2 u + 2 Lap u, evaluated analytically.
  FieldD source(const GridSpec& g, double t) const;
  /// eps (Lap_d^2 u - Lap^2 u) + 2 (Lap_d u - Lap u) at the nodes.
  FieldD defect(const GridSpec& g, double t) const;
};

struct SpatialConfig {
  MMSProblem mms;
  std::vector<GridSpec> grids;
  double dt = 1e-5;
  double final_time = 2e-3;
  CGConfig cg;
};

/// Forced scheme (source at t_{n+1}) on each grid; monitors are off because
/// forcing breaks the dissipation law.
ConvergenceStudy spatial_convergence(const SpatialConfig& cfg);

}  // namespace shsplit::verify
