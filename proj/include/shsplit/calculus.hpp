#pragma once

// Difference operators on reflected grid functions and the norm identities
// the stability analysis rests on.

#include "shsplit/lattice.hpp"

#include <array>
#include <cmath>
#include <string>

namespace shsplit {

enum class DiffKind { forward, backward, central1, central2 };

struct Stencil {
  Axis axis;
  DiffKind kind;
};

inline std::string to_string(DiffKind k) {
  switch (k) {
    case DiffKind::forward: return "forward";
    case DiffKind::backward: return "backward";
    case DiffKind::central1: return "central1";
    default: return "central2";
  }
}

/// Stencil values on the nodes, tagged with the operator that produced them.
template <typename Scalar>
struct StencilOutput {
  Stencil op;
  Field<Scalar> values;
};

template <typename Scalar>
struct VectorField {
  std::array<Field<Scalar>, 3> comp;

  const Field<Scalar>& operator[](Axis a) const { return comp[static_cast<int>(a)]; }
  Field<Scalar>& operator[](Axis a) { return comp[static_cast<int>(a)]; }
};

namespace detail {

template <typename Scalar>
Scalar apply_1d(DiffKind kind, Scalar minus, Scalar centre, Scalar plus, Scalar inv_h) {
  switch (kind) {
    case DiffKind::forward: return (plus - centre) * inv_h;
    case DiffKind::backward: return (centre - minus) * inv_h;
    case DiffKind::central1: return (plus - minus) * (Scalar(0.5) * inv_h);
    // (plus + minus) first keeps the result bitwise symmetric under reflection
    default: return ((plus + minus) - Scalar(2) * centre) * (inv_h * inv_h);
  }
}

inline std::array<int, 2> reach(DiffKind kind) {
  switch (kind) {
    case DiffKind::forward: return {0, 1};
    case DiffKind::backward: return {1, 0};
    default: return {1, 1};
  }
}

}  // namespace detail

/// One difference along one axis, evaluated at every stored index whose
/// stencil fits inside the ghost layers; other entries are NaN.
template <typename Scalar>
ExtendedField<Scalar> diff_extended(const ExtendedField<Scalar>& e, Axis axis, DiffKind kind) {
  const GridSpec& g = e.grid();
  constexpr int G = ExtendedField<Scalar>::kGhost;
  ExtendedField<Scalar> out(g);
  const auto [lo_reach, hi_reach] = detail::reach(kind);
  const int a = static_cast<int>(axis);
  const Scalar inv_h = Scalar(1) / static_cast<Scalar>(g.spacing(axis));
  const std::ptrdiff_t s = e.stride(axis);
  const Scalar* src = e.data();
  for (int k = -G; k <= g.nz() + G; ++k)
    for (int j = -G; j <= g.ny() + G; ++j)
      for (int i = -G; i <= g.nx() + G; ++i) {
        const std::array<int, 3> idx{i, j, k};
        if (idx[a] - lo_reach < -G || idx[a] + hi_reach > g.intervals(axis) + G) continue;
        const std::ptrdiff_t o = e.offset(i, j, k);
        const Scalar minus = lo_reach ? src[o - s] : Scalar(0);
        const Scalar plus = hi_reach ? src[o + s] : Scalar(0);
        out(i, j, k) = detail::apply_1d(kind, minus, src[o], plus, inv_h);
      }
  return out;
}

template <typename Scalar>
StencilOutput<Scalar> diff(const ExtendedField<Scalar>& e, Axis axis, DiffKind kind) {
  const GridSpec& g = e.grid();
  Field<Scalar> out(g);
  const auto [lo_reach, hi_reach] = detail::reach(kind);
  const Scalar inv_h = Scalar(1) / static_cast<Scalar>(g.spacing(axis));
  const std::ptrdiff_t s = e.stride(axis);
  const Scalar* src = e.data();
  for (int k = 0; k <= g.nz(); ++k)
    for (int j = 0; j <= g.ny(); ++j)
      for (int i = 0; i <= g.nx(); ++i) {
        const std::ptrdiff_t o = e.offset(i, j, k);
        out(i, j, k) = detail::apply_1d(kind, lo_reach ? src[o - s] : Scalar(0), src[o],
                                        hi_reach ? src[o + s] : Scalar(0), inv_h);
      }
  return {{axis, kind}, std::move(out)};
}

template <typename Scalar>
VectorField<Scalar> gradient(const ExtendedField<Scalar>& e, DiffKind kind) {
  VectorField<Scalar> v;
  for (Axis a : kAxes) v[a] = diff(e, a, kind).values;
  return v;
}

template <typename Scalar>
Scalar inner_product(const VectorField<Scalar>& u, const VectorField<Scalar>& v) {
  Scalar s(0);
  for (Axis a : kAxes) s += inner_product(u[a], v[a]);
  return s;
}

/// Discrete Laplacian grad+ . grad- at the nodes; equals the sum of the three
/// central second differences.
template <typename Scalar>
Field<Scalar> laplacian(const ExtendedField<Scalar>& e) {
  const GridSpec& g = e.grid();
  Field<Scalar> out(g);
  const Scalar cx = Scalar(1) / static_cast<Scalar>(g.dx() * g.dx());
  const Scalar cy = Scalar(1) / static_cast<Scalar>(g.dy() * g.dy());
  const Scalar cz = Scalar(1) / static_cast<Scalar>(g.dz() * g.dz());
  const std::ptrdiff_t sy = e.stride(Axis::y), sz = e.stride(Axis::z);
  const Scalar* src = e.data();
  Scalar* dst = out.values().data();
  std::size_t n = 0;
  for (int k = 0; k <= g.nz(); ++k)
    for (int j = 0; j <= g.ny(); ++j) {
      const Scalar* p = src + e.offset(0, j, k);
      for (int i = 0; i <= g.nx(); ++i, ++p, ++n) {
        const Scalar c2 = Scalar(2) * p[0];
        dst[n] = ((p[1] + p[-1]) - c2) * cx + ((p[sy] + p[-sy]) - c2) * cy +
                 ((p[sz] + p[-sz]) - c2) * cz;
      }
    }
  return out;
}

template <typename Scalar>
Field<Scalar> laplacian(const Field<Scalar>& f) {
  return laplacian(extend(f));
}

/// Laplacian at every stored index where its radius-1 stencil fits (used to
/// inspect boundary conditions on the ghost layers).
template <typename Scalar>
ExtendedField<Scalar> laplacian_extended(const ExtendedField<Scalar>& e) {
  ExtendedField<Scalar> out(e.grid());
  const auto dx2 = diff_extended(e, Axis::x, DiffKind::central2);
  const auto dy2 = diff_extended(e, Axis::y, DiffKind::central2);
  const auto dz2 = diff_extended(e, Axis::z, DiffKind::central2);
  for (std::size_t n = 0; n < out.storage_size(); ++n)
    out.data()[n] = dx2.data()[n] + dy2.data()[n] + dz2.data()[n];
  return out;
}

/// Laplacian applied twice; the intermediate Laplacian is re-extended by even
/// reflection before the second application.
template <typename Scalar>
Field<Scalar> bilaplacian(const ExtendedField<Scalar>& e) {
  return laplacian(extend(laplacian(e)));
}

template <typename Scalar>
Field<Scalar> bilaplacian(const Field<Scalar>& f) {
  return bilaplacian(extend(f));
}

/// outer(inner(U)) at the nodes, both applied on the extension.
template <typename Scalar>
Field<Scalar> compose(const ExtendedField<Scalar>& e, Stencil outer, Stencil inner) {
  return diff_extended(diff_extended(e, inner.axis, inner.kind), outer.axis, outer.kind).interior();
}

template <typename Scalar>
struct LaplacianNormSides {
  Scalar lhs;      ///< |Lap U|^2
  Scalar rhs;      ///< second differences plus half the mixed cross terms
  Scalar d2_norm;  ///< |D^2 U| (quarter-weighted cross terms)
};

template <typename Scalar>
LaplacianNormSides<Scalar> laplacian_norm_identity(const ExtendedField<Scalar>& e) {
  const Scalar lhs = norm_sq(laplacian(e));
  Scalar second(0);
  for (Axis a : kAxes) second += norm_sq(diff(e, a, DiffKind::central2).values);
  Scalar cross(0);
  constexpr std::array<std::array<Axis, 2>, 3> pairs{{{Axis::x, Axis::y}, {Axis::y, Axis::z}, {Axis::x, Axis::z}}};
  for (const auto& [a, b] : pairs)
    for (DiffKind ka : {DiffKind::forward, DiffKind::backward})
      for (DiffKind kb : {DiffKind::forward, DiffKind::backward})
        cross += norm_sq(compose(e, {a, ka}, {b, kb}));
  return {lhs, second + cross / 2, std::sqrt(second + cross / 4)};
}

template <typename Scalar>
struct AxisLaplacianSides {
  Scalar lhs;  ///< <Lap U, central2_axis U>
  Scalar rhs;  ///< quarter sum of |grad(+/-) delta_axis(+/-) U|^2
};

/// Inner product of the Laplacian with one axis' second difference, against
/// the quarter-sum of the four squared gradients of the one-sided differences.
template <typename Scalar>
AxisLaplacianSides<Scalar> laplacian_axis_identity(const ExtendedField<Scalar>& e, Axis axis) {
  const Scalar lhs = inner_product(laplacian(e), diff(e, axis, DiffKind::central2).values);
  Scalar rhs(0);
  for (DiffKind inner : {DiffKind::forward, DiffKind::backward}) {
    const auto v = diff_extended(e, axis, inner);
    for (DiffKind outer : {DiffKind::forward, DiffKind::backward})
      for (Axis b : kAxes) rhs += norm_sq(diff_extended(v, b, outer).interior());
  }
  return {lhs, rhs / 4};
}

/// |<f, Lap g> + (<grad+ f, grad+ g> + <grad- f, grad- g>)/2|, zero in exact
/// arithmetic for reflected fields.
template <typename Scalar>
Scalar summation_by_parts_defect(const Field<Scalar>& f, const Field<Scalar>& g) {
  require_same_grid(f.grid(), g.grid(), "summation_by_parts_defect");
  const auto ef = extend(f);
  const auto eg = extend(g);
  const Scalar lap = inner_product(f, laplacian(eg));
  const Scalar grads = inner_product(gradient(ef, DiffKind::forward), gradient(eg, DiffKind::forward)) +
                       inner_product(gradient(ef, DiffKind::backward), gradient(eg, DiffKind::backward));
  return std::abs(lap + grads / 2);
}

}  // namespace shsplit
