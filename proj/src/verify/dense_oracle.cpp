#include "shsplit/verify/dense_oracle.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <stdexcept>
#include <string>
#include <vector>

namespace shsplit::verify {
namespace {

using Sparse = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
constexpr int G = ExtendedField<double>::kGhost;

Sparse identity(int n) {
  Sparse m(n, n);
  m.setIdentity();
  return m;
}

// 1-D even-reflection extension, (N+1+2G) x (N+1).
Sparse extension_1d(int n) {
  std::vector<Triplet> t;
  for (int m = -G; m <= n + G; ++m) t.emplace_back(m + G, reflect_index(m, n), 1.0);
  Sparse e(n + 1 + 2 * G, n + 1);
  e.setFromTriplets(t.begin(), t.end());
  return e;
}

Sparse restriction_1d(int n) {
  std::vector<Triplet> t;
  for (int m = 0; m <= n; ++m) t.emplace_back(m, m + G, 1.0);
  Sparse r(n + 1, n + 1 + 2 * G);
  r.setFromTriplets(t.begin(), t.end());
  return r;
}

// 1-D difference acting in extended index space; rows whose stencil leaves
// the storage stay empty.
Sparse difference_1d(int n, double h, DiffKind kind) {
  const int size = n + 1 + 2 * G;
  std::vector<Triplet> t;
  for (int r = 0; r < size; ++r) {
    switch (kind) {
      case DiffKind::forward:
        if (r + 1 < size) {
          t.emplace_back(r, r + 1, 1.0 / h);
          t.emplace_back(r, r, -1.0 / h);
        }
        break;
      case DiffKind::backward:
        if (r >= 1) {
          t.emplace_back(r, r, 1.0 / h);
          t.emplace_back(r, r - 1, -1.0 / h);
        }
        break;
      case DiffKind::central1:
        if (r >= 1 && r + 1 < size) {
          t.emplace_back(r, r + 1, 0.5 / h);
          t.emplace_back(r, r - 1, -0.5 / h);
        }
        break;
      case DiffKind::central2:
        if (r >= 1 && r + 1 < size) {
          t.emplace_back(r, r + 1, 1.0 / (h * h));
          t.emplace_back(r, r, -2.0 / (h * h));
          t.emplace_back(r, r - 1, 1.0 / (h * h));
        }
        break;
    }
  }
  Sparse d(size, size);
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

// Lifts per-axis 1-D matrices to 3-D (x is the fastest index).
Sparse kron3(const Sparse& z, const Sparse& y, const Sparse& x) {
  Sparse yx = Eigen::kroneckerProduct(y, x);
  return Eigen::kroneckerProduct(z, yx);
}

Sparse ext_op(const GridSpec& g, Axis axis, DiffKind kind) {
  std::array<Sparse, 3> parts;
  for (Axis a : kAxes) {
    const int ext = g.intervals(a) + 1 + 2 * G;
    parts[static_cast<int>(a)] =
        (a == axis) ? difference_1d(g.intervals(a), g.spacing(a), kind) : identity(ext);
  }
  return kron3(parts[2], parts[1], parts[0]);
}

}  // namespace

Eigen::MatrixXd DenseOracle::difference(Axis axis, DiffKind kind) const {
  return Eigen::MatrixXd(restriction * ext_op(grid, axis, kind) * extension);
}

Eigen::MatrixXd DenseOracle::composed(Stencil outer, Stencil inner) const {
  return Eigen::MatrixXd(restriction * ext_op(grid, outer.axis, outer.kind) *
                         ext_op(grid, inner.axis, inner.kind) * extension);
}

Eigen::MatrixXd DenseOracle::implicit_operator(double epsilon, double eta, double dt) const {
  const auto n = static_cast<Eigen::Index>(grid.node_count());
  const double diag = 1.0 / dt + std::max(0.0, 1.0 - eta);
  return diag * Eigen::MatrixXd::Identity(n, n) + epsilon * bilaplacian;
}

DenseOracle dense_assemble(const GridSpec& g, std::size_t node_limit) {
  if (g.node_count() > node_limit)
    throw std::length_error("dense_assemble: " + std::to_string(g.node_count()) +
                            " nodes exceeds limit " + std::to_string(node_limit));
  DenseOracle o;
  o.grid = g;
  o.extension = kron3(extension_1d(g.nz()), extension_1d(g.ny()), extension_1d(g.nx()));
  o.restriction = kron3(restriction_1d(g.nz()), restriction_1d(g.ny()), restriction_1d(g.nx()));

  const auto n = static_cast<Eigen::Index>(g.node_count());
  o.weights.resize(n);
  for (int k = 0; k <= g.nz(); ++k)
    for (int j = 0; j <= g.ny(); ++j)
      for (int i = 0; i <= g.nx(); ++i) {
        const double wi = (i == 0 || i == g.nx()) ? 0.5 : 1.0;
        const double wj = (j == 0 || j == g.ny()) ? 0.5 : 1.0;
        const double wk = (k == 0 || k == g.nz()) ? 0.5 : 1.0;
        o.weights[static_cast<Eigen::Index>(g.index(i, j, k))] = wi * wj * wk * g.cell_volume();
      }
  const auto W = o.weights.asDiagonal();

  Sparse sum_second = ext_op(g, Axis::x, DiffKind::central2) + ext_op(g, Axis::y, DiffKind::central2) +
                      ext_op(g, Axis::z, DiffKind::central2);
  const Sparse stencil = o.restriction * sum_second;  // extended -> nodes
  const Sparse lap = stencil * o.extension;
  o.laplacian = Eigen::MatrixXd(lap);
  o.bilaplacian = Eigen::MatrixXd(stencil * o.extension * stencil * o.extension);

  o.seminorm_D_form = Eigen::MatrixXd::Zero(n, n);
  o.d2_form = Eigen::MatrixXd::Zero(n, n);
  for (Axis a : kAxes) {
    const Eigen::MatrixXd f = o.difference(a, DiffKind::forward);
    const Eigen::MatrixXd b = o.difference(a, DiffKind::backward);
    o.seminorm_D_form += 0.5 * (f.transpose() * W * f + b.transpose() * W * b);
    const Eigen::MatrixXd c2 = o.difference(a, DiffKind::central2);
    o.d2_form += c2.transpose() * W * c2;
  }
  constexpr std::array<std::array<Axis, 2>, 3> pairs{{{Axis::x, Axis::y}, {Axis::y, Axis::z}, {Axis::x, Axis::z}}};
  for (const auto& [a, b] : pairs)
    for (DiffKind ka : {DiffKind::forward, DiffKind::backward})
      for (DiffKind kb : {DiffKind::forward, DiffKind::backward}) {
        const Eigen::MatrixXd m = o.composed({a, ka}, {b, kb});
        o.d2_form += 0.25 * m.transpose() * W * m;
      }
  o.sobolev_form = Eigen::MatrixXd(W) + o.seminorm_D_form + o.laplacian.transpose() * W * o.laplacian;
  return o;
}

DenseEnergy dense_energy(const DenseOracle& o, const Eigen::VectorXd& u, double epsilon, double eta) {
  DenseEnergy e{};
  e.phi1 = 0.25 * o.weights.dot(u.array().pow(4).matrix());
  e.phi2 = 0.5 * (1.0 - eta) * o.inner(u, u);
  e.phi3 = u.dot(o.seminorm_D_form * u);
  const Eigen::VectorXd lu = o.laplacian * u;
  e.phi4 = 0.5 * epsilon * o.inner(lu, lu);
  e.total = e.phi1 + e.phi2 - e.phi3 + e.phi4;
  return e;
}

}  // namespace shsplit::verify
