#pragma once

// Brute-force matrices for every stencil operator, assembled from the
// reflection rules with Kronecker products. Nothing here calls the
// matrix-free kernels.

#include "shsplit/calculus.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>

namespace shsplit::verify {

inline constexpr std::size_t kDenseNodeLimit = 4096;

struct DenseOracle {
  GridSpec grid;
  Eigen::VectorXd weights;            ///< trapezoidal node weights (diagonal of the mass matrix)
  Eigen::SparseMatrix<double> extension;  ///< nodes -> extended nodes (even reflection)
  Eigen::SparseMatrix<double> restriction;  ///< extended nodes -> nodes
  Eigen::MatrixXd laplacian;
  Eigen::MatrixXd bilaplacian;
  Eigen::MatrixXd seminorm_D_form;    ///< |DU|^2 = U^T Q U
  Eigen::MatrixXd d2_form;            ///< |D^2 U|^2 = U^T Q U
  Eigen::MatrixXd sobolev_form;       ///< |U|^2 + |DU|^2 + |Lap U|^2 = U^T Q U

  Eigen::MatrixXd mass() const { return weights.asDiagonal(); }

  /// Node-to-node matrix of one difference on the reflected extension.
  Eigen::MatrixXd difference(Axis axis, DiffKind kind) const;
  /// outer(inner(U)) with both differences taken in extended index space.
  Eigen::MatrixXd composed(Stencil outer, Stencil inner) const;
  /// (1/dt + max(0, 1-eta)) I + eps * bilaplacian
  Eigen::MatrixXd implicit_operator(double epsilon, double eta, double dt) const;

  double inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
    return f.dot(weights.asDiagonal() * g);
  }
};

/// Throws std::length_error when the grid exceeds `node_limit` nodes.
DenseOracle dense_assemble(const GridSpec& grid, std::size_t node_limit = kDenseNodeLimit);

struct DenseEnergy {
  double phi1, phi2, phi3, phi4, total;
};

/// Energy parts evaluated with the oracle matrices.
DenseEnergy dense_energy(const DenseOracle& o, const Eigen::VectorXd& u, double epsilon, double eta);

}  // namespace shsplit::verify
