#include "shsplit/energy.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>
#include <string>

namespace shsplit {

void PhysParams::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be positive and finite");
  if (!std::isfinite(eta)) throw std::invalid_argument("eta must be finite");
}

double phi1(const FieldD& u) {
  const GridSpec& g = u.grid();
  return weighted_sum<double>(g, [&](int i, int j, int k) {
    const double x = u(i, j, k);
    return 0.25 * (x * x) * (x * x);
  });
}

double phi1_tilde(const FieldD& u, double m) {
  const GridSpec& g = u.grid();
  return weighted_sum<double>(g, [&](int i, int j, int k) { return psi_trunc(u(i, j, k), m).value; });
}

double phi2(const FieldD& u, const PhysParams& p) { return 0.5 * (1.0 - p.eta) * norm_sq(u); }

double phi3(const FieldD& u) { return seminorm_D_sq(extend(u)); }

double phi4(const FieldD& u, const PhysParams& p) { return 0.5 * p.epsilon * norm_sq(laplacian(extend(u))); }

EnergyBreakdown energy_parts(const FieldD& u, const PhysParams& p, std::optional<double> m_trunc) {
  EnergyBreakdown e;
  const auto ext = extend(u);
  e.phi1 = phi1(u);
  e.phi2 = phi2(u, p);
  e.phi3 = seminorm_D_sq(ext);
  e.phi4 = 0.5 * p.epsilon * norm_sq(laplacian(ext));
  e.total_H = e.phi1 + e.phi2 - e.phi3 + e.phi4;
  if (m_trunc) {
    e.phi1_tilde = phi1_tilde(u, *m_trunc);
    e.total_H_tilde = *e.phi1_tilde + e.phi2 - e.phi3 + e.phi4;
  }
  return e;
}

FieldD grad_phi1(const FieldD& u) {
  FieldD g = u;
  g.values() = u.values().array().cube().matrix();
  return g;
}

FieldD grad_phi1_tilde(const FieldD& u, double m) {
  FieldD g(u.grid());
  for (std::size_t n = 0; n < u.size(); ++n) g[n] = psi_trunc(u[n], m).derivative;
  return g;
}

FieldD grad_phi2(const FieldD& u, const PhysParams& p) { return (1.0 - p.eta) * u; }

FieldD grad_phi3(const FieldD& u) { return -2.0 * laplacian(extend(u)); }

FieldD grad_phi4(const FieldD& u, const PhysParams& p) { return p.epsilon * bilaplacian(extend(u)); }

EnergyGradients grad_energy_parts(const FieldD& u, const PhysParams& p) {
  const auto ext = extend(u);
  FieldD lap = laplacian(ext);
  FieldD bilap = laplacian(extend(lap));
  return {grad_phi1(u), grad_phi2(u, p), -2.0 * lap, p.epsilon * bilap};
}

PsiValue psi_trunc(double x, double m) {
  if (!(m >= 0.0)) throw std::invalid_argument("psi_trunc: M must be >= 0");
  const double m2 = m * m, m3 = m2 * m, m4 = m2 * m2;
  if (x < -m) return {1.5 * m2 * x * x + 2.0 * m3 * x + 0.75 * m4, 3.0 * m2 * x + 2.0 * m3};
  if (x > m) return {1.5 * m2 * x * x - 2.0 * m3 * x + 0.75 * m4, 3.0 * m2 * x - 2.0 * m3};
  return {0.25 * (x * x) * (x * x), x * x * x};
}

double zeta_threshold(const PhysParams& p) { return 1.0 / p.epsilon + p.eta - 1.0; }

double default_zeta(const PhysParams& p) { return std::max(0.0, zeta_threshold(p)) + 1.0; }

StabilityConstant c_eps_eta_zeta(const PhysParams& p, double zeta) {
  p.validate();
  if (!(zeta > zeta_threshold(p)))
    throw std::domain_error("zeta = " + std::to_string(zeta) + " must exceed 1/eps + eta - 1 = " +
                            std::to_string(zeta_threshold(p)));
  const double b = p.epsilon - 1.0 + p.eta - zeta;
  const double root = std::sqrt(b * b + 4.0);
  return {(p.epsilon + 1.0 - p.eta + zeta - root) / 6.0, (root + b) / 2.0};
}

double sobolev_quadratic_form(const FieldD& u) {
  const auto ext = extend(u);
  return norm_sq(u) + seminorm_D_sq(ext) + norm_sq(laplacian(ext));
}

namespace {

// A = I - Lap + Lap^2, self-adjoint in the weighted inner product with
// <U, A U> equal to the Sobolev quadratic form.
FieldD sobolev_apply(const FieldD& u) {
  const FieldD lap = laplacian(extend(u));
  return u - lap + laplacian(extend(lap));
}

std::vector<std::array<int, 3>> default_probes(const GridSpec& g) {
  const int cx = g.nx() / 2, cy = g.ny() / 2, cz = g.nz() / 2;
  return {{0, 0, 0}, {cx, cy, cz}, {0, cy, cz}, {0, 0, cz}};
}

}  // namespace

SobolevResult sobolev_constant(const GridSpec& grid, const SobolevOptions& opts) {
  SobolevResult res;
  res.mode = opts.mode;
  switch (opts.mode) {
    case SobolevMode::manual: {
      if (!(opts.manual_value > 0.0)) throw std::invalid_argument("sobolev_constant: manual value must be positive");
      res.c = opts.manual_value;
      return res;
    }
    case SobolevMode::dense: {
      if (grid.node_count() > opts.dense_limit)
        throw std::length_error("sobolev_constant: " + std::to_string(grid.node_count()) +
                                " nodes exceeds dense limit " + std::to_string(opts.dense_limit));
      const auto n = static_cast<Eigen::Index>(grid.node_count());
      // columns of W A, assembled through the matrix-free kernels
      Eigen::MatrixXd q(n, n);
      QuadWeights w(grid);
      for (Eigen::Index c = 0; c < n; ++c) {
        FieldD e(grid);
        e[static_cast<std::size_t>(c)] = 1.0;
        const FieldD ae = sobolev_apply(e);
        for (Eigen::Index r = 0; r < n; ++r) {
          const auto [i, j, k] = grid.node_of(static_cast<std::size_t>(r));
          q(r, c) = w.node(i, j, k) * ae[static_cast<std::size_t>(r)];
        }
      }
      const Eigen::MatrixXd sym = 0.5 * (q + q.transpose());
      Eigen::LLT<Eigen::MatrixXd> llt(sym);
      if (llt.info() != Eigen::Success) throw std::runtime_error("sobolev_constant: quadratic form not positive definite");
      const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
      Eigen::Index best = 0;
      inv.diagonal().maxCoeff(&best);
      res.c = std::sqrt(inv(best, best));
      res.argmax = grid.node_of(static_cast<std::size_t>(best));
      res.maximizer = FieldD(grid, Eigen::VectorXd(inv.col(best)));
      return res;
    }
    case SobolevMode::probe: {
      const auto probes = opts.probes.empty() ? default_probes(grid) : opts.probes;
      const LinearOperator<double> a{sobolev_apply, "I - Lap + Lap^2"};
      QuadWeights w(grid);
      double best = -1.0;
      for (const auto& node : probes) {
        const auto [i, j, k] = node;
        if (i < 0 || j < 0 || k < 0 || i > grid.nx() || j > grid.ny() || k > grid.nz())
          throw std::invalid_argument("sobolev_constant: probe node outside grid");
        FieldD rhs(grid);
        rhs(i, j, k) = 1.0 / w.node(i, j, k);
        auto sol = cg_solve(a, rhs, opts.cg);
        if (!sol.converged)
          throw std::runtime_error("sobolev_constant: probe solve did not converge after " +
                                   std::to_string(sol.iters) + " iterations");
        const double cp2 = sol.x(i, j, k);
        res.probe_values.push_back({node, cp2});
        if (cp2 > best) {
          best = cp2;
          res.argmax = node;
          res.maximizer = std::move(sol.x);
        }
      }
      res.c = std::sqrt(best);
      return res;
    }
  }
  throw std::invalid_argument("sobolev_constant: unknown mode");
}

MBound bound_M(const FieldD& u0, const PhysParams& p, double zeta, double c_grid) {
  if (!(c_grid > 0.0)) throw std::invalid_argument("bound_M: Sobolev constant must be positive");
  const double cz = c_eps_eta_zeta(p, zeta).c;
  const double h0 = energy_parts(u0, p).total_H;
  const double shifted = h0 + zeta * zeta * u0.grid().volume() / 4.0;
  // non-negative by the energy lower bound; tiny negatives are roundoff
  if (shifted < -1e-10 * (1.0 + std::abs(h0)))
    throw std::logic_error("bound_M: H(U0) + zeta^2 V/4 = " + std::to_string(shifted) + " is negative");
  const double sup = std::sqrt(c_grid * c_grid / cz * std::max(0.0, shifted));
  return {std::max(std::sqrt(std::max(0.0, zeta)), sup), sup};
}

BoundSides energy_lower_bound(const FieldD& u, const PhysParams& p, double zeta, double c_grid) {
  const double cz = c_eps_eta_zeta(p, zeta).c;
  const double linf = linf_norm(u);
  return {energy_parts(u, p).total_H,
          cz / (c_grid * c_grid) * linf * linf - zeta * zeta * u.grid().volume() / 4.0};
}

BoundSides energy_lower_bound_tilde(const FieldD& u, const PhysParams& p, double zeta, double c_grid, double m) {
  if (zeta > m * m) throw std::invalid_argument("energy_lower_bound_tilde: requires zeta <= M^2");
  const double cz = c_eps_eta_zeta(p, zeta).c;
  const double linf = linf_norm(u);
  return {*energy_parts(u, p, m).total_H_tilde,
          cz / (c_grid * c_grid) * linf * linf - zeta * zeta * u.grid().volume() / 4.0};
}

std::optional<double> sh_dt_limit(double m, double eta) {
  const double excess = 3.0 * m * m - std::abs(1.0 - eta);
  if (excess <= 0.0) return std::nullopt;
  return 2.0 / excess;
}

}  // namespace shsplit
