#pragma once

// Conjugate gradient in the trapezoidal-weighted inner product, plus a
// randomized symmetry/positivity probe for the operators it is given.

#include "shsplit/lattice.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace shsplit {

template <typename Scalar>
struct LinearOperator {
  std::function<Field<Scalar>(const Field<Scalar>&)> apply;
  std::string descriptor;
};

struct CGConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  std::size_t max_iter = 0;  ///< 0 means 10 * node_count

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("CGConfig: tolerances must be positive");
  }
  std::size_t iteration_limit(const GridSpec& g) const { return max_iter ? max_iter : 10 * g.node_count(); }
};

template <typename Scalar>
struct CGResult {
  Field<Scalar> x;
  std::size_t iters = 0;
  Scalar residual{};  ///< weighted norm of b - A x
  Scalar rhs_norm{};
  bool converged = false;

  Scalar relative_residual() const { return rhs_norm > Scalar(0) ? residual / rhs_norm : residual; }
};

/// Raised when p.Ap <= 0, i.e. the operator is not positive definite.
class cg_breakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class cg_nonfinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
using Preconditioner = std::function<Field<Scalar>(const Field<Scalar>&)>;

template <typename Scalar>
using CGObserver = std::function<void(std::size_t, const Field<Scalar>&)>;

/// Solves A x = b. Stops once the weighted residual norm is at most
/// max(rel_tol |b|, abs_tol); the reported residual is recomputed from x.
/// On hitting max_iter the iterate with the smallest residual is returned
/// with converged = false.
template <typename Scalar>
CGResult<Scalar> cg_solve(const LinearOperator<Scalar>& A, const Field<Scalar>& b, const CGConfig& cfg,
                          const Field<Scalar>* x0 = nullptr, const Preconditioner<Scalar>& precond = {},
                          const CGObserver<Scalar>& observer = {}) {
  cfg.validate();
  const GridSpec& g = b.grid();
  if (!b.all_finite()) throw cg_nonfinite("cg_solve[" + A.descriptor + "]: non-finite right-hand side");
  CGResult<Scalar> out;
  out.rhs_norm = l2_norm(b);
  const Scalar target = std::max(static_cast<Scalar>(cfg.rel_tol) * out.rhs_norm, static_cast<Scalar>(cfg.abs_tol));

  Field<Scalar> x = x0 ? *x0 : Field<Scalar>(g);
  require_same_grid(g, x.grid(), "cg_solve");
  Field<Scalar> r = x0 ? b - A.apply(x) : b;
  Scalar res = l2_norm(r);
  if (observer) observer(0, x);
  if (res <= target) {
    out.x = std::move(x);
    out.residual = res;
    out.converged = true;
    return out;
  }

  Field<Scalar> z = precond ? precond(r) : r;
  Field<Scalar> p = z;
  Scalar rz = inner_product(r, z);
  Field<Scalar> best = x;
  Scalar best_res = res;
  const std::size_t limit = cfg.iteration_limit(g);

  for (std::size_t it = 1; it <= limit; ++it) {
    const Field<Scalar> ap = A.apply(p);
    const Scalar pap = inner_product(p, ap);
    if (!std::isfinite(static_cast<double>(pap)))
      throw cg_nonfinite("cg_solve[" + A.descriptor + "]: non-finite value at iteration " + std::to_string(it));
    if (pap <= Scalar(0))
      throw cg_breakdown("cg_solve[" + A.descriptor + "]: p.Ap <= 0 at iteration " + std::to_string(it));
    const Scalar alpha = rz / pap;
    x.values() += alpha * p.values();
    r.values() -= alpha * ap.values();
    res = l2_norm(r);
    out.iters = it;
    if (observer) observer(it, x);
    if (res < best_res) {
      best_res = res;
      best = x;
    }
    if (res <= target) {
      // guard against drift of the recursive residual
      const Scalar true_res = l2_norm(b - A.apply(x));
      if (true_res <= target) {
        out.x = std::move(x);
        out.residual = true_res;
        out.converged = true;
        return out;
      }
      r = b - A.apply(x);
      res = true_res;
    }
    z = precond ? precond(r) : r;
    const Scalar rz_next = inner_product(r, z);
    p.values() = z.values() + (rz_next / rz) * p.values();
    rz = rz_next;
  }
  out.x = std::move(best);
  out.residual = l2_norm(b - A.apply(out.x));
  out.converged = false;
  return out;
}

template <typename Scalar>
struct SpdProbeReport {
  bool passed = true;
  std::size_t trials = 0;
  Scalar worst_symmetry{};    ///< max |<Ax,y> - <x,Ay>| / scale
  Scalar worst_positivity{};  ///< min <x,Ax> / scale
};

/// Random-pair check of weighted self-adjointness (tolerance 1e-11 of
/// |Ax||y| + |x||Ay|) and positivity (<x,Ax> >= -1e-12 |x||Ax|).
template <typename Scalar>
SpdProbeReport<Scalar> spd_probe(const LinearOperator<Scalar>& A, const GridSpec& grid, std::size_t trials,
                                 std::uint64_t seed = 0) {
  if (trials == 0) throw std::invalid_argument("spd_probe: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto draw = [&] {
    Field<Scalar> f(grid);
    for (std::size_t n = 0; n < f.size(); ++n) f[n] = static_cast<Scalar>(dist(rng));
    return f;
  };
  SpdProbeReport<Scalar> rep;
  rep.trials = trials;
  rep.worst_positivity = std::numeric_limits<Scalar>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const Field<Scalar> x = draw(), y = draw();
    const Field<Scalar> ax = A.apply(x), ay = A.apply(y);
    const Scalar sym_scale = l2_norm(ax) * l2_norm(y) + l2_norm(x) * l2_norm(ay);
    const Scalar sym = std::abs(inner_product(ax, y) - inner_product(x, ay)) / (sym_scale > 0 ? sym_scale : Scalar(1));
    const Scalar pos_scale = l2_norm(x) * l2_norm(ax);
    const Scalar pos = inner_product(x, ax) / (pos_scale > 0 ? pos_scale : Scalar(1));
    rep.worst_symmetry = std::max(rep.worst_symmetry, sym);
    rep.worst_positivity = std::min(rep.worst_positivity, pos);
  }
  rep.passed = rep.worst_symmetry <= Scalar(1e-11) && rep.worst_positivity >= Scalar(-1e-12);
  return rep;
}

}  // namespace shsplit
