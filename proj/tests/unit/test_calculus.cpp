#include <doctest.h>

#include "shsplit/calculus.hpp"
#include "shsplit/verify/dense_oracle.hpp"
#include "shsplit/verify/random_fields.hpp"

#include <cmath>
#include <numbers>

using namespace shsplit;
using verify::Rng;

namespace {

// Eigenvalue of the reflected 1-D second difference on cos(pi m x / l).
double second_diff_eigenvalue(int m, double h, double l) {
  return -(2.0 / (h * h)) * (1.0 - std::cos(std::numbers::pi * m * h / l));
}

double max_abs(const FieldD& f) { return f.values().cwiseAbs().maxCoeff(); }

const GridSpec kShapes[] = {GridSpec::cube(3, 1.0), GridSpec::from_lengths(4, 5, 6, 1.0, 1.0, 1.0),
                            GridSpec::cube(8, 1.0)};

}  // namespace

TEST_CASE("differences annihilate constants") {
  const auto g = GridSpec::from_lengths(4, 5, 6, 0.3, 0.7, 1.1);
  const auto e = extend(FieldD(g, 1.7));
  for (Axis a : kAxes)
    for (DiffKind k : {DiffKind::forward, DiffKind::backward, DiffKind::central1, DiffKind::central2})
      CHECK(max_abs(diff(e, a, k).values) == 0.0);
  CHECK(max_abs(laplacian(e)) == 0.0);
  CHECK(max_abs(bilaplacian(e)) == 0.0);
}

TEST_CASE("forward difference of a linear field is its slope in the interior") {
  const auto g = GridSpec::from_spacings(8, 4, 4, 0.125, 1, 1);
  const auto e = extend(FieldD::from_function(g, [&](int i, int, int) { return i * g.dx(); }));
  const auto d = diff(e, Axis::x, DiffKind::forward);
  CHECK(d.op.axis == Axis::x);
  CHECK(d.op.kind == DiffKind::forward);
  for (int i = 0; i < g.nx(); ++i) CHECK(d.values(i, 1, 2) == 1.0);
  // at the last node the reflection folds the slope back
  CHECK(d.values(g.nx(), 1, 2) == -1.0);
}

TEST_CASE("second difference of a cosine mode on four intervals") {
  const auto g = GridSpec::from_lengths(4, 4, 4, 1.0, 1.0, 1.0);
  const auto f = verify::cosine_mode(g, 1, 0, 0);
  const double lambda = second_diff_eigenvalue(1, g.dx(), g.lx());
  CHECK(lambda == doctest::Approx(-9.37258).epsilon(1e-6));
  const auto d = diff(extend(f), Axis::x, DiffKind::central2);
  for (std::size_t n = 0; n < g.node_count(); ++n) CHECK(std::abs(d.values[n] - lambda * f[n]) <= 1e-13);
}

TEST_CASE("laplacian and bilaplacian of separable cosines") {
  const auto g = GridSpec::from_lengths(6, 5, 8, 1.0, 2.0, 1.5);
  const int m[3] = {1, 2, 3};
  const auto f = verify::cosine_mode(g, m[0], m[1], m[2]);
  const double lambda = second_diff_eigenvalue(m[0], g.dx(), g.lx()) + second_diff_eigenvalue(m[1], g.dy(), g.ly()) +
                        second_diff_eigenvalue(m[2], g.dz(), g.lz());
  const auto lap = laplacian(f);
  const auto bilap = bilaplacian(f);
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    CHECK(std::abs(lap[n] - lambda * f[n]) <= 1e-12 * std::abs(lambda));
    CHECK(std::abs(bilap[n] - lambda * lambda * f[n]) <= 1e-12 * lambda * lambda);
  }
}

TEST_CASE("laplacian equals the sum of axis second differences") {
  Rng rng(1);
  const auto g = GridSpec::from_lengths(4, 5, 6, 1.0, 0.8, 1.2);
  const auto e = extend(verify::uniform_noise(g, rng));
  FieldD sum(g);
  for (Axis a : kAxes) sum += diff(e, a, DiffKind::central2).values;
  CHECK(max_abs(sum - laplacian(e)) <= 1e-12);
}

TEST_CASE("stencils match dense assemblies") {
  Rng rng(2);
  for (const auto& g : {GridSpec::from_spacings(3, 3, 3, 1, 1, 1), GridSpec::from_spacings(4, 5, 6, 1, 1, 1)}) {
    const auto o = verify::dense_assemble(g);
    for (int t = 0; t < 10; ++t) {
      const auto f = verify::uniform_noise(g, rng);
      const auto e = extend(f);
      CHECK((laplacian(e).values() - o.laplacian * f.values()).cwiseAbs().maxCoeff() <= 1e-13);
      CHECK((bilaplacian(e).values() - o.bilaplacian * f.values()).cwiseAbs().maxCoeff() <= 1e-13);
      for (Axis a : kAxes)
        for (DiffKind k : {DiffKind::forward, DiffKind::backward, DiffKind::central1, DiffKind::central2})
          CHECK((diff(e, a, k).values.values() - o.difference(a, k) * f.values()).cwiseAbs().maxCoeff() <= 1e-13);
      const Stencil outer{Axis::y, DiffKind::backward}, inner{Axis::x, DiffKind::forward};
      CHECK((compose(e, outer, inner).values() - o.composed(outer, inner) * f.values()).cwiseAbs().maxCoeff() <=
            1e-13);
    }
  }
}

TEST_CASE("dense oracle refuses large grids") {
  CHECK_THROWS_AS(verify::dense_assemble(GridSpec::cube(16, 1.0)), std::length_error);
}

TEST_CASE("laplacian of the extension has vanishing central differences at the faces") {
  Rng rng(3);
  const auto g = GridSpec::from_spacings(4, 5, 6, 1, 1, 1);
  const auto lap = laplacian_extended(extend(verify::uniform_noise(g, rng)));
  for (int k = 0; k <= g.nz(); ++k)
    for (int j = 0; j <= g.ny(); ++j) {
      CHECK(lap(1, j, k) - lap(-1, j, k) == 0.0);
      CHECK(lap(g.nx() + 1, j, k) - lap(g.nx() - 1, j, k) == 0.0);
    }
  for (int k = 0; k <= g.nz(); ++k)
    for (int i = 0; i <= g.nx(); ++i) {
      CHECK(lap(i, 1, k) - lap(i, -1, k) == 0.0);
      CHECK(lap(i, g.ny() + 1, k) - lap(i, g.ny() - 1, k) == 0.0);
    }
  for (int j = 0; j <= g.ny(); ++j)
    for (int i = 0; i <= g.nx(); ++i) {
      CHECK(lap(i, j, 1) - lap(i, j, -1) == 0.0);
      CHECK(lap(i, j, g.nz() + 1) - lap(i, j, g.nz() - 1) == 0.0);
    }
}

TEST_CASE("diff_extended marks entries whose stencil leaves the ghost layers") {
  const auto g = GridSpec::cube(3, 1.0);
  const auto d = diff_extended(extend(FieldD(g, 1.0)), Axis::x, DiffKind::forward);
  CHECK(std::isnan(d(g.nx() + 2, 0, 0)));
  CHECK(d(-2, 0, 0) == 0.0);
}

TEST_CASE("laplacian and bilaplacian are self-adjoint and semidefinite") {
  Rng rng(4);
  for (const auto& g : kShapes) {
    for (int t = 0; t < 100; ++t) {
      const auto f = verify::uniform_noise(g, rng);
      const auto h = verify::uniform_noise(g, rng);
      const auto lf = laplacian(f), lh = laplacian(h);
      const double s1 = std::abs(inner_product(lf, h) - inner_product(f, lh));
      CHECK(s1 <= 1e-12 * (l2_norm(lf) * l2_norm(h) + l2_norm(f) * l2_norm(lh) + 1.0));
      const auto bf = bilaplacian(f), bh = bilaplacian(h);
      const double s2 = std::abs(inner_product(bf, h) - inner_product(f, bh));
      CHECK(s2 <= 1e-12 * (l2_norm(bf) * l2_norm(h) + l2_norm(f) * l2_norm(bh) + 1.0));
      const double pos = inner_product(f, bf);
      CHECK(pos >= -1e-12);
      CHECK(std::abs(pos - norm_sq(lf)) <= 1e-12 * (1.0 + pos));
    }
  }
}

TEST_CASE("laplacian norm identity and the D2 sandwich") {
  const auto z = laplacian_norm_identity(extend(FieldD(GridSpec::cube(4, 1.0))));
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.d2_norm == 0.0);

  Rng rng(5);
  const auto g = GridSpec::from_lengths(5, 6, 7, 1.0, 1.2, 0.9);
  for (int t = 0; t < 50; ++t) {
    const auto s = laplacian_norm_identity(extend(verify::uniform_noise(g, rng)));
    CHECK(std::abs(s.lhs - s.rhs) <= 1e-12 * s.lhs);
    CHECK(s.d2_norm <= std::sqrt(s.lhs) * (1 + 1e-14));
    CHECK(std::sqrt(s.lhs) <= std::sqrt(2.0) * s.d2_norm * (1 + 1e-14));
  }
}

TEST_CASE("axis laplacian identity") {
  Rng rng(6);
  for (const auto& g : kShapes)
    for (int t = 0; t < 20; ++t) {
      const auto e = extend(verify::uniform_noise(g, rng));
      for (Axis a : kAxes) {
        const auto s = laplacian_axis_identity(e, a);
        CHECK(std::abs(s.lhs - s.rhs) <= 1e-12 * (std::abs(s.rhs) + 1.0));
      }
    }
}

TEST_CASE("summation by parts") {
  const auto g = GridSpec::cube(4, 1.0);
  CHECK(summation_by_parts_defect(FieldD(g, 0.3), FieldD(g, 0.3)) == 0.0);
  Rng rng(7);
  for (int t = 0; t < 1000; ++t) {
    const auto f = verify::uniform_noise(g, rng);
    const auto h = verify::uniform_noise(g, rng);
    CHECK(summation_by_parts_defect(f, h) <= 1e-12 * (l2_norm(f) * l2_norm(laplacian(h)) + 1.0));
  }
  // with g = f the pairing reproduces minus the squared seminorm
  const auto f = verify::uniform_noise(g, rng);
  const double semi = norms(f).seminorm_D;
  CHECK(std::abs(inner_product(f, laplacian(f)) + semi * semi) <= 1e-12 * (1.0 + semi * semi));
  CHECK_THROWS_AS(summation_by_parts_defect(f, FieldD(GridSpec::cube(5, 1.0))), grid_mismatch);
}

TEST_CASE("gradient inner product sums the components") {
  Rng rng(8);
  const auto g = GridSpec::cube(4, 1.0);
  const auto e = extend(verify::uniform_noise(g, rng));
  const auto gp = gradient(e, DiffKind::forward);
  double sum = 0.0;
  for (Axis a : kAxes) sum += norm_sq(gp[a]);
  CHECK(inner_product(gp, gp) == doctest::Approx(sum).epsilon(1e-15));
}
