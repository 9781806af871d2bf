#pragma once

// Grid geometry, node fields, ghost extension by even reflection and the
// trapezoidal-weighted inner product.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace shsplit {

enum class Axis : int { x = 0, y = 1, z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};

class grid_mismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform box discretization with N+1 nodes per axis. Lengths are always
/// derived from the interval counts and spacings.
class GridSpec {
 public:
  /// Smallest interval count accepted on any axis (the radius-2 reflection
  /// needs node index 2 to exist).
  static constexpr int kMinIntervals = 2;

  GridSpec() = default;

  static GridSpec from_spacings(int nx, int ny, int nz, double dx, double dy,
                                double dz) {
    return GridSpec({nx, ny, nz}, {dx, dy, dz});
  }

  static GridSpec from_lengths(int nx, int ny, int nz, double lx, double ly,
                               double lz) {
    return GridSpec({nx, ny, nz}, {lx / nx, ly / ny, lz / nz});
  }

  static GridSpec cube(int n, double length) {
    return from_lengths(n, n, n, length, length, length);
  }

  int intervals(Axis a) const { return n_[static_cast<int>(a)]; }
  double spacing(Axis a) const { return h_[static_cast<int>(a)]; }
  double length(Axis a) const { return n_[static_cast<int>(a)] * h_[static_cast<int>(a)]; }
  int points(Axis a) const { return intervals(a) + 1; }

  int nx() const { return n_[0]; }
  int ny() const { return n_[1]; }
  int nz() const { return n_[2]; }
  double dx() const { return h_[0]; }
  double dy() const { return h_[1]; }
  double dz() const { return h_[2]; }
  double lx() const { return length(Axis::x); }
  double ly() const { return length(Axis::y); }
  double lz() const { return length(Axis::z); }
  double volume() const { return lx() * ly() * lz(); }
  double cell_volume() const { return h_[0] * h_[1] * h_[2]; }

  std::size_t node_count() const {
    return static_cast<std::size_t>(n_[0] + 1) * (n_[1] + 1) * (n_[2] + 1);
  }

  /// Row-major with i fastest.
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n_[0] + 1) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(n_[1] + 1) * k);
  }

  std::array<int, 3> node_of(std::size_t idx) const {
    const auto px = static_cast<std::size_t>(n_[0] + 1);
    const auto py = static_cast<std::size_t>(n_[1] + 1);
    return {static_cast<int>(idx % px), static_cast<int>((idx / px) % py),
            static_cast<int>(idx / (px * py))};
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  GridSpec(std::array<int, 3> n, std::array<double, 3> h) : n_(n), h_(h) {
    for (int a = 0; a < 3; ++a) {
      if (n_[a] < kMinIntervals)
        throw std::invalid_argument("GridSpec: interval count on axis " +
                                    std::to_string(a) + " must be >= " +
                                    std::to_string(kMinIntervals));
      if (!(h_[a] > 0.0) || !std::isfinite(h_[a]))
        throw std::invalid_argument("GridSpec: spacing on axis " + std::to_string(a) +
                                    " must be positive and finite");
    }
  }

  std::array<int, 3> n_{kMinIntervals, kMinIntervals, kMinIntervals};
  std::array<double, 3> h_{1.0, 1.0, 1.0};
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw grid_mismatch(std::string(what) + ": grid mismatch");
}

/// Scalar grid function on the (nx+1)(ny+1)(nz+1) nodes.
template <typename Scalar>
class Field {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Field() = default;
  explicit Field(const GridSpec& grid, Scalar fill = Scalar(0))
      : grid_(grid), values_(Vector::Constant(static_cast<Eigen::Index>(grid.node_count()), fill)) {}

  Field(const GridSpec& grid, Vector values) : grid_(grid), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.size()) != grid_.node_count())
      throw std::invalid_argument("Field: value count does not match grid");
  }

  template <typename Fn>
  static Field from_function(const GridSpec& grid, Fn&& fn) {
    Field f(grid);
    for (int k = 0; k <= grid.nz(); ++k)
      for (int j = 0; j <= grid.ny(); ++j)
        for (int i = 0; i <= grid.nx(); ++i) f(i, j, k) = static_cast<Scalar>(fn(i, j, k));
    return f;
  }

  const GridSpec& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  Scalar& operator()(int i, int j, int k) { return values_[static_cast<Eigen::Index>(grid_.index(i, j, k))]; }
  Scalar operator()(int i, int j, int k) const {
    return values_[static_cast<Eigen::Index>(grid_.index(i, j, k))];
  }
  Scalar& operator[](std::size_t n) { return values_[static_cast<Eigen::Index>(n)]; }
  Scalar operator[](std::size_t n) const { return values_[static_cast<Eigen::Index>(n)]; }

  bool all_finite() const { return values_.allFinite(); }

  Field& operator+=(const Field& o) {
    require_same_grid(grid_, o.grid_, "Field +=");
    values_ += o.values_;
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same_grid(grid_, o.grid_, "Field -=");
    values_ -= o.values_;
    return *this;
  }
  Field& operator*=(Scalar s) {
    values_ *= s;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Scalar s, Field a) { return a *= s; }
  friend Field operator*(Field a, Scalar s) { return a *= s; }
  friend Field operator-(Field a) {
    a.values_ = -a.values_;
    return a;
  }

 private:
  GridSpec grid_;
  Vector values_;
};

using FieldD = Field<double>;

/// Node array with two ghost layers per face. Entries outside the nodes are
/// either reflections (after extend) or NaN when a derived quantity cannot be
/// evaluated there.
template <typename Scalar>
class ExtendedField {
 public:
  static constexpr int kGhost = 2;

  ExtendedField() = default;
  explicit ExtendedField(const GridSpec& grid,
                         Scalar fill = std::numeric_limits<Scalar>::quiet_NaN())
      : grid_(grid),
        ex_(grid.nx() + 1 + 2 * kGhost),
        ey_(grid.ny() + 1 + 2 * kGhost),
        ez_(grid.nz() + 1 + 2 * kGhost),
        data_(static_cast<std::size_t>(ex_) * ey_ * ez_, fill) {}

  const GridSpec& grid() const { return grid_; }

  /// Flat offset of (i,j,k); valid for indices in [-kGhost, N+kGhost].
  std::ptrdiff_t offset(int i, int j, int k) const {
    return static_cast<std::ptrdiff_t>(i + kGhost) +
           static_cast<std::ptrdiff_t>(ex_) *
               (static_cast<std::ptrdiff_t>(j + kGhost) + static_cast<std::ptrdiff_t>(ey_) * (k + kGhost));
  }
  std::ptrdiff_t stride(Axis a) const {
    switch (a) {
      case Axis::x: return 1;
      case Axis::y: return ex_;
      default: return static_cast<std::ptrdiff_t>(ex_) * ey_;
    }
  }

  Scalar& operator()(int i, int j, int k) { return data_[static_cast<std::size_t>(offset(i, j, k))]; }
  Scalar operator()(int i, int j, int k) const { return data_[static_cast<std::size_t>(offset(i, j, k))]; }
  const Scalar* data() const { return data_.data(); }
  Scalar* data() { return data_.data(); }
  std::size_t storage_size() const { return data_.size(); }

  Field<Scalar> interior() const {
    Field<Scalar> f(grid_);
    for (int k = 0; k <= grid_.nz(); ++k)
      for (int j = 0; j <= grid_.ny(); ++j)
        for (int i = 0; i <= grid_.nx(); ++i) f(i, j, k) = (*this)(i, j, k);
    return f;
  }

  friend bool operator==(const ExtendedField& a, const ExtendedField& b) {
    if (!(a.grid_ == b.grid_)) return false;
    // bitwise, so NaN ghosts compare equal to NaN ghosts
    return std::equal(a.data_.begin(), a.data_.end(), b.data_.begin(), [](Scalar x, Scalar y) {
      return std::memcmp(&x, &y, sizeof(Scalar)) == 0;
    });
  }

 private:
  GridSpec grid_;
  int ex_ = 0, ey_ = 0, ez_ = 0;
  std::vector<Scalar> data_;
};

/// Even reflection about 0 and N: -m -> m, N+m -> N-m.
constexpr int reflect_index(int m, int n) {
  if (m < 0) return -m;
  if (m > n) return 2 * n - m;
  return m;
}

/// Fills both ghost layers on every face by even reflection. Edge and corner
/// ghosts are the composition of the per-axis reflections (they commute).
template <typename Scalar>
ExtendedField<Scalar> extend(const Field<Scalar>& f) {
  const GridSpec& g = f.grid();
  constexpr int G = ExtendedField<Scalar>::kGhost;
  ExtendedField<Scalar> e(g);
  for (int k = -G; k <= g.nz() + G; ++k) {
    const int rk = reflect_index(k, g.nz());
    for (int j = -G; j <= g.ny() + G; ++j) {
      const int rj = reflect_index(j, g.ny());
      for (int i = -G; i <= g.nx() + G; ++i) e(i, j, k) = f(reflect_index(i, g.nx()), rj, rk);
    }
  }
  return e;
}

/// Per-axis trapezoidal weights (1/2 at both endpoints) and the node weight
/// w(i,j,k) = wx(i) wy(j) wz(k) dx dy dz.
class QuadWeights {
 public:
  explicit QuadWeights(const GridSpec& g) : cell_(g.cell_volume()) {
    for (Axis a : kAxes) {
      auto& w = axis_[static_cast<int>(a)];
      w.assign(static_cast<std::size_t>(g.points(a)), 1.0);
      w.front() = 0.5;
      w.back() = 0.5;
    }
  }
  double axis_weight(Axis a, int m) const { return axis_[static_cast<int>(a)][static_cast<std::size_t>(m)]; }
  double node(int i, int j, int k) const {
    return axis_[0][static_cast<std::size_t>(i)] * axis_[1][static_cast<std::size_t>(j)] *
           axis_[2][static_cast<std::size_t>(k)] * cell_;
  }
  double cell_volume() const { return cell_; }

 private:
  std::array<std::vector<double>, 3> axis_;
  double cell_;
};

namespace detail {

/// Pairwise combination of per-slab partial sums.
template <typename Scalar>
Scalar pairwise_sum(std::span<const Scalar> v) {
  if (v.empty()) return Scalar(0);
  if (v.size() == 1) return v[0];
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace detail

/// Trapezoidal triple sum of term(i,j,k) * dx dy dz. Accumulation runs
/// lexicographically inside each k-slab; slabs are then combined pairwise.
template <typename Scalar, typename Term>
Scalar weighted_sum(const GridSpec& g, Term&& term) {
  std::vector<Scalar> slabs(static_cast<std::size_t>(g.nz() + 1));
  for (int k = 0; k <= g.nz(); ++k) {
    Scalar slab(0);
    const Scalar wk = (k == 0 || k == g.nz()) ? Scalar(0.5) : Scalar(1);
    for (int j = 0; j <= g.ny(); ++j) {
      const Scalar wj = (j == 0 || j == g.ny()) ? Scalar(0.5) : Scalar(1);
      Scalar row(0);
      row += Scalar(0.5) * term(0, j, k);
      for (int i = 1; i < g.nx(); ++i) row += term(i, j, k);
      row += Scalar(0.5) * term(g.nx(), j, k);
      slab += wj * row;
    }
    slabs[static_cast<std::size_t>(k)] = wk * slab;
  }
  return detail::pairwise_sum<Scalar>(slabs) * static_cast<Scalar>(g.cell_volume());
}

template <typename Scalar>
Scalar inner_product(const Field<Scalar>& f, const Field<Scalar>& g) {
  require_same_grid(f.grid(), g.grid(), "inner_product");
  const GridSpec& grid = f.grid();
  const Scalar* a = f.values().data();
  const Scalar* b = g.values().data();
  return weighted_sum<Scalar>(grid, [&](int i, int j, int k) {
    const auto n = grid.index(i, j, k);
    return a[n] * b[n];
  });
}

template <typename Scalar>
Scalar norm_sq(const Field<Scalar>& f) {
  return inner_product(f, f);
}

template <typename Scalar>
Scalar l2_norm(const Field<Scalar>& f) {
  return std::sqrt(norm_sq(f));
}

template <typename Scalar>
Scalar linf_norm(const Field<Scalar>& f) {
  return f.values().size() == 0 ? Scalar(0) : f.values().cwiseAbs().maxCoeff();
}

template <typename Scalar>
struct Norms {
  Scalar l2;
  Scalar linf;
  Scalar seminorm_D;
};

/// Squared D-seminorm: trapezoidal sum of (|grad+ f|^2 + |grad- f|^2)/2,
/// differences taken on the reflected extension.
template <typename Scalar>
Scalar seminorm_D_sq(const ExtendedField<Scalar>& e) {
  const GridSpec& g = e.grid();
  const std::array<Scalar, 3> inv_h{Scalar(1) / Scalar(g.dx()), Scalar(1) / Scalar(g.dy()),
                                    Scalar(1) / Scalar(g.dz())};
  return weighted_sum<Scalar>(g, [&](int i, int j, int k) {
    const Scalar c = e(i, j, k);
    const Scalar fx = (e(i + 1, j, k) - c) * inv_h[0], bx = (c - e(i - 1, j, k)) * inv_h[0];
    const Scalar fy = (e(i, j + 1, k) - c) * inv_h[1], by = (c - e(i, j - 1, k)) * inv_h[1];
    const Scalar fz = (e(i, j, k + 1) - c) * inv_h[2], bz = (c - e(i, j, k - 1)) * inv_h[2];
    return Scalar(0.5) * ((fx * fx + fy * fy + fz * fz) + (bx * bx + by * by + bz * bz));
  });
}

template <typename Scalar>
Norms<Scalar> norms(const Field<Scalar>& f) {
  return {l2_norm(f), linf_norm(f), std::sqrt(seminorm_D_sq(extend(f)))};
}

/// f_0/2 + f_1 + ... + f_{N-1} + f_N/2 for a sequence of length N+1.
template <typename Scalar>
Scalar trapezoidal_sum_1d(std::span<const Scalar> seq) {
  if (seq.size() < 2) throw std::invalid_argument("trapezoidal_sum_1d: need at least 2 entries");
  Scalar s = Scalar(0.5) * seq.front();
  for (std::size_t i = 1; i + 1 < seq.size(); ++i) s += seq[i];
  return s + Scalar(0.5) * seq.back();
}

template <typename Scalar>
struct TelescopingSides {
  Scalar lhs;  ///< trapezoidal sum over i = 0..N of (f_{i+1} - f_i)
  Scalar rhs;  ///< (f_{N+1} + f_N)/2 - (f_1 + f_0)/2
};

/// Both sides of the half-weighted telescoping identity for a sequence
/// f_0..f_{N+1} (length N+2, N >= 1).
template <typename Scalar>
TelescopingSides<Scalar> telescoping_sides(std::span<const Scalar> f) {
  if (f.size() < 3) throw std::invalid_argument("telescoping_sides: need N >= 1 (length >= 3)");
  const std::size_t n = f.size() - 2;
  std::vector<Scalar> diffs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) diffs[i] = f[i + 1] - f[i];
  return {trapezoidal_sum_1d<Scalar>(diffs), (f[n + 1] + f[n]) / 2 - (f[1] + f[0]) / 2};
}

}  // namespace shsplit
