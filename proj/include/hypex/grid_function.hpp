#pragma once

// Uniformly sampled complex-valued functions on boxes in R^n, the shared
// carrier for test perturbations, candidate extremizers and 4-variable
// functions.  Includes the composite Simpson box quadrature (exact for
// polynomials of degree <= 3 per axis) and the text serialization format
// shared by the CLI: a header with axes metadata followed by
// "index re im" rows.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hypex {

struct GridAxis {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;

  double spacing() const { return (upper - lower) / static_cast<double>(count - 1); }
  double coord(std::size_t i) const { return lower + spacing() * static_cast<double>(i); }
  bool operator==(const GridAxis& o) const {
    return lower == o.lower && upper == o.upper && count == o.count;
  }
};

class GridFunction {
 public:
  explicit GridFunction(std::vector<GridAxis> axes)
      : axes_(std::move(axes)), samples_(checked_size(axes_)) {}

  /// Samples fn(point) at every node; fn receives the node coordinates.
  template <class Fn>
  static GridFunction sampled(std::vector<GridAxis> axes, Fn&& fn) {
    GridFunction g(std::move(axes));
    std::vector<double> point(g.rank());
    std::vector<std::size_t> idx(g.rank(), 0);
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
      for (std::size_t k = 0; k < g.rank(); ++k) point[k] = g.axis(k).coord(idx[k]);
      g.samples_[flat] = fn(std::span<const double>(point));
      g.advance(idx);
    }
    return g;
  }

  std::size_t rank() const { return axes_.size(); }
  const GridAxis& axis(std::size_t k) const { return axes_[k]; }
  const std::vector<GridAxis>& axes() const { return axes_; }
  std::size_t size() const { return samples_.size(); }

  std::complex<double>& operator[](std::size_t flat) { return samples_[flat]; }
  const std::complex<double>& operator[](std::size_t flat) const { return samples_[flat]; }
  std::vector<std::complex<double>>& samples() { return samples_; }
  const std::vector<std::complex<double>>& samples() const { return samples_; }

  std::size_t flat_index(std::span<const std::size_t> idx) const {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < rank(); ++k) flat = flat * axes_[k].count + idx[k];
    return flat;
  }

  std::complex<double>& at(std::span<const std::size_t> idx) {
    return samples_[flat_index(idx)];
  }
  const std::complex<double>& at(std::span<const std::size_t> idx) const {
    return samples_[flat_index(idx)];
  }

  /// Row-major multi-index increment (last axis fastest).
  void advance(std::vector<std::size_t>& idx) const {
    for (std::size_t k = rank(); k-- > 0;) {
      if (++idx[k] < axes_[k].count) return;
      idx[k] = 0;
    }
  }

  bool same_layout(const GridFunction& o) const { return axes_ == o.axes_; }

  GridFunction& operator*=(std::complex<double> c) {
    for (auto& v : samples_) v *= c;
    return *this;
  }

  GridFunction& axpy(std::complex<double> a, const GridFunction& x) {
    require_layout(x);
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += a * x.samples_[i];
    return *this;
  }

  GridFunction& operator+=(const GridFunction& x) { return axpy(1.0, x); }
  GridFunction& operator-=(const GridFunction& x) { return axpy(-1.0, x); }

  /// Multilinear interpolation, zero outside the box.
  std::complex<double> interpolate(std::span<const double> point) const {
    const std::size_t n = rank();
    std::array<std::size_t, 8> base{};
    std::array<double, 8> frac{};
    if (n > 8) throw std::domain_error("GridFunction::interpolate: rank > 8");
    for (std::size_t k = 0; k < n; ++k) {
      const GridAxis& ax = axes_[k];
      const double u = (point[k] - ax.lower) / ax.spacing();
      if (u < 0.0 || u > static_cast<double>(ax.count - 1)) return {0.0, 0.0};
      std::size_t i = static_cast<std::size_t>(u);
      if (i >= ax.count - 1) i = ax.count - 2;
      base[k] = i;
      frac[k] = u - static_cast<double>(i);
    }
    std::complex<double> acc{0.0, 0.0};
    const std::size_t corners = std::size_t{1} << n;
    for (std::size_t c = 0; c < corners; ++c) {
      double w = 1.0;
      std::size_t flat = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const bool hi = (c >> k) & 1u;
        flat = flat * axes_[k].count + base[k] + (hi ? 1 : 0);
        w *= hi ? frac[k] : 1.0 - frac[k];
      }
      if (w != 0.0) acc += w * samples_[flat];
    }
    return acc;
  }

  void save(std::ostream& os) const;
  static GridFunction load(std::istream& is);

 private:
  static std::size_t checked_size(const std::vector<GridAxis>& axes) {
    if (axes.empty()) throw std::domain_error("GridFunction: need at least one axis");
    std::size_t n = 1;
    for (const auto& ax : axes) {
      if (ax.count < 3)
        throw std::domain_error("GridFunction: need at least 3 samples per axis");
      if (!(ax.lower < ax.upper))
        throw std::domain_error("GridFunction: need lower < upper");
      n *= ax.count;
    }
    return n;
  }

  void require_layout(const GridFunction& o) const {
    if (!same_layout(o))
      throw std::domain_error("GridFunction: mismatched grid layouts");
  }

  std::vector<GridAxis> axes_;
  std::vector<std::complex<double>> samples_;
};

/// Composite quadrature weights along one axis: Simpson 1/3 when the
/// panel count is even, otherwise Simpson 1/3 blended with a trailing
/// 3/8 rule.  Exact for polynomials of degree <= 3 either way.
inline std::vector<double> axis_weights(const GridAxis& ax) {
  if (ax.count < 3)
    throw std::domain_error("axis_weights: need at least 3 samples per axis");
  const std::size_t panels = ax.count - 1;
  const double h = ax.spacing();
  std::vector<double> w(ax.count, 0.0);
  auto simpson13 = [&w, h](std::size_t first, std::size_t last) {
    // last - first even
    for (std::size_t i = first; i < last; i += 2) {
      w[i] += h / 3.0;
      w[i + 1] += 4.0 * h / 3.0;
      w[i + 2] += h / 3.0;
    }
  };
  auto simpson38 = [&w, h](std::size_t first) {
    w[first] += 3.0 * h / 8.0;
    w[first + 1] += 9.0 * h / 8.0;
    w[first + 2] += 9.0 * h / 8.0;
    w[first + 3] += 3.0 * h / 8.0;
  };
  if (panels % 2 == 0) {
    simpson13(0, panels);
  } else if (panels == 3) {
    simpson38(0);
  } else {
    simpson13(0, panels - 3);
    simpson38(panels - 3);
  }
  return w;
}

/// Tensor-product box quadrature of a GridFunction over its box.
inline std::complex<double> integrate_grid(const GridFunction& f) {
  std::vector<std::vector<double>> w;
  w.reserve(f.rank());
  for (std::size_t k = 0; k < f.rank(); ++k) w.push_back(axis_weights(f.axis(k)));
  std::vector<std::size_t> idx(f.rank(), 0);
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    double weight = 1.0;
    for (std::size_t k = 0; k < f.rank(); ++k) weight *= w[k][idx[k]];
    acc += weight * f[flat];
    f.advance(idx);
  }
  return acc;
}

/// L^2(box) inner product <a, b> = integral of conj(a) * b with the same
/// tensor Simpson weights.
inline std::complex<double> grid_inner_product(const GridFunction& a,
                                               const GridFunction& b) {
  if (!a.same_layout(b))
    throw std::domain_error("grid_inner_product: mismatched grid layouts");
  std::vector<std::vector<double>> w;
  w.reserve(a.rank());
  for (std::size_t k = 0; k < a.rank(); ++k) w.push_back(axis_weights(a.axis(k)));
  std::vector<std::size_t> idx(a.rank(), 0);
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t flat = 0; flat < a.size(); ++flat) {
    double weight = 1.0;
    for (std::size_t k = 0; k < a.rank(); ++k) weight *= w[k][idx[k]];
    acc += weight * std::conj(a[flat]) * b[flat];
    a.advance(idx);
  }
  return acc;
}

inline double grid_l2_norm(const GridFunction& f) {
  return std::sqrt(std::abs(grid_inner_product(f, f)));
}

inline void GridFunction::save(std::ostream& os) const {
  os.precision(17);
  os << "# hypex-grid v1\n";
  os << "axes " << rank() << "\n";
  for (std::size_t k = 0; k < rank(); ++k)
    os << "axis " << k << " " << axes_[k].lower << " " << axes_[k].upper << " "
       << axes_[k].count << "\n";
  os << "data\n";
  for (std::size_t i = 0; i < samples_.size(); ++i)
    os << i << " " << samples_[i].real() << " " << samples_[i].imag() << "\n";
}

inline GridFunction GridFunction::load(std::istream& is) {
  std::string line;
  std::size_t n_axes = 0;
  std::vector<GridAxis> axes;
  bool in_data = false;
  GridFunction out({{0.0, 1.0, 3}});  // placeholder, replaced below
  std::size_t filled = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    if (!in_data) {
      std::string tag;
      ss >> tag;
      if (tag == "axes") {
        ss >> n_axes;
      } else if (tag == "axis") {
        std::size_t k;
        GridAxis ax;
        ss >> k >> ax.lower >> ax.upper >> ax.count;
        if (k != axes.size())
          throw std::runtime_error("GridFunction::load: axis rows out of order");
        axes.push_back(ax);
      } else if (tag == "data") {
        if (axes.size() != n_axes || n_axes == 0)
          throw std::runtime_error("GridFunction::load: malformed header");
        out = GridFunction(axes);
        in_data = true;
      } else {
        throw std::runtime_error("GridFunction::load: unknown header tag '" + tag + "'");
      }
    } else {
      std::size_t i;
      double re, im;
      if (!(ss >> i >> re >> im))
        throw std::runtime_error("GridFunction::load: malformed data row");
      if (i >= out.size())
        throw std::runtime_error("GridFunction::load: sample index out of range");
      out[i] = {re, im};
      ++filled;
    }
  }
  if (!in_data || filled != out.size())
    throw std::runtime_error("GridFunction::load: truncated file");
  return out;
}

}  // namespace hypex
