#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ergo {

/// Uniform node set on [-R, R]. The node count is odd, so x = 0 is the
/// center node.
class Grid {
 public:
  Grid() = default;

  double radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  std::size_t center() const noexcept { return n_ / 2; }

  double x(std::size_t i) const noexcept {
    // symmetric evaluation keeps x(center()) == 0 and x(n-1) == R exactly
    const auto c = static_cast<double>(center());
    return (static_cast<double>(i) - c) * h_;
  }

  std::vector<double> nodes() const;

  /// Sub-grid with the same spacing and radius floor(r / h) * h.
  Grid window(double r) const;

  bool same_nodes(const Grid& other) const noexcept;

 private:
  friend Grid make_grid(double radius, std::size_t n);
  double radius_ = 0.0;
  std::size_t n_ = 0;
  double h_ = 0.0;
};

/// Throws BadGrid unless n >= 5 is odd and R > 0.
Grid make_grid(double radius, std::size_t n);

/// Odd node count giving spacing as close to `h` as possible on [-R, R].
std::size_t odd_count_for_spacing(double radius, double h);

struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  Field(Grid g, std::vector<double> v);

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  std::size_t size() const noexcept { return values.size(); }

  /// Piecewise-linear evaluation; outside the grid the boundary slope is used.
  double at(double x) const;
};

Field sample(const Grid& grid, const std::function<double(double)>& f);

/// Linear interpolation onto `target`. Outside the source window the field
/// is extended by its boundary value plus boundary slope. A target wider than
/// the source requires `allow_extrapolation`.
Field resample(const Field& f, const Grid& target, bool allow_extrapolation = false);

/// Central first difference in the interior, one-sided second-order at ends.
Field derivative(const Field& f);
/// Central second difference in the interior, one-sided second-order at ends.
Field second_derivative(const Field& f);

double central_difference(std::span<const double> v, std::size_t i, double h);
double second_difference(std::span<const double> v, std::size_t i, double h);

/// Trapezoid rule over all nodes.
double integrate(const Field& f);
/// Trapezoid rule over the nodes with |x| <= r.
double integrate_window(const Field& f, double r);

/// Max |f| over nodes with |x| <= r.
double sup_norm_window(const Field& f, double r);

/// Subtracts the value at the center node, so that f(0) = 0. Returns the
/// subtracted constant.
double normalize_at_center(Field& f);

/// Writes (x, value) rows.
void write_field_csv(const std::string& path, const Field& f, const std::string& value_name = "value");

}  // namespace ergo
