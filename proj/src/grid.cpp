#include "ergo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergo/errors.hpp"
#include "ergo/io.hpp"

namespace ergo {

Grid make_grid(double radius, std::size_t n) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(ErrorKind::BadGrid, "radius must be positive");
  if (n < 5 || n % 2 == 0) {
    throw Error(ErrorKind::BadGrid, "node count must be odd and >= 5, got " + std::to_string(n));
  }
  Grid g;
  g.radius_ = radius;
  g.n_ = n;
  g.h_ = 2.0 * radius / static_cast<double>(n - 1);
  return g;
}

std::size_t odd_count_for_spacing(double radius, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::BadGrid, "spacing must be positive");
  const auto half = static_cast<std::size_t>(std::llround(radius / h));
  return 2 * std::max<std::size_t>(half, 2) + 1;
}

std::vector<double> Grid::nodes() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

Grid Grid::window(double r) const {
  const auto k = static_cast<std::size_t>(std::floor(r / h_ + 1e-9));
  const std::size_t half = std::min(k, center());
  if (half < 2) throw Error(ErrorKind::BadGrid, "window too small for a grid");
  Grid g;
  g.n_ = 2 * half + 1;
  g.h_ = h_;
  g.radius_ = static_cast<double>(half) * h_;
  return g;
}

bool Grid::same_nodes(const Grid& other) const noexcept {
  return n_ == other.n_ && std::abs(h_ - other.h_) <= 1e-14 * h_;
}

Field::Field(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw Error(ErrorKind::PreconditionViolation, "field length != grid size");
}

double Field::at(double x) const {
  const std::size_t n = values.size();
  const double h = grid.spacing();
  const double R = grid.radius();
  if (x <= -R) return values[0] + (values[1] - values[0]) / h * (x + R);
  if (x >= R) return values[n - 1] + (values[n - 1] - values[n - 2]) / h * (x - R);
  const double s = (x + R) / h;
  auto i = static_cast<std::size_t>(s);
  if (i >= n - 1) i = n - 2;
  const double t = s - static_cast<double>(i);
  return values[i] + t * (values[i + 1] - values[i]);
}

Field sample(const Grid& grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid.x(i));
  return Field(grid, std::move(v));
}

Field resample(const Field& f, const Grid& target, bool allow_extrapolation) {
  if (target.radius() > f.grid.radius() * (1.0 + 1e-12) && !allow_extrapolation) {
    throw Error(ErrorKind::PreconditionViolation, "target grid wider than source; extrapolation not allowed");
  }
  if (target.same_nodes(f.grid)) return Field(target, f.values);
  return sample(target, [&f](double x) { return f.at(x); });
}

double central_difference(std::span<const double> v, std::size_t i, double h) {
  return (v[i + 1] - v[i - 1]) / (2.0 * h);
}

double second_difference(std::span<const double> v, std::size_t i, double h) {
  return (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
}

Field derivative(const Field& f) {
  const std::size_t n = f.size();
  const double h = f.grid.spacing();
  const auto& v = f.values;
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = central_difference(v, i, h);
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return Field(f.grid, std::move(d));
}

Field second_derivative(const Field& f) {
  const std::size_t n = f.size();
  const double h2 = f.grid.spacing() * f.grid.spacing();
  const auto& v = f.values;
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = second_difference(v, i, f.grid.spacing());
  d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
  d[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2;
  return Field(f.grid, std::move(d));
}

double integrate(const Field& f) {
  const std::size_t n = f.size();
  double s = 0.5 * (f.values[0] + f.values[n - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) s += f.values[i];
  return s * f.grid.spacing();
}

double integrate_window(const Field& f, double r) {
  const double h = f.grid.spacing();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    if (std::abs(f.grid.x(i)) <= r + 1e-12 && std::abs(f.grid.x(i + 1)) <= r + 1e-12) {
      s += 0.5 * h * (f.values[i] + f.values[i + 1]);
    }
  }
  return s;
}

double sup_norm_window(const Field& f, double r) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(f.grid.x(i)) <= r + 1e-12) s = std::max(s, std::abs(f.values[i]));
  }
  return s;
}

double normalize_at_center(Field& f) {
  const double c = f.values[f.grid.center()];
  for (auto& v : f.values) v -= c;
  return c;
}

void write_field_csv(const std::string& path, const Field& f, const std::string& value_name) {
  CsvTable t({"x", value_name});
  for (std::size_t i = 0; i < f.size(); ++i) t.add_row({f.grid.x(i), f.values[i]});
  t.write(path);
}

}  // namespace ergo
