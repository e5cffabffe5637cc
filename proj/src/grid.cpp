#include "adelic/grid.hpp"

#include <cmath>
#include <numbers>

#include "adelic/rational.hpp"

namespace adelic {

void VerificationGrid::validate() const {
  if (n_angle < 1 || n_radius < 2 || !(log_radius > 0)) throw Error("grid needs n_angle >= 1, n_radius >= 2, R > 0");
}

std::vector<double> VerificationGrid::log_radii() const {
  validate();
  std::vector<double> t(static_cast<std::size_t>(n_radius));
  for (int i = 0; i < n_radius; ++i) t[i] = -log_radius + 2 * log_radius * i / (n_radius - 1);
  return t;
}

std::vector<double> VerificationGrid::angles() const {
  validate();
  std::vector<double> a(static_cast<std::size_t>(n_angle));
  for (int i = 0; i < n_angle; ++i) a[i] = 2 * std::numbers::pi * i / n_angle;
  return a;
}

std::vector<CPoint> VerificationGrid::points() const {
  std::vector<CPoint> out;
  auto th = angles();
  for (double t : log_radii())
    for (double a : th) out.push_back(std::polar(std::exp(t), a));
  return out;
}

VerificationGrid VerificationGrid::refined() const {
  VerificationGrid g = *this;
  g.n_angle *= 2;
  g.n_radius = 2 * n_radius - 1;
  return g;
}

}  // namespace adelic
