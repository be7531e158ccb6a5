#pragma once

#include <array>
#include <cmath>

namespace phs::detail {

struct GaussRule3 {
  static constexpr int size = 3;
  static constexpr std::array<double, 3> x{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> w{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
};

struct GaussRule5 {
  static constexpr int size = 5;
  static constexpr std::array<double, 5> x{-0.9061798459386640, -0.5384693101056831, 0.0,
                                           0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> w{0.2369268850561891, 0.4786286704993665,
                                           0.5688888888888889, 0.4786286704993665,
                                           0.2369268850561891};
};

// Calls f(z, weight) for every quadrature node on [lo, hi].
template <typename Rule, typename F>
void integrate_on(double lo, double hi, F&& f) {
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  for (int q = 0; q < Rule::size; ++q) f(mid + half * Rule::x[q], half * Rule::w[q]);
}

}  // namespace phs::detail
