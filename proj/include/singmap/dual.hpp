#pragma once

#include <array>
#include <cmath>

namespace singmap {

// Forward-mode dual number with N directional slots; used to differentiate
// the node residual with respect to the stencil unknowns.
template <int N>
struct Dual {
  double val = 0.0;
  std::array<double, N> d{};

  Dual() = default;
  Dual(double x) : val(x) {}  // NOLINT: constants promote implicitly
  static Dual variable(double x, int slot) {
    Dual r(x);
    r.d[slot] = 1.0;
    return r;
  }
};

template <int N>
Dual<N> operator+(const Dual<N>& x, const Dual<N>& y) {
  Dual<N> r(x.val + y.val);
  for (int k = 0; k < N; ++k) r.d[k] = x.d[k] + y.d[k];
  return r;
}
template <int N>
Dual<N> operator-(const Dual<N>& x, const Dual<N>& y) {
  Dual<N> r(x.val - y.val);
  for (int k = 0; k < N; ++k) r.d[k] = x.d[k] - y.d[k];
  return r;
}
template <int N>
Dual<N> operator-(const Dual<N>& x) {
  Dual<N> r(-x.val);
  for (int k = 0; k < N; ++k) r.d[k] = -x.d[k];
  return r;
}
template <int N>
Dual<N> operator*(const Dual<N>& x, const Dual<N>& y) {
  Dual<N> r(x.val * y.val);
  for (int k = 0; k < N; ++k) r.d[k] = x.d[k] * y.val + x.val * y.d[k];
  return r;
}
template <int N>
Dual<N> operator/(const Dual<N>& x, const Dual<N>& y) {
  const double inv = 1.0 / y.val;
  Dual<N> r(x.val * inv);
  for (int k = 0; k < N; ++k) r.d[k] = (x.d[k] - r.val * y.d[k]) * inv;
  return r;
}
template <int N>
Dual<N> operator+(const Dual<N>& x, double y) { return x + Dual<N>(y); }
template <int N>
Dual<N> operator+(double x, const Dual<N>& y) { return Dual<N>(x) + y; }
template <int N>
Dual<N> operator-(const Dual<N>& x, double y) { return x - Dual<N>(y); }
template <int N>
Dual<N> operator-(double x, const Dual<N>& y) { return Dual<N>(x) - y; }
template <int N>
Dual<N> operator*(const Dual<N>& x, double y) {
  Dual<N> r(x.val * y);
  for (int k = 0; k < N; ++k) r.d[k] = x.d[k] * y;
  return r;
}
template <int N>
Dual<N> operator*(double x, const Dual<N>& y) { return y * x; }
template <int N>
Dual<N> operator/(const Dual<N>& x, double y) { return x * (1.0 / y); }

template <int N>
Dual<N> exp(const Dual<N>& x) {
  const double e = std::exp(x.val);
  Dual<N> r(e);
  for (int k = 0; k < N; ++k) r.d[k] = e * x.d[k];
  return r;
}

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Dual<N>& x) { return x.val; }

}  // namespace singmap
