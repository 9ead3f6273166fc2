#pragma once

#include <array>
#include <complex>

namespace cglwaves {

// Truncated Taylor expansion f(x0 + h) = Σ c[k] h^k, k = 0..N.
// Derivatives are k! c[k].
template <int N>
struct Jet {
  using value_type = std::complex<double>;
  std::array<value_type, N + 1> c{};

  Jet() = default;
  Jet(value_type v) { c[0] = v; }

  static Jet variable(value_type x0) {
    Jet j(x0);
    if constexpr (N >= 1) j.c[1] = 1.0;
    return j;
  }

  value_type value() const { return c[0]; }
  value_type derivative(int k) const {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return c[k] * f;
  }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k <= N; ++k) c[k] += o.c[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k <= N; ++k) c[k] -= o.c[k];
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    Jet r;
    for (int i = 0; i <= N; ++i)
      for (int k = 0; i + k <= N; ++k) r.c[i + k] += c[i] * o.c[k];
    return *this = r;
  }
  Jet& operator/=(const Jet& o) {
    Jet r;
    for (int k = 0; k <= N; ++k) {
      value_type s = c[k];
      for (int i = 1; i <= k; ++i) s -= o.c[i] * r.c[k - i];
      r.c[k] = s / o.c[0];
    }
    return *this = r;
  }
  Jet& operator*=(value_type s) {
    for (auto& x : c) x *= s;
    return *this;
  }
};

template <int N> Jet<N> operator+(Jet<N> a, const Jet<N>& b) { return a += b; }
template <int N> Jet<N> operator-(Jet<N> a, const Jet<N>& b) { return a -= b; }
template <int N> Jet<N> operator*(Jet<N> a, const Jet<N>& b) { return a *= b; }
template <int N> Jet<N> operator/(Jet<N> a, const Jet<N>& b) { return a /= b; }
template <int N> Jet<N> operator-(Jet<N> a) { return a *= -1.0; }
template <int N> Jet<N> operator*(Jet<N> a, std::complex<double> s) { return a *= s; }
template <int N> Jet<N> operator*(std::complex<double> s, Jet<N> a) { return a *= s; }
template <int N> Jet<N> operator*(Jet<N> a, double s) { return a *= std::complex<double>(s); }
template <int N> Jet<N> operator*(double s, Jet<N> a) { return a *= std::complex<double>(s); }
template <int N> Jet<N> operator+(Jet<N> a, std::complex<double> s) { a.c[0] += s; return a; }
template <int N> Jet<N> operator+(std::complex<double> s, Jet<N> a) { a.c[0] += s; return a; }
template <int N> Jet<N> operator-(Jet<N> a, std::complex<double> s) { a.c[0] -= s; return a; }
template <int N> Jet<N> operator-(std::complex<double> s, Jet<N> a) { return -a + s; }
template <int N> Jet<N> operator+(Jet<N> a, double s) { a.c[0] += s; return a; }
template <int N> Jet<N> operator-(Jet<N> a, double s) { a.c[0] -= s; return a; }
template <int N> Jet<N> operator-(double s, Jet<N> a) { return -a + std::complex<double>(s); }

template <int N>
Jet<N> pow(const Jet<N>& a, int n) {
  Jet<N> r(1.0);
  for (int i = 0; i < n; ++i) r *= a;
  return r;
}

// Derivative jet: if a expands f at x0, returns the expansion of f' with the
// top coefficient lost.
template <int N>
Jet<N> derive(const Jet<N>& a) {
  Jet<N> r;
  for (int k = 0; k < N; ++k) r.c[k] = a.c[k + 1] * double(k + 1);
  return r;
}

}  // namespace cglwaves
