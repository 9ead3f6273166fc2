#pragma once

// Extended-precision real and complex scalars used by the series and
// linear-algebra code. Precision is runtime-selected in decimal digits.

#include <boost/multiprecision/mpfr.hpp>

#include <complex>
#include <string>

namespace cglwaves {

using Real = boost::multiprecision::mpfr_float;

// Sets the default working precision for the lifetime of the guard.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned digits) : saved_(Real::default_precision()) {
    Real::default_precision(digits);
  }
  ~PrecisionGuard() { Real::default_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

struct Cplx {
  Real re{0};
  Real im{0};

  Cplx() = default;
  Cplx(int x) : re(x), im(0) {}
  Cplx(double x) : re(x), im(0) {}
  Cplx(const Real& x) : re(x), im(0) {}
  Cplx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  Cplx(std::complex<double> z) : re(z.real()), im(z.imag()) {}

  Cplx& operator+=(const Cplx& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Cplx& operator-=(const Cplx& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Cplx& operator*=(const Cplx& o) {
    Real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  Cplx& operator/=(const Cplx& o);

  std::complex<double> to_std() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }
};

inline Cplx operator+(Cplx a, const Cplx& b) { return a += b; }
inline Cplx operator-(Cplx a, const Cplx& b) { return a -= b; }
inline Cplx operator*(Cplx a, const Cplx& b) { return a *= b; }
inline Cplx operator-(const Cplx& a) { return Cplx(-a.re, -a.im); }
inline Cplx operator*(const Cplx& a, const Real& s) { return Cplx(a.re * s, a.im * s); }
inline Cplx operator*(const Real& s, const Cplx& a) { return a * s; }

inline Real norm(const Cplx& a) { return a.re * a.re + a.im * a.im; }
inline Real abs(const Cplx& a) { return boost::multiprecision::hypot(a.re, a.im); }
inline Cplx conj(const Cplx& a) { return Cplx(a.re, -a.im); }

inline Cplx& Cplx::operator/=(const Cplx& o) {
  // Smith's algorithm keeps intermediates bounded.
  using boost::multiprecision::abs;
  if (abs(o.re) >= abs(o.im)) {
    Real r = o.im / o.re;
    Real d = o.re + o.im * r;
    Real nr = (re + im * r) / d;
    im = (im - re * r) / d;
    re = std::move(nr);
  } else {
    Real r = o.re / o.im;
    Real d = o.re * r + o.im;
    Real nr = (re * r + im) / d;
    im = (im * r - re) / d;
    re = std::move(nr);
  }
  return *this;
}
inline Cplx operator/(Cplx a, const Cplx& b) { return a /= b; }

// Principal square root.
inline Cplx sqrt(const Cplx& a) {
  using boost::multiprecision::sqrt;
  Real m = abs(a);
  if (m == 0) return Cplx();
  Real r = sqrt((m + boost::multiprecision::abs(a.re)) / 2);
  if (a.re >= 0) return Cplx(r, a.im / (2 * r));
  Real i = a.im >= 0 ? r : Real(-r);
  return Cplx(boost::multiprecision::abs(a.im) / (2 * r), i);
}

inline Cplx pow(const Cplx& a, int n) {
  Cplx r(1), b = a;
  bool inv = n < 0;
  unsigned k = inv ? static_cast<unsigned>(-n) : static_cast<unsigned>(n);
  while (k) {
    if (k & 1u) r *= b;
    b *= b;
    k >>= 1;
  }
  return inv ? Cplx(1) / r : r;
}

inline Cplx imag_unit() { return Cplx(Real(0), Real(1)); }

// Decimal string with the full working precision.
std::string to_string(const Real& x);

}  // namespace cglwaves
