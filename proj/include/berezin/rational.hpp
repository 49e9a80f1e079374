#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <string>

namespace berezin {

// Exact rational scalar. GMP keeps every value canonical (gcd-reduced,
// positive denominator), so == is structural equality.
using Rat = mpq_class;

inline Rat make_rat(long num, long den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline double to_double(const Rat& r) { return r.get_d(); }

inline bool is_integer(const Rat& r) { return r.get_den() == 1; }

// Gaussian rational re + im*i. The exact scalar type of the rewrite engine;
// all Chevalley structure constants are integers, so products of basis
// letters never leave this field.
struct GaussRat {
  Rat re, im;

  GaussRat() : re(0), im(0) {}
  GaussRat(int n) : re(n), im(0) {}
  GaussRat(long n) : re(n), im(0) {}
  GaussRat(const Rat& r) : re(r), im(0) {}
  GaussRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  static GaussRat unit_im() { return GaussRat(Rat(0), Rat(1)); }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  GaussRat conj() const { return GaussRat(re, -im); }

  std::complex<double> to_complex() const {
    return {re.get_d(), im.get_d()};
  }

  GaussRat operator-() const { return GaussRat(-re, -im); }

  GaussRat& operator+=(const GaussRat& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussRat& operator-=(const GaussRat& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  GaussRat& operator*=(const GaussRat& o) {
    Rat r = re * o.re - im * o.im;
    Rat i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }

  friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
  friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
  friend GaussRat operator*(GaussRat a, const GaussRat& b) { return a *= b; }
  friend GaussRat operator/(const GaussRat& a, const GaussRat& b) {
    return a * b.inverse();
  }
  friend bool operator==(const GaussRat& a, const GaussRat& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussRat& a, const GaussRat& b) {
    return !(a == b);
  }

  GaussRat inverse() const {
    Rat n = re * re + im * im;
    return GaussRat(re / n, -im / n);
  }
};

inline std::string rat_str(const Rat& r) { return r.get_str(); }

// Scalar abstraction shared by the exact and floating instantiations of the
// algebra templates. `exact` selects zero tests and conjugation semantics.
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rat> {
  static constexpr bool exact = true;
  static Rat zero() { return Rat(0); }
  static Rat one() { return Rat(1); }
  static Rat from_int(long n) { return Rat(n); }
  static Rat from_rat(const Rat& r) { return r; }
  static bool is_zero(const Rat& s) { return s == 0; }
  static Rat conj(const Rat& s) { return s; }
  static std::complex<double> to_complex(const Rat& s) { return {s.get_d(), 0.0}; }
};

template <>
struct scalar_traits<GaussRat> {
  static constexpr bool exact = true;
  static GaussRat zero() { return GaussRat(); }
  static GaussRat one() { return GaussRat(1); }
  static GaussRat from_int(long n) { return GaussRat(n); }
  static GaussRat from_rat(const Rat& r) { return GaussRat(r); }
  static bool is_zero(const GaussRat& s) { return s.is_zero(); }
  static GaussRat conj(const GaussRat& s) { return s.conj(); }
  static std::complex<double> to_complex(const GaussRat& s) {
    return s.to_complex();
  }
};

template <>
struct scalar_traits<std::complex<double>> {
  static constexpr bool exact = false;
  static std::complex<double> zero() { return {0.0, 0.0}; }
  static std::complex<double> one() { return {1.0, 0.0}; }
  static std::complex<double> from_int(long n) {
    return {static_cast<double>(n), 0.0};
  }
  static std::complex<double> from_rat(const Rat& r) { return {r.get_d(), 0.0}; }
  static bool is_zero(const std::complex<double>& s) {
    return s.real() == 0.0 && s.imag() == 0.0;
  }
  static std::complex<double> conj(const std::complex<double>& s) {
    return std::conj(s);
  }
  static std::complex<double> to_complex(const std::complex<double>& s) {
    return s;
  }
};

}  // namespace berezin
