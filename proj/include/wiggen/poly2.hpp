#pragma once

// Sparse polynomial in a phase-space point and its conjugate. Used as a jet
// coefficient ring so that derivative extraction can return the polynomial
// prefactor of a Gaussian in closed form instead of numbers at one point.

#include <complex>
#include <map>
#include <stdexcept>
#include <utility>

namespace wiggen {

using cplx = std::complex<double>;

struct Poly2 {
  // (power of alpha, power of alpha*) -> coefficient; zeros are not stored.
  std::map<std::pair<int, int>, cplx> t;

  static Poly2 constant(cplx v) {
    Poly2 p;
    p.add(0, 0, v);
    return p;
  }

  static Poly2 monomial(int m, int n, cplx v = 1.0) {
    if (m < 0 || n < 0) throw std::invalid_argument("negative monomial power");
    Poly2 p;
    p.add(m, n, v);
    return p;
  }

  void add(int m, int n, cplx v) {
    auto key = std::make_pair(m, n);
    auto it = t.find(key);
    cplx s = (it == t.end() ? cplx{} : it->second) + v;
    if (s == cplx{}) {
      if (it != t.end()) t.erase(it);
    } else {
      t[key] = s;
    }
  }

  cplx eval(cplx alpha) const {
    cplx ac = std::conj(alpha);
    cplx s{};
    for (const auto& [k, v] : t) {
      cplx m = v;
      for (int i = 0; i < k.first; ++i) m *= alpha;
      for (int i = 0; i < k.second; ++i) m *= ac;
      s += m;
    }
    return s;
  }

  Poly2& operator+=(const Poly2& o) {
    for (const auto& [k, v] : o.t) add(k.first, k.second, v);
    return *this;
  }
  Poly2& operator-=(const Poly2& o) {
    for (const auto& [k, v] : o.t) add(k.first, k.second, -v);
    return *this;
  }
  friend Poly2 operator+(Poly2 a, const Poly2& b) { return a += b; }
  friend Poly2 operator-(Poly2 a, const Poly2& b) { return a -= b; }
  Poly2 operator-() const {
    Poly2 r;
    for (const auto& [k, v] : t) r.t[k] = -v;
    return r;
  }

  friend Poly2 operator*(const Poly2& a, const Poly2& b) {
    Poly2 r;
    for (const auto& [ka, va] : a.t)
      for (const auto& [kb, vb] : b.t)
        r.add(ka.first + kb.first, ka.second + kb.second, va * vb);
    return r;
  }
  Poly2& operator*=(const Poly2& o) { return *this = *this * o; }

  friend Poly2 operator*(Poly2 a, const cplx& s) {
    if (s == cplx{}) return Poly2{};
    for (auto& [k, v] : a.t) v *= s;
    return a;
  }
  friend Poly2 operator*(const cplx& s, Poly2 a) { return std::move(a) * s; }

  Poly2& operator+=(const cplx& s) {
    add(0, 0, s);
    return *this;
  }
  friend Poly2 operator+(Poly2 a, const cplx& s) { return a += s; }

  bool operator==(const Poly2& o) const { return t == o.t; }
};

}  // namespace wiggen
