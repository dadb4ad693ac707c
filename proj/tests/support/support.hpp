#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "crosscycle/canonical.hpp"
#include "crosscycle/model.hpp"
#include "crosscycle/poincare.hpp"

namespace crosscycle::testing {

// z = T w + (0, shift) with T = [[alpha, 0], [beta, gamma]], alpha, gamma > 0.
// Keeps the switching line, the sides and the orientation.
struct Change {
  double alpha = 1.0, beta = 0.0, gamma = 1.0, shift = 0.0;
};

inline Change random_change(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0.5, 2.0), any(-1.0, 1.0);
  return {pos(rng), any(rng), pos(rng), any(rng)};
}

inline PwlSpec conjugate(const PwlSpec& p, const Change& c) {
  auto side = [&](const Mat2& A, Vec2 b, Mat2& A2, Vec2& b2) {
    const Mat2 T{c.alpha, 0.0, c.beta, c.gamma};
    const Mat2 Ti{1.0 / c.alpha, 0.0, -c.beta / (c.alpha * c.gamma), 1.0 / c.gamma};
    const Mat2 AT{A.a11 * T.a11 + A.a12 * T.a21, A.a11 * T.a12 + A.a12 * T.a22,
                  A.a21 * T.a11 + A.a22 * T.a21, A.a21 * T.a12 + A.a22 * T.a22};
    A2 = {Ti.a11 * AT.a11 + Ti.a12 * AT.a21, Ti.a11 * AT.a12 + Ti.a12 * AT.a22,
          Ti.a21 * AT.a11 + Ti.a22 * AT.a21, Ti.a21 * AT.a12 + Ti.a22 * AT.a22};
    b2 = Ti * (A * Vec2{0.0, c.shift} + b);
  };
  PwlSpec q;
  side(p.A_plus, p.b_plus, q.A_plus, q.b_plus);
  side(p.A_minus, p.b_minus, q.A_minus, q.b_minus);
  return q;
}

// Nondegenerate, a12+ a12- > 0. With zero_b the offsets satisfy b = 0.
inline PwlSpec random_pwl(std::mt19937_64& rng, bool zero_b) {
  std::uniform_real_distribution<double> u(-3.0, 3.0), mag(0.2, 3.0);
  std::bernoulli_distribution coin(0.5);
  for (;;) {
    const double s = coin(rng) ? 1.0 : -1.0;
    PwlSpec p{{u(rng), s * mag(rng), u(rng), u(rng)}, {u(rng), u(rng)},
              {u(rng), s * mag(rng), u(rng), u(rng)}, {u(rng), u(rng)}};
    if (std::fabs(p.A_plus.det()) < 0.05 || std::fabs(p.A_minus.det()) < 0.05) continue;
    if (zero_b) p.b_minus.x = p.A_minus.a12 / p.A_plus.a12 * p.b_plus.x;
    return p;
  }
}

// exp(A t) for a 2x2 matrix, from the Cayley-Hamilton form.
inline Mat2 expm(const Mat2& A, double t) {
  const double s = 0.5 * A.trace();
  const double q2 = s * s - A.det();
  double c = 1.0, k = t;  // exp(A t) = e^{s t} (c I + k (A - s I))
  if (q2 > 0.0) {
    const double q = std::sqrt(q2);
    c = std::cosh(q * t);
    k = std::sinh(q * t) / q;
  } else if (q2 < 0.0) {
    const double w = std::sqrt(-q2);
    c = std::cos(w * t);
    k = std::sin(w * t) / w;
  }
  const double e = std::exp(s * t);
  return {e * (c + k * (A.a11 - s)), e * k * A.a12, e * k * A.a21, e * (c + k * (A.a22 - s))};
}

// Solution of z' = A z + b at time t from z0.
inline Vec2 linear_flow(const Mat2& A, Vec2 b, Vec2 z0, double t) {
  const double det = A.det();
  const Vec2 ze{(-A.a22 * b.x + A.a12 * b.y) / det, (A.a21 * b.x - A.a11 * b.y) / det};
  return expm(A, t) * (z0 - ze) + ze;
}

// Canonical (tR, tL, dR, dL, aR, aL, b = 0) systems with and without cycles.
inline std::vector<CanonicalParams> curated_canonical() {
  auto c = [](double tR, double tL, double dR, double dL, double aR, double aL) {
    return CanonicalParams{tR, tL, dR, dL, aR, aL, 0.0};
  };
  return {
      c(2, -4, 2, 5, 2, 5),         c(2, -4, 2, 5, 2, 0),        c(2, -4, 2, 5, 2, -0.05),
      c(2, -4, 2, 5, 2, 2.5),       c(1, -2, 2, 3, 1, 1),        c(1.5, -3, 1, 4, 1, 2),
      c(0.5, -1, 1, 1, 0.5, 0.8),   c(-2, 4, 2, 5, 2, 5),        c(1, -0.5, 2, 1, 1, 1),
      c(2, -4, 2, 5, -2, 5),        c(1, 2, 1, 1, 1, 1),         c(-1, -2, 1, 1, 1, -1),
      c(1, -1, -1, 1, 1, 1),        c(1, -1, -1, -1, 1, -1),     c(1, -3, 3, 2, 0, 0),
      c(3, -5, 4, 9, 1, 2),         c(0.3, -0.6, 1, 1.2, 0.2, 0.5), c(2, -4, 2, 5, 2, 0.01),
      c(1, -2, 1, 2, -1, -1),       c(0.8, -0.4, 1, 1, 0.6, 0.1),
  };
}

template <class Fn>
double bisect(Fn f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200 && b - a > 1e-15 * (1.0 + std::fabs(a)); ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Root of e^{-t} - cos t + sin t on (pi, 2 pi): the flight time of the
// example's right orbit through the fold point.
inline double t_hat_plus() {
  return bisect([](double t) { return std::exp(-t) - std::cos(t) + std::sin(t); }, std::numbers::pi + 1e-9,
                2.0 * std::numbers::pi - 1e-9);
}

// The tau range on which a parametric focus map describes actual crossings
// (entry and exit on the correct half axes), starting from the end where the
// entry ordinate diverges. The entry ordinate is monotone on it.
struct Branch {
  ParametricHalfMap map;
  double lo = 0.0, hi = 0.0;

  [[nodiscard]] double validity(double tau) const {
    const double s = map.side == Side::Right ? -1.0 : 1.0;
    return std::min(s * map.entry(tau), -s * map.exit(tau));
  }

  // tau with entry(tau) = y, or NaN when y is outside the branch.
  [[nodiscard]] double tau_of(double y) const {
    const double a = lo + 1e-12 * (hi - lo), b = hi - 1e-12 * (hi - lo);
    const double ea = map.entry(a) - y, eb = map.entry(b) - y;
    if ((ea > 0.0) == (eb > 0.0)) return std::nan("");
    return bisect([&](double t) { return map.entry(t) - y; }, a, b);
  }
};

inline Branch valid_branch(const ParametricHalfMap& m) {
  Branch br{m, m.tau_lo, m.tau_hi};
  const double pole = std::numbers::pi / m.beta;
  const bool real = m.tau_lo >= pole * (1.0 - 1e-12);
  const int n = 20000;
  const double far = real ? m.tau_hi : m.tau_lo;
  double prev = pole;
  for (int i = 1; i < n; ++i) {
    const double t = pole + (far - pole) * static_cast<double>(i) / n;
    if (br.validity(t) < 0.0) {
      const double edge = bisect([&](double u) { return br.validity(u); }, prev, t);
      (real ? br.hi : br.lo) = edge;
      return br;
    }
    prev = t;
  }
  return br;
}

// Fixed point of P = P_L o P_R from the parametric maps alone:
// returns (entry ordinate y_D on the right, exit ordinate y_B).
inline std::pair<double, double> parametric_cycle(const CanonicalParams& c) {
  const Branch right = valid_branch(parametric_half_map(c, Side::Right));
  const ParametricHalfMap lm = parametric_half_map(c, Side::Left);
  std::optional<Branch> left;
  if (!lm.linear_slope) left = valid_branch(lm);
  auto left_map = [&](double z) {
    if (lm.linear_slope) return *lm.linear_slope * z;
    const double tau = left->tau_of(z);
    return std::isnan(tau) ? std::nan("") : lm.exit(tau);
  };
  auto h = [&](double tau) { return left_map(right.map.exit(tau)) - right.map.entry(tau); };
  const int n = 4000;
  const double a = right.lo, b = right.hi;
  double prev_t = a + (b - a) / n, prev_h = h(prev_t);
  for (int i = 2; i < n; ++i) {
    const double t = a + (b - a) * static_cast<double>(i) / n;
    const double v = h(t);
    if (std::isfinite(v) && std::isfinite(prev_h) && (v > 0.0) != (prev_h > 0.0)) {
      const double tau = bisect(h, prev_t, t);
      return {right.map.entry(tau), right.map.exit(tau)};
    }
    prev_t = t;
    prev_h = v;
  }
  return {std::nan(""), std::nan("")};
}

}  // namespace crosscycle::testing
