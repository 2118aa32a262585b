#pragma once

// Independent reference implementations used only by the tests. They stay
// deliberately naive: plain loops, recursive enumeration, and adaptive
// quadrature, sharing no code with the library paths they check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pemsig/date.hpp"
#include "pemsig/matrix.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature
// ---------------------------------------------------------------------------

inline double simpson_step(const std::function<double(double)>& f, double a,
                           double b, double fa, double fm, double fb,
                           double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, eps * 0.5, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, eps * 0.5, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double eps = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, eps, 48);
}

// ---------------------------------------------------------------------------
// Student t distribution via quadrature of the density
// ---------------------------------------------------------------------------

inline double t_density(double u, double dof) {
  const double log_norm = std::lgamma(0.5 * (dof + 1.0)) -
                          std::lgamma(0.5 * dof) -
                          0.5 * std::log(dof * M_PI);
  return std::exp(log_norm -
                  0.5 * (dof + 1.0) * std::log1p(u * u / dof));
}

// Two-sided tail: 1 - 2 * integral of the density over [0, |t|].
inline double t_two_sided_p(double t, double dof) {
  const double limit = std::abs(t);
  if (limit == 0.0) return 1.0;
  const double body =
      integrate([dof](double u) { return t_density(u, dof); }, 0.0, limit);
  return std::max(0.0, 1.0 - 2.0 * body);
}

// ---------------------------------------------------------------------------
// Regularized incomplete beta via quadrature
// ---------------------------------------------------------------------------

// Uses the substitution u = x * v^(1/a), which removes the u -> 0
// singularity for a < 1:
//   integral_0^x u^(a-1) (1-u)^(b-1) du = (x^a / a) integral_0^1 (1 - x v^(1/a))^(b-1) dv
inline double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > (a + 1.0) / (a + b + 2.0)) {
    return 1.0 - reg_inc_beta(b, a, 1.0 - x);
  }
  const double log_b = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double scaled = integrate(
      [a, b, x](double v) {
        const double u = x * std::pow(v, 1.0 / a);
        return std::pow(1.0 - u, b - 1.0);
      },
      0.0, 1.0);
  return std::exp(a * std::log(x) - std::log(a) - log_b) * scaled;
}

// ---------------------------------------------------------------------------
// Welch statistic by direct formula translation
// ---------------------------------------------------------------------------

struct WelchRef {
  double t = 0.0;
  double dof = 0.0;
  bool degenerate = false;
};

inline WelchRef welch(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("welch oracle wants equal lengths >= 2");
  }
  const double g = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (double v : x) mx += v;
  for (double v : y) my += v;
  mx /= g;
  my /= g;
  double sx = 0.0, sy = 0.0;
  for (double v : x) sx += (v - mx) * (v - mx);
  for (double v : y) sy += (v - my) * (v - my);
  sx /= g - 1.0;
  sy /= g - 1.0;
  WelchRef ref;
  if (sx == 0.0 && sy == 0.0) {
    ref.degenerate = true;
    ref.t = mx == my ? 0.0 : (mx > my ? 1.0 : -1.0) / 0.0;  // +/- inf
    return ref;
  }
  const double ex = sx / g, ey = sy / g;
  ref.t = (mx - my) / std::sqrt(ex + ey);
  ref.dof = (ex + ey) * (ex + ey) /
            (ex * ex / (g - 1.0) + ey * ey / (g - 1.0));
  return ref;
}

// ---------------------------------------------------------------------------
// Exact rank-sum tail by recursive subset enumeration
// ---------------------------------------------------------------------------

// O(n^2) average ranks, on purpose a different algorithm than the library.
inline std::vector<double> naive_ranks(const std::vector<double>& pooled) {
  std::vector<double> ranks(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    std::size_t less = 0, equal = 0;
    for (std::size_t j = 0; j < pooled.size(); ++j) {
      if (pooled[j] < pooled[i]) ++less;
      if (pooled[j] == pooled[i]) ++equal;
    }
    ranks[i] = static_cast<double>(less) + 0.5 * static_cast<double>(equal - 1) + 1.0;
  }
  return ranks;
}

struct RankSumRef {
  double w = 0.0;       // observed rank sum of x
  double mean_w = 0.0;  // permutation mean
  double p = 1.0;       // exact two-sided (doubled smaller tail, capped)
};

namespace detail {
inline void enumerate_subsets(const std::vector<double>& ranks, std::size_t next,
                              std::size_t left, double sum, double w,
                              std::uint64_t& total, std::uint64_t& n_le,
                              std::uint64_t& n_ge) {
  if (left == 0) {
    ++total;
    if (sum <= w + 1e-9) ++n_le;
    if (sum >= w - 1e-9) ++n_ge;
    return;
  }
  if (ranks.size() - next < left) return;
  enumerate_subsets(ranks, next + 1, left - 1, sum + ranks[next], w, total,
                    n_le, n_ge);
  enumerate_subsets(ranks, next + 1, left, sum, w, total, n_le, n_ge);
}
}  // namespace detail

inline RankSumRef ranksum_exact(const std::vector<double>& x,
                                const std::vector<double>& y) {
  std::vector<double> pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::vector<double> ranks = naive_ranks(pooled);
  RankSumRef ref;
  for (std::size_t i = 0; i < x.size(); ++i) ref.w += ranks[i];
  ref.mean_w = static_cast<double>(x.size()) *
               static_cast<double>(pooled.size() + 1) / 2.0;
  std::uint64_t total = 0, n_le = 0, n_ge = 0;
  detail::enumerate_subsets(ranks, 0, x.size(), 0.0, ref.w, total, n_le, n_ge);
  const double tail = static_cast<double>(std::min(n_le, n_ge)) /
                      static_cast<double>(total);
  ref.p = std::min(1.0, 2.0 * tail);
  return ref;
}

// ---------------------------------------------------------------------------
// Window classification by literal rule scan
// ---------------------------------------------------------------------------

inline pemsig::WindowAssignment classify(const std::vector<pemsig::Day>& p,
                                         pemsig::Day e, int w,
                                         pemsig::TailPolicy tail) {
  using pemsig::WindowAssignment;
  if (e < p.front() - w) return WindowAssignment::Discarded;
  if (e < p.front()) return WindowAssignment::Baseline;
  std::size_t l = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= e) l = i;
  }
  if (l + 1 == p.size()) {
    if (e < p[l] + w) return WindowAssignment::Exposed;
    return tail == pemsig::TailPolicy::Baseline ? WindowAssignment::Baseline
                                                : WindowAssignment::Discarded;
  }
  return e < p[l] + w ? WindowAssignment::Exposed : WindowAssignment::Baseline;
}

}  // namespace oracle
