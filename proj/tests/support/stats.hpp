#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

// Test-only statistical helpers: regularized incomplete gamma for chi-square
// p-values, and small distribution-distance utilities.
namespace teststats {

inline double gammln(double xx) {
  static const double cof[6] = {76.18009172947146,  -86.50532032941677, 24.01409824083091,
                                -1.231739572450155, 0.1208650973866179e-2, -0.5395239384953e-5};
  double x = xx, y = xx;
  double tmp = x + 5.5;
  tmp -= (x + 0.5) * std::log(tmp);
  double ser = 1.000000000190015;
  for (double c : cof) ser += c / ++y;
  return -tmp + std::log(2.5066282746310005 * ser / x);
}

// P(a,x) by series expansion.
inline double gser(double a, double x) {
  const double gln = gammln(a);
  double ap = a;
  double sum = 1.0 / a, del = sum;
  for (int n = 0; n < 500; ++n) {
    ++ap;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-14) break;
  }
  return sum * std::exp(-x + a * std::log(x) - gln);
}

// Q(a,x) by continued fraction (modified Lentz).
inline double gcf(double a, double x) {
  const double gln = gammln(a);
  const double fpmin = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-14) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

// Upper regularized incomplete gamma Q(a, x).
inline double gammq(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gammq: bad arguments");
  if (x == 0.0) return 1.0;
  return (x < a + 1.0) ? 1.0 - gser(a, x) : gcf(a, x);
}

inline double chi_square_pvalue(double chi2, double dof) { return gammq(dof / 2.0, chi2 / 2.0); }

// Chi-square statistic of observed counts against expected probabilities.
inline double chi_square_stat(const std::vector<std::uint64_t>& counts,
                              const std::vector<double>& probs, std::uint64_t total) {
  double chi2 = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = probs[i] * static_cast<double>(total);
    if (expected <= 0.0) continue;
    const double diff = static_cast<double>(counts[i]) - expected;
    chi2 += diff * diff / expected;
  }
  return chi2;
}

// Total-variation distance between two distributions on the same support.
inline double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

// 3-sigma binomial window half-width for a frequency estimate.
inline double binomial_3sigma(double p, std::uint64_t n) {
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace teststats
