#pragma once

// Shared helpers for the test suites: plain statistics, a chi-square critical
// table, a binomial pmf, and a Hermitian Jacobi eigensolver used as an
// independent PSD oracle.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "xlra/linalg.hpp"

namespace testsupport {

inline double mean(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

inline double sample_std(const std::vector<double>& xs) {
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

inline double std_error(const std::vector<double>& xs) {
  return sample_std(xs) / std::sqrt(static_cast<double>(xs.size()));
}

// One-sided z statistic for mean(a - b) > 0 over paired samples.
inline double paired_z(const std::vector<double>& a,
                       const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return mean(d) / std_error(d);
}

// Upper critical values of chi-square at significance 0.01, dof 1..30.
inline double chi2_critical_001(int dof) {
  static const double table[] = {
      6.635,  9.210,  11.345, 13.277, 15.086, 16.812, 18.475, 20.090,
      21.666, 23.209, 24.725, 26.217, 27.688, 29.141, 30.578, 32.000,
      33.409, 34.805, 36.191, 37.566, 38.932, 40.289, 41.638, 42.980,
      44.314, 45.642, 46.963, 48.278, 49.588, 50.892};
  if (dof < 1 || dof > 30) throw std::out_of_range("chi2 table: dof 1..30");
  return table[dof - 1];
}

inline double binomial_pmf(int n, double p, int k) {
  const double lognck = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                        std::lgamma(n - k + 1.0);
  return std::exp(lognck + k * std::log(p) + (n - k) * std::log1p(-p));
}

// Eigenvalues of a Hermitian matrix via cyclic Jacobi with complex rotations.
inline std::vector<double> hermitian_eigenvalues(xlra::CMat a) {
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const xlra::cplx apq = a(p, q);
        const double abs_apq = std::abs(apq);
        if (abs_apq < 1e-18) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Unitary rotation [[c, s], [-conj(s), c]] annihilating a(p,q).
        const double tau = (aqq - app) / (2.0 * abs_apq);
        const double t = (tau >= 0.0)
                             ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                             : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const xlra::cplx s = t * c * (apq / abs_apq);
        for (std::size_t k = 0; k < n; ++k) {
          const xlra::cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - std::conj(s) * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const xlra::cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = std::conj(s) * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i).real();
  return eig;
}

}  // namespace testsupport
