#pragma once

#include <cmath>
#include <limits>

#include "rlmc/errors.hpp"

namespace rlmc::normal {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
inline constexpr double kSqrt2 = 1.4142135623730950488016887;

inline double pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

inline double cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

// Wichura's PPND16 (algorithm AS 241): inverse standard normal CDF,
// accurate to ~1e-16 over (0,1).
inline double quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ArgumentError("normal::quantile: p must lie strictly in (0,1)");
  }
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -value : value;
}

// Moments of Y = clamp(W, lo, hi) with W ~ N(mean, sd^2): the censored
// normal. Needed for closed-form conditional expectations of polynomial
// basis functions under clamped affine-Gaussian dynamics.
struct CensoredMoments {
  double lo, hi, mean, sd;
  double a, b;            // standardized bounds
  double cdf_a, cdf_b;    // Phi(a), Phi(b)
  double pdf_a, pdf_b;    // phi(a), phi(b)

  CensoredMoments(double lo_, double hi_, double mean_, double sd_)
      : lo(lo_), hi(hi_), mean(mean_), sd(sd_) {
    a = (lo - mean) / sd;
    b = (hi - mean) / sd;
    cdf_a = cdf(a);
    cdf_b = cdf(b);
    pdf_a = pdf(a);
    pdf_b = pdf(b);
  }

  double prob_low() const { return cdf_a; }
  double prob_high() const { return 1.0 - cdf_b; }

  // E[Y] and E[Y^2] without the generic recursion; these carry the hot
  // solver loops.
  double first() const {
    const double mz0 = cdf_b - cdf_a;
    const double mz1 = pdf_a - pdf_b;
    return lo * prob_low() + hi * prob_high() + mean * mz0 + sd * mz1;
  }
  double second() const {
    const double mz0 = cdf_b - cdf_a;
    const double mz1 = pdf_a - pdf_b;
    const double mz2 = a * pdf_a - b * pdf_b + mz0;
    return lo * lo * prob_low() + hi * hi * prob_high() + mean * mean * mz0 +
           2.0 * mean * sd * mz1 + sd * sd * mz2;
  }

  // E[Y^j] for j = 0..max_order, written into moments[0..max_order].
  // Uses int_a^b z^k phi(z) dz = a^{k-1} phi(a) - b^{k-1} phi(b)
  //                              + (k-1) * (previous),
  // then binomially recombines with (mean + sd z)^j and adds the boundary
  // atoms lo^j P(W < lo) and hi^j P(W > hi).
  void eval(int max_order, double* moments) const {
    if (max_order > 17) {
      throw ArgumentError("CensoredMoments: polynomial order above 17 unsupported");
    }
    double mz[18];  // central-region z-moments M_k = int_a^b z^k phi dz
    mz[0] = cdf_b - cdf_a;
    if (max_order >= 1) mz[1] = pdf_a - pdf_b;
    for (int k = 2; k <= max_order; ++k) {
      mz[k] = std::pow(a, k - 1) * pdf_a - std::pow(b, k - 1) * pdf_b +
              (k - 1) * mz[k - 2];
    }
    const double pl = prob_low(), ph = prob_high();
    for (int j = 0; j <= max_order; ++j) {
      double center = 0.0;
      double binom = 1.0;  // C(j, i)
      for (int i = 0; i <= j; ++i) {
        center += binom * std::pow(mean, j - i) * std::pow(sd, i) * mz[i];
        binom *= static_cast<double>(j - i) / (i + 1.0);
      }
      moments[j] = std::pow(lo, j) * pl + std::pow(hi, j) * ph + center;
    }
  }

  // Expectation of the cell indicator and the coordinate-weighted cell
  // indicator for Y = clamp(W): E[1{Y in [c_lo, c_hi)}], E[Y 1{...}].
  // Boundary atoms belong to the cell containing the clamp bound; the last
  // cell is closed on the right.
  void cell_mass(double c_lo, double c_hi, bool contains_lo, bool contains_hi,
                 double* mass, double* weighted) const {
    const double za = (std::max(c_lo, lo) - mean) / sd;
    const double zb = (std::min(c_hi, hi) - mean) / sd;
    const double ca = cdf(za), cb = cdf(zb);
    const double pa = pdf(za), pb = pdf(zb);
    double m = std::max(cb - ca, 0.0);
    double w = mean * m + sd * (pa - pb);
    if (contains_lo) {
      m += prob_low();
      w += lo * prob_low();
    }
    if (contains_hi) {
      m += prob_high();
      w += hi * prob_high();
    }
    *mass = m;
    *weighted = w;
  }
};

}  // namespace rlmc::normal
