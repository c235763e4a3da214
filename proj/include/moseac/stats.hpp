#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "moseac/errors.hpp"

namespace moseac {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }

// Inverse standard-normal CDF, algorithm AS 241 (Wichura 1988), PPND16.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw contract_error("normal_quantile: p must be in (0, 1)");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -x : x;
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank test for paired samples.
// ---------------------------------------------------------------------------

struct PairedResult {
  double w_statistic = 0.0;  // min(W+, W-)
  double w_plus = 0.0;
  double w_minus = 0.0;
  double z = 0.0;            // continuity-corrected, tie-corrected normal deviate
  double p = 1.0;            // one-sided p of the observed direction
  double p_exact = std::numeric_limits<double>::quiet_NaN();  // set when n_effective <= 12
  double p_normal = 1.0;     // normal approximation, always computed
  int n_effective = 0;
  bool exact = false;

  double p_two_sided() const { return std::min(1.0, 2.0 * p); }
};

// Number of sign assignments over the given ranks whose positive-rank sum
// stays at or below the threshold. Exact null distribution by enumeration.
inline std::uint64_t wilcoxon_exact_count(std::span<const double> ranks, double threshold) {
  const int n = static_cast<int>(ranks.size());
  if (n > 20) throw contract_error("wilcoxon_exact_count: enumeration capped at n = 20");
  std::uint64_t count = 0;
  const std::uint64_t total = 1ull << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double w_plus = 0.0;
    for (int j = 0; j < n; ++j) {
      if (mask & (1ull << j)) w_plus += ranks[j];
    }
    if (w_plus <= threshold + 1e-9) ++count;
  }
  return count;
}

// Paired signed-rank test of x against y. Zero differences are dropped
// (classic Wilcoxon), |d| is ranked with average ranks for ties, and
// W = min(W+, W-). p is one-sided for the observed direction: exact by full
// enumeration for n <= 12, otherwise the normal approximation with tie and
// continuity corrections, z = (W - n(n+1)/4 + 0.5) / sigma_W.
inline PairedResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw pairing_error("wilcoxon_signed_rank: samples differ in length");
  }
  std::vector<double> diffs;
  diffs.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back(d);
  }
  const int n = static_cast<int>(diffs.size());
  if (n == 0) {
    throw degenerate_data_error("wilcoxon_signed_rank: all differences are zero");
  }
  if (n < 5) {
    throw insufficient_data_error("wilcoxon_signed_rank: only " + std::to_string(n) +
                                  " non-zero differences (need 5)");
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&diffs](int a, int b) {
    return std::abs(diffs[a]) < std::abs(diffs[b]);
  });

  std::vector<double> rank(n, 0.0);
  double tie_correction = 0.0;  // sum of (t^3 - t) over tie groups
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && std::abs(diffs[order[j]]) == std::abs(diffs[order[i]])) ++j;
    const double avg_rank = 0.5 * (i + 1 + j);  // mean of ranks i+1 .. j
    for (int k = i; k < j; ++k) rank[order[k]] = avg_rank;
    const double t = j - i;
    tie_correction += t * t * t - t;
    i = j;
  }

  PairedResult res;
  res.n_effective = n;
  for (int i = 0; i < n; ++i) {
    if (diffs[i] > 0.0) {
      res.w_plus += rank[i];
    } else {
      res.w_minus += rank[i];
    }
  }
  res.w_statistic = std::min(res.w_plus, res.w_minus);

  const double dn = n;
  const double mean_w = dn * (dn + 1.0) / 4.0;
  const double var_w = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - tie_correction / 48.0;
  res.z = (res.w_statistic - mean_w + 0.5) / std::sqrt(var_w);
  res.p_normal = normal_cdf(res.z);

  if (n <= 12) {
    std::vector<double> sorted_ranks(rank.begin(), rank.end());
    const std::uint64_t hits = wilcoxon_exact_count(sorted_ranks, res.w_statistic);
    res.p_exact = static_cast<double>(hits) / static_cast<double>(1ull << n);
    res.p = res.p_exact;
    res.exact = true;
  } else {
    res.p = res.p_normal;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Shapiro-Wilk normality test, AS R94 (Royston 1995), complete samples.
// ---------------------------------------------------------------------------

namespace detail {

inline double as_poly(const double* c, int n, double x) {
  double v = c[0];
  double p = 1.0;
  for (int i = 1; i < n; ++i) {
    p *= x;
    v += c[i] * p;
  }
  return v;
}

}  // namespace detail

struct ShapiroWilkResult {
  double w = 0.0;
  double p = 0.0;
};

inline ShapiroWilkResult shapiro_wilk(std::span<const double> sample) {
  const int n = static_cast<int>(sample.size());
  if (n < 3) throw insufficient_data_error("shapiro_wilk: need at least 3 observations");
  if (n > 5000) throw contract_error("shapiro_wilk: approximation valid up to n = 5000");

  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (!(range > 1e-19)) {
    throw degenerate_data_error("shapiro_wilk: sample is (numerically) constant");
  }

  static constexpr double c1[6] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
  static constexpr double c2[6] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  static constexpr double c3[4] = {0.5440, -0.39978, 0.025054, -6.714e-4};
  static constexpr double c4[4] = {1.3822, -0.77857, 0.062767, -2.0322e-3};
  static constexpr double c5[4] = {-1.5861, -0.31082, -0.083751, 3.8915e-3};
  static constexpr double c6[3] = {-0.4803, -0.082676, 3.0302e-3};
  static constexpr double g[2] = {-2.273, 0.459};

  const int n2 = n / 2;
  const double an = n;
  std::vector<double> a(n2);

  if (n == 3) {
    a[0] = std::sqrt(0.5);
  } else {
    // expected normal order statistics via Blom-type scores, then Royston's
    // polynomial corrections to the first two coefficients
    const double an25 = an + 0.25;
    double summ2 = 0.0;
    for (int i = 1; i <= n2; ++i) {
      a[i - 1] = normal_quantile((i - 0.375) / an25);
      summ2 += a[i - 1] * a[i - 1];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = detail::as_poly(c1, 6, rsn) - a[0] / ssumm2;
    int first_unadjusted;
    double fac;
    if (n > 5) {
      const double a2 = -a[1] / ssumm2 + detail::as_poly(c2, 6, rsn);
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[0] = a1;
      a[1] = a2;
      first_unadjusted = 2;
    } else {
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
      a[0] = a1;
      first_unadjusted = 1;
    }
    for (int i = first_unadjusted; i < n2; ++i) a[i] = -a[i] / fac;
  }

  // W as the squared correlation between data and coefficients; computed as
  // w1 = 1 - W to keep precision for W near 1. Coefficient at (0-based)
  // position i is sign(i - j) * a[min(i, j)] with j = n-1-i, zero at center.
  double sa = -a[0];
  double sx = x[0] / range;
  for (int i = 1; i < n; ++i) {
    const int j = n - 1 - i;
    if (i != j) sa += (i > j ? 1.0 : -1.0) * a[std::min(i, j)];
    sx += x[i] / range;
  }
  sa /= n;
  sx /= n;
  double ssa = 0.0, ssx = 0.0, sax = 0.0;
  for (int i = 0; i < n; ++i) {
    const int j = n - 1 - i;
    const double asa = (i != j ? (i > j ? 1.0 : -1.0) * a[std::min(i, j)] : 0.0) - sa;
    const double xsx = x[i] / range - sx;
    ssa += asa * asa;
    ssx += xsx * xsx;
    sax += asa * xsx;
  }
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);

  ShapiroWilkResult res;
  res.w = 1.0 - w1;

  if (n == 3) {
    const double pi6 = 1.90985931710274;  // 6/pi
    const double stqr = 1.04719755119660;  // pi/3
    res.p = std::clamp(pi6 * (std::asin(std::sqrt(res.w)) - stqr), 0.0, 1.0);
    return res;
  }
  double y = std::log(w1);
  const double log_n = std::log(an);
  double m, s;
  if (n <= 11) {
    const double gamma = detail::as_poly(g, 2, an);
    if (y >= gamma) {
      res.p = 1e-19;
      return res;
    }
    y = -std::log(gamma - y);
    m = detail::as_poly(c3, 4, an);
    s = std::exp(detail::as_poly(c4, 4, an));
  } else {
    m = detail::as_poly(c5, 4, log_n);
    s = std::exp(detail::as_poly(c6, 3, log_n));
  }
  res.p = 1.0 - normal_cdf((y - m) / s);  // upper tail
  return res;
}

// ---------------------------------------------------------------------------
// Descriptive statistics.
// ---------------------------------------------------------------------------

struct Descriptives {
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
  std::optional<double> cov;  // absent when the mean is zero
};

inline Descriptives descriptives(std::span<const double> samples) {
  const int n = static_cast<int>(samples.size());
  if (n < 2) throw insufficient_data_error("descriptives: need at least 2 samples");
  double sum = 0.0;
  for (double v : samples) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  Descriptives d;
  d.n = n;
  d.mean = mean;
  d.sd = std::sqrt(ss / (n - 1));
  d.se = d.sd / std::sqrt(static_cast<double>(n));
  if (mean != 0.0) d.cov = d.sd / mean;
  return d;
}

}  // namespace moseac
