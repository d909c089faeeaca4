#include "reforacle/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace reforacle::stats {

namespace {

constexpr double kZ95 = 1.959964;

// Acklam's rational approximation of the normal quantile.
double acklam(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  if (p < low) {
    const double q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > 1 - low) {
    const double q = std::sqrt(-2 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

double log_choose(long n, long k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  double x = acklam(p);
  // Halley refinement against the exact CDF.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
  x = x - u / (1 + x * u / 2);
  return x;
}

Interval wilson_ci(long successes, long n, double confidence) {
  if (n < 1 || successes < 0 || successes > n) {
    throw DomainError("wilson_ci: need 0 <= successes <= n and n >= 1");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw DomainError("wilson_ci: confidence must lie in (0, 1)");
  }
  const double z = confidence == 0.95 ? kZ95 : normal_quantile(0.5 + confidence / 2);
  const double nn = static_cast<double>(n);
  const double phat = successes / nn;
  const double z2 = z * z;
  const double denom = 1 + z2 / nn;
  const double centre = (phat + z2 / (2 * nn)) / denom;
  const double half = z * std::sqrt(phat * (1 - phat) / nn + z2 / (4 * nn * nn)) / denom;
  Interval ci{std::clamp(centre - half, 0.0, 1.0), std::clamp(centre + half, 0.0, 1.0)};
  if (successes == 0) ci.lower = 0.0;
  if (successes == n) ci.upper = 1.0;
  return ci;
}

PairedCounts paired_counts(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) throw DomainError("paired_counts: vectors differ in length");
  PairedCounts c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) ++c.n11;
    else if (a[i]) ++c.n10;
    else if (b[i]) ++c.n01;
    else ++c.n00;
  }
  return c;
}

TestResult mcnemar_exact(const PairedCounts& c) {
  if (c.n11 < 0 || c.n10 < 0 || c.n01 < 0 || c.n00 < 0) {
    throw DomainError("mcnemar_exact: negative count");
  }
  TestResult r;
  const long d = c.n10 + c.n01;
  const long b = std::min(c.n10, c.n01);
  r.discordant = d;
  r.statistic = static_cast<double>(b);
  if (c.total() > 0) r.delta = static_cast<double>(c.n10 - c.n01) / c.total();
  if (d == 0) {
    r.p_value = 1.0;
    return r;
  }
  // log P[X <= b] via log-sum-exp over the binomial terms.
  std::vector<double> terms;
  for (long i = 0; i <= b; ++i) terms.push_back(log_choose(d, i) - d * std::log(2.0));
  const double m = *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  r.p_value = std::min(1.0, 2.0 * std::exp(m + std::log(s)));
  return r;
}

TestResult cochran_q(const std::vector<std::vector<bool>>& rows) {
  if (rows.empty()) throw DomainError("cochran_q: need at least one row");
  const std::size_t m = rows.front().size();
  if (m < 2) throw DomainError("cochran_q: need at least two columns");
  std::vector<double> col(m, 0.0);
  double total = 0.0;
  double row_sq = 0.0;
  for (const auto& row : rows) {
    if (row.size() != m) throw DomainError("cochran_q: ragged matrix");
    double r = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (row[j]) {
        col[j] += 1;
        r += 1;
      }
    }
    total += r;
    row_sq += r * r;
  }
  double col_sq = 0.0;
  for (double c : col) col_sq += c * c;
  const double k = static_cast<double>(m);
  TestResult res;
  res.df = static_cast<int>(m) - 1;
  const double denom = k * total - row_sq;
  if (denom == 0.0) {
    res.statistic = 0.0;
    res.p_value = 1.0;
    res.degenerate = true;
    return res;
  }
  res.statistic = (k - 1) * (k * col_sq - total * total) / denom;
  res.p_value = chi_square_sf(res.statistic, res.df);
  return res;
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("regularized_gamma_q: need a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < kMaxIter; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return std::clamp(1.0 - sum * std::exp(log_prefix), 0.0, 1.0);
  }
  constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return std::clamp(std::exp(log_prefix) * h, 0.0, 1.0);
}

double chi_square_sf(double x, double df) {
  if (!(df > 0.0)) throw DomainError("chi_square_sf: df must be positive");
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(df / 2.0, x / 2.0);
}

std::vector<double> holm_correct(const std::vector<double>& p_values) {
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("holm_correct: p-values must lie in [0, 1]");
  }
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double scaled = std::min(1.0, static_cast<double>(m - i) * p_values[order[i]]);
    running = std::max(running, scaled);
    adjusted[order[i]] = running;
  }
  return adjusted;
}

nlohmann::json stats_report(const std::vector<std::pair<std::string, std::vector<bool>>>& models,
                            double confidence) {
  using nlohmann::json;
  json out = {{"confidence", confidence},
              {"accuracy", json::array()},
              {"pairwise", json::array()}};
  if (models.empty()) return out;
  const std::size_t n = models.front().second.size();
  for (const auto& [name, v] : models) {
    if (v.size() != n) throw DomainError("stats_report: models cover different instance counts");
    const long correct = std::count(v.begin(), v.end(), true);
    json row = {{"model", name}, {"correct", correct}, {"n", static_cast<long>(n)}};
    if (n > 0) {
      const Interval ci = wilson_ci(correct, static_cast<long>(n), confidence);
      row["accuracy"] = static_cast<double>(correct) / n;
      row["ci_lower"] = ci.lower;
      row["ci_upper"] = ci.upper;
    }
    out["accuracy"].push_back(row);
  }

  std::vector<double> ps;
  for (std::size_t a = 0; a < models.size(); ++a) {
    for (std::size_t b = a + 1; b < models.size(); ++b) {
      const PairedCounts c = paired_counts(models[a].second, models[b].second);
      const TestResult t = mcnemar_exact(c);
      ps.push_back(t.p_value);
      out["pairwise"].push_back({{"a", models[a].first},
                                 {"b", models[b].first},
                                 {"n11", c.n11},
                                 {"n10", c.n10},
                                 {"n01", c.n01},
                                 {"n00", c.n00},
                                 {"delta", t.delta ? json(*t.delta) : json(nullptr)},
                                 {"p", t.p_value}});
    }
  }
  const std::vector<double> holm = holm_correct(ps);
  for (std::size_t i = 0; i < holm.size(); ++i) out["pairwise"][i]["p_holm"] = holm[i];

  if (models.size() >= 2 && n > 0) {
    std::vector<std::vector<bool>> rows(n, std::vector<bool>(models.size()));
    for (std::size_t j = 0; j < models.size(); ++j) {
      for (std::size_t i = 0; i < n; ++i) rows[i][j] = models[j].second[i];
    }
    const TestResult q = cochran_q(rows);
    out["cochran"] = {{"Q", q.statistic}, {"df", q.df}, {"p", q.p_value},
                      {"degenerate", q.degenerate}};
  }
  return out;
}

}  // namespace reforacle::stats
