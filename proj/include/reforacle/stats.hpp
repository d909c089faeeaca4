#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace reforacle::stats {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Inverse standard normal CDF. Rational approximation refined with one
/// Halley step; accurate to ~1e-15 in the central region.
double normal_quantile(double p);

/// Wilson score interval. Uses z = 1.959964 when confidence == 0.95.
Interval wilson_ci(long successes, long n, double confidence = 0.95);

struct PairedCounts {
  long n11 = 0;  // both correct
  long n10 = 0;  // A only
  long n01 = 0;  // B only
  long n00 = 0;  // neither

  long total() const { return n11 + n10 + n01 + n00; }
};

/// Contingency counts for two equally long correctness vectors.
PairedCounts paired_counts(const std::vector<bool>& a, const std::vector<bool>& b);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::optional<double> delta;
  long discordant = 0;  // McNemar only
  int df = 0;           // Cochran only
  bool degenerate = false;
};

/// Two-sided exact McNemar: p = min(1, 2 P[Bin(d, 1/2) <= min(n10, n01)]),
/// statistic = min(n10, n01), delta = (n10 - n01) / N.
TestResult mcnemar_exact(const PairedCounts& c);

/// Cochran's Q over an N x M binary matrix (rows are instances). When the
/// denominator vanishes Q is undefined: returns Q = 0, p = 1, degenerate.
TestResult cochran_q(const std::vector<std::vector<bool>>& rows);

/// Regularized upper incomplete gamma Q(a, x): series for x < a + 1,
/// Lentz continued fraction otherwise.
double regularized_gamma_q(double a, double x);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double df);

/// Holm step-down adjustment; results returned in input order.
std::vector<double> holm_correct(const std::vector<double>& p_values);

/// Per-model Wilson rows, all pairwise McNemar tests with Holm adjustment,
/// and Cochran's Q across all models. Vectors must have equal length.
nlohmann::json stats_report(const std::vector<std::pair<std::string, std::vector<bool>>>& models,
                            double confidence = 0.95);

}  // namespace reforacle::stats
