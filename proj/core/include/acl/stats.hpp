#pragma once

#include <vector>

namespace acl {

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

// Percentage of returns strictly above the threshold. Throws
// StatisticsError on an empty list.
double pct_mastered(const std::vector<double>& returns, double threshold = 230.0);

double mean(const std::vector<double>& xs);
// Unbiased sample variance (n - 1 denominator); 0 for fewer than 2 values.
double sample_variance(const std::vector<double>& xs);
double standard_error(const std::vector<double>& xs);

// Regularized incomplete beta I_x(a, b), continued fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided tail probability of Student's t with `df` degrees of freedom.
double student_t_two_sided(double t, double df);

// Welch's unequal-variance t-test. Throws StatisticsError when a sample
// has fewer than two values or both samples are constant.
WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace acl
