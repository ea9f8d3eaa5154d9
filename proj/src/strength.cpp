#include "wmplace/strength.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "wmplace/errors.hpp"

namespace wmp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_counts(std::int64_t n, std::int64_t x, double p, const char *what) {
  if (n < 0 || x < 0 || x > n) {
    throw DomainError(std::string(what) + ": threshold " + std::to_string(x) + " outside [0, " +
                      std::to_string(n) + "]");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(what) + ": probability outside [0, 1]");
}

// k * log(q) with 0 * log(0) = 0.
double power_term(std::int64_t k, double q) {
  if (k == 0) return 0.0;
  if (q == 0.0) return kNegInf;
  return static_cast<double>(k) * std::log(q);
}

double log_sum_exp(const std::vector<double> &terms) {
  double m = kNegInf;
  for (double t : terms) m = std::max(m, t);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

// sum_{i=lo}^{hi} C(n,i) p^i q^(e(i)), e(i) = exp_base - i.
double log_binomial_sum(std::int64_t n, std::int64_t lo, std::int64_t hi, double p, std::int64_t exp_base) {
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(std::max<std::int64_t>(0, hi - lo + 1)));
  for (std::int64_t i = lo; i <= hi; ++i) {
    terms.push_back(log_binomial(n, i) + power_term(i, p) + power_term(exp_base - i, 1.0 - p));
  }
  return log_sum_exp(terms);
}

}  // namespace

double log_binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return kNegInf;
  k = std::min(k, n - k);
  if (n <= 64) {
    unsigned __int128 r = 1;
    for (std::int64_t i = 1; i <= k; ++i) r = r * static_cast<unsigned __int128>(n - k + i) / i;
    return std::log(static_cast<double>(r));
  }
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double log_strength_gw(std::int64_t n, std::int64_t x, double p) {
  check_counts(n, x, p, "strength_gw");
  if (x == 0) return 0.0;
  return std::min(0.0, log_binomial_sum(n, x, n, p, n));
}

double strength_gw(std::int64_t n, std::int64_t x, double p) { return std::exp(log_strength_gw(n, x, p)); }

double log_strength_dw(std::int64_t c_wx, std::int64_t c_wy, std::int64_t x, std::int64_t y, double p_x,
                       double p_y) {
  check_counts(c_wx, x, p_x, "strength_dw");
  check_counts(c_wy, y, p_y, "strength_dw");
  return log_strength_gw(c_wx, x, p_x) + log_strength_gw(c_wy, y, p_y);
}

double strength_dw(std::int64_t c_wx, std::int64_t c_wy, std::int64_t x, std::int64_t y, double p_x,
                   double p_y) {
  return std::exp(log_strength_dw(c_wx, c_wy, x, y, p_x, p_y));
}

double log_strength_combined(double p_cg, double p_cd) {
  if (!(p_cg >= 0.0 && p_cg <= 1.0 && p_cd >= 0.0 && p_cd <= 1.0)) {
    throw DomainError("strength_combined: probabilities outside [0, 1]");
  }
  if (p_cg == 0.0 || p_cd == 0.0) return kNegInf;
  return std::log(p_cg) + std::log(p_cd);
}

double strength_combined(double p_cg, double p_cd) { return std::exp(log_strength_combined(p_cg, p_cd)); }

double strength_empirical(std::int64_t c_w, std::int64_t x, double p) {
  check_counts(c_w, x, p, "strength_empirical");
  return std::exp(log_binomial_sum(c_w, 0, x, p, x));
}

double strength_empirical_standard(std::int64_t c_w, std::int64_t x, double p) {
  check_counts(c_w, x, p, "strength_empirical_standard");
  return std::min(1.0, std::exp(log_binomial_sum(c_w, 0, x, p, c_w)));
}

}  // namespace wmp
