#pragma once

#include <cstdint>

namespace wmp {

// Natural log of the binomial coefficient: exact integers up to n = 64,
// log-gamma beyond.
double log_binomial(std::int64_t n, std::int64_t k);

// Upper binomial tail sum_{i=x}^{n} C(n,i) p^i (1-p)^(n-i). DomainError unless
// 0 <= x <= n and p in [0, 1]. The log form is -inf for a zero tail.
double log_strength_gw(std::int64_t n, std::int64_t x, double p);
double strength_gw(std::int64_t n, std::int64_t x, double p);

// Product of the x- and y-axis upper tails over |C_wx| and |C_wy| trials.
double log_strength_dw(std::int64_t c_wx, std::int64_t c_wy, std::int64_t x, std::int64_t y, double p_x,
                       double p_y);
double strength_dw(std::int64_t c_wx, std::int64_t c_wy, std::int64_t x, std::int64_t y, double p_x,
                   double p_y);

// P_cg * P_cd, summed in log space.
double log_strength_combined(double p_cg, double p_cd);
double strength_combined(double p_cg, double p_cd);

// sum_{i=0}^{x} C(c_w,i) p^i (1-p)^(x-i), as printed; may exceed 1.
double strength_empirical(std::int64_t c_w, std::int64_t x, double p);
// Standard lower tail sum_{i=0}^{x} C(c_w,i) p^i (1-p)^(c_w-i).
double strength_empirical_standard(std::int64_t c_w, std::int64_t x, double p);

}  // namespace wmp
