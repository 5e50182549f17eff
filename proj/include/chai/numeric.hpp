#pragma once
// Small numeric helpers shared across modules.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace chai {

inline double log_sum_exp(std::span<const double> xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

// In-place softmax of `xs` scaled by `scale`. A zero scale gives the uniform
// distribution even when some entries are -inf.
inline void softmax_inplace(std::span<double> xs, double scale = 1.0) {
    const auto scaled = [scale](double x) { return scale == 0.0 ? 0.0 : scale * x; };
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, scaled(x));
    double s = 0.0;
    for (double& x : xs) {
        x = std::exp(scaled(x) - m);
        s += x;
    }
    for (double& x : xs) x /= s;
}

// Turns log weights into normalized probabilities.
inline std::vector<double> normalize_log(std::span<const double> log_weights) {
    std::vector<double> p(log_weights.begin(), log_weights.end());
    softmax_inplace(p);
    return p;
}

// p <- eps * uniform + (1 - eps) * p
inline void mix_uniform(std::span<double> p, double eps) {
    if (eps <= 0.0) return;
    const double floor = eps / static_cast<double>(p.size());
    for (double& x : p) x = floor + (1.0 - eps) * x;
}

inline double total_variation(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return 0.5 * d;
}

}  // namespace chai
