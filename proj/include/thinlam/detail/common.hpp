#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace thinlam {

using Point = std::vector<double>;

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline void internal_check(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

inline double sqr(double x) { return x * x; }

inline double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Quintic smoothstep: C^2, s(0)=0, s(1)=1, zero first and second
// derivatives at both ends. Max slope 15/8 at s=1/2.
inline double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

inline double smoothstep_deriv(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 30.0 * t * t * (1.0 + t * (-2.0 + t));
}

inline constexpr double kSmoothstepMaxSlope = 15.0 / 8.0;

}  // namespace detail
}  // namespace thinlam
