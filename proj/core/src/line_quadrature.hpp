#pragma once

#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "edcascade/errors.hpp"

namespace edcascade::detail {

inline constexpr double kSegment = 4.0;
inline constexpr int kMaxSegments = 60;

// Integral over the whole real line of an integrand concentrated near `center`,
// accumulated in fixed-width segments walking outwards until two consecutive
// segments are negligible.
template <class F>
double integrate_line(F f, double center, double rel_tol, double* error) {
    double err_total = 0.0;
    auto segment = [&](double lo, double hi, double& l1) {
        double err = 0.0;
        const double v =
            boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 10, rel_tol,
                                                                          &err, &l1);
        err_total += err;
        return v;
    };
    double l1 = 0.0;
    double total = segment(center - 0.5 * kSegment, center + 0.5 * kSegment, l1);
    double mass = l1;
    for (int dir : {1, -1}) {
        int quiet = 0;
        for (int k = 0;; ++k) {
            if (k >= kMaxSegments) {
                throw DivergentIntegralError("integrand tail does not decay (still " +
                                             std::to_string(l1) + " in the last segment)");
            }
            const double near = center + dir * (0.5 + k) * kSegment;
            const double far = near + dir * kSegment;
            total += dir > 0 ? segment(near, far, l1) : segment(far, near, l1);
            mass += l1;
            quiet = l1 <= 1e-17 * mass ? quiet + 1 : 0;
            if (quiet >= 2) break;
        }
    }
    if (error) *error = err_total;
    return total;
}

}  // namespace edcascade::detail
