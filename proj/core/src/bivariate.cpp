#include "edcascade/bivariate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "edcascade/errors.hpp"

namespace edcascade::bivariate {
namespace {

using cplx = std::complex<double>;

// Reach of the abscissa search when a pole family is empty.
constexpr double kOpenReach = 50.0;

struct Strip {
    double lo1, hi1, lo2, hi2, lo_sum;
};

double capped(double v, double fallback) { return std::isinf(v) ? fallback : v; }

// Largest margin d such that every numerator gamma stays d away from its poles.
double max_margin(const Strip& st) {
    auto feasible = [&](double d) {
        const double a1 = st.lo1 + d;
        const double b1 = st.hi1 - d;
        const double a2 = st.lo2 + d;
        const double b2 = st.hi2 - d;
        return a1 <= b1 && a2 <= b2 && b1 + b2 >= st.lo_sum + d;
    };
    if (!feasible(0.0)) return -1.0;
    double lo = 0.0;
    double hi = 1.0;
    while (feasible(hi) && hi < 1e3) hi *= 2.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

struct Abscissas {
    double c1;
    double c2;
    double margin;
};

Abscissas choose_abscissas(const BivariateGSpec& spec, const ComplexArgumentPair& args,
                           const BivariateConfig& cfg) {
    Strip st{spec.first().strip_lower(), spec.first().strip_upper(), spec.second().strip_lower(),
             spec.second().strip_upper(), spec.coupling().strip_lower()};
    const double best = max_margin(st);
    if (!(best > 0.0)) {
        throw ParameterError(
            "bivariate_g: no pair of vertical contours separates the pole families "
            "(coupling block lower bound " + std::to_string(st.lo_sum) + ")");
    }
    const double d = std::min(0.25, 0.5 * best);

    const bool fixed1 = !std::isnan(cfg.abscissa1);
    const bool fixed2 = !std::isnan(cfg.abscissa2);
    auto margin_of = [&](double c1, double c2) {
        return std::min({c1 - st.lo1, st.hi1 - c1, c2 - st.lo2, st.hi2 - c2, c1 + c2 - st.lo_sum});
    };
    if (fixed1 && fixed2) {
        const double m = margin_of(cfg.abscissa1, cfg.abscissa2);
        if (!(m > 0.0)) {
            throw ParameterError("bivariate_g: supplied abscissas do not separate the pole families");
        }
        return {cfg.abscissa1, cfg.abscissa2, m};
    }

    const double l1 = std::log(std::abs(args.z1));
    const double l2 = std::log(std::abs(args.z2));
    auto objective = [&](double c1, double c2) {
        return (spec.coupling().log_kernel(cplx(c1 + c2, 0.0)) +
                spec.first().log_kernel(cplx(c1, 0.0)) + spec.second().log_kernel(cplx(c2, 0.0)))
                   .real() +
               c1 * l1 + c2 * l2;
    };

    // Start from a feasible point at margin d, then alternate 1-D minimizations.
    const double lo1 = capped(st.lo1 + d, st.hi1 - d - kOpenReach);
    const double hi1 = capped(st.hi1 - d, lo1 + kOpenReach);
    const double lo2 = capped(st.lo2 + d, st.hi2 - d - kOpenReach);
    const double hi2 = capped(st.hi2 - d, lo2 + kOpenReach);
    double c1 = fixed1 ? cfg.abscissa1 : hi1;
    double c2 = fixed2 ? cfg.abscissa2 : hi2;
    for (int sweep = 0; sweep < 8; ++sweep) {
        if (!fixed1) {
            const double a = std::max(lo1, st.lo_sum + d - c2);
            if (a < hi1) {
                c1 = boost::math::tools::brent_find_minima([&](double v) { return objective(v, c2); },
                                                           a, hi1, 20)
                         .first;
            }
        }
        if (!fixed2) {
            const double a = std::max(lo2, st.lo_sum + d - c1);
            if (a < hi2) {
                c2 = boost::math::tools::brent_find_minima([&](double v) { return objective(c1, v); },
                                                           a, hi2, 20)
                         .first;
            }
        }
    }
    const double m = margin_of(c1, c2);
    if (!(m > 0.0)) {
        throw ParameterError("bivariate_g: could not place contours between the pole families");
    }
    return {c1, c2, m};
}

struct GridSum {
    cplx value;
    double abs_sum;
    double boundary1;  // max |term| on the tau1 = +-T1 edges
    double boundary2;  // max |term| on the tau2 = +-T2 edges
    double peak;
};

class TensorQuadrature {
public:
    TensorQuadrature(const BivariateGSpec& spec, const ComplexArgumentPair& args, double c1,
                     double c2)
        : spec_(spec), log_z1_(std::log(args.z1)), log_z2_(std::log(args.z2)), c1_(c1), c2_(c2) {
        ref1_ = (spec.first().log_kernel(cplx(c1, 0.0)) + c1 * log_z1_).real();
        ref2_ = (spec.second().log_kernel(cplx(c2, 0.0)) + c2 * log_z2_).real();
        ref0_ = spec.coupling().log_kernel(cplx(c1 + c2, 0.0)).real();
    }

    double log_scale() const { return ref0_ + ref1_ + ref2_; }

    // Trapezoid sum on [-T1,T1] x [-T2,T2] with steps base*2^-k1, base*2^-k2.
    GridSum evaluate(double base, int k1, int k2, double t1, double t2) const {
        const int kmax = std::max(k1, k2);
        const double g = base / std::ldexp(1.0, kmax);
        const long r1 = 1L << (kmax - k1);
        const long r2 = 1L << (kmax - k2);
        const double h1 = g * static_cast<double>(r1);
        const double h2 = g * static_cast<double>(r2);
        const long n1 = static_cast<long>(std::ceil(t1 / h1));
        const long n2 = static_cast<long>(std::ceil(t2 / h2));

        std::vector<cplx> a(static_cast<std::size_t>(2 * n1 + 1));
        for (long i = -n1; i <= n1; ++i) {
            const cplx s(c1_, static_cast<double>(i) * h1);
            a[static_cast<std::size_t>(i + n1)] =
                std::exp(spec_.first().log_kernel(s) + s * log_z1_ - ref1_);
        }
        std::vector<cplx> b(static_cast<std::size_t>(2 * n2 + 1));
        for (long j = -n2; j <= n2; ++j) {
            const cplx s(c2_, static_cast<double>(j) * h2);
            b[static_cast<std::size_t>(j + n2)] =
                std::exp(spec_.second().log_kernel(s) + s * log_z2_ - ref2_);
        }
        const long nx = n1 * r1 + n2 * r2;
        std::vector<cplx> x(static_cast<std::size_t>(2 * nx + 1));
        for (long k = -nx; k <= nx; ++k) {
            const cplx w(c1_ + c2_, static_cast<double>(k) * g);
            x[static_cast<std::size_t>(k + nx)] = std::exp(spec_.coupling().log_kernel(w) - ref0_);
        }

        GridSum out{0.0, 0.0, 0.0, 0.0, 0.0};
        for (long i = -n1; i <= n1; ++i) {
            const cplx ai = a[static_cast<std::size_t>(i + n1)];
            cplx row = 0.0;
            double row_abs = 0.0;
            double row_max = 0.0;
            double edge2 = 0.0;
            for (long j = -n2; j <= n2; ++j) {
                const cplx term = b[static_cast<std::size_t>(j + n2)] *
                                  x[static_cast<std::size_t>(i * r1 + j * r2 + nx)];
                row += term;
                const double mag = std::abs(term);
                row_abs += mag;
                row_max = std::max(row_max, mag);
                if (j == -n2 || j == n2) edge2 = std::max(edge2, mag);
            }
            const double amag = std::abs(ai);
            out.value += ai * row;
            out.abs_sum += amag * row_abs;
            out.peak = std::max(out.peak, amag * row_max);
            out.boundary2 = std::max(out.boundary2, amag * edge2);
            if (i == -n1 || i == n1) out.boundary1 = std::max(out.boundary1, amag * row_max);
        }
        const double weight = h1 * h2 / (4.0 * std::numbers::pi * std::numbers::pi);
        out.value *= weight;
        out.abs_sum *= weight;
        return out;
    }

private:
    const BivariateGSpec& spec_;
    cplx log_z1_;
    cplx log_z2_;
    double c1_;
    double c2_;
    double ref0_ = 0.0;
    double ref1_ = 0.0;
    double ref2_ = 0.0;
};

}  // namespace

BivariateGSpec::BivariateGSpec(mellin::GParameters coupling, mellin::GParameters first,
                               mellin::GParameters second)
    : coupling_(std::move(coupling)), first_(std::move(first)), second_(std::move(second)) {
    if (coupling_.m() != 0) {
        throw ParameterError("bivariate: coupling block must have m = 0");
    }
}

BivariateResult bivariate_g(const BivariateGSpec& spec, const ComplexArgumentPair& args,
                            const BivariateConfig& cfg) {
    if (args.z1 == 0.0 || args.z2 == 0.0) {
        throw DomainError("bivariate_g: both arguments must be nonzero");
    }
    if (cfg.points < 64 || !(cfg.height > 0.0) || !(cfg.rel_tol > 0.0)) {
        throw ParameterError("bivariate_g: invalid quadrature configuration");
    }
    const Abscissas ab = choose_abscissas(spec, args, cfg);
    const TensorQuadrature quad(spec, args, ab.c1, ab.c2);

    double t1 = cfg.height;
    double t2 = cfg.height;
    const double base = 2.0 * cfg.height / cfg.points;
    int k1 = 0;
    int k2 = 0;

    // Truncation: the edges of the box must be negligible against the peak.
    const double edge_tol = 1e-3 * cfg.rel_tol;
    GridSum current = quad.evaluate(base, k1, k2, t1, t2);
    auto require_finite = [](const GridSum& g) {
        if (!std::isfinite(g.value.real()) || !std::isfinite(g.value.imag()) ||
            !std::isfinite(g.abs_sum)) {
            throw OverflowError("bivariate_g: integrand is not finite on the contours");
        }
    };
    require_finite(current);
    for (int grow = 0;; ++grow) {
        const bool bad1 = current.boundary1 > edge_tol * current.peak;
        const bool bad2 = current.boundary2 > edge_tol * current.peak;
        if (!bad1 && !bad2) break;
        if (grow >= 3) {
            throw NonConvergenceError(
                "bivariate_g: integrand does not decay along the contours (vertical "
                "Mellin-Barnes representation diverges for these blocks/arguments)",
                current.boundary1 / current.peak, current.boundary2 / current.peak);
        }
        if (bad1) t1 *= 2.0;
        if (bad2) t2 *= 2.0;
        current = quad.evaluate(base, k1, k2, t1, t2);
        require_finite(current);
    }

    const double scale = std::exp(quad.log_scale());
    BivariateResult result{};
    result.abscissa1 = ab.c1;
    result.abscissa2 = ab.c2;

    for (int level = 0; level < cfg.max_refinements; ++level) {
        const GridSum finer1 = quad.evaluate(base, k1 + 1, k2, t1, t2);
        const GridSum finer2 = quad.evaluate(base, k1, k2 + 1, t1, t2);
        const double e1 = std::abs(finer1.value - current.value);
        const double e2 = std::abs(finer2.value - current.value);
        if (e1 >= e2) {
            ++k1;
            current = finer1;
        } else {
            ++k2;
            current = finer2;
        }
        const double diff = std::max(e1, e2);
        result.refinement_diffs.push_back(diff * scale);
        const double floor = 1e-14 * current.abs_sum;
        if (diff <= cfg.rel_tol * std::abs(current.value) || diff <= floor) {
            result.value = current.value * scale;
            result.error_estimate = diff * scale;
            result.nodes1 = 2 * static_cast<int>(std::ceil(t1 / (base / std::ldexp(1.0, k1)))) + 1;
            result.nodes2 = 2 * static_cast<int>(std::ceil(t2 / (base / std::ldexp(1.0, k2)))) + 1;
            return result;
        }
    }
    const auto& diffs = result.refinement_diffs;
    throw NonConvergenceError("bivariate_g: tensor quadrature did not converge",
                              diffs.size() > 1 ? diffs[diffs.size() - 2] : 0.0,
                              diffs.empty() ? 0.0 : diffs.back());
}

double real_part_checked(std::complex<double> value, double tol) {
    if (std::abs(value.imag()) <= tol * std::abs(value.real()) + 1e-12) return value.real();
    throw BranchInconsistencyError("imaginary part " + std::to_string(value.imag()) +
                                   " is not negligible against real part " +
                                   std::to_string(value.real()));
}

}  // namespace edcascade::bivariate
