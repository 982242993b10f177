#include "edcascade/mellin.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "edcascade/errors.hpp"
#include "edcascade/specfun.hpp"

namespace edcascade::mellin {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Search half-width used when one side of the strip is unbounded.
constexpr double kOpenStripReach = 1000.0;

using cplx = std::complex<double>;

std::string describe(const GParameters& p) {
    std::ostringstream os;
    os << "G^{" << p.m << "," << p.n << "}_{" << p.a.size() << "," << p.b.size() << "}";
    return os.str();
}

bool near_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

}  // namespace

GSpec::GSpec(GParameters params)
    : m_(params.m), n_(params.n), a_(std::move(params.a)), b_(std::move(params.b)) {
    GParameters view{m_, n_, a_, b_};
    if (m_ < 0 || n_ < 0) {
        throw ParameterError(describe(view) + ": m and n must be nonnegative");
    }
    if (m_ > q()) {
        throw ParameterError(describe(view) + ": m = " + std::to_string(m_) +
                             " exceeds q = " + std::to_string(q()));
    }
    if (n_ > p()) {
        throw ParameterError(describe(view) + ": n = " + std::to_string(n_) +
                             " exceeds p = " + std::to_string(p()));
    }
    for (double v : a_) {
        if (!std::isfinite(v)) throw ParameterError(describe(view) + ": non-finite a parameter");
    }
    for (double v : b_) {
        if (!std::isfinite(v)) throw ParameterError(describe(view) + ": non-finite b parameter");
    }
    // Right poles s = b_j + k (j <= m), left poles s = a_i - 1 - k (i <= n):
    // they coincide iff a_i - b_j is a positive integer.
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < m_; ++j) {
            const double diff = a_[i] - b_[j];
            if (diff > 0.5 && near_integer(diff)) {
                std::ostringstream os;
                os << describe(view) << ": pole of Gamma(b_" << j + 1 << " - s) coincides with a pole"
                   << " of Gamma(1 - a_" << i + 1 << " + s) (a - b = " << diff << ")";
                throw ParameterError(os.str());
            }
        }
    }
    // Repeated parameters (the cascaded kernel) share one log-gamma call.
    std::map<std::pair<int, double>, int> groups;
    for (int j = 0; j < q(); ++j) ++groups[{j < m_ ? 0 : 1, b_[j]}];
    for (int i = 0; i < p(); ++i) ++groups[{i < n_ ? 2 : 3, a_[i]}];
    for (const auto& [key, count] : groups) {
        const auto [kind, v] = key;
        const double w = static_cast<double>(count);
        switch (kind) {
            case 0: factors_.push_back({v, -1.0, w}); break;
            case 1: factors_.push_back({1.0 - v, 1.0, -w}); break;
            case 2: factors_.push_back({1.0 - v, 1.0, w}); break;
            default: factors_.push_back({v, -1.0, -w}); break;
        }
    }

    strip_upper_ = kInf;
    for (int j = 0; j < m_; ++j) strip_upper_ = std::min(strip_upper_, b_[j]);
    strip_lower_ = -kInf;
    for (int i = 0; i < n_; ++i) strip_lower_ = std::max(strip_lower_, a_[i] - 1.0);
}

std::complex<double> GSpec::log_kernel(std::complex<double> s) const {
    cplx acc = 0.0;
    for (const Factor& f : factors_) acc += f.weight * specfun::log_gamma(f.offset + f.slope * s);
    return acc;
}

GSpec validate_gspec(GParameters params) { return GSpec(std::move(params)); }

GSpec cascaded_kernel_spec(int order) {
    if (order < 1) throw DomainError("cascaded kernel: order N must be >= 1");
    return GSpec(GParameters{order, 0, {}, std::vector<double>(static_cast<std::size_t>(order), 1.0)});
}

void validate_contour_config(const ContourConfig& cfg) {
    if (cfg.points < 64) throw ParameterError("contour: at least 64 quadrature nodes required");
    if (!(cfg.height > 0.0)) throw ParameterError("contour: truncation height must be positive");
    if (!(cfg.rel_tol > 0.0)) throw ParameterError("contour: rel_tol must be positive");
    if (cfg.max_refinements < 0) throw ParameterError("contour: max_refinements must be >= 0");
}

double saddle_abscissa(const GSpec& spec, double log_x, double margin) {
    double lo = spec.strip_lower();
    double hi = spec.strip_upper();
    if (!(lo < hi)) {
        throw ParameterError("meijer_g: no vertical contour separates the pole families");
    }
    const double width = hi - lo;
    const double pad = std::min(margin, 0.25 * width);
    if (std::isinf(lo) && std::isinf(hi)) {
        lo = -kOpenStripReach;
        hi = kOpenStripReach;
    } else if (std::isinf(lo)) {
        lo = hi - kOpenStripReach;
        hi -= pad;
    } else if (std::isinf(hi)) {
        hi = lo + kOpenStripReach;
        lo += pad;
    } else {
        lo += pad;
        hi -= pad;
    }
    auto magnitude = [&](double c) { return spec.log_kernel(cplx(c, 0.0)).real() + c * log_x; };
    const auto [c, f] = boost::math::tools::brent_find_minima(magnitude, lo, hi, 24);
    (void)f;
    return c;
}

ContourResult meijer_g_detailed(const GSpec& spec, double x, const ContourConfig& cfg) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("meijer_g: x must be positive and finite");
    validate_contour_config(cfg);
    if (spec.m() == 0 && spec.n() == 0) {
        // No poles at all: the contour can be pushed to infinity.
        return {0.0, 0.0, 0.0, 0.0, 0};
    }
    if (!(spec.decay_order() > 0.0)) {
        throw ParameterError("meijer_g: vertical contour does not converge (m + n <= (p + q)/2)");
    }

    const double log_x = std::log(x);
    double c;
    if (std::isnan(cfg.abscissa)) {
        c = saddle_abscissa(spec, log_x);
    } else {
        c = cfg.abscissa;
        if (!(c > spec.strip_lower() && c < spec.strip_upper())) {
            throw ParameterError("meijer_g: abscissa " + std::to_string(c) +
                                 " does not separate the pole families");
        }
    }

    auto integrand = [&](double tau) {
        const cplx s(c, tau);
        return std::exp(spec.log_kernel(s) + s * log_x).real();
    };

    const double f0 = spec.log_kernel(cplx(c, 0.0)).real() + c * log_x;
    const double peak = std::exp(f0);

    // Width of the Gaussian-like bump at the saddle from the local curvature.
    const double pole_gap = std::min(c - spec.strip_lower(), spec.strip_upper() - c);
    const double dc = std::min(1e-2 * std::max(1.0, std::abs(c)), 0.5 * pole_gap);
    const double fp = spec.log_kernel(cplx(c + dc, 0.0)).real() + (c + dc) * log_x;
    const double fm = spec.log_kernel(cplx(c - dc, 0.0)).real() + (c - dc) * log_x;
    const double curvature = (fp - 2.0 * f0 + fm) / (dc * dc);
    const double width = curvature > 1e-8 ? 1.0 / std::sqrt(curvature) : 1.0;

    double height = std::max(cfg.height, 12.0 * width);
    double h = std::min({height / cfg.points, 0.5 * pole_gap, 0.25 * width});

    // Truncation: extend until the integrand envelope near the cut is negligible.
    auto envelope = [&](double tau) {
        const cplx s(c, tau);
        return std::exp((spec.log_kernel(s) + s * log_x).real());
    };
    int budget = cfg.max_refinements;
    while (envelope(height) * std::max(1.0, width) > cfg.rel_tol * 1e-4 * peak) {
        if (budget-- <= 0) {
            throw NonConvergenceError("meijer_g: integrand does not decay along the contour",
                                      envelope(0.5 * height), envelope(height));
        }
        height *= 2.0;
    }

    // Composite trapezoid on [0, height]; halving h reuses all earlier nodes.
    auto count = [&](double step) { return static_cast<long>(std::ceil(height / step)); };
    long nodes = count(h);
    h = height / static_cast<double>(nodes);
    double sum = 0.5 * integrand(0.0);
    for (long k = 1; k <= nodes; ++k) sum += integrand(k * h);
    double estimate = sum * h / std::numbers::pi;
    long total_nodes = nodes + 1;

    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * peak * width;
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (int level = 0;; ++level) {
        const double step = h;
        h *= 0.5;
        double added = 0.0;
        for (long k = 0; k < nodes; ++k) added += integrand((2 * k + 1) * h);
        sum += added;
        nodes *= 2;
        total_nodes += nodes / 2;
        previous = estimate;
        estimate = sum * h / std::numbers::pi;
        const double diff = std::abs(estimate - previous);
        if (diff <= cfg.rel_tol * std::abs(estimate) || diff <= floor) {
            return {estimate, diff, c, height, static_cast<int>(total_nodes)};
        }
        if (level >= cfg.max_refinements + 4 || step < 1e-6) break;
    }
    throw NonConvergenceError("meijer_g: contour quadrature did not converge", previous, estimate);
}

double meijer_g(const GSpec& spec, double x, const ContourConfig& cfg) {
    return meijer_g_detailed(spec, x, cfg).value;
}

double cascaded_kernel(int order, double x, const ContourConfig& cfg) {
    if (order < 1) throw DomainError("cascaded kernel: order N must be >= 1");
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("cascaded kernel: x must be positive");
    if (order == 1) return x * std::exp(-x);
    if (order == 2) {
        const double arg = 2.0 * std::sqrt(x);
        return arg > 745.0 ? 0.0 : 2.0 * x * specfun::bessel_k(0.0, arg);
    }
    return meijer_g(cascaded_kernel_spec(order), x, cfg);
}

}  // namespace edcascade::mellin
