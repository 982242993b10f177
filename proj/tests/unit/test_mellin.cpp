#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "edcascade/detection.hpp"
#include "edcascade/errors.hpp"
#include "edcascade/mellin.hpp"

using namespace edcascade;
using namespace edcascade::mellin;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

// Densities of products of unit-mean exponentials.
double p1(double x) { return std::exp(-x); }
double p2(double x) { return 2.0 * boost::math::cyl_bessel_k(0, 2.0 * std::sqrt(x)); }

// Density of a product X*Y from the densities of X and Y.
template <class F, class G>
double product_density(F fx, G fy, double z) {
    boost::math::quadrature::exp_sinh<double> integrator;
    auto f = [&](double y) {
        if (y <= 0.0 || !std::isfinite(y)) return 0.0;
        const double v = fx(z / y) * fy(y) / y;
        return std::isfinite(v) ? v : 0.0;
    };
    return integrator.integrate(f, 1e-13);
}

// x p_N(x) via convolution in the Mellin sense.
double kernel_oracle(int order, double x) {
    switch (order) {
        case 1: return x * p1(x);
        case 2: return x * p2(x);
        case 3: return x * product_density(p2, p1, x);
        case 4: return x * product_density(p2, p2, x);
        default: return std::nan("");
    }
}

}  // namespace

TEST(GSpec, IndexBoundsAndPoleCoincidence) {
    EXPECT_THROW(GSpec({2, 0, {}, {1.0}}), ParameterError);
    EXPECT_THROW(GSpec({0, 2, {1.0}, {}}), ParameterError);
    EXPECT_THROW(GSpec({-1, 0, {}, {1.0}}), ParameterError);
    EXPECT_THROW(GSpec({1, 0, {}, {std::nan("")}}), ParameterError);
    // poles of G(0 - s) and G(1 - 1 + s) meet at s = 0
    EXPECT_THROW(GSpec({1, 1, {1.0}, {0.0}}), ParameterError);
    EXPECT_NO_THROW(GSpec({1, 1, {0.3}, {0.5}}));
}

TEST(GSpec, StripAndDecay) {
    const GSpec g({1, 1, {0.3}, {0.5}});
    EXPECT_DOUBLE_EQ(g.strip_lower(), -0.7);
    EXPECT_DOUBLE_EQ(g.strip_upper(), 0.5);
    EXPECT_DOUBLE_EQ(g.decay_order(), 1.0);
    const GSpec k = cascaded_kernel_spec(3);
    EXPECT_EQ(k.m(), 3);
    EXPECT_EQ(k.q(), 3);
    EXPECT_TRUE(std::isinf(k.strip_lower()));
    EXPECT_DOUBLE_EQ(k.strip_upper(), 1.0);
    EXPECT_THROW(cascaded_kernel_spec(0), DomainError);
}

TEST(MeijerG, ElementaryClosedForms) {
    const GSpec exp_form({1, 0, {}, {0.75}});
    const GSpec ratio({1, 1, {0.3}, {0.5}});
    const GSpec log1p({1, 2, {1.0, 1.0}, {1.0, 0.0}});
    const double nu = 0.6;
    const GSpec bessel({2, 0, {}, {0.5 * nu, -0.5 * nu}});
    for (double x : {0.01, 0.3, 1.0, 4.0, 20.0}) {
        EXPECT_LE(rel(meijer_g(exp_form, x), std::pow(x, 0.75) * std::exp(-x)), 1e-10) << x;
        const double r = std::tgamma(1.2) * std::pow(x, 0.5) * std::pow(1.0 + x, -1.2);
        EXPECT_LE(rel(meijer_g(ratio, x), r), 1e-10) << x;
        EXPECT_LE(rel(meijer_g(log1p, x), std::log1p(x)), 1e-10) << x;
        const double k = 2.0 * boost::math::cyl_bessel_k(nu, 2.0 * std::sqrt(x));
        EXPECT_LE(rel(meijer_g(bessel, x), k), 1e-10) << x;
    }
}

TEST(MeijerG, RejectsBadInputs) {
    const GSpec g = cascaded_kernel_spec(2);
    EXPECT_THROW(meijer_g(g, 0.0), DomainError);
    EXPECT_THROW(meijer_g(g, -1.0), DomainError);
    ContourConfig cfg;
    cfg.points = 10;
    EXPECT_THROW(meijer_g(g, 1.0, cfg), ParameterError);
    cfg = {};
    cfg.abscissa = 2.0;  // right of the poles at s = 1
    EXPECT_THROW(meijer_g(g, 1.0, cfg), ParameterError);
    // J-type kernel: no absolutely convergent vertical contour
    EXPECT_THROW(meijer_g(GSpec({1, 0, {}, {0.0, 0.5}}), 1.0), ParameterError);
}

TEST(MeijerG, ExplicitAbscissaAgreesWithSaddle) {
    const GSpec g = cascaded_kernel_spec(3);
    ContourConfig cfg;
    cfg.abscissa = 0.4;
    for (double x : {0.05, 1.0, 6.0}) {
        EXPECT_LE(rel(meijer_g(g, x, cfg), meijer_g(g, x)), 1e-10) << x;
    }
}

TEST(CascadedKernel, FastPathsMatchContour) {
    for (int order : {1, 2}) {
        const GSpec g = cascaded_kernel_spec(order);
        for (double x = 1e-3; x <= 50.0; x *= 1.7) {
            const double fast = cascaded_kernel(order, x);
            EXPECT_LE(rel(meijer_g(g, x), fast), 1e-8) << order << " " << x;
            EXPECT_LE(rel(fast, kernel_oracle(order, x)), 1e-12) << order << " " << x;
        }
    }
}

TEST(CascadedKernel, HigherOrdersMatchProductDensities) {
    for (int order : {3, 4}) {
        for (double x : {0.002, 0.05, 0.5, 1.0, 3.0, 12.0}) {
            EXPECT_LE(rel(cascaded_kernel(order, x), kernel_oracle(order, x)), 1e-8) << order << " " << x;
        }
    }
    // triple-pole residue series at x = 1
    EXPECT_LE(rel(cascaded_kernel(3, 1.0), 0.164041606748376), 1e-10);
}

TEST(CascadedKernel, PositiveEverywhere) {
    for (int order = 1; order <= 6; ++order) {
        for (double x = 1e-4; x < 200.0; x *= 3.0) EXPECT_GT(cascaded_kernel(order, x), 0.0);
    }
}

TEST(CascadedKernel, MellinTransformIsGammaPower) {
    // int x^{s-1} p(x) dx = Gamma(s)^N, with p the unit-mean density
    boost::math::quadrature::sinh_sinh<double> integrator;
    for (int order = 1; order <= 5; ++order) {
        for (double s : {1.0, 1.5, 2.0}) {
            auto f = [&](double v) {
                if (std::abs(v) > 300.0) return 0.0;
                const double x = std::exp(v);
                return std::exp(s * v) * detection::cascaded_pdf(x, 1.0, order);
            };
            const double got = integrator.integrate(f, 1e-10);
            EXPECT_LE(rel(got, std::pow(std::tgamma(s), order)), 1e-6) << order << " " << s;
        }
    }
}

TEST(SaddleAbscissa, StaysInsideTheStrip) {
    const GSpec g({1, 1, {0.3}, {0.5}});
    for (double lx : {-10.0, -1.0, 0.0, 1.0, 10.0}) {
        const double c = saddle_abscissa(g, lx);
        EXPECT_GT(c, g.strip_lower());
        EXPECT_LT(c, g.strip_upper());
    }
    const double c = saddle_abscissa(cascaded_kernel_spec(4), std::log(1e-3));
    EXPECT_LE(c, 1.0 - 0.25);
}
