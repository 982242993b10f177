#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "edcascade/specfun.hpp"

namespace edcascade::specfun {
namespace {

using cplx = std::complex<double>;

// B_{2k} / (2k (2k-1)) for the Stirling series.
constexpr std::array<double, 8> kStirling = {
    1.0 / 12.0,           -1.0 / 360.0,  1.0 / 1260.0, -1.0 / 1680.0,
    1.0 / 1188.0,         -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0,
};

cplx stirling(cplx w) {
    const cplx inv = 1.0 / w;
    const cplx inv2 = inv * inv;
    cplx series = kStirling.back();
    for (std::size_t i = kStirling.size() - 1; i-- > 0;) series = series * inv2 + kStirling[i];
    return (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * std::numbers::pi) + series * inv;
}

// log sin(pi z) that stays finite for large |Im z|.
cplx log_sin_pi(cplx z) {
    const cplx w = std::numbers::pi * z;
    const cplx i(0.0, 1.0);
    if (w.imag() >= 0.0) {
        return -i * w + std::log(1.0 - std::exp(2.0 * i * w)) + std::log(cplx(0.0, 0.5));
    }
    return i * w + std::log(1.0 - std::exp(-2.0 * i * w)) + std::log(cplx(0.0, -0.5));
}

}  // namespace

std::complex<double> log_gamma(std::complex<double> z) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && std::floor(z.real()) == z.real()) {
        return {std::numeric_limits<double>::infinity(), 0.0};
    }
    if (z.real() < 0.5) {
        return std::log(std::numbers::pi) - log_sin_pi(z) - log_gamma(1.0 - z);
    }
    if (z.real() >= 10.0) return stirling(z);
    const int shift = static_cast<int>(std::ceil(10.0 - z.real()));
    cplx product = 1.0;
    for (int k = 0; k < shift; ++k) product *= z + static_cast<double>(k);
    return stirling(z + static_cast<double>(shift)) - std::log(product);
}

}  // namespace edcascade::specfun
