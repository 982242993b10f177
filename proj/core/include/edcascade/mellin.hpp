#pragma once

// Univariate Meijer G-function by Mellin-Barnes contour quadrature.
//
// Convention used throughout the library:
//
//   G^{m,n}_{p,q}(x | a; b) = 1/(2 pi i) \int_L Phi(s) x^s ds,
//   Phi(s) = prod_{j<=m} G(b_j - s) prod_{j<=n} G(1 - a_j + s)
//          / [prod_{j>m} G(1 - b_j + s) prod_{j>n} G(a_j - s)]
//
// where L is a vertical line Re s = c separating the poles of G(b_j - s)
// (to its right) from those of G(1 - a_j + s) (to its left).

#include <complex>
#include <limits>
#include <span>
#include <vector>

namespace edcascade::mellin {

/// Raw, unvalidated Meijer G parameters. p and q are implied by the list sizes.
struct GParameters {
    int m = 0;
    int n = 0;
    std::vector<double> a;
    std::vector<double> b;
};

/// Validated Meijer G parameter set. Immutable once constructed.
class GSpec {
public:
    /// Throws ParameterError when the index bounds are violated, a parameter
    /// is not finite, or a pole of G(b_j - s) coincides with one of
    /// G(1 - a_i + s).
    explicit GSpec(GParameters params);

    int m() const noexcept { return m_; }
    int n() const noexcept { return n_; }
    int p() const noexcept { return static_cast<int>(a_.size()); }
    int q() const noexcept { return static_cast<int>(b_.size()); }
    std::span<const double> a() const noexcept { return a_; }
    std::span<const double> b() const noexcept { return b_; }

    /// log Phi(s). Only exp() of the result is meaningful.
    std::complex<double> log_kernel(std::complex<double> s) const;

    /// Open interval of admissible contour abscissas; either end may be
    /// infinite when the corresponding pole family is empty.
    double strip_lower() const noexcept { return strip_lower_; }
    double strip_upper() const noexcept { return strip_upper_; }

    /// m + n - (p + q)/2. A vertical contour converges absolutely for
    /// positive x only when this is positive.
    double decay_order() const noexcept { return m_ + n_ - 0.5 * (p() + q()); }

private:
    // One log-gamma factor sign * count * logG(offset + slope * s).
    struct Factor {
        double offset;
        double slope;
        double weight;
    };

    int m_;
    int n_;
    std::vector<Factor> factors_;
    std::vector<double> a_;
    std::vector<double> b_;
    double strip_lower_;
    double strip_upper_;
};

GSpec validate_gspec(GParameters params);

/// G^{N,0}_{0,N}(. | 1, ..., 1), the N*Rayleigh kernel.
GSpec cascaded_kernel_spec(int order);

/// Numerical controls for vertical-contour quadrature.
struct ContourConfig {
    /// Contour crossing of the real axis; NaN selects it automatically.
    double abscissa = std::numeric_limits<double>::quiet_NaN();
    /// Initial truncation height of the imaginary part.
    double height = 40.0;
    /// Initial node count on [0, height].
    int points = 128;
    double rel_tol = 1e-12;
    /// Budget for both step halving and truncation doubling.
    int max_refinements = 6;
};

/// Throws ParameterError for points < 64 or non-positive height/tolerance.
void validate_contour_config(const ContourConfig& cfg);

/// Result of a contour quadrature with the diagnostics used by tests.
struct ContourResult {
    double value;
    double error_estimate;
    double abscissa;
    double height;
    int nodes;
};

ContourResult meijer_g_detailed(const GSpec& spec, double x, const ContourConfig& cfg = {});

double meijer_g(const GSpec& spec, double x, const ContourConfig& cfg = {});

/// G^{N,0}_{0,N}(x | 1,...,1). Closed forms for N = 1 (x e^-x) and
/// N = 2 (2 x K_0(2 sqrt x)); contour quadrature otherwise.
double cascaded_kernel(int order, double x, const ContourConfig& cfg = {});

/// Abscissa minimizing |Phi(c) x^c| on the real axis within the admissible
/// strip, kept at least `margin` away from the nearest pole. The saddle
/// point keeps the contour integrand on the scale of the result.
double saddle_abscissa(const GSpec& spec, double log_x, double margin = 0.25);

}  // namespace edcascade::mellin
