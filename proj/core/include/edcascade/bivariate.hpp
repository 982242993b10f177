#pragma once

// Two-variable Meijer G-function by double Mellin-Barnes quadrature.
//
//   G(z1, z2) = 1/(2 pi i)^2 \int\int Phi_0(s1 + s2) Phi_1(s1) Phi_2(s2)
//               z1^{s1} z2^{s2} ds1 ds2
//
// Phi_1 and Phi_2 are univariate Meijer kernels (see mellin.hpp). The
// coupling block Phi_0 is a kernel with m = 0:
//
//   Phi_0(w) = prod_{j<=n} G(1 - a_j + w) / [prod_{j>n} G(a_j - w) prod_j G(1 - b_j + w)]
//
// Both contours are vertical lines. Complex powers use the principal branch,
// so a negative real argument has arg z = +pi.

#include <complex>
#include <limits>
#include <vector>

#include "edcascade/mellin.hpp"

namespace edcascade::bivariate {

class BivariateGSpec {
public:
    /// The coupling block must have m = 0. Each block is validated as a GSpec.
    BivariateGSpec(mellin::GParameters coupling, mellin::GParameters first,
                   mellin::GParameters second);

    const mellin::GSpec& coupling() const noexcept { return coupling_; }
    const mellin::GSpec& first() const noexcept { return first_; }
    const mellin::GSpec& second() const noexcept { return second_; }

private:
    mellin::GSpec coupling_;
    mellin::GSpec first_;
    mellin::GSpec second_;
};

struct ComplexArgumentPair {
    std::complex<double> z1;
    std::complex<double> z2;
};

struct BivariateConfig {
    /// Contour abscissas; NaN picks them from the pole geometry.
    double abscissa1 = std::numeric_limits<double>::quiet_NaN();
    double abscissa2 = std::numeric_limits<double>::quiet_NaN();
    double height = 40.0;
    /// Initial nodes per variable over [-height, height].
    int points = 128;
    double rel_tol = 1e-10;
    int max_refinements = 8;
};

struct BivariateResult {
    std::complex<double> value;
    /// |difference| of the last two refinements.
    double error_estimate;
    double abscissa1;
    double abscissa2;
    /// Successive refinement differences, oldest first.
    std::vector<double> refinement_diffs;
    int nodes1;
    int nodes2;
};

/// Throws NonConvergenceError when the refinement budget runs out or the
/// integrand grows along the contour, ParameterError when no pair of
/// vertical contours separates the pole families.
BivariateResult bivariate_g(const BivariateGSpec& spec, const ComplexArgumentPair& args,
                            const BivariateConfig& cfg = {});

/// Re(value) when |Im(value)| <= tol |Re(value)| + 1e-12, otherwise a
/// BranchInconsistencyError.
double real_part_checked(std::complex<double> value, double tol);

}  // namespace edcascade::bivariate
