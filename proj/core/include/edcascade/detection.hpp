#pragma once

// Energy detection over N*Rayleigh cascaded fading.
//
// All SNRs are linear. P_f = Q(u, lambda/2), P_d(gamma) = Q_u(sqrt(2 gamma), sqrt(lambda)),
// and the fading-averaged P_d integrates P_d(gamma) against the N*Rayleigh density
//
//   p(gamma) = (1/gamma) G^{N,0}_{0,N}(gamma / avg_snr | 1, ..., 1).

#include <optional>
#include <string>
#include <vector>

#include "edcascade/bivariate.hpp"
#include "edcascade/mellin.hpp"

namespace edcascade::detection {

/// One detection scenario. Exactly one of threshold / target_pf is set.
struct DetectorConfig {
    double u = 1.0;
    std::optional<double> threshold;
    std::optional<double> target_pf;
    double avg_snr = 1.0;
    int order = 1;
    /// Per-branch average SNRs for selection diversity; empty means one branch at avg_snr.
    std::vector<double> branch_snrs;

    /// Throws DomainError on an inconsistent scenario.
    void validate() const;
    /// lambda, converting from target_pf when needed.
    double lambda() const;
};

/// I = int_0^inf x^{t-1} Q_u(b sqrt(x), c) G(k x) dx.
struct Theorem1Params {
    double t;
    double u;
    double b;
    double c;
    double k;
    mellin::GSpec gspec;
};

enum class Method { closed_form, quadrature };

enum class Provenance {
    closed,
    quadrature,
    // closed form requested but not trusted; the quadrature value is served
    quadrature_fallback,
};

const char* to_string(Provenance p);

/// Numerical controls shared by the averaged-P_d paths.
struct NumericsConfig {
    mellin::ContourConfig contour{};
    bivariate::BivariateConfig bivariate{};
    /// Relative tolerance of the real-line quadratures.
    double quad_rel_tol = 1e-11;
    /// The bivariate value counts as verified only if its error estimate is below this.
    double closed_error_limit = 1e-7;
    /// Also run the quadrature and require agreement within this bound; <= 0 disables.
    double cross_check_tol = 0.0;
};

struct PdResult {
    double value;
    double error_estimate;
    Provenance provenance;
    /// False when a closed-form evaluation was attempted and rejected.
    bool closed_form_verified;
    /// Why the closed form was rejected, empty otherwise.
    std::string note;
};

double threshold_from_pf(double u, double pf);
double pf_from_threshold(double u, double lambda);
double pd_awgn(double u, double gamma, double lambda);

/// Throws DivergentIntegralError when the integrand tail does not decay and
/// ParameterError when the Mellin transform of G does not exist at -t.
double theorem1_integral(const Theorem1Params& params, Method method,
                         const NumericsConfig& cfg = {});

/// The bivariate representation of theorem1_integral:
///
///   I = k^{-t} Phi(-t) - (2/b^2)^t C^u G(C, b^2/(2k)),   C = c^2/2,
///
/// with coupling G^{0,1}_{1,0}(1-u+t; -), first block G^{1,0}_{0,2}(-; 0, -u) and
/// a second block built from the a/b lists of G.
bivariate::BivariateGSpec theorem1_bivariate_spec(const Theorem1Params& params);

double cascaded_pdf(double gamma, double avg_snr, int order,
                    const mellin::ContourConfig& cfg = {});

PdResult avg_pd_cascaded(double u, double pf, double avg_snr, int order, Method method,
                         const NumericsConfig& cfg = {});

/// Same as avg_pd_cascaded with the threshold given directly.
PdResult avg_pd_cascaded_at_threshold(double u, double lambda, double avg_snr, int order,
                                      Method method, const NumericsConfig& cfg = {});

/// The index set as printed for the averaged P_d: outer G^{0,1}_{2,1}(u/2, (u-1)/2; (u-1)/2),
/// first block G^{1,0}_{1,3}(1/2; 0, -u, 1/2), second block G^{N,1}_{1,N+1}(1; 1..1, 0)
/// at the negative arguments (-lambda/2, -1/avg_snr). Kept for exploration only.
struct PrintedFormResult {
    bool converged;
    double value;
    std::string message;
};
bivariate::BivariateGSpec printed_form_spec(double u, int order);
PrintedFormResult printed_form_pd(double u, double pf, double avg_snr, int order,
                                  const bivariate::BivariateConfig& cfg = {});

/// 1 - prod_i (1 - P_d(avg_snr_i)) at the common threshold lambda.
double avg_pd_sls(double u, double lambda, const std::vector<double>& branch_snrs, int order,
                  Method method = Method::quadrature, const NumericsConfig& cfg = {});

/// 1 - (1 - Q(u, lambda/2))^L.
double pf_sls(double u, double lambda, int branches);

/// Per-branch false-alarm probability giving an overall P_f over L branches.
double branch_pf_for_sls(double pf, int branches);

}  // namespace edcascade::detection
