#include "edcascade/detection.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "edcascade/errors.hpp"
#include "edcascade/specfun.hpp"
#include "line_quadrature.hpp"

namespace edcascade::detection {
namespace {

bool is_cascaded_kernel(const mellin::GSpec& g) {
    if (g.n() != 0 || g.p() != 0 || g.m() != g.q()) return false;
    return std::all_of(g.b().begin(), g.b().end(), [](double v) { return v == 1.0; });
}

void check_theorem1(const Theorem1Params& p) {
    if (!std::isfinite(p.t)) throw DomainError("theorem1: t must be finite");
    if (!(p.u > 0.0)) throw DomainError("theorem1: u must be positive");
    if (!(p.b > 0.0)) throw DomainError("theorem1: b must be positive");
    if (!(p.c >= 0.0)) throw DomainError("theorem1: c must be nonnegative");
    if (!(p.k > 0.0)) throw DomainError("theorem1: k must be positive");
}

struct ClosedValue {
    double value;
    double error;
};

ClosedValue theorem1_closed(const Theorem1Params& p, const NumericsConfig& cfg) {
    check_theorem1(p);
    const mellin::GSpec& g = p.gspec;
    if (!(-p.t > g.strip_lower() && -p.t < g.strip_upper())) {
        throw DivergentIntegralError("theorem1: the Mellin transform of G does not exist at s = " +
                                     std::to_string(-p.t));
    }
    const double log_k = std::log(p.k);
    const double mellin_term = std::exp(g.log_kernel({-p.t, 0.0}).real() - p.t * log_k);
    if (p.c == 0.0) return {mellin_term, 0.0};

    const double big_c = 0.5 * p.c * p.c;
    const auto spec = theorem1_bivariate_spec(p);
    const auto r = bivariate::bivariate_g(spec, {big_c, p.b * p.b / (2.0 * p.k)}, cfg.bivariate);
    const double gv = bivariate::real_part_checked(r.value, 1e-8);
    const double scale = std::exp(p.t * std::log(2.0 / (p.b * p.b)) + p.u * std::log(big_c));
    return {mellin_term - scale * gv, scale * r.error_estimate};
}

double theorem1_quad(const Theorem1Params& p, const NumericsConfig& cfg, double* error) {
    check_theorem1(p);
    const bool kernel = is_cascaded_kernel(p.gspec);
    const int order = p.gspec.m();
    auto g_at = [&](double x) {
        return kernel ? mellin::cascaded_kernel(order, x, cfg.contour)
                      : mellin::meijer_g(p.gspec, x, cfg.contour);
    };
    // x = e^v / k
    auto f = [&](double v) {
        const double y = std::exp(v);
        const double g = g_at(y);
        if (g == 0.0) return 0.0;
        return std::exp(p.t * v) * g * specfun::marcum_q(p.u, p.b * std::sqrt(y / p.k), p.c);
    };
    const double scale = std::exp(-p.t * std::log(p.k));
    double err = 0.0;
    const double v = detail::integrate_line(f, 0.0, cfg.quad_rel_tol, &err);
    if (error) *error = scale * err;
    return scale * v;
}

void check_pd_inputs(double u, double lambda, double avg_snr, int order) {
    if (!(u > 0.0)) throw DomainError("average Pd: u must be positive");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("average Pd: threshold must be finite and >= 0");
    }
    if (!(avg_snr > 0.0) || !std::isfinite(avg_snr)) {
        throw DomainError("average Pd: average SNR must be positive and finite");
    }
    if (order < 1) throw DomainError("average Pd: cascade order N must be >= 1");
}

PdResult pd_quadrature(double u, double lambda, double avg_snr, int order,
                       const NumericsConfig& cfg) {
    // gamma = avg_snr e^v tames the (log gamma)^{N-1} behavior at the origin.
    auto f = [&](double v) {
        const double x = std::exp(v);
        const double g = mellin::cascaded_kernel(order, x, cfg.contour);
        if (g == 0.0) return 0.0;
        return g * specfun::marcum_q(u, std::sqrt(2.0 * avg_snr * x), std::sqrt(lambda));
    };
    double err = 0.0;
    const double v = detail::integrate_line(f, 0.0, cfg.quad_rel_tol, &err);
    return {specfun::clamp_probability(v, "average Pd (quadrature)"), err, Provenance::quadrature,
            true, {}};
}

}  // namespace

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::closed: return "closed";
        case Provenance::quadrature: return "quad";
        case Provenance::quadrature_fallback: return "quad-fallback";
    }
    return "?";
}

void DetectorConfig::validate() const {
    if (!(u > 0.0)) throw DomainError("detector: u must be positive");
    if (threshold.has_value() == target_pf.has_value()) {
        throw DomainError("detector: set exactly one of threshold and target P_f");
    }
    if (threshold && !(*threshold >= 0.0)) throw DomainError("detector: threshold must be >= 0");
    if (target_pf && !(*target_pf > 0.0 && *target_pf <= 1.0)) {
        throw DomainError("detector: target P_f must lie in (0, 1]");
    }
    if (!(avg_snr > 0.0)) throw DomainError("detector: average SNR must be positive");
    if (order < 1) throw DomainError("detector: cascade order N must be >= 1");
    for (double s : branch_snrs) {
        if (!(s > 0.0)) throw DomainError("detector: branch SNRs must be positive");
    }
}

double DetectorConfig::lambda() const {
    validate();
    return threshold ? *threshold : threshold_from_pf(u, *target_pf);
}

double threshold_from_pf(double u, double pf) {
    if (!(pf > 0.0 && pf <= 1.0)) throw DomainError("threshold_from_pf: P_f must lie in (0, 1]");
    return 2.0 * specfun::inverse_regularized_gamma_q(u, pf);
}

double pf_from_threshold(double u, double lambda) {
    if (!(lambda >= 0.0)) throw DomainError("pf_from_threshold: threshold must be >= 0");
    return specfun::regularized_gamma_q(u, 0.5 * lambda);
}

double pd_awgn(double u, double gamma, double lambda) {
    if (!(gamma >= 0.0)) throw DomainError("pd_awgn: SNR must be >= 0");
    if (!(lambda >= 0.0)) throw DomainError("pd_awgn: threshold must be >= 0");
    return specfun::marcum_q(u, std::sqrt(2.0 * gamma), std::sqrt(lambda));
}

bivariate::BivariateGSpec theorem1_bivariate_spec(const Theorem1Params& p) {
    const mellin::GSpec& g = p.gspec;
    mellin::GParameters second;
    second.m = g.n() + 1;
    second.n = g.m();
    for (double b : g.b()) second.a.push_back(1.0 - b);
    for (int i = 0; i < g.n(); ++i) second.b.push_back(1.0 - g.a()[i]);
    second.b.push_back(p.t);
    for (int i = g.n(); i < g.p(); ++i) second.b.push_back(1.0 - g.a()[i]);
    second.b.push_back(1.0 - p.u + p.t);
    return bivariate::BivariateGSpec({0, 1, {1.0 - p.u + p.t}, {}}, {1, 0, {}, {0.0, -p.u}},
                                     std::move(second));
}

double theorem1_integral(const Theorem1Params& params, Method method, const NumericsConfig& cfg) {
    if (method == Method::closed_form) return theorem1_closed(params, cfg).value;
    return theorem1_quad(params, cfg, nullptr);
}

double cascaded_pdf(double gamma, double avg_snr, int order, const mellin::ContourConfig& cfg) {
    if (!(gamma > 0.0)) throw DomainError("cascaded_pdf: SNR must be positive");
    if (!(avg_snr > 0.0)) throw DomainError("cascaded_pdf: average SNR must be positive");
    return mellin::cascaded_kernel(order, gamma / avg_snr, cfg) / gamma;
}

PdResult avg_pd_cascaded_at_threshold(double u, double lambda, double avg_snr, int order,
                                      Method method, const NumericsConfig& cfg) {
    check_pd_inputs(u, lambda, avg_snr, order);
    if (method == Method::quadrature) return pd_quadrature(u, lambda, avg_snr, order, cfg);

    if (lambda == 0.0) return {1.0, 0.0, Provenance::closed, true, {}};
    std::string note;
    try {
        const Theorem1Params p{0.0, u, std::sqrt(2.0), std::sqrt(lambda), 1.0 / avg_snr,
                               mellin::cascaded_kernel_spec(order)};
        const ClosedValue cv = theorem1_closed(p, cfg);
        if (!(cv.error <= cfg.closed_error_limit)) {
            note = "bivariate error estimate " + std::to_string(cv.error) + " above limit";
        } else if (cv.value < -1e-9 || cv.value > 1.0 + 1e-9) {
            note = "closed form " + std::to_string(cv.value) + " outside [0, 1]";
        } else {
            const double value = std::clamp(cv.value, 0.0, 1.0);
            if (cfg.cross_check_tol > 0.0) {
                const PdResult q = pd_quadrature(u, lambda, avg_snr, order, cfg);
                if (std::abs(q.value - value) > cfg.cross_check_tol) {
                    return {q.value, q.error_estimate, Provenance::quadrature_fallback, false,
                            "closed form disagrees with quadrature by " +
                                std::to_string(std::abs(q.value - value))};
                }
            }
            return {value, cv.error, Provenance::closed, true, {}};
        }
    } catch (const Error& e) {
        note = e.what();
    }
    PdResult q = pd_quadrature(u, lambda, avg_snr, order, cfg);
    q.provenance = Provenance::quadrature_fallback;
    q.closed_form_verified = false;
    q.note = std::move(note);
    return q;
}

PdResult avg_pd_cascaded(double u, double pf, double avg_snr, int order, Method method,
                         const NumericsConfig& cfg) {
    return avg_pd_cascaded_at_threshold(u, threshold_from_pf(u, pf), avg_snr, order, method, cfg);
}

bivariate::BivariateGSpec printed_form_spec(double u, int order) {
    if (order < 1) throw DomainError("printed form: cascade order N must be >= 1");
    std::vector<double> b(static_cast<std::size_t>(order), 1.0);
    b.push_back(0.0);
    return bivariate::BivariateGSpec({0, 1, {0.5 * u, 0.5 * (u - 1.0)}, {0.5 * (u - 1.0)}},
                                     {1, 0, {0.5}, {0.0, -u, 0.5}}, {order, 1, {1.0}, std::move(b)});
}

PrintedFormResult printed_form_pd(double u, double pf, double avg_snr, int order,
                                  const bivariate::BivariateConfig& cfg) {
    check_pd_inputs(u, 0.0, avg_snr, order);
    const double ginv = specfun::inverse_regularized_gamma_q(u, pf);
    try {
        const auto spec = printed_form_spec(u, order);
        const auto r = bivariate::bivariate_g(spec, {-ginv, -1.0 / avg_snr}, cfg);
        return {true, bivariate::real_part_checked(r.value, 1e-8), {}};
    } catch (const Error& e) {
        return {false, std::nan(""), e.what()};
    }
}

double avg_pd_sls(double u, double lambda, const std::vector<double>& branch_snrs, int order,
                  Method method, const NumericsConfig& cfg) {
    if (branch_snrs.empty()) throw DomainError("avg_pd_sls: at least one branch required");
    double miss = 1.0;
    double last_snr = -1.0;
    double last_pd = 0.0;
    for (double s : branch_snrs) {
        // equal-SNR branches are the common case
        if (s != last_snr) {
            last_pd = avg_pd_cascaded_at_threshold(u, lambda, s, order, method, cfg).value;
            last_snr = s;
        }
        miss *= 1.0 - last_pd;
        if (miss == 0.0) break;
    }
    return specfun::clamp_probability(1.0 - miss, "avg_pd_sls");
}

double pf_sls(double u, double lambda, int branches) {
    if (branches < 1) throw DomainError("pf_sls: L must be >= 1");
    const double pf = pf_from_threshold(u, lambda);
    return -std::expm1(branches * std::log1p(-pf));
}

double branch_pf_for_sls(double pf, int branches) {
    if (branches < 1) throw DomainError("branch_pf_for_sls: L must be >= 1");
    if (!(pf > 0.0 && pf <= 1.0)) throw DomainError("branch_pf_for_sls: P_f must lie in (0, 1]");
    return -std::expm1(std::log1p(-pf) / branches);
}

}  // namespace edcascade::detection
