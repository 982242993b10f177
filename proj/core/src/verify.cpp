#include "edcascade/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "edcascade/detection.hpp"
#include "edcascade/errors.hpp"
#include "edcascade/mcsim.hpp"
#include "edcascade/mellin.hpp"
#include "edcascade/specfun.hpp"
#include "line_quadrature.hpp"

namespace edcascade::verify {
namespace {

using detection::Method;

struct Cell {
    double u;
    double pf;
    double snr_db;
    int order;
    double quad = 0.0;
    double closed = 0.0;
    bool closed_verified = false;
};

std::string describe(const Cell& c) {
    std::ostringstream os;
    os << "u=" << c.u << " pf=" << c.pf << " snr=" << c.snr_db << "dB N=" << c.order;
    return os.str();
}

// Collects per-item failures into one check line.
class Tally {
public:
    Tally(std::string name, double bound) : name_(std::move(name)), bound_(bound) {}

    void observe(double deviation, bool ok, const std::string& what) {
        worst_ = std::max(worst_, deviation);
        ++count_;
        if (!ok) {
            ++failures_;
            if (failures_ <= 8) failed_ << (failures_ > 1 ? "; " : "") << what;
        }
    }
    void fail(const std::string& what) { observe(std::numeric_limits<double>::infinity(), false, what); }

    CheckResult result(std::string note = {}) const {
        std::ostringstream os;
        os << count_ - failures_ << "/" << count_ << " ok";
        if (!note.empty()) os << ", " << note;
        if (failures_ > 0) os << "; failed: " << failed_.str() << (failures_ > 8 ? "; ..." : "");
        return {name_, failures_ == 0 && count_ > 0, worst_, bound_, os.str()};
    }

private:
    std::string name_;
    double bound_;
    double worst_ = 0.0;
    int count_ = 0;
    int failures_ = 0;
    std::ostringstream failed_;
};

std::vector<Cell> grid(bool fast) {
    std::vector<double> us = fast ? std::vector<double>{2, 5} : std::vector<double>{1, 2, 4, 5};
    std::vector<double> pfs = fast ? std::vector<double>{0.1} : std::vector<double>{0.01, 0.1};
    std::vector<double> dbs = fast ? std::vector<double>{0, 10, 20} : std::vector<double>{0, 5, 10, 15, 20};
    std::vector<int> orders = fast ? std::vector<int>{1, 3, 5} : std::vector<int>{1, 2, 3, 4, 5};
    std::vector<Cell> cells;
    for (double u : us)
        for (double pf : pfs)
            for (double db : dbs)
                for (int n : orders) cells.push_back({u, pf, db, n});
    return cells;
}

double kernel_moment(int order, double s) {
    // int_0^inf x^{s-1} G(x) dx / x with x = e^v
    auto f = [&](double v) { return std::exp((s - 1.0) * v) * mellin::cascaded_kernel(order, std::exp(v)); };
    return detail::integrate_line(f, 0.0, 1e-12, nullptr);
}

}  // namespace

bool VerifyReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.passed || c.informational; });
}

VerifyReport run_verify(const VerifyOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t samples = opts.samples ? opts.samples : (opts.fast ? 100'000 : 1'000'000);
    auto tol = [&](double v) { return opts.tolerance.value_or(v); };
    VerifyReport report;

    // Closed form against quadrature.
    std::vector<Cell> cells = grid(opts.fast);
    {
        Tally t("closed form vs quadrature (|diff|)", tol(1e-4));
        int verified = 0;
        for (Cell& c : cells) {
            const double g = std::pow(10.0, c.snr_db / 10.0);
            try {
                c.quad = detection::avg_pd_cascaded(c.u, c.pf, g, c.order, Method::quadrature).value;
                const auto r = detection::avg_pd_cascaded(c.u, c.pf, g, c.order, Method::closed_form);
                c.closed = r.value;
                c.closed_verified = r.provenance == detection::Provenance::closed;
                if (!c.closed_verified) continue;
                ++verified;
                const double d = std::abs(c.closed - c.quad);
                t.observe(d, d <= tol(1e-4), describe(c));
            } catch (const Error& e) {
                t.fail(describe(c) + ": " + e.what());
            }
        }
        report.checks.push_back(t.result("closed form verified on " + std::to_string(verified) + "/" +
                                         std::to_string(cells.size()) + " cells"));
    }

    // Monte Carlo (semi-analytic) against quadrature, 3 sigma.
    {
        Tally t("quadrature vs Monte Carlo (|z|)", 3.0);
        std::uint64_t stream = 0;
        for (const Cell& c : cells) {
            detection::DetectorConfig cfg;
            cfg.u = c.u;
            cfg.target_pf = c.pf;
            cfg.avg_snr = std::pow(10.0, c.snr_db / 10.0);
            cfg.order = c.order;
            try {
                const auto e = mcsim::estimate_avg_pd(cfg, samples, mcsim::McMethod::semi_analytic,
                                                      mcsim::RngStream(opts.seed, stream++),
                                                      {opts.threads});
                const double z = std::abs(e.estimate - c.quad) / e.standard_error;
                t.observe(z, z <= 3.0, describe(c) + " z=" + std::to_string(z));
            } catch (const Error& e) {
                t.fail(describe(c) + ": " + e.what());
            }
        }
        report.checks.push_back(t.result("n=" + std::to_string(samples)));
    }

    // The printed index set of the averaged P_d, for the record.
    {
        int converged = 0;
        int agreed = 0;
        std::string first_message;
        for (const Cell& c : cells) {
            const auto p = detection::printed_form_pd(c.u, c.pf, std::pow(10.0, c.snr_db / 10.0), c.order);
            if (p.converged) {
                ++converged;
                if (std::abs(p.value - c.quad) <= 1e-4) ++agreed;
            } else if (first_message.empty()) {
                first_message = p.message;
            }
        }
        std::ostringstream os;
        os << converged << "/" << cells.size() << " converged, " << agreed << " agree with quadrature";
        if (!first_message.empty()) os << "; e.g. " << first_message;
        CheckResult r{"printed index set (negative arguments, arg = +pi)", true,
                      static_cast<double>(agreed) / cells.size(), 1.0, os.str()};
        r.informational = true;
        report.checks.push_back(r);
    }

    // Generic integral: direct quadrature against the bivariate representation.
    {
        Tally t("generic integral, quadrature vs bivariate (|diff|/(1+|I|))", tol(1e-6));
        std::mt19937_64 gen(opts.seed);
        std::uniform_real_distribution<double> tdist(0.5, 2.0);
        std::uniform_real_distribution<double> sdist(0.5, 3.0);
        const std::vector<double> us{1, 2, 5};
        const int sets = opts.fast ? 6 : 27;
        for (int i = 0; i < sets; ++i) {
            const double t_ = tdist(gen);
            const double u = us[static_cast<std::size_t>(i) % 3];
            const double b = sdist(gen);
            const double c = sdist(gen);
            const double k = sdist(gen);
            const int order = 1 + (i / 3) % 3;
            const detection::Theorem1Params p{t_, u, b, c, k, mellin::cascaded_kernel_spec(order)};
            std::ostringstream what;
            what << "t=" << t_ << " u=" << u << " b=" << b << " c=" << c << " k=" << k << " N=" << order;
            try {
                const double q = detection::theorem1_integral(p, Method::quadrature);
                const double cf = detection::theorem1_integral(p, Method::closed_form);
                const double d = std::abs(q - cf) / (1.0 + std::abs(q));
                t.observe(d, d <= tol(1e-6), what.str());
            } catch (const Error& e) {
                t.fail(what.str() + ": " + e.what());
            }
        }
        report.checks.push_back(t.result());
    }

    // Density normalization, mean and Mellin transform.
    {
        Tally norm("N*Rayleigh density: normalization and mean", tol(1e-6));
        Tally mel("Mellin transform = Gamma(s)^N (relative)", tol(1e-6));
        for (int n = 1; n <= 5; ++n) {
            try {
                const double z = kernel_moment(n, 1.0);
                const double m = kernel_moment(n, 2.0);
                norm.observe(std::abs(z - 1.0), std::abs(z - 1.0) <= tol(1e-6), "N=" + std::to_string(n) + " mass");
                norm.observe(std::abs(m - 1.0), std::abs(m - 1.0) <= tol(1e-6), "N=" + std::to_string(n) + " mean");
                for (double s : {1.0, 1.5, 2.0}) {
                    const double want = std::pow(std::tgamma(s), n);
                    const double d = std::abs(kernel_moment(n, s) - want) / want;
                    mel.observe(d, d <= tol(1e-6), "N=" + std::to_string(n) + " s=" + std::to_string(s));
                }
            } catch (const Error& e) {
                norm.fail("N=" + std::to_string(n) + ": " + e.what());
            }
        }
        report.checks.push_back(norm.result());
        report.checks.push_back(mel.result());
    }

    // Marcum Q boundary identities hold exactly.
    {
        Tally t("Marcum Q boundary identities (exact) and monotonicity", 0.0);
        for (double u : {0.5, 1.0, 2.5, 5.0}) {
            for (double x : {0.0, 0.3, 1.0, 4.0, 10.0}) {
                const double q0 = specfun::marcum_q(u, x, 0.0);
                t.observe(std::abs(q0 - 1.0), q0 == 1.0, "Q(u,a,0)");
                const double qa = specfun::marcum_q(u, 0.0, x);
                const double want = specfun::regularized_gamma_q(u, 0.5 * x * x);
                t.observe(std::abs(qa - want), qa == want, "Q(u,0,b)");
            }
            // increasing in a, decreasing in b
            double prev_a = 0.0;
            double prev_b = 1.0;
            for (int i = 0; i <= 40; ++i) {
                const double x = 0.25 * i;
                const double qa = specfun::marcum_q(u, x, 3.0);
                const double qb = specfun::marcum_q(u, 2.0, x);
                t.observe(std::max(0.0, prev_a - qa), qa >= prev_a, "Q(u,a,3) at a=" + std::to_string(x));
                t.observe(std::max(0.0, qb - prev_b), qb <= prev_b, "Q(u,2,b) at b=" + std::to_string(x));
                prev_a = qa;
                prev_b = qb;
            }
        }
        report.checks.push_back(t.result());
    }

    // Structure of the curves: dominance over P_f, monotone in SNR, degrading in N.
    {
        Tally dom("ROC dominance P_d >= P_f", 0.0);
        for (const Cell& c : cells) {
            if (c.pf != cells.front().pf) continue;  // the threshold is swept below
            const double g = std::pow(10.0, c.snr_db / 10.0);
            for (int i = 0; i < 20; ++i) {
                const double pf = std::pow(10.0, -4.0 + 4.0 * i / 19.0);
                const double pd = detection::avg_pd_cascaded(c.u, pf, g, c.order, Method::closed_form).value;
                dom.observe(std::max(0.0, pf - pd), pd >= pf, describe(c) + " pf=" + std::to_string(pf));
            }
        }
        report.checks.push_back(dom.result());

        Tally mono("P_d nondecreasing in SNR, nonincreasing in N", 0.0);
        for (const Cell& a : cells) {
            for (const Cell& b : cells) {
                if (a.u != b.u || a.pf != b.pf) continue;
                if (a.order == b.order && b.snr_db > a.snr_db) {
                    const double drop = a.quad - b.quad;
                    mono.observe(std::max(0.0, drop), drop <= 0.0, describe(a) + " -> " + describe(b));
                }
                if (a.snr_db == b.snr_db && b.order == a.order + 1) {
                    const double rise = b.quad - a.quad;
                    mono.observe(std::max(0.0, rise), rise <= 0.0, describe(a) + " -> " + describe(b));
                }
            }
        }
        report.checks.push_back(mono.result());

        Tally sls("selection diversity nondecreasing in L", 0.0);
        const double g = std::pow(10.0, 1.2);
        const double lambda = detection::threshold_from_pf(4.0, 0.05);
        double prev = 0.0;
        for (int l = 1; l <= 5; ++l) {
            const double p = detection::avg_pd_sls(4.0, lambda, std::vector<double>(l, g), 5);
            sls.observe(std::max(0.0, prev - p), p >= prev, "L=" + std::to_string(l));
            prev = p;
        }
        report.checks.push_back(sls.result());
    }

    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

void write_text(const VerifyReport& report, std::ostream& out) {
    for (const CheckResult& c : report.checks) {
        const char* tag = c.informational ? "INFO" : (c.passed ? "PASS" : "FAIL");
        out << tag << "  " << c.name << "  worst=" << c.measured << " bound=" << c.bound << "  "
            << c.detail << "\n";
    }
    out << (report.all_passed() ? "all checks passed" : "verification FAILED") << " in "
        << report.seconds << " s\n";
}

void write_json(const VerifyReport& report, std::ostream& out) {
    nlohmann::ordered_json doc;
    doc["passed"] = report.all_passed();
    doc["seconds"] = report.seconds;
    auto& arr = doc["checks"] = nlohmann::ordered_json::array();
    for (const CheckResult& c : report.checks) {
        arr.push_back({{"name", c.name},
                       {"status", c.informational ? "info" : (c.passed ? "pass" : "fail")},
                       {"worst", c.measured},
                       {"bound", c.bound},
                       {"detail", c.detail}});
    }
    out << doc.dump(2) << "\n";
}

}  // namespace edcascade::verify
