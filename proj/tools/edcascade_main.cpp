// edcascade: energy-detection curves over N*Rayleigh cascaded fading.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "edcascade/detection.hpp"
#include "edcascade/errors.hpp"
#include "edcascade/mcsim.hpp"
#include "edcascade/sweep.hpp"
#include "edcascade/verify.hpp"

namespace {

using namespace edcascade;

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kNumeric = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    double u = 5.0;
    std::optional<double> pf;
    std::optional<double> lambda;
    std::string snr_db;
    std::vector<int> orders{1};
    std::vector<int> branches{1};
    std::string methods = "closed";
    std::uint64_t samples = 1'000'000;
    bool samples_given = false;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 42;
    std::string out;
    std::string format = "csv";
    std::optional<double> tol;
    unsigned threads = 0;
    int points = 50;
    bool fast = false;
};

// path with _N<n>_L<l> inserted before the extension
std::string scenario_path(const std::string& path, int n, int l) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    const std::string tag = "_N" + std::to_string(n) + "_L" + std::to_string(l);
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + tag;
    return path.substr(0, dot) + tag + path.substr(dot);
}

void emit(const std::vector<sweep::SweepResult>& results, const Common& c) {
    auto write = [&](const std::vector<sweep::SweepResult>& rs, std::ostream& os) {
        if (c.format == "json") {
            sweep::write_json(rs, os);
        } else {
            sweep::write_csv(rs, os);
        }
    };
    if (c.out.empty()) {
        write(results, std::cout);
        return;
    }
    for (const auto& r : results) {
        const std::string path =
            results.size() == 1 ? c.out : scenario_path(c.out, r.order, r.branches);
        std::ofstream f(path, std::ios::binary);
        if (!f) throw UsageError("cannot open '" + path + "' for writing");
        write({r}, f);
        std::cerr << "wrote " << path << "\n";
    }
}

sweep::SweepSettings settings_from(const Common& c) {
    sweep::SweepSettings s;
    s.methods = sweep::parse_methods(c.methods);
    s.samples = c.samples;
    s.seed = c.seed;
    s.threads = c.threads;
    if (c.tol) s.numerics.cross_check_tol = *c.tol;
    return s;
}

void check_lists(const Common& c) {
    if (!(c.u > 0.0)) throw UsageError("--u must be positive");
    for (int n : c.orders) {
        if (n < 1) throw UsageError("--N entries must be >= 1");
    }
    for (int l : c.branches) {
        if (l < 1) throw UsageError("--L entries must be >= 1");
    }
    if (c.samples < 1000) throw UsageError("--samples must be at least 1000");
}

std::string scenario_name(int n, int l) {
    return "scenario N=" + std::to_string(n) + " L=" + std::to_string(l);
}

int cmd_pd_sweep(const Common& c) {
    check_lists(c);
    if (c.pf.has_value() == c.lambda.has_value()) throw UsageError("give exactly one of --pf and --lambda");
    if (c.pf && !(*c.pf > 0.0 && *c.pf <= 1.0)) throw UsageError("--pf must lie in (0, 1]");
    if (c.lambda && !(*c.lambda >= 0.0)) throw UsageError("--lambda must be >= 0");
    const auto grid = sweep::parse_range(c.snr_db.empty() ? "0:25:0.5" : c.snr_db);
    const auto s = settings_from(c);
    std::vector<sweep::SweepResult> results;
    std::uint64_t index = 0;
    for (int n : c.orders) {
        for (int l : c.branches) {
            try {
                results.push_back(sweep::run_pd_sweep(c.u, c.pf, c.lambda, grid, n, l, s, index++));
            } catch (const Error& e) {
                throw Error(scenario_name(n, l) + ": " + e.what());
            }
        }
    }
    emit(results, c);
    return kOk;
}

int cmd_roc(const Common& c) {
    check_lists(c);
    if (c.pf || c.lambda) throw UsageError("roc sweeps the threshold itself; drop --pf/--lambda");
    const auto snr = sweep::parse_range(c.snr_db.empty() ? "12" : c.snr_db);
    if (snr.size() != 1) throw UsageError("roc takes a single --snr-db value");
    if (c.points < 2) throw UsageError("--points must be >= 2");
    const auto grid = sweep::log_grid(1e-4, 1.0, c.points);
    const auto s = settings_from(c);
    std::vector<sweep::SweepResult> results;
    std::uint64_t index = 0;
    for (int n : c.orders) {
        for (int l : c.branches) {
            try {
                results.push_back(sweep::run_roc(c.u, snr.front(), grid, n, l, s, index++));
            } catch (const Error& e) {
                throw Error(scenario_name(n, l) + ": " + e.what());
            }
        }
    }
    emit(results, c);
    return kOk;
}

int cmd_verify(const Common& c) {
    verify::VerifyOptions o;
    o.fast = c.fast;
    o.seed = c.seed;
    o.threads = c.threads;
    o.tolerance = c.tol;
    if (c.samples_given) o.samples = c.samples;
    const auto report = verify::run_verify(o);
    auto write = [&](std::ostream& os) {
        if (c.format == "json") {
            verify::write_json(report, os);
        } else {
            verify::write_text(report, os);
        }
    };
    if (c.out.empty()) {
        write(std::cout);
    } else {
        std::ofstream f(c.out, std::ios::binary);
        if (!f) throw UsageError("cannot open '" + c.out + "' for writing");
        write(f);
        write(std::cerr);
    }
    return report.all_passed() ? kOk : kVerifyFailed;
}

int cmd_sample(const Common& c) {
    check_lists(c);
    if (c.orders.size() != 1) throw UsageError("sample takes a single --N");
    if (c.trials < 1) throw UsageError("--samples must be positive");
    const auto snr = sweep::parse_range(c.snr_db.empty() ? "10" : c.snr_db);
    if (snr.size() != 1) throw UsageError("sample takes a single --snr-db value");
    detection::DetectorConfig cfg;
    cfg.u = c.u;
    if (c.lambda) {
        cfg.threshold = c.lambda;
    } else {
        cfg.target_pf = c.pf.value_or(0.1);
    }
    cfg.avg_snr = std::pow(10.0, snr.front() / 10.0);
    cfg.order = c.orders.front();
    const double lambda = cfg.lambda();
    const auto trials =
        mcsim::draw_trials(cfg, c.trials, mcsim::RngStream(c.seed, 0), {c.threads});

    std::ofstream file;
    if (!c.out.empty()) {
        file.open(c.out, std::ios::binary);
        if (!file) throw UsageError("cannot open '" + c.out + "' for writing");
    }
    std::ostream& os = c.out.empty() ? std::cout : file;
    if (c.format == "json") {
        nlohmann::ordered_json doc;
        doc["u"] = c.u;
        doc["N"] = cfg.order;
        doc["snr_db"] = snr.front();
        doc["lambda"] = lambda;
        doc["seed"] = c.seed;
        doc["columns"] = {"trial", "snr", "statistic", "detected"};
        auto& rows = doc["rows"] = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < trials.size(); ++i) {
            rows.push_back({{"trial", i},
                            {"snr", trials[i].snr},
                            {"statistic", trials[i].statistic},
                            {"detected", trials[i].statistic > lambda ? 1 : 0}});
        }
        os << doc.dump(2) << "\n";
    } else {
        os << "trial,snr,statistic,detected\r\n";
        for (std::size_t i = 0; i < trials.size(); ++i) {
            os << i << "," << sweep::format_number(trials[i].snr) << ","
               << sweep::format_number(trials[i].statistic) << ","
               << (trials[i].statistic > lambda ? 1 : 0) << "\r\n";
        }
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy detection over N*Rayleigh cascaded fading"};
    app.require_subcommand(1);
    Common c;

    auto add_common = [&](CLI::App* sub, bool sweep_flags) {
        sub->add_option("--u", c.u, "time-bandwidth product")->capture_default_str();
        auto* pf = sub->add_option("--pf", c.pf, "false-alarm probability (per branch)");
        auto* lam = sub->add_option("--lambda", c.lambda, "energy threshold");
        pf->excludes(lam);
        sub->add_option("--snr-db", c.snr_db, "average SNR in dB, start:stop:step or one value");
        sub->add_option("--N", c.orders, "cascade orders, comma separated")->delimiter(',');
        sub->add_option("--seed", c.seed, "Monte Carlo seed")->capture_default_str();
        sub->add_option("--out", c.out, "output path (one file per scenario)");
        sub->add_option("--format", c.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        sub->add_option("--threads", c.threads, "worker threads, 0 = all cores");
        if (sweep_flags) {
            sub->add_option("--L", c.branches, "selection-diversity branch counts")->delimiter(',');
            sub->add_option("--methods", c.methods, "closed,quad,mc,mc-full")->capture_default_str();
            sub->add_option("--tol", c.tol,
                            "cross-check the closed form against quadrature at this tolerance");
        }
    };

    auto* pd = app.add_subcommand("pd-sweep", "average P_d against average SNR");
    add_common(pd, true);
    pd->add_option("--samples", c.samples, "Monte Carlo trials per point")->capture_default_str();

    auto* roc = app.add_subcommand("roc", "ROC curve at one average SNR");
    add_common(roc, true);
    roc->add_option("--samples", c.samples, "Monte Carlo trials per point")->capture_default_str();
    roc->add_option("--points", c.points, "log-spaced P_f points in [1e-4, 1]")->capture_default_str();

    auto* ver = app.add_subcommand("verify", "run the oracle matrix");
    ver->add_flag("--fast", c.fast, "reduced grid");
    auto* ver_samples = ver->add_option("--samples", c.samples, "Monte Carlo trials per cell");
    ver->add_option("--seed", c.seed, "Monte Carlo seed")->capture_default_str();
    ver->add_option("--tol", c.tol, "override every agreement tolerance");
    ver->add_option("--out", c.out, "report path");
    ver->add_option("--format", c.format, "text or json")->check(CLI::IsMember({"csv", "text", "json"}));
    ver->add_option("--threads", c.threads, "Monte Carlo threads, 0 = all cores");

    auto* smp = app.add_subcommand("sample", "dump raw (SNR, statistic) draws");
    add_common(smp, false);
    smp->add_option("--samples", c.trials, "number of trials")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    c.samples_given = ver_samples->count() > 0;

    try {
        if (pd->parsed()) return cmd_pd_sweep(c);
        if (roc->parsed()) return cmd_roc(c);
        if (ver->parsed()) return cmd_verify(c);
        return cmd_sample(c);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    }
}
