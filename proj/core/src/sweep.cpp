#include "edcascade/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "edcascade/errors.hpp"

namespace edcascade::sweep {
namespace {

// fn(i) for i in [0, n) over a small pool; the lowest-index failure is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

double sls_combine(double p, int branches) {
    if (branches == 1) return p;
    return -std::expm1(branches * std::log1p(-std::min(p, 1.0)));
}

// Fills the method cells of one row at a given threshold and linear SNR.
void evaluate_row(SweepRow& row, double u, double lambda, double snr, int order, int branches,
                  const SweepSettings& s, std::uint64_t stream, unsigned mc_threads) {
    using detection::Method;
    if (s.methods.closed) {
        const auto r = detection::avg_pd_cascaded_at_threshold(u, lambda, snr, order,
                                                               Method::closed_form, s.numerics);
        row.closed = Cell{sls_combine(r.value, branches), branches * r.error_estimate,
                          detection::to_string(r.provenance)};
    }
    if (s.methods.quad) {
        const auto r = detection::avg_pd_cascaded_at_threshold(u, lambda, snr, order,
                                                               Method::quadrature, s.numerics);
        row.quad = Cell{sls_combine(r.value, branches), branches * r.error_estimate,
                        detection::to_string(r.provenance)};
    }
    const mcsim::McOptions opts{mc_threads};
    auto run_mc = [&](mcsim::McMethod m, std::uint64_t sub) {
        const mcsim::RngStream root(s.seed, 2 * stream + sub);
        if (branches == 1) {
            detection::DetectorConfig cfg;
            cfg.u = u;
            cfg.threshold = lambda;
            cfg.avg_snr = snr;
            cfg.order = order;
            return mcsim::estimate_avg_pd(cfg, s.samples, m, root, opts);
        }
        const std::vector<double> snrs(static_cast<std::size_t>(branches), snr);
        return mcsim::estimate_sls_pd(u, lambda, snrs, order, s.samples, m, root, opts);
    };
    if (s.methods.mc) {
        const auto e = run_mc(mcsim::McMethod::semi_analytic, 0);
        row.mc = Cell{e.estimate, e.standard_error, "mc"};
    }
    if (s.methods.mc_full) {
        const auto e = run_mc(mcsim::McMethod::full_statistic, 1);
        row.mc_full = Cell{e.estimate, e.standard_error, "mc-full"};
    }
}

void check_common(double u, int order, int branches, const SweepSettings& s) {
    if (!(u > 0.0)) throw DomainError("sweep: u must be positive");
    if (order < 1) throw DomainError("sweep: N must be >= 1");
    if (branches < 1) throw DomainError("sweep: L must be >= 1");
    if (!s.methods.any()) throw DomainError("sweep: no method selected");
}

std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n\r") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

using Json = nlohmann::ordered_json;

// Row as (column, value) pairs; shared by both writers so they stay in sync.
std::vector<std::pair<std::string, Json>> row_fields(const SweepResult& r, const SweepRow& row) {
    std::vector<std::pair<std::string, Json>> f;
    f.emplace_back(r.kind == Kind::roc ? "pf" : "snr_db", row.x);
    if (r.kind == Kind::roc) f.emplace_back("snr_db", r.snr_db);
    f.emplace_back("u", r.u);
    f.emplace_back("N", r.order);
    f.emplace_back("L", r.branches);
    f.emplace_back("lambda", row.lambda);
    if (r.kind == Kind::pd_vs_snr) f.emplace_back("pf", row.pf);
    f.emplace_back("branch_pf", row.branch_pf);
    auto cell = [&](const std::optional<Cell>& c, const char* value, const char* err,
                    const char* prov) {
        if (!c) return;
        f.emplace_back(value, c->value);
        f.emplace_back(err, c->error);
        f.emplace_back(prov, c->provenance);
    };
    cell(row.closed, "pd_closed", "closed_err", "closed_provenance");
    cell(row.quad, "pd_quad", "quad_err", "quad_provenance");
    cell(row.mc, "pd_mc", "mc_stderr", "mc_provenance");
    cell(row.mc_full, "pd_mc_full", "mc_full_stderr", "mc_full_provenance");
    return f;
}

std::string render(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_number(v.get<double>());
    return {};
}

}  // namespace

MethodSet parse_methods(const std::string& list) {
    MethodSet m;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "closed") {
            m.closed = true;
        } else if (item == "quad") {
            m.quad = true;
        } else if (item == "mc") {
            m.mc = true;
        } else if (item == "mc-full") {
            m.mc_full = true;
        } else {
            throw DomainError("unknown method '" + item + "' (expected closed, quad, mc, mc-full)");
        }
    }
    return m;
}

SweepResult run_pd_sweep(double u, std::optional<double> pf, std::optional<double> lambda,
                         const std::vector<double>& snr_db, int order, int branches,
                         const SweepSettings& settings, std::uint64_t scenario_index) {
    check_common(u, order, branches, settings);
    if (pf.has_value() == lambda.has_value()) {
        throw DomainError("pd sweep: set exactly one of pf and lambda");
    }
    const double lam = lambda ? *lambda : detection::threshold_from_pf(u, *pf);
    if (!(lam >= 0.0)) throw DomainError("pd sweep: threshold must be >= 0");
    const double bpf = detection::pf_from_threshold(u, lam);

    SweepResult result{Kind::pd_vs_snr, u, order, branches, 0.0, settings.samples, settings.seed, {}};
    result.rows.resize(snr_db.size());
    const unsigned mc_threads = 1;
    parallel_for(snr_db.size(), settings.threads, [&](std::size_t i) {
        SweepRow& row = result.rows[i];
        row.x = snr_db[i];
        row.lambda = lam;
        row.branch_pf = bpf;
        row.pf = detection::pf_sls(u, lam, branches);
        evaluate_row(row, u, lam, std::pow(10.0, snr_db[i] / 10.0), order, branches, settings,
                     (scenario_index << 20) + i, mc_threads);
    });
    return result;
}

SweepResult run_roc(double u, double snr_db, const std::vector<double>& pf_grid, int order,
                    int branches, const SweepSettings& settings, std::uint64_t scenario_index) {
    check_common(u, order, branches, settings);
    const double snr = std::pow(10.0, snr_db / 10.0);
    SweepResult result{Kind::roc, u, order, branches, snr_db, settings.samples, settings.seed, {}};
    result.rows.resize(pf_grid.size());
    parallel_for(pf_grid.size(), settings.threads, [&](std::size_t i) {
        SweepRow& row = result.rows[i];
        row.x = pf_grid[i];
        row.branch_pf = detection::branch_pf_for_sls(pf_grid[i], branches);
        row.lambda = detection::threshold_from_pf(u, row.branch_pf);
        row.pf = pf_grid[i];
        evaluate_row(row, u, row.lambda, snr, order, branches, settings, (scenario_index << 20) + i, 1);
    });
    return result;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi >= lo) || n < 1) throw DomainError("log_grid: need 0 < lo <= hi and n >= 1");
    std::vector<double> g(static_cast<std::size_t>(n));
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < n; ++i) g[i] = n == 1 ? lo : std::pow(10.0, a + (b - a) * i / (n - 1));
    if (n > 1) g.back() = hi;
    return g;
}

std::vector<double> parse_range(const std::string& text) {
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() || !std::isfinite(v)) {
            throw DomainError("bad number '" + s + "' in range '" + text + "'");
        }
        return v;
    };
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() == 1) return {number(parts[0])};
    if (parts.size() != 3) throw DomainError("range must be start:stop:step, got '" + text + "'");
    const double start = number(parts[0]);
    const double stop = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0) || stop < start) {
        throw DomainError("range '" + text + "' needs step > 0 and stop >= start");
    }
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 1'000'000) throw DomainError("range '" + text + "' has too many points");
    std::vector<double> out;
    for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

std::vector<std::string> csv_header(const SweepResult& r) {
    std::vector<std::string> h;
    const SweepRow probe = r.rows.empty() ? SweepRow{} : r.rows.front();
    for (const auto& [name, value] : row_fields(r, probe)) h.push_back(name);
    return h;
}

void write_csv(const std::vector<SweepResult>& results, std::ostream& out) {
    bool header = false;
    for (const SweepResult& r : results) {
        for (const SweepRow& row : r.rows) {
            const auto fields = row_fields(r, row);
            if (!header) {
                for (std::size_t i = 0; i < fields.size(); ++i) {
                    out << (i ? "," : "") << csv_field(fields[i].first);
                }
                out << "\r\n";
                header = true;
            }
            for (std::size_t i = 0; i < fields.size(); ++i) {
                out << (i ? "," : "") << csv_field(render(fields[i].second));
            }
            out << "\r\n";
        }
    }
}

void write_json(const std::vector<SweepResult>& results, std::ostream& out) {
    Json doc = Json::array();
    for (const SweepResult& r : results) {
        Json s;
        s["kind"] = r.kind == Kind::roc ? "roc" : "pd-sweep";
        s["u"] = r.u;
        s["N"] = r.order;
        s["L"] = r.branches;
        if (r.kind == Kind::roc) s["snr_db"] = r.snr_db;
        s["samples"] = r.samples;
        s["seed"] = r.seed;
        s["columns"] = csv_header(r);
        Json rows = Json::array();
        for (const SweepRow& row : r.rows) {
            Json o = Json::object();
            for (auto& [name, value] : row_fields(r, row)) o[name] = value;
            rows.push_back(std::move(o));
        }
        s["rows"] = std::move(rows);
        doc.push_back(std::move(s));
    }
    out << doc.dump(2) << "\n";
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace edcascade::sweep
