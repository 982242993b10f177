#include "edcascade/mcsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "edcascade/errors.hpp"
#include "edcascade/specfun.hpp"

namespace edcascade::mcsim {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

struct Partial {
    double sum = 0.0;
    double sum_sq = 0.0;
};

RngStream block_stream(const RngStream& root, std::uint64_t block) {
    return RngStream(root.seed(), (root.stream_index() << 32) + block);
}

// Runs body(stream, first_trial, count) for every block and returns the
// per-block partials in block order.
template <class Body>
std::vector<Partial> run_blocks(std::uint64_t n, const RngStream& root, const McOptions& opts,
                                Body body) {
    if (opts.block_size == 0) throw DomainError("monte carlo: block size must be positive");
    const std::uint64_t bs = opts.block_size;
    const std::uint64_t blocks = (n + bs - 1) / bs;
    std::vector<Partial> partial(blocks);

    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        try {
            for (std::uint64_t b = next++; b < blocks && !failed; b = next++) {
                RngStream rng = block_stream(root, b);
                const std::uint64_t first = b * bs;
                partial[b] = body(rng, first, std::min(bs, n - first));
            }
        } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return partial;
}

McEstimate summarize(const std::vector<Partial>& parts, std::uint64_t n, McMethod method) {
    Partial total;
    for (const Partial& p : parts) {
        total.sum += p.sum;
        total.sum_sq += p.sum_sq;
    }
    const double nd = static_cast<double>(n);
    const double mean = total.sum / nd;
    double se;
    if (method == McMethod::full_statistic) {
        se = std::sqrt(std::max(0.0, mean * (1.0 - mean)) / nd);
    } else {
        const double var = std::max(0.0, (total.sum_sq - total.sum * mean) / (nd - 1.0));
        se = std::sqrt(var / nd);
    }
    return {mean, se, n, method};
}

void check_samples(std::uint64_t n) {
    if (n < 1000) throw DomainError("monte carlo: at least 1000 samples required");
}

bool is_positive_integer(double u) { return u >= 1.0 && std::floor(u) == u && u < 1e6; }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed), stream_(stream_index) {}

std::array<std::uint32_t, 4> RngStream::philox(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

void RngStream::refill() {
    const std::array<std::uint32_t, 4> ctr{
        static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    buffer_ = philox(ctr, {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    ++counter_;
    used_ = 0;
}

std::uint32_t RngStream::next_u32() {
    if (used_ == 4) refill();
    return buffer_[used_++];
}

double RngStream::uniform() {
    const std::uint64_t hi = next_u32() >> 5;  // 27 bits
    const std::uint64_t lo = next_u32() >> 6;  // 26 bits
    return (static_cast<double>((hi << 26) | lo) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    // Box-Muller; uniform() never returns 0
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_normal_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

double RngStream::exponential() { return -std::log(uniform()); }

const char* to_string(McMethod m) {
    return m == McMethod::full_statistic ? "full_statistic" : "semi_analytic";
}

double sample_cascaded_snr(double avg_snr, int order, RngStream& rng) {
    if (!(avg_snr >= 0.0)) throw DomainError("sample_cascaded_snr: average SNR must be >= 0");
    if (order < 1) throw DomainError("sample_cascaded_snr: cascade order N must be >= 1");
    double g = avg_snr;
    for (int i = 0; i < order; ++i) g *= rng.exponential();
    return g;
}

double simulate_statistic(double u, double gamma, RngStream& rng) {
    if (!is_positive_integer(u)) {
        throw DomainError("simulate_statistic: u must be a positive integer (2u degrees of freedom)");
    }
    if (!(gamma >= 0.0)) throw DomainError("simulate_statistic: SNR must be >= 0");
    const int dof = 2 * static_cast<int>(u);
    const double first = rng.normal() + std::sqrt(2.0 * gamma);
    double y = first * first;
    for (int i = 1; i < dof; ++i) {
        const double z = rng.normal();
        y += z * z;
    }
    return y;
}

McEstimate estimate_avg_pd(const detection::DetectorConfig& config, std::uint64_t n_samples,
                           McMethod method, const RngStream& root, const McOptions& opts) {
    check_samples(n_samples);
    const double lambda = config.lambda();
    if (method == McMethod::full_statistic && !is_positive_integer(config.u)) {
        throw DomainError("estimate_avg_pd: full-statistic simulation needs integer u");
    }
    const double u = config.u;
    const double snr = config.avg_snr;
    const int order = config.order;
    auto body = [&](RngStream& rng, std::uint64_t, std::uint64_t count) {
        Partial p;
        for (std::uint64_t i = 0; i < count; ++i) {
            const double g = sample_cascaded_snr(snr, order, rng);
            double x;
            if (method == McMethod::full_statistic) {
                x = simulate_statistic(u, g, rng) > lambda ? 1.0 : 0.0;
            } else {
                x = detection::pd_awgn(u, g, lambda);
            }
            p.sum += x;
            p.sum_sq += x * x;
        }
        return p;
    };
    return summarize(run_blocks(n_samples, root, opts, body), n_samples, method);
}

McEstimate estimate_sls_pd(double u, double lambda, const std::vector<double>& branch_snrs,
                           int order, std::uint64_t n_samples, McMethod method,
                           const RngStream& root, const McOptions& opts) {
    check_samples(n_samples);
    if (branch_snrs.empty()) throw DomainError("estimate_sls_pd: at least one branch required");
    if (!(lambda >= 0.0)) throw DomainError("estimate_sls_pd: threshold must be >= 0");
    if (method == McMethod::full_statistic && !is_positive_integer(u)) {
        throw DomainError("estimate_sls_pd: full-statistic simulation needs integer u");
    }
    auto body = [&](RngStream& rng, std::uint64_t, std::uint64_t count) {
        Partial p;
        for (std::uint64_t i = 0; i < count; ++i) {
            double x;
            if (method == McMethod::full_statistic) {
                double best = 0.0;
                for (double s : branch_snrs) {
                    best = std::max(best, simulate_statistic(u, sample_cascaded_snr(s, order, rng), rng));
                }
                x = best > lambda ? 1.0 : 0.0;
            } else {
                double miss = 1.0;
                for (double s : branch_snrs) {
                    miss *= 1.0 - detection::pd_awgn(u, sample_cascaded_snr(s, order, rng), lambda);
                }
                x = 1.0 - miss;
            }
            p.sum += x;
            p.sum_sq += x * x;
        }
        return p;
    };
    return summarize(run_blocks(n_samples, root, opts, body), n_samples, method);
}

McEstimate estimate_sls_pf(double u, double lambda, int branches, std::uint64_t n_samples,
                           const RngStream& root, const McOptions& opts) {
    check_samples(n_samples);
    if (branches < 1) throw DomainError("estimate_sls_pf: L must be >= 1");
    auto body = [&](RngStream& rng, std::uint64_t, std::uint64_t count) {
        Partial p;
        for (std::uint64_t i = 0; i < count; ++i) {
            double best = 0.0;
            for (int l = 0; l < branches; ++l) best = std::max(best, simulate_statistic(u, 0.0, rng));
            const double x = best > lambda ? 1.0 : 0.0;
            p.sum += x;
            p.sum_sq += x;
        }
        return p;
    };
    return summarize(run_blocks(n_samples, root, opts, body), n_samples, McMethod::full_statistic);
}

std::vector<Trial> draw_trials(const detection::DetectorConfig& config, std::uint64_t n_samples,
                               const RngStream& root, const McOptions& opts) {
    config.validate();
    if (!is_positive_integer(config.u)) throw DomainError("draw_trials: u must be a positive integer");
    std::vector<Trial> out(n_samples);
    auto body = [&](RngStream& rng, std::uint64_t first, std::uint64_t count) {
        for (std::uint64_t i = 0; i < count; ++i) {
            const double g = sample_cascaded_snr(config.avg_snr, config.order, rng);
            out[first + i] = {g, simulate_statistic(config.u, g, rng)};
        }
        return Partial{};
    };
    if (n_samples > 0) run_blocks(n_samples, root, opts, body);
    return out;
}

}  // namespace edcascade::mcsim
