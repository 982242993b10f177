#pragma once

// Monte Carlo oracle for the averaged detection probability.
//
// Randomness comes from Philox4x32-10 streams keyed by the seed, so a stream
// is a pure function of (seed, stream index, position). Trials are cut into
// fixed-size blocks, block b draws from its own stream and the partial sums are
// reduced in block order; results therefore do not depend on the thread count.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "edcascade/detection.hpp"

namespace edcascade::mcsim {

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_index() const noexcept { return stream_; }

    std::uint32_t next_u32();
    /// Uniform on the open interval (0, 1), 53 random bits.
    double uniform();
    double normal();
    /// Unit-mean exponential.
    double exponential();

    /// Raw block function, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key);

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

enum class McMethod { full_statistic, semi_analytic };

const char* to_string(McMethod m);

struct McEstimate {
    double estimate;
    double standard_error;
    std::uint64_t n_samples;
    McMethod method;
};

struct McOptions {
    /// Worker threads; 0 uses the hardware concurrency.
    unsigned threads = 0;
    /// Trials per block. Part of the reproducibility contract: changing it changes the draws.
    std::size_t block_size = std::size_t{1} << 16;
};

/// avg_snr * E_1 * ... * E_N with E_i unit-mean exponentials.
double sample_cascaded_snr(double avg_snr, int order, RngStream& rng);

/// Chi-square statistic with 2u degrees of freedom and noncentrality 2 gamma
/// (central when gamma = 0). u must be a positive integer.
double simulate_statistic(double u, double gamma, RngStream& rng);

/// Fading-averaged P_d for one branch at config.avg_snr. The streams used are
/// (root.seed(), root.stream_index() * 2^32 + block).
McEstimate estimate_avg_pd(const detection::DetectorConfig& config, std::uint64_t n_samples,
                           McMethod method, const RngStream& root, const McOptions& opts = {});

/// Selection diversity: the largest of the branch statistics is compared with lambda.
McEstimate estimate_sls_pd(double u, double lambda, const std::vector<double>& branch_snrs,
                           int order, std::uint64_t n_samples, McMethod method,
                           const RngStream& root, const McOptions& opts = {});

/// False-alarm probability of selection over L noise-only branches.
McEstimate estimate_sls_pf(double u, double lambda, int branches, std::uint64_t n_samples,
                           const RngStream& root, const McOptions& opts = {});

struct Trial {
    double snr;
    double statistic;
};

/// Raw (gamma, Y) draws for config.avg_snr, in trial order.
std::vector<Trial> draw_trials(const detection::DetectorConfig& config, std::uint64_t n_samples,
                               const RngStream& root, const McOptions& opts = {});

}  // namespace edcascade::mcsim
