#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dcsim/channel.hpp"
#include "dcsim/dc.hpp"
#include "dcsim/trellis.hpp"

namespace dcsim {

// Monte Carlo rate estimate in bits per channel input bit.
struct RateEstimate {
    double value = 0.0;      // clamped to [0, 1]
    double raw = 0.0;        // unclamped mean, for diagnostics
    double std_error = 0.0;  // standard error over trials
    int trials = 0;
    std::size_t n = 0;       // per-trial sequence length
};

// Symmetric information rate: average of (1/n)[log2 P(y|x) - log2 P(y)] over
// i.u.d. x and y = transmit(x).
RateEstimate estimate_sir(const ChannelParams& params, std::size_t n, int trials,
                          std::uint64_t seed, int threads = 1);

// (1/N) sum_j [1 - log2(1 + exp(-Lt_j))] with Lt_j = llr_j for bit 0 and
// -llr_j for bit 1. Valid because the detector emits true posterior ratios.
double mutual_info_from_llrs(const LlrSeq& llrs, const BitSeq& truth);

// BCJR-once rate of the delay-scheme channel: per delay i, subblocks with
// larger delay act as perfectly known pilots and the mutual information of
// the delay-i positions is measured from one detection pass.
struct OnceRateResult {
    RateEstimate total;                   // (1/m) sum |D_i| R^(i)
    std::vector<RateEstimate> per_delay;  // R^(i)
};
OnceRateResult estimate_once_rate_dc(const ChannelParams& params, const DelayScheme& scheme,
                                     std::size_t n_s, int trials, std::uint64_t seed,
                                     int threads = 1);

// BCJR-once rate with plain i.u.d. inputs; identical to the DC once rate with
// T = (0) (and produces the same values for the same seed).
RateEstimate estimate_once_rate_iud(const ChannelParams& params, std::size_t n, int trials,
                                    std::uint64_t seed, int threads = 1);

// Two known marker bits after every d payload bits; the (d/(d+2)) insertion
// rate loss is included in the reported value.
RateEstimate estimate_once_rate_marker(const ChannelParams& params, int d, std::size_t n,
                                       int trials, std::uint64_t seed, int threads = 1);

// Bisection for the p_id at which a (statistically monotone decreasing) rate
// estimator crosses target_rate. The evaluator is called with a trial budget
// that doubles until the estimate separates from the target by 2 standard
// errors or max_trials is reached.
using RateFn = std::function<RateEstimate(double p_id, int trials, std::uint64_t seed)>;

struct RateLimitOptions {
    double p_lo = 0.0;
    double p_hi = 0.5;
    double tolerance = 0.002;  // final bracket width
    int initial_trials = 10;
    int max_trials = 160;
    std::uint64_t seed = 1;
};

struct RateLimitResult {
    double p_id = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool achieved = false;  // false: target not crossed inside [p_lo, p_hi]
};

RateLimitResult find_rate_limit(const RateFn& estimator, double target_rate,
                                const RateLimitOptions& opts);

}  // namespace dcsim
