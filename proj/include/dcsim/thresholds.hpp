#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "dcsim/channel.hpp"
#include "dcsim/dc.hpp"
#include "dcsim/ldpc.hpp"

namespace dcsim {

// Sampled channel-LLR density, sign-normalized to the all-zero convention
// (samples are flipped where the true bit is 1).
struct LlrPopulation {
    std::vector<double> samples;
};

// Channel LLRs of the delay-scheme channel under the successful-prior-round
// assumption: per delay i, subblocks with larger delay are perfect pilots and
// the delay-i detector outputs are collected, pooled across delays
// proportionally to |D_i|/m.
LlrPopulation sample_dcsc_llrs(const ChannelParams& params, const DelayScheme& scheme,
                               std::size_t n_s, std::size_t n_pop, std::uint64_t seed,
                               int threads = 1);

// Two-point BSC(q) population with deterministic proportions; used as a
// reference channel for validating the DE engine.
LlrPopulation bsc_population(double q, std::size_t n_pop);

struct DeOptions {
    int max_iters = 500;
    double target_pe = 1e-4;
};

struct DeTrace {
    std::vector<double> pe;  // pe[k] after k iterations; pe[0] is the channel
    bool converged = false;
};

// Population-dynamics density evolution: sampled sum-product message updates
// with degrees drawn from the edge-perspective distributions. Reports the
// fraction of negative variable-to-check messages per iteration and stops
// early once it falls below target_pe.
DeTrace de_iterate(const LlrPopulation& channel, const DegreeDist& dd,
                   const DeOptions& opts, std::size_t n_pop, std::uint64_t seed);

struct ThresholdOptions {
    double lo = 0.0;
    double hi = 0.3;
    double resolution = 1e-3;
    std::size_t n_pop = 100000;
    std::size_t n_s = 0;  // 0: choose so that n_s * m is about 1e4
    int d_max = 8;
    DeOptions de;
    int threads = 1;
};

struct ThresholdResult {
    double value = 0.0;
    double last_success = 0.0;
    double first_failure = 0.0;
    bool found = false;  // false: DE failed everywhere in [lo, hi]
};

// Bisection for the largest p_id at which density evolution over the
// delay-scheme channel converges. A failure already at `lo` reports
// found = false (threshold below resolution).
ThresholdResult find_bp_threshold(const DegreeDist& dd, const DelayScheme& scheme,
                                  double p_s, const ThresholdOptions& opts,
                                  std::uint64_t seed);

}  // namespace dcsim
