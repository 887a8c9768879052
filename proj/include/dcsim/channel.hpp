#pragma once

#include <cstdint>

#include "dcsim/bits.hpp"
#include "dcsim/rng.hpp"

namespace dcsim {

// Binary insertion/deletion/substitution channel. Each input bit is deleted
// with probability p_id/2, replaced by two uniform random bits (insertion)
// with probability p_id/2, or transmitted with probability 1 - p_id, in which
// case it is flipped with probability p_s. The timing drift
// (received - transmitted bit count) performs a random walk reflected at
// +-d_max: the boundary-violating event is disallowed and its mass is
// redistributed proportionally over the remaining events.
struct ChannelParams {
    double p_id = 0.0;
    double p_s = 0.0;
    int d_max = 8;

    void validate() const;  // throws std::invalid_argument
};

// Event probabilities at a given drift, with boundary renormalization applied.
// The simulator and the detector trellis must share this function.
struct EventProbs {
    double del;
    double ins;
    double trans;
};
EventProbs event_probs(const ChannelParams& p, int drift);

BitSeq transmit(const BitSeq& x, const ChannelParams& p, Philox& rng);
BitSeq transmit(const BitSeq& x, const ChannelParams& p, std::uint64_t seed);

// Exact P(y|x) by summing over every event sequence (deletion, insertion with
// each of the four two-bit patterns, transmission with or without flip) whose
// emission equals y. Exponential; refuses len(x) > 10.
double enumerate_likelihood(const BitSeq& x, const BitSeq& y, const ChannelParams& p);

}  // namespace dcsim
