#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dcsim/channel.hpp"
#include "dcsim/llr_math.hpp"

namespace dcsim {

// Per-bit a priori information for the detector. p0 = P(bit = 0); an exact
// 0 or 1 encodes a known (pilot) bit.
struct Prior {
    double p0 = 0.5;

    static Prior soft(double p0) { return {p0}; }
    static Prior known(Bit b) { return {b ? 0.0 : 1.0}; }
    static Prior from_llr(double llr) { return {prob0_from_llr(llr_clip(llr))}; }
    bool is_known() const { return p0 == 0.0 || p0 == 1.0; }
};
using PriorSeq = std::vector<Prior>;

PriorSeq iud_priors(std::size_t n);
PriorSeq known_priors(const BitSeq& x);

using LlrSeq = std::vector<double>;

// Received sequence cannot be reconciled with the drift lattice; the caller
// treats the frame as erased.
struct DesyncError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Forward-backward inference over the (input position, drift) lattice of the
// IDS channel. Holds reusable buffers; use one instance per thread.
//
// Recursions run on per-column max-normalized probabilities with the log of
// the normalizers accumulated separately, so sequences of length 1e5+ stay in
// range and log-likelihoods come out exact.
class Detector {
public:
    // log P(y|x). Returns -inf if |len(y)-len(x)| > d_max or no event path
    // explains y.
    double sequence_log_likelihood(const BitSeq& x, const BitSeq& y,
                                   const ChannelParams& p);

    // log P(y) with each input bit marginalized under its prior.
    double marginal_log_likelihood(const BitSeq& y, std::size_t n,
                                   const PriorSeq& priors, const ChannelParams& p);

    // Per-bit log-APP ratios log P(X_t=0|y)/P(X_t=1|y), clipped to +-kLlrClip.
    // Throws DesyncError when the frame is infeasible.
    LlrSeq detect(const BitSeq& y, std::size_t n, const PriorSeq& priors,
                  const ChannelParams& p);

private:
    double forward(const BitSeq& y, std::size_t n, const PriorSeq& priors,
                   const ChannelParams& p, bool keep_table);

    std::vector<double> alpha_;   // (n+1) x W table when kept, else two columns
    std::vector<double> beta_;    // two columns
    std::vector<double> scratch_;
};

double sequence_log_likelihood(const BitSeq& x, const BitSeq& y,
                               const ChannelParams& p);
double marginal_log_likelihood(const BitSeq& y, std::size_t n,
                               const PriorSeq& priors, const ChannelParams& p);
LlrSeq detect(const BitSeq& y, std::size_t n, const PriorSeq& priors,
              const ChannelParams& p);

}  // namespace dcsim
