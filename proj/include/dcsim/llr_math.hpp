#pragma once

#include <algorithm>
#include <cmath>

namespace dcsim {

// LLR convention throughout: L = log(P(bit=0)/P(bit=1)), natural log,
// clipped to +-kLlrClip. 40 is beyond double resolution of the underlying
// probabilities and safe for message passing.
inline constexpr double kLlrClip = 40.0;

inline double llr_clip(double v) { return std::clamp(v, -kLlrClip, kLlrClip); }

// log(1 + exp(v)) without overflow.
inline double log1p_exp(double v) {
    if (v > 0.0) return v + std::log1p(std::exp(-v));
    return std::log1p(std::exp(v));
}

// P(bit=0) from an LLR.
inline double prob0_from_llr(double llr) { return 1.0 / (1.0 + std::exp(-llr)); }

// P(hard decision wrong) from an LLR magnitude.
inline double error_prob_from_llr(double llr) {
    return 1.0 / (1.0 + std::exp(std::fabs(llr)));
}

// Exact check-node combine: 2 atanh(tanh(a/2) tanh(b/2)), in the stable
// sign/magnitude form.
inline double boxplus(double a, double b) {
    const double sab = std::fabs(a + b), dab = std::fabs(a - b);
    // 0.5 (|a+b| - |a-b|) == sign(a) sign(b) min(|a|,|b|)
    return 0.5 * (sab - dab) + log1p_exp(-sab) - log1p_exp(-dab);
}

}  // namespace dcsim
