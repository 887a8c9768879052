#include "dcsim/channel.hpp"

#include <stdexcept>

namespace dcsim {

void ChannelParams::validate() const {
    if (!(p_id >= 0.0 && p_id <= 1.0))
        throw std::invalid_argument("ChannelParams: p_id must be in [0,1]");
    if (!(p_s >= 0.0 && p_s <= 1.0))
        throw std::invalid_argument("ChannelParams: p_s must be in [0,1]");
    if (d_max < 1) throw std::invalid_argument("ChannelParams: d_max must be >= 1");
}

EventProbs event_probs(const ChannelParams& p, int drift) {
    double del = 0.5 * p.p_id;
    double ins = del;
    double trans = 1.0 - p.p_id;
    if (drift <= -p.d_max) {
        const double scale = 1.0 / (1.0 - del);
        return {0.0, ins * scale, trans * scale};
    }
    if (drift >= p.d_max) {
        const double scale = 1.0 / (1.0 - ins);
        return {del * scale, 0.0, trans * scale};
    }
    return {del, ins, trans};
}

BitSeq transmit(const BitSeq& x, const ChannelParams& p, Philox& rng) {
    p.validate();
    BitSeq y;
    y.reserve(x.size() + static_cast<std::size_t>(p.d_max));
    int drift = 0;
    for (Bit b : x) {
        const EventProbs ep = event_probs(p, drift);
        const double u = rng.next_double();
        if (u < ep.del) {
            --drift;
        } else if (u < ep.del + ep.ins) {
            y.push_back(rng.next_bit() ? 1 : 0);
            y.push_back(rng.next_bit() ? 1 : 0);
            ++drift;
        } else {
            const bool flip = rng.next_double() < p.p_s;
            y.push_back(flip ? (b ^ 1u) : b);
        }
    }
    return y;
}

BitSeq transmit(const BitSeq& x, const ChannelParams& p, std::uint64_t seed) {
    Philox rng(seed);
    return transmit(x, p, rng);
}

namespace {

double enumerate_rec(const BitSeq& x, const BitSeq& y, const ChannelParams& p,
                     std::size_t t, std::size_t j, int drift) {
    if (t == x.size()) return j == y.size() ? 1.0 : 0.0;
    const EventProbs ep = event_probs(p, drift);
    double total = 0.0;
    if (ep.del > 0.0)
        total += ep.del * enumerate_rec(x, y, p, t + 1, j, drift - 1);
    if (ep.ins > 0.0 && j + 2 <= y.size()) {
        // each of the four inserted patterns carries mass ins/4
        for (int pat = 0; pat < 4; ++pat) {
            const Bit b0 = static_cast<Bit>(pat >> 1);
            const Bit b1 = static_cast<Bit>(pat & 1);
            if (y[j] == b0 && y[j + 1] == b1)
                total += 0.25 * ep.ins * enumerate_rec(x, y, p, t + 1, j + 2, drift + 1);
        }
    }
    if (j + 1 <= y.size()) {
        const double match = (y[j] == x[t]) ? 1.0 - p.p_s : p.p_s;
        if (ep.trans * match > 0.0)
            total += ep.trans * match * enumerate_rec(x, y, p, t + 1, j + 1, drift);
    }
    return total;
}

}  // namespace

double enumerate_likelihood(const BitSeq& x, const BitSeq& y, const ChannelParams& p) {
    p.validate();
    if (x.size() > 10)
        throw std::invalid_argument("enumerate_likelihood: len(x) > 10 is not enumerable");
    return enumerate_rec(x, y, p, 0, 0, 0);
}

}  // namespace dcsim
