#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcsim/rng.hpp"

namespace dcsim {

using Bit = std::uint8_t;
using BitSeq = std::vector<Bit>;

inline BitSeq random_bits(std::size_t n, Philox& rng) {
    BitSeq out(n);
    for (auto& b : out) b = rng.next_bit() ? 1 : 0;
    return out;
}

inline BitSeq complemented(const BitSeq& x) {
    BitSeq out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] ^ 1u;
    return out;
}

inline std::string to_string(const BitSeq& x) {
    std::string s;
    s.reserve(x.size());
    for (Bit b : x) s.push_back(b ? '1' : '0');
    return s;
}

inline BitSeq bits_from_string(const std::string& s) {
    BitSeq out;
    out.reserve(s.size());
    for (char c : s) out.push_back(c == '1' ? 1 : 0);
    return out;
}

}  // namespace dcsim
