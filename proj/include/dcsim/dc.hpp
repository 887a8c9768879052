#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "dcsim/bits.hpp"
#include "dcsim/channel.hpp"
#include "dcsim/trellis.hpp"

namespace dcsim {

// Exact fraction for rate accounting.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Delay scheme T = (T_1..T_m): subblock i of each codeword is transmitted
// with delay T_i. at_delay[j] lists subblocks with delay exactly j,
// beyond_delay[j] those with delay greater than j (1-based subblock ids).
struct DelayScheme {
    std::vector<int> delays;
    int t_max = 0;
    std::vector<std::vector<int>> at_delay;
    std::vector<std::vector<int>> beyond_delay;

    int m() const { return static_cast<int>(delays.size()); }
};

DelayScheme build_delay_scheme(const std::vector<int>& delays);
DelayScheme uniform_delay_scheme(int t_max);  // T = (0, 1, ..., t_max)

// R * L / (L + t_max).
Rational dc_rate(Rational code_rate, int num_codewords, int t_max);

// Where one frame position comes from.
struct SourceRef {
    int codeword = 0;  // 1-based; 0 = known bit
    int subblock = 0;  // 1-based
    int pos = 0;       // 0-based within subblock
};

// Deterministic per-codeword interleaver permutation; interleaved[k] =
// codeword[perm[k]].
std::vector<std::uint32_t> codeword_permutation(std::uint64_t interleaver_seed,
                                                int codeword_index, std::size_t n);
// Known filler bit at (frame, position); both sides derive it from the seed.
Bit known_bit(std::uint64_t known_seed, int frame_index, std::size_t pos);

// L + t_max frames of length n, built by interleaving delayed subblocks of
// the (permuted) codewords; out-of-range codeword slots carry known bits.
struct DcFrameSet {
    std::vector<BitSeq> frames;
    DelayScheme scheme;
    int num_codewords = 0;
    std::size_t n = 0;
    std::uint64_t interleaver_seed = 0;
    std::uint64_t known_seed = 0;

    // Provenance of frame position (frame_index 1-based, pos 0-based).
    SourceRef source(int frame_index, std::size_t pos) const;
};

DcFrameSet dc_encode(const std::vector<BitSeq>& codewords, const DelayScheme& scheme,
                     std::uint64_t interleaver_seed, std::uint64_t known_seed);

// Provenance of a frame position for a given geometry; dc_encode and the
// decoding side share this.
SourceRef frame_source(const DelayScheme& scheme, int num_codewords, std::size_t n,
                       int frame_index, std::size_t pos);

// Assembles the codeword-domain LLR sequence for codeword t from the
// detector outputs of frames t .. t+t_max (frame_llrs[i] belongs to frame
// t+i; an empty entry means the frame was erased and contributes zeros).
LlrSeq gather_llrs(const std::vector<LlrSeq>& frame_llrs, int codeword_index,
                   const DelayScheme& scheme, std::size_t n,
                   std::uint64_t interleaver_seed);

// Per-codeword outcome of one chained estimation step.
struct CodewordStats {
    int detections = 0;
    int bp_iterations = 0;
    bool converged = false;
    long long bit_errors = 0;  // filled when truth is supplied
};

struct ChainStats {
    std::vector<CodewordStats> per_codeword;
    long long total_detections = 0;
    long long erased_frames = 0;
};

struct ChainResult {
    std::vector<BitSeq> decoded;
    ChainStats stats;
};

// Code decoder plugged into the chain: maps (codeword index, gathered LLRs)
// to hard decision + extrinsic LLRs.
struct DecodeResult {
    BitSeq hard;
    LlrSeq extrinsic;
    int iterations = 0;
    bool converged = false;
};
using CodeDecoder = std::function<DecodeResult(int codeword_index, const LlrSeq& llrs)>;

// Chained detection and decoding: estimates codewords 1..L in order; the
// detection of frame t+i uses extrinsic priors for subblocks of already
// decoded codewords, known priors for filler bits, and i.u.d. priors
// elsewhere. Each codeword costs exactly t_max+1 detector executions.
// Erased frames (DesyncError) contribute zero LLRs.
ChainResult chained_decode(const std::vector<BitSeq>& received, const DelayScheme& scheme,
                           std::size_t n, int num_codewords, const CodeDecoder& decoder,
                           const ChannelParams& params, std::uint64_t interleaver_seed,
                           std::uint64_t known_seed,
                           const std::vector<BitSeq>* truth = nullptr,
                           int threads = 1);

}  // namespace dcsim
