#include "dcsim/dc.hpp"

#include <numeric>
#include <stdexcept>

#include "dcsim/parallel.hpp"

namespace dcsim {

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

DelayScheme build_delay_scheme(const std::vector<int>& delays) {
    if (delays.empty()) throw std::invalid_argument("delay scheme: empty T");
    DelayScheme s;
    s.delays = delays;
    s.t_max = 0;
    for (int t : delays) {
        if (t < 0) throw std::invalid_argument("delay scheme: negative delay");
        s.t_max = std::max(s.t_max, t);
    }
    s.at_delay.assign(s.t_max + 1, {});
    s.beyond_delay.assign(s.t_max + 1, {});
    for (std::size_t i = 0; i < delays.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        s.at_delay[delays[i]].push_back(id);
        for (int j = 0; j < delays[i]; ++j) s.beyond_delay[j].push_back(id);
    }
    std::size_t covered = 0;
    for (const auto& d : s.at_delay) covered += d.size();
    if (covered != delays.size())
        throw std::logic_error("delay scheme: D_j do not partition subblocks");
    return s;
}

DelayScheme uniform_delay_scheme(int t_max) {
    if (t_max < 0) throw std::invalid_argument("uniform_delay_scheme: t_max < 0");
    std::vector<int> t(t_max + 1);
    std::iota(t.begin(), t.end(), 0);
    return build_delay_scheme(t);
}

Rational dc_rate(Rational code_rate, int num_codewords, int t_max) {
    if (num_codewords < 1) throw std::invalid_argument("dc_rate: L < 1");
    if (t_max < 0) throw std::invalid_argument("dc_rate: t_max < 0");
    return Rational(code_rate.num * num_codewords,
                    code_rate.den * (num_codewords + t_max));
}

std::vector<std::uint32_t> codeword_permutation(std::uint64_t interleaver_seed,
                                                int codeword_index, std::size_t n) {
    std::vector<std::uint32_t> perm(n);
    for (std::size_t k = 0; k < n; ++k) perm[k] = static_cast<std::uint32_t>(k);
    Philox rng(mix_seed(interleaver_seed, seed_tag::kInterleaver,
                        static_cast<std::uint64_t>(codeword_index)));
    for (std::size_t i = n; i-- > 1;) {
        const std::size_t j = rng.next_below(i + 1);
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

Bit known_bit(std::uint64_t known_seed, int frame_index, std::size_t pos) {
    return static_cast<Bit>(
        mix_seed(known_seed, seed_tag::kKnownBits,
                 (static_cast<std::uint64_t>(frame_index) << 32) | pos) &
        1u);
}

SourceRef frame_source(const DelayScheme& scheme, int num_codewords, std::size_t n,
                       int frame_index, std::size_t pos) {
    const int m = scheme.m();
    const int sub = static_cast<int>(pos % m) + 1;
    const int within = static_cast<int>(pos / m);
    const int cw = frame_index - scheme.delays[sub - 1];
    if (cw < 1 || cw > num_codewords) return SourceRef{0, sub, within};
    return SourceRef{cw, sub, within};
}

SourceRef DcFrameSet::source(int frame_index, std::size_t pos) const {
    return frame_source(scheme, num_codewords, n, frame_index, pos);
}

DcFrameSet dc_encode(const std::vector<BitSeq>& codewords, const DelayScheme& scheme,
                     std::uint64_t interleaver_seed, std::uint64_t known_seed) {
    if (codewords.empty()) throw std::invalid_argument("dc_encode: no codewords");
    const std::size_t n = codewords.front().size();
    const int m = scheme.m();
    if (n == 0 || n % static_cast<std::size_t>(m) != 0)
        throw std::invalid_argument("dc_encode: m must divide codeword length");
    for (const auto& c : codewords)
        if (c.size() != n) throw std::invalid_argument("dc_encode: ragged codewords");

    const int num_codewords = static_cast<int>(codewords.size());
    const std::size_t ns = n / static_cast<std::size_t>(m);

    // Interleaved codewords: tilde_c[t][k] = c[t][perm_t[k]].
    std::vector<BitSeq> tilde(codewords.size());
    for (int t = 0; t < num_codewords; ++t) {
        const auto perm = codeword_permutation(interleaver_seed, t + 1, n);
        tilde[t].resize(n);
        for (std::size_t k = 0; k < n; ++k) tilde[t][k] = codewords[t][perm[k]];
    }

    DcFrameSet fs;
    fs.scheme = scheme;
    fs.num_codewords = num_codewords;
    fs.n = n;
    fs.interleaver_seed = interleaver_seed;
    fs.known_seed = known_seed;
    fs.frames.resize(num_codewords + scheme.t_max);
    for (int f = 1; f <= num_codewords + scheme.t_max; ++f) {
        BitSeq& frame = fs.frames[f - 1];
        frame.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const SourceRef src = frame_source(scheme, num_codewords, n, f, k);
            if (src.codeword == 0) {
                frame[k] = known_bit(known_seed, f, k);
            } else {
                frame[k] = tilde[src.codeword - 1]
                                [(src.subblock - 1) * ns + static_cast<std::size_t>(src.pos)];
            }
        }
    }
    return fs;
}

LlrSeq gather_llrs(const std::vector<LlrSeq>& frame_llrs, int codeword_index,
                   const DelayScheme& scheme, std::size_t n,
                   std::uint64_t interleaver_seed) {
    const int m = scheme.m();
    if (n % static_cast<std::size_t>(m) != 0)
        throw std::invalid_argument("gather_llrs: m must divide n");
    if (frame_llrs.size() != static_cast<std::size_t>(scheme.t_max) + 1)
        throw std::invalid_argument("gather_llrs: need t_max+1 frame outputs");
    const std::size_t ns = n / static_cast<std::size_t>(m);

    LlrSeq interleaved(n, 0.0);
    for (int sub = 1; sub <= m; ++sub) {
        const int delay = scheme.delays[sub - 1];
        const LlrSeq& fl = frame_llrs[delay];
        if (fl.empty()) continue;  // erased frame: zero fill
        if (fl.size() != n) throw std::invalid_argument("gather_llrs: frame length mismatch");
        for (std::size_t p = 0; p < ns; ++p)
            interleaved[(sub - 1) * ns + p] = fl[p * m + (sub - 1)];
    }
    const auto perm = codeword_permutation(interleaver_seed, codeword_index, n);
    LlrSeq out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) out[perm[k]] = interleaved[k];
    return out;
}

ChainResult chained_decode(const std::vector<BitSeq>& received, const DelayScheme& scheme,
                           std::size_t n, int num_codewords, const CodeDecoder& decoder,
                           const ChannelParams& params, std::uint64_t interleaver_seed,
                           std::uint64_t known_seed, const std::vector<BitSeq>* truth,
                           int threads) {
    const int m = scheme.m();
    if (n % static_cast<std::size_t>(m) != 0)
        throw std::invalid_argument("chained_decode: m must divide n");
    if (received.size() != static_cast<std::size_t>(num_codewords + scheme.t_max))
        throw std::invalid_argument("chained_decode: need L + t_max frames");
    const std::size_t ns = n / static_cast<std::size_t>(m);

    ChainResult result;
    result.decoded.assign(num_codewords, {});
    result.stats.per_codeword.assign(num_codewords, {});

    // Extrinsic LLRs of decoded codewords, in interleaved (subblock) order so
    // frame priors can read them directly.
    std::vector<LlrSeq> extrinsic_int(num_codewords);

    std::vector<Detector> detectors(std::max(1, threads));
    std::vector<LlrSeq> frame_llrs(scheme.t_max + 1);

    for (int t = 1; t <= num_codewords; ++t) {
        std::atomic<long long> erased{0};
        parallel_for(static_cast<std::size_t>(scheme.t_max) + 1, threads,
                     [&](std::size_t ii, std::size_t worker) {
            const int i = static_cast<int>(ii);
            const int f = t + i;
            PriorSeq priors(n);
            for (std::size_t k = 0; k < n; ++k) {
                const SourceRef src = frame_source(scheme, num_codewords, n, f, k);
                if (src.codeword == 0) {
                    priors[k] = Prior::known(known_bit(known_seed, f, k));
                } else if (src.codeword < t) {
                    const double q =
                        extrinsic_int[src.codeword - 1]
                                     [(src.subblock - 1) * ns + static_cast<std::size_t>(src.pos)];
                    priors[k] = Prior::from_llr(q);
                } else {
                    priors[k] = Prior{0.5};
                }
            }
            Detector& det = detectors[worker % detectors.size()];
            try {
                frame_llrs[i] = det.detect(received[f - 1], n, priors, params);
            } catch (const DesyncError&) {
                frame_llrs[i] = LlrSeq{};  // erased
                erased.fetch_add(1);
            }
        });
        result.stats.erased_frames += erased.load();

        const LlrSeq gathered = gather_llrs(frame_llrs, t, scheme, n, interleaver_seed);
        DecodeResult dec = decoder(t, gathered);
        if (dec.hard.size() != n || dec.extrinsic.size() != n)
            throw std::invalid_argument("chained_decode: decoder output length mismatch");

        // Store extrinsics in interleaved order for later priors.
        const auto perm = codeword_permutation(interleaver_seed, t, n);
        LlrSeq ext_int(n);
        for (std::size_t k = 0; k < n; ++k) ext_int[k] = llr_clip(dec.extrinsic[perm[k]]);
        extrinsic_int[t - 1] = std::move(ext_int);

        CodewordStats& st = result.stats.per_codeword[t - 1];
        st.detections = scheme.t_max + 1;
        st.bp_iterations = dec.iterations;
        st.converged = dec.converged;
        if (truth) {
            const BitSeq& ref = (*truth)[t - 1];
            long long errs = 0;
            for (std::size_t k = 0; k < n; ++k) errs += (dec.hard[k] != ref[k]);
            st.bit_errors = errs;
        }
        result.stats.total_detections += st.detections;
        result.decoded[t - 1] = std::move(dec.hard);
    }
    return result;
}

}  // namespace dcsim
