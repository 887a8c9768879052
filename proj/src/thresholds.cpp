#include "dcsim/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dcsim/llr_math.hpp"
#include "dcsim/parallel.hpp"
#include "dcsim/trellis.hpp"

namespace dcsim {

LlrPopulation sample_dcsc_llrs(const ChannelParams& params, const DelayScheme& scheme,
                               std::size_t n_s, std::size_t n_pop, std::uint64_t seed,
                               int threads) {
    params.validate();
    if (n_s == 0 || n_pop == 0)
        throw std::invalid_argument("sample_dcsc_llrs: bad n_s/n_pop");
    const int m = scheme.m();
    const std::size_t n = n_s * static_cast<std::size_t>(m);
    const std::size_t per_round = n;  // n_s * |D_i| summed over i
    const std::size_t rounds = (n_pop + per_round - 1) / per_round;

    // One work item per (round, delay); each fills its own slot.
    std::vector<std::vector<double>> slots(rounds * (scheme.t_max + 1));
    std::vector<Detector> dets(std::max(1, threads));
    parallel_for(slots.size(), threads, [&](std::size_t item, std::size_t worker) {
        const std::size_t round = item / (scheme.t_max + 1);
        const int i = static_cast<int>(item % (scheme.t_max + 1));
        Philox rng(mix_seed(seed, seed_tag::kTrial, (round << 8) | static_cast<std::size_t>(i)));
        const BitSeq x = random_bits(n, rng);
        PriorSeq priors(n, Prior{0.5});
        for (std::size_t k = 0; k < n; ++k)
            if (scheme.delays[k % m] > i) priors[k] = Prior::known(x[k]);
        const BitSeq y = transmit(x, params, rng);
        Detector& det = dets[worker % dets.size()];
        const LlrSeq llrs = det.detect(y, n, priors, params);
        auto& out = slots[item];
        out.reserve(n_s * scheme.at_delay[i].size());
        for (std::size_t k = 0; k < n; ++k)
            if (scheme.delays[k % m] == i)
                out.push_back(x[k] == 0 ? llrs[k] : -llrs[k]);
    });

    LlrPopulation pop;
    pop.samples.reserve(rounds * per_round);
    for (const auto& s : slots)
        pop.samples.insert(pop.samples.end(), s.begin(), s.end());

    // Shuffle before truncating so the kept subset stays proportional to
    // |D_i|/m across delays.
    Philox rng(mix_seed(seed, seed_tag::kPopulation, 0));
    for (std::size_t i = pop.samples.size(); i-- > 1;)
        std::swap(pop.samples[i], pop.samples[rng.next_below(i + 1)]);
    pop.samples.resize(n_pop);
    return pop;
}

LlrPopulation bsc_population(double q, std::size_t n_pop) {
    if (!(q >= 0.0 && q <= 0.5)) throw std::invalid_argument("bsc_population: bad q");
    LlrPopulation pop;
    pop.samples.assign(n_pop, kLlrClip);
    if (q > 0.0) {
        const double c = llr_clip(std::log((1.0 - q) / q));
        const std::size_t flips = static_cast<std::size_t>(std::llround(q * n_pop));
        for (std::size_t i = 0; i < n_pop; ++i)
            pop.samples[i] = i < flips ? -c : c;
    }
    return pop;
}

namespace {

// Inverse-CDF degree sampler over an edge-perspective distribution.
class DegreeSampler {
public:
    explicit DegreeSampler(const std::map<int, double>& dist) {
        double acc = 0.0;
        for (const auto& [deg, frac] : dist) {
            acc += frac;
            cdf_.push_back(acc);
            deg_.push_back(deg);
        }
        cdf_.back() = 1.0;
    }

    int draw(Philox& rng) const {
        const double u = rng.next_double();
        for (std::size_t i = 0; i < cdf_.size(); ++i)
            if (u < cdf_[i]) return deg_[i];
        return deg_.back();
    }

private:
    std::vector<double> cdf_;
    std::vector<int> deg_;
};

double error_fraction(const std::vector<double>& msgs) {
    double acc = 0.0;
    for (double v : msgs) acc += v < 0.0 ? 1.0 : (v == 0.0 ? 0.5 : 0.0);
    return acc / static_cast<double>(msgs.size());
}

}  // namespace

DeTrace de_iterate(const LlrPopulation& channel, const DegreeDist& dd,
                   const DeOptions& opts, std::size_t n_pop, std::uint64_t seed) {
    dd.validate();
    if (channel.samples.empty()) throw std::invalid_argument("de_iterate: empty channel");
    if (n_pop == 0) throw std::invalid_argument("de_iterate: n_pop == 0");

    const DegreeSampler var_deg(dd.lambda);
    const DegreeSampler chk_deg(dd.rho);
    const std::size_t n_ch = channel.samples.size();

    Philox rng(mix_seed(seed, seed_tag::kPopulation, 1));
    std::vector<double> v2c(n_pop), c2v(n_pop);
    for (auto& v : v2c) v = channel.samples[rng.next_below(n_ch)];

    DeTrace trace;
    trace.pe.push_back(error_fraction(v2c));
    if (trace.pe.back() < opts.target_pe) {
        trace.converged = true;
        return trace;
    }
    for (int iter = 1; iter <= opts.max_iters; ++iter) {
        for (std::size_t k = 0; k < n_pop; ++k) {
            const int dc = chk_deg.draw(rng);
            double msg = v2c[rng.next_below(n_pop)];
            for (int e = 2; e < dc; ++e) msg = boxplus(msg, v2c[rng.next_below(n_pop)]);
            c2v[k] = msg;
        }
        for (std::size_t k = 0; k < n_pop; ++k) {
            const int dv = var_deg.draw(rng);
            double msg = channel.samples[rng.next_below(n_ch)];
            for (int e = 1; e < dv; ++e) msg += c2v[rng.next_below(n_pop)];
            v2c[k] = llr_clip(msg);
        }
        trace.pe.push_back(error_fraction(v2c));
        if (trace.pe.back() < opts.target_pe) {
            trace.converged = true;
            break;
        }
    }
    return trace;
}

ThresholdResult find_bp_threshold(const DegreeDist& dd, const DelayScheme& scheme,
                                  double p_s, const ThresholdOptions& opts,
                                  std::uint64_t seed) {
    if (!(opts.lo < opts.hi)) throw std::invalid_argument("find_bp_threshold: bad range");
    std::size_t n_s = opts.n_s;
    if (n_s == 0) n_s = std::max<std::size_t>(1, 10000 / static_cast<std::size_t>(scheme.m()));

    std::uint64_t probe = 0;
    const auto succeeds = [&](double p_id) {
        const ChannelParams params{p_id, p_s, opts.d_max};
        const std::uint64_t probe_seed = mix_seed(seed, seed_tag::kProbe, probe++);
        const LlrPopulation pop =
            sample_dcsc_llrs(params, scheme, n_s, opts.n_pop, probe_seed, opts.threads);
        return de_iterate(pop, dd, opts.de, opts.n_pop, probe_seed).converged;
    };

    ThresholdResult res;
    if (!succeeds(opts.lo)) {
        res.found = false;
        res.value = opts.lo;
        res.last_success = opts.lo;
        res.first_failure = opts.lo;
        return res;
    }
    res.found = true;
    if (succeeds(opts.hi)) {
        res.last_success = opts.hi;
        res.first_failure = std::numeric_limits<double>::infinity();
        res.value = opts.hi;
        return res;
    }
    double lo = opts.lo, hi = opts.hi;
    while (hi - lo > opts.resolution) {
        const double mid = 0.5 * (lo + hi);
        if (succeeds(mid))
            lo = mid;
        else
            hi = mid;
    }
    res.last_success = lo;
    res.first_failure = hi;
    res.value = 0.5 * (lo + hi);
    return res;
}

}  // namespace dcsim
