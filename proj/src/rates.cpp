#include "dcsim/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dcsim/llr_math.hpp"
#include "dcsim/parallel.hpp"

namespace dcsim {

namespace {

RateEstimate reduce_trials(const std::vector<double>& values, std::size_t n) {
    RateEstimate est;
    est.trials = static_cast<int>(values.size());
    est.n = n;
    if (values.empty()) return est;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= values.size();
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    if (values.size() > 1) var /= (values.size() - 1.0);
    est.raw = mean;
    est.value = std::clamp(mean, 0.0, 1.0);
    est.std_error = values.size() > 1 ? std::sqrt(var / values.size()) : 0.0;
    return est;
}

constexpr double kLn2 = std::numbers::ln2;

}  // namespace

RateEstimate estimate_sir(const ChannelParams& params, std::size_t n, int trials,
                          std::uint64_t seed, int threads) {
    params.validate();
    if (n == 0 || trials <= 0) throw std::invalid_argument("estimate_sir: bad n/trials");
    std::vector<double> vals(trials);
    std::vector<Detector> dets(std::max(1, threads));
    const PriorSeq iud = iud_priors(n);
    parallel_for(static_cast<std::size_t>(trials), threads,
                 [&](std::size_t trial, std::size_t worker) {
        Philox rng(mix_seed(seed, seed_tag::kTrial, trial));
        const BitSeq x = random_bits(n, rng);
        const BitSeq y = transmit(x, params, rng);
        Detector& det = dets[worker % dets.size()];
        const double ll_cond = det.sequence_log_likelihood(x, y, params);
        const double ll_marg = det.marginal_log_likelihood(y, n, iud, params);
        vals[trial] = (ll_cond - ll_marg) / (static_cast<double>(n) * kLn2);
    });
    return reduce_trials(vals, n);
}

double mutual_info_from_llrs(const LlrSeq& llrs, const BitSeq& truth) {
    if (llrs.size() != truth.size())
        throw std::invalid_argument("mutual_info_from_llrs: length mismatch");
    if (llrs.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t j = 0; j < llrs.size(); ++j) {
        const double lt = truth[j] == 0 ? llrs[j] : -llrs[j];
        acc += 1.0 - log1p_exp(-lt) / kLn2;
    }
    return acc / static_cast<double>(llrs.size());
}

OnceRateResult estimate_once_rate_dc(const ChannelParams& params, const DelayScheme& scheme,
                                     std::size_t n_s, int trials, std::uint64_t seed,
                                     int threads) {
    params.validate();
    if (n_s == 0 || trials <= 0)
        throw std::invalid_argument("estimate_once_rate_dc: bad n_s/trials");
    const int m = scheme.m();
    const std::size_t n = n_s * static_cast<std::size_t>(m);

    // Delay membership per frame position.
    std::vector<int> delay_of_sub(m);
    for (int sub = 1; sub <= m; ++sub) delay_of_sub[sub - 1] = scheme.delays[sub - 1];

    // values[trial * (t_max+2)]: per-delay MI then the combined rate.
    const int slots = scheme.t_max + 2;
    std::vector<double> vals(static_cast<std::size_t>(trials) * slots, 0.0);
    std::vector<Detector> dets(std::max(1, threads));

    parallel_for(static_cast<std::size_t>(trials), threads,
                 [&](std::size_t trial, std::size_t worker) {
        Philox rng(mix_seed(seed, seed_tag::kTrial, trial));
        Detector& det = dets[worker % dets.size()];
        double combined = 0.0;
        for (int i = 0; i <= scheme.t_max; ++i) {
            const BitSeq x = random_bits(n, rng);
            PriorSeq priors(n, Prior{0.5});
            for (std::size_t k = 0; k < n; ++k)
                if (delay_of_sub[k % m] > i) priors[k] = Prior::known(x[k]);
            const BitSeq y = transmit(x, params, rng);
            const LlrSeq llrs = det.detect(y, n, priors, params);

            LlrSeq target_llrs;
            BitSeq target_bits;
            target_llrs.reserve(n_s * scheme.at_delay[i].size());
            for (std::size_t k = 0; k < n; ++k) {
                if (delay_of_sub[k % m] == i) {
                    target_llrs.push_back(llrs[k]);
                    target_bits.push_back(x[k]);
                }
            }
            const double mi = mutual_info_from_llrs(target_llrs, target_bits);
            vals[trial * slots + i] = mi;
            combined += static_cast<double>(scheme.at_delay[i].size()) * mi;
        }
        vals[trial * slots + scheme.t_max + 1] = combined / m;
    });

    OnceRateResult result;
    std::vector<double> column(trials);
    for (int i = 0; i <= scheme.t_max; ++i) {
        for (int t = 0; t < trials; ++t) column[t] = vals[static_cast<std::size_t>(t) * slots + i];
        result.per_delay.push_back(reduce_trials(column, n_s * scheme.at_delay[i].size()));
    }
    for (int t = 0; t < trials; ++t)
        column[t] = vals[static_cast<std::size_t>(t) * slots + scheme.t_max + 1];
    result.total = reduce_trials(column, n);
    return result;
}

RateEstimate estimate_once_rate_iud(const ChannelParams& params, std::size_t n, int trials,
                                    std::uint64_t seed, int threads) {
    return estimate_once_rate_dc(params, build_delay_scheme({0}), n, trials, seed, threads)
        .total;
}

RateEstimate estimate_once_rate_marker(const ChannelParams& params, int d, std::size_t n,
                                       int trials, std::uint64_t seed, int threads) {
    params.validate();
    if (d < 1) throw std::invalid_argument("estimate_once_rate_marker: d < 1");
    const std::size_t period = static_cast<std::size_t>(d) + 2;
    const std::size_t groups = n / period;
    if (groups == 0) throw std::invalid_argument("estimate_once_rate_marker: n < d+2");
    const std::size_t n_used = groups * period;
    const double rate_factor = static_cast<double>(d) / static_cast<double>(d + 2);

    std::vector<double> vals(trials);
    std::vector<Detector> dets(std::max(1, threads));
    parallel_for(static_cast<std::size_t>(trials), threads,
                 [&](std::size_t trial, std::size_t worker) {
        Philox rng(mix_seed(seed, seed_tag::kTrial, trial));
        const BitSeq x = random_bits(n_used, rng);
        PriorSeq priors(n_used, Prior{0.5});
        for (std::size_t k = 0; k < n_used; ++k)
            if (k % period >= static_cast<std::size_t>(d)) priors[k] = Prior::known(x[k]);
        const BitSeq y = transmit(x, params, rng);
        Detector& det = dets[worker % dets.size()];
        const LlrSeq llrs = det.detect(y, n_used, priors, params);

        LlrSeq payload_llrs;
        BitSeq payload_bits;
        payload_llrs.reserve(groups * d);
        for (std::size_t k = 0; k < n_used; ++k) {
            if (k % period < static_cast<std::size_t>(d)) {
                payload_llrs.push_back(llrs[k]);
                payload_bits.push_back(x[k]);
            }
        }
        vals[trial] = rate_factor * mutual_info_from_llrs(payload_llrs, payload_bits);
    });
    return reduce_trials(vals, n_used);
}

RateLimitResult find_rate_limit(const RateFn& estimator, double target_rate,
                                const RateLimitOptions& opts) {
    if (!(opts.p_lo < opts.p_hi)) throw std::invalid_argument("find_rate_limit: bad range");
    if (opts.tolerance <= 0.0) throw std::invalid_argument("find_rate_limit: bad tolerance");

    std::uint64_t probe = 0;
    const auto eval = [&](double p) {
        int trials = opts.initial_trials;
        RateEstimate est;
        for (;;) {
            est = estimator(p, trials, mix_seed(opts.seed, seed_tag::kProbe, probe));
            ++probe;
            if (trials >= opts.max_trials ||
                std::fabs(est.value - target_rate) > 2.0 * est.std_error)
                return est;
            trials *= 2;
        }
    };

    double lo = opts.p_lo, hi = opts.p_hi;
    if (eval(lo).value < target_rate) return {lo, lo, lo, false};
    if (eval(hi).value > target_rate) return {hi, hi, hi, false};
    while (hi - lo > opts.tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (eval(mid).value > target_rate)
            lo = mid;
        else
            hi = mid;
    }
    return {0.5 * (lo + hi), lo, hi, true};
}

}  // namespace dcsim
