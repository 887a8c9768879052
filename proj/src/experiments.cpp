#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "dcsim/harness.hpp"
#include "dcsim/parallel.hpp"
#include "dcsim/rates.hpp"
#include "dcsim/thresholds.hpp"
#include "dcsim/trellis.hpp"

namespace dcsim {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start, bool timing) {
    if (!timing) return 0.0;
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double stderr_of(const std::vector<double>& vals) {
    if (vals.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= vals.size();
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= (vals.size() - 1.0);
    return std::sqrt(var / vals.size());
}

double mean_of(const std::vector<double>& vals) {
    if (vals.empty()) return 0.0;
    double mean = 0.0;
    for (double v : vals) mean += v;
    return mean / vals.size();
}

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument("config: " + message);
}

}  // namespace

std::vector<ResultRow> run_ber_experiment(const ExperimentConfig& cfg) {
    require(cfg.num_codewords >= 1, "ber: L must be >= 1");
    require(cfg.bp_iters >= 1, "ber: bp-iters must be >= 1");
    require(cfg.target_bits >= 1, "ber: target-bits must be >= 1");
    const ParityCheck h = cfg.code_matrix();
    require(cfg.alist_path.empty() || h.n == cfg.n,
            "ber: alist dimension does not match n");
    const DelayScheme scheme = cfg.scheme_for(cfg.t_max);
    require(h.n % scheme.m() == 0, "ber: subblock count must divide code length");
    const std::size_t n = static_cast<std::size_t>(h.n);
    const Rational code_rate(h.n - h.m, h.n);
    const int threads = cfg.worker_threads();

    std::vector<ResultRow> rows;
    const auto p_ids = cfg.p_ids();
    for (std::size_t pt = 0; pt < p_ids.size(); ++pt) {
        const auto start = Clock::now();
        const ChannelParams params = cfg.channel(p_ids[pt], cfg.p_s);
        const long long bits_per_block =
            static_cast<long long>(cfg.num_codewords) * static_cast<long long>(n);
        const long long blocks =
            std::max<long long>(1, (cfg.target_bits + bits_per_block - 1) / bits_per_block);

        struct BlockStats {
            long long bit_errors = 0;
            long long codeword_errors = 0;
            long long bp_iters = 0;
            long long detections = 0;
            long long erased = 0;
            long long converged = 0;
        };
        std::vector<BlockStats> block_stats(blocks);
        const int inner_threads = blocks >= threads ? 1 : threads;

        parallel_for(static_cast<std::size_t>(blocks), threads,
                     [&](std::size_t b, std::size_t) {
            const std::uint64_t block_seed =
                mix_seed(cfg.seed, seed_tag::kTrial, (pt << 40) | b);
            Philox rng(block_seed);
            std::vector<BitSeq> codewords(cfg.num_codewords);
            std::vector<BitSeq> syndromes(cfg.num_codewords);
            for (int t = 0; t < cfg.num_codewords; ++t) {
                codewords[t] = random_bits(n, rng);
                syndromes[t] = coset_syndrome(h, codewords[t]);
            }
            const DcFrameSet fs = dc_encode(codewords, scheme, block_seed, block_seed);
            std::vector<BitSeq> received(fs.frames.size());
            for (std::size_t f = 0; f < fs.frames.size(); ++f)
                received[f] = transmit(fs.frames[f], params, rng);

            const CodeDecoder decoder = [&](int t, const LlrSeq& llrs) {
                const BpResult r = bp_decode(llrs, h, syndromes[t - 1], cfg.bp_iters);
                return DecodeResult{r.hard, r.extrinsic, r.iterations, r.converged};
            };
            const ChainResult res =
                chained_decode(received, scheme, n, cfg.num_codewords, decoder, params,
                               block_seed, block_seed, &codewords, inner_threads);

            BlockStats& st = block_stats[b];
            for (const auto& cw : res.stats.per_codeword) {
                st.bit_errors += cw.bit_errors;
                st.codeword_errors += cw.bit_errors > 0 ? 1 : 0;
                st.bp_iters += cw.bp_iterations;
                st.detections += cw.detections;
                st.converged += cw.converged ? 1 : 0;
            }
            st.erased = res.stats.erased_frames;
        });

        long long bit_errors = 0, codeword_errors = 0, bp_iters = 0, detections = 0,
                  erased = 0;
        std::vector<double> block_ber(blocks);
        for (long long b = 0; b < blocks; ++b) {
            const BlockStats& st = block_stats[b];
            bit_errors += st.bit_errors;
            codeword_errors += st.codeword_errors;
            bp_iters += st.bp_iters;
            detections += st.detections;
            erased += st.erased;
            block_ber[b] = static_cast<double>(st.bit_errors) / static_cast<double>(bits_per_block);
        }
        const long long total_codewords = blocks * cfg.num_codewords;
        const long long total_bits = blocks * bits_per_block;
        const double seconds = elapsed_seconds(start, cfg.timing);

        nlohmann::ordered_json pj{{"n", h.n},
                                  {"L", cfg.num_codewords},
                                  {"t_max", scheme.t_max},
                                  {"code", cfg.alist_path.empty() ? cfg.preset : cfg.alist_path},
                                  {"p_id", p_ids[pt]},
                                  {"p_s", cfg.p_s},
                                  {"d_max", cfg.d_max},
                                  {"bp_iters", cfg.bp_iters},
                                  {"blocks", blocks},
                                  {"seed", cfg.seed}};
        const auto row = [&](const std::string& metric, double value, double se,
                             long long trials) {
            rows.push_back({"ber", pj, metric, value, se, trials, seconds});
        };
        row("ber", static_cast<double>(bit_errors) / static_cast<double>(total_bits),
            stderr_of(block_ber), total_bits);
        row("fer", static_cast<double>(codeword_errors) / static_cast<double>(total_codewords),
            0.0, total_codewords);
        row("avg_bp_iterations",
            static_cast<double>(bp_iters) / static_cast<double>(total_codewords), 0.0,
            total_codewords);
        row("detections_per_codeword",
            static_cast<double>(detections) / static_cast<double>(total_codewords), 0.0,
            total_codewords);
        row("bp_converged_fraction",
            [&] {
                long long conv = 0;
                for (const auto& st : block_stats) conv += st.converged;
                return static_cast<double>(conv) / static_cast<double>(total_codewords);
            }(),
            0.0, total_codewords);
        row("erased_frames", static_cast<double>(erased), 0.0, total_codewords);
        row("realized_rate", dc_rate(code_rate, cfg.num_codewords, scheme.t_max).value(), 0.0,
            total_codewords);
    }
    return rows;
}

std::vector<ResultRow> run_iterative_baseline(const ExperimentConfig& cfg) {
    require(cfg.trials >= 1, "iterative: trials must be >= 1");
    require(cfg.max_global_iters >= 1, "iterative: max-global-iters must be >= 1");
    const ParityCheck h = cfg.code_matrix();
    require(cfg.alist_path.empty() || h.n == cfg.n,
            "iterative: alist dimension does not match n");
    const std::size_t n = static_cast<std::size_t>(h.n);
    const int threads = cfg.worker_threads();

    std::vector<ResultRow> rows;
    const auto p_ids = cfg.p_ids();
    for (std::size_t pt = 0; pt < p_ids.size(); ++pt) {
        const auto start = Clock::now();
        const ChannelParams params = cfg.channel(p_ids[pt], cfg.p_s);

        std::vector<double> detections(cfg.trials), errors(cfg.trials), conv(cfg.trials);
        std::vector<Detector> dets(std::max(1, threads));
        parallel_for(static_cast<std::size_t>(cfg.trials), threads,
                     [&](std::size_t trial, std::size_t worker) {
            Philox rng(mix_seed(cfg.seed, seed_tag::kTrial, (pt << 40) | trial));
            const BitSeq x = random_bits(n, rng);
            const BitSeq syndrome = coset_syndrome(h, x);
            const BitSeq y = transmit(x, params, rng);
            Detector& det = dets[worker % dets.size()];

            // Joint iterative scheme: one detection feeding one BP flooding
            // iteration per global round, until the parity checks hold.
            BpDecoder dec(h, syndrome);
            LlrSeq q(n, 0.0);
            int used = cfg.max_global_iters;
            bool ok = false;
            for (int g = 1; g <= cfg.max_global_iters; ++g) {
                PriorSeq priors(n);
                for (std::size_t v = 0; v < n; ++v) priors[v] = Prior::from_llr(q[v]);
                const LlrSeq o = det.detect(y, n, priors, params);
                LlrSeq ch(n);
                for (std::size_t v = 0; v < n; ++v) ch[v] = llr_clip(o[v] - q[v]);
                const auto step = dec.step(ch);
                if (step.parity_ok) {
                    used = g;
                    ok = true;
                    break;
                }
                q = dec.extrinsic();
            }
            long long errs = 0;
            for (std::size_t v = 0; v < n; ++v) errs += (dec.hard()[v] != x[v]);
            detections[trial] = used;
            errors[trial] = static_cast<double>(errs);
            conv[trial] = ok ? 1.0 : 0.0;
        });

        const double seconds = elapsed_seconds(start, cfg.timing);
        nlohmann::ordered_json pj{{"n", h.n},
                                  {"code", cfg.alist_path.empty() ? cfg.preset : cfg.alist_path},
                                  {"p_id", p_ids[pt]},
                                  {"p_s", cfg.p_s},
                                  {"d_max", cfg.d_max},
                                  {"max_global_iters", cfg.max_global_iters},
                                  {"seed", cfg.seed}};
        double total_errs = 0.0;
        for (double e : errors) total_errs += e;
        rows.push_back({"iterative", pj, "mean_detections", mean_of(detections),
                        stderr_of(detections), cfg.trials, seconds});
        rows.push_back({"iterative", pj, "ber",
                        total_errs / (static_cast<double>(cfg.trials) * static_cast<double>(n)),
                        0.0, cfg.trials, seconds});
        rows.push_back({"iterative", pj, "converged_fraction", mean_of(conv), 0.0,
                        cfg.trials, seconds});
    }
    return rows;
}

std::vector<ResultRow> run_noniterative_marker_baseline(const ExperimentConfig& cfg) {
    require(cfg.trials >= 1, "marker: trials must be >= 1");
    require(cfg.marker_period >= 1, "marker: marker-d must be >= 1");
    require(cfg.bp_iters >= 1, "marker: bp-iters must be >= 1");
    const ParityCheck h = cfg.code_matrix();
    require(cfg.alist_path.empty() || h.n == cfg.n,
            "marker: alist dimension does not match n");
    require(h.n % cfg.marker_period == 0, "marker: marker-d must divide n");
    const std::size_t n = static_cast<std::size_t>(h.n);
    const int d = cfg.marker_period;
    const std::size_t groups = n / static_cast<std::size_t>(d);
    const std::size_t n_tx = n + 2 * groups;
    const int threads = cfg.worker_threads();

    std::vector<ResultRow> rows;
    const auto p_ids = cfg.p_ids();
    for (std::size_t pt = 0; pt < p_ids.size(); ++pt) {
        const auto start = Clock::now();
        const ChannelParams params = cfg.channel(p_ids[pt], cfg.p_s);

        std::vector<double> errors(cfg.trials), cw_err(cfg.trials), iters(cfg.trials);
        std::vector<Detector> dets(std::max(1, threads));
        parallel_for(static_cast<std::size_t>(cfg.trials), threads,
                     [&](std::size_t trial, std::size_t worker) {
            Philox rng(mix_seed(cfg.seed, seed_tag::kTrial, (pt << 40) | trial));
            const BitSeq x = random_bits(n, rng);
            const BitSeq syndrome = coset_syndrome(h, x);

            BitSeq tx(n_tx);
            PriorSeq priors(n_tx, Prior{0.5});
            std::size_t k = 0;
            for (std::size_t g = 0; g < groups; ++g) {
                for (int b = 0; b < d; ++b, ++k) tx[k] = x[g * d + b];
                for (int mbit = 0; mbit < 2; ++mbit, ++k) {
                    tx[k] = rng.next_bit() ? 1 : 0;
                    priors[k] = Prior::known(tx[k]);
                }
            }
            const BitSeq y = transmit(tx, params, rng);
            Detector& det = dets[worker % dets.size()];
            const LlrSeq o = det.detect(y, n_tx, priors, params);
            LlrSeq payload(n);
            k = 0;
            for (std::size_t g = 0; g < groups; ++g)
                for (int b = 0; b < d; ++b, ++k) payload[g * d + b] = o[g * (d + 2) + b];
            const BpResult r = bp_decode(payload, h, syndrome, cfg.bp_iters);
            long long errs = 0;
            for (std::size_t v = 0; v < n; ++v) errs += (r.hard[v] != x[v]);
            errors[trial] = static_cast<double>(errs);
            cw_err[trial] = errs > 0 ? 1.0 : 0.0;
            iters[trial] = r.iterations;
        });

        const double seconds = elapsed_seconds(start, cfg.timing);
        const Rational code_rate(h.n - h.m, h.n);
        nlohmann::ordered_json pj{{"n", h.n},
                                  {"code", cfg.alist_path.empty() ? cfg.preset : cfg.alist_path},
                                  {"marker_d", d},
                                  {"p_id", p_ids[pt]},
                                  {"p_s", cfg.p_s},
                                  {"d_max", cfg.d_max},
                                  {"bp_iters", cfg.bp_iters},
                                  {"seed", cfg.seed}};
        double total_errs = 0.0;
        for (double e : errors) total_errs += e;
        rows.push_back({"marker", pj, "ber",
                        total_errs / (static_cast<double>(cfg.trials) * static_cast<double>(n)),
                        0.0, cfg.trials, seconds});
        rows.push_back({"marker", pj, "fer", mean_of(cw_err), 0.0, cfg.trials, seconds});
        rows.push_back({"marker", pj, "avg_bp_iterations", mean_of(iters), 0.0, cfg.trials,
                        seconds});
        rows.push_back({"marker", pj, "detections_per_codeword", 1.0, 0.0, cfg.trials, seconds});
        rows.push_back({"marker", pj, "rate_loss_factor",
                        static_cast<double>(d) / static_cast<double>(d + 2), 0.0, cfg.trials,
                        seconds});
        rows.push_back({"marker", pj, "effective_rate",
                        code_rate.value() * static_cast<double>(d) / static_cast<double>(d + 2),
                        0.0, cfg.trials, seconds});
    }
    return rows;
}

std::vector<ResultRow> run_rate_sweep(const ExperimentConfig& cfg) {
    require(cfg.trials >= 1, "rates: trials must be >= 1");
    const int threads = cfg.worker_threads();
    std::vector<ResultRow> rows;
    const auto p_ids = cfg.p_ids();

    std::uint64_t point = 0;
    for (int tm : cfg.t_maxes()) {
        const DelayScheme scheme = cfg.scheme_for(tm);
        const std::size_t n_s =
            cfg.n_s != 0 ? cfg.n_s
                         : std::max<std::size_t>(
                               1, static_cast<std::size_t>(cfg.n) / scheme.m());
        for (double pid : p_ids) {
            const auto start = Clock::now();
            const auto res = estimate_once_rate_dc(cfg.channel(pid, cfg.p_s), scheme, n_s,
                                                   cfg.trials,
                                                   mix_seed(cfg.seed, seed_tag::kProbe, point++),
                                                   threads);
            nlohmann::ordered_json pj{{"t_max", scheme.t_max}, {"p_id", pid},
                                      {"p_s", cfg.p_s},        {"d_max", cfg.d_max},
                                      {"n_s", n_s},            {"seed", cfg.seed}};
            rows.push_back({"rates", pj, "once_rate_dc", res.total.value, res.total.std_error,
                            cfg.trials, elapsed_seconds(start, cfg.timing)});
        }
    }
    if (cfg.with_iud) {
        for (double pid : p_ids) {
            const auto start = Clock::now();
            const auto est = estimate_once_rate_iud(cfg.channel(pid, cfg.p_s), cfg.n, cfg.trials,
                                                    mix_seed(cfg.seed, seed_tag::kProbe, point++),
                                                    threads);
            nlohmann::ordered_json pj{
                {"p_id", pid}, {"p_s", cfg.p_s}, {"d_max", cfg.d_max}, {"n", cfg.n},
                {"seed", cfg.seed}};
            rows.push_back({"rates", pj, "once_rate_iud", est.value, est.std_error, cfg.trials,
                            elapsed_seconds(start, cfg.timing)});
        }
    }
    if (cfg.marker_curve_d > 0) {
        for (double pid : p_ids) {
            const auto start = Clock::now();
            const auto est = estimate_once_rate_marker(cfg.channel(pid, cfg.p_s),
                                                       cfg.marker_curve_d, cfg.n, cfg.trials,
                                                       mix_seed(cfg.seed, seed_tag::kProbe, point++),
                                                       threads);
            nlohmann::ordered_json pj{{"marker_d", cfg.marker_curve_d},
                                      {"p_id", pid},
                                      {"p_s", cfg.p_s},
                                      {"d_max", cfg.d_max},
                                      {"n", cfg.n},
                                      {"seed", cfg.seed}};
            rows.push_back({"rates", pj, "once_rate_marker", est.value, est.std_error,
                            cfg.trials, elapsed_seconds(start, cfg.timing)});
        }
    }
    return rows;
}

std::vector<ResultRow> run_sir(const ExperimentConfig& cfg) {
    require(cfg.trials >= 1, "sir: trials must be >= 1");
    require(cfg.n >= 1, "sir: n must be >= 1");
    const int threads = cfg.worker_threads();
    std::vector<ResultRow> rows;
    std::uint64_t point = 0;
    for (double ps : cfg.p_ss()) {
        for (double pid : cfg.p_ids()) {
            const auto start = Clock::now();
            const auto est = estimate_sir(cfg.channel(pid, ps), cfg.n, cfg.trials,
                                          mix_seed(cfg.seed, seed_tag::kProbe, point++), threads);
            nlohmann::ordered_json pj{
                {"p_id", pid}, {"p_s", ps}, {"d_max", cfg.d_max}, {"n", cfg.n},
                {"seed", cfg.seed}};
            rows.push_back({"sir", pj, "sir", est.value, est.std_error, cfg.trials,
                            elapsed_seconds(start, cfg.timing)});
        }
    }
    return rows;
}

std::vector<ResultRow> run_threshold_search(const ExperimentConfig& cfg) {
    require(cfg.n_pop >= 100, "threshold: n-pop too small");
    require(cfg.search_lo < cfg.search_hi, "threshold: bad search range");
    const DegreeDist dd = cfg.code_dist();
    const int threads = cfg.worker_threads();
    std::vector<ResultRow> rows;
    std::uint64_t point = 0;
    for (int tm : cfg.t_maxes()) {
        const DelayScheme scheme = cfg.scheme_for(tm);
        for (double ps : cfg.p_ss()) {
            const auto start = Clock::now();
            ThresholdOptions opts;
            opts.lo = cfg.search_lo;
            opts.hi = cfg.search_hi;
            opts.resolution = cfg.resolution;
            opts.n_pop = cfg.n_pop;
            opts.n_s = cfg.n_s;
            opts.d_max = cfg.d_max;
            opts.de = DeOptions{cfg.de_iters, cfg.eps_de};
            opts.threads = threads;
            const auto res = find_bp_threshold(dd, scheme, ps, opts,
                                               mix_seed(cfg.seed, seed_tag::kProbe, point++));
            const double seconds = elapsed_seconds(start, cfg.timing);
            nlohmann::ordered_json pj{{"preset", cfg.preset}, {"t_max", scheme.t_max},
                                      {"p_s", ps},            {"d_max", cfg.d_max},
                                      {"n_pop", cfg.n_pop},   {"seed", cfg.seed}};
            rows.push_back({"threshold", pj, "bp_threshold", res.value,
                            0.5 * cfg.resolution, static_cast<long long>(cfg.n_pop), seconds});
            rows.push_back({"threshold", pj, "threshold_found", res.found ? 1.0 : 0.0, 0.0,
                            static_cast<long long>(cfg.n_pop), seconds});
        }
    }
    return rows;
}

std::vector<ResultRow> run_rate_limits(const ExperimentConfig& cfg) {
    require(cfg.trials >= 1, "limits: trials must be >= 1");
    require(cfg.target_rate > 0.0 && cfg.target_rate <= 1.0, "limits: bad target rate");
    const bool known = cfg.estimator == "sir" || cfg.estimator == "dc" ||
                       cfg.estimator == "iud" || cfg.estimator == "marker";
    require(known, "limits: estimator must be sir|dc|iud|marker");
    const int threads = cfg.worker_threads();
    const DelayScheme scheme = cfg.scheme_for(cfg.t_max);
    const std::size_t n_s =
        cfg.n_s != 0
            ? cfg.n_s
            : std::max<std::size_t>(1, static_cast<std::size_t>(cfg.n) / scheme.m());

    std::vector<ResultRow> rows;
    std::uint64_t point = 0;
    for (double ps : cfg.p_ss()) {
        const auto start = Clock::now();
        const RateFn fn = [&, ps](double pid, int trials, std::uint64_t s) {
            const ChannelParams params = cfg.channel(pid, ps);
            if (cfg.estimator == "sir") return estimate_sir(params, cfg.n, trials, s, threads);
            if (cfg.estimator == "dc")
                return estimate_once_rate_dc(params, scheme, n_s, trials, s, threads).total;
            if (cfg.estimator == "iud")
                return estimate_once_rate_iud(params, cfg.n, trials, s, threads);
            return estimate_once_rate_marker(params, cfg.marker_period, cfg.n, trials, s,
                                             threads);
        };
        RateLimitOptions opts;
        opts.p_lo = 0.0;
        opts.p_hi = 0.5;
        opts.tolerance = cfg.limit_tolerance;
        opts.initial_trials = cfg.trials;
        opts.max_trials = cfg.trials * 8;
        opts.seed = mix_seed(cfg.seed, seed_tag::kProbe, point++);
        const auto res = find_rate_limit(fn, cfg.target_rate, opts);
        const double seconds = elapsed_seconds(start, cfg.timing);
        nlohmann::ordered_json pj{{"estimator", cfg.estimator},
                                  {"target_rate", cfg.target_rate},
                                  {"p_s", ps},
                                  {"d_max", cfg.d_max},
                                  {"t_max", scheme.t_max},
                                  {"n", cfg.n},
                                  {"seed", cfg.seed}};
        rows.push_back({"limits", pj, "p_id_limit", res.p_id, 0.5 * (res.hi - res.lo),
                        cfg.trials, seconds});
        rows.push_back({"limits", pj, "limit_achieved", res.achieved ? 1.0 : 0.0, 0.0,
                        cfg.trials, seconds});
    }
    return rows;
}

}  // namespace dcsim
