#include "dcsim/trellis.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace dcsim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Emission weight of a transmission event with the input bit marginalized
// under its prior.
inline double marg_emission(Bit y_bit, double p0, double p_s) {
    return y_bit == 0 ? p0 * (1.0 - p_s) + (1.0 - p0) * p_s
                      : p0 * p_s + (1.0 - p0) * (1.0 - p_s);
}

inline void check_priors(const PriorSeq& priors, std::size_t n) {
    if (priors.size() != n)
        throw std::invalid_argument("priors length must equal frame length");
}

}  // namespace

PriorSeq iud_priors(std::size_t n) { return PriorSeq(n, Prior{0.5}); }

PriorSeq known_priors(const BitSeq& x) {
    PriorSeq out;
    out.reserve(x.size());
    for (Bit b : x) out.push_back(Prior::known(b));
    return out;
}

double Detector::forward(const BitSeq& y, std::size_t n, const PriorSeq& priors,
                         const ChannelParams& p, bool keep_table) {
    p.validate();
    check_priors(priors, n);
    const int n_out = static_cast<int>(y.size());
    const int d_final = n_out - static_cast<int>(n);
    if (std::abs(d_final) > p.d_max) return kNegInf;

    const int w = 2 * p.d_max + 1;
    std::vector<EventProbs> ev(w);
    for (int di = 0; di < w; ++di) ev[di] = event_probs(p, di - p.d_max);

    alpha_.assign(keep_table ? (n + 1) * w : 2 * w, 0.0);
    double* cur = alpha_.data();
    cur[p.d_max] = 1.0;  // drift 0
    double log_norm = 0.0;

    for (std::size_t t = 0; t < n; ++t) {
        const double p0 = priors[t].p0;
        double* next = keep_table ? cur + w : alpha_.data() + ((t + 1) & 1) * w;
        std::fill(next, next + w, 0.0);
        for (int di = 0; di < w; ++di) {
            const double a = cur[di];
            if (a == 0.0) continue;
            const int j = static_cast<int>(t) + di - p.d_max;
            const EventProbs& e = ev[di];
            if (e.del > 0.0) next[di - 1] += a * e.del;
            if (e.ins > 0.0 && j + 2 <= n_out) next[di + 1] += a * e.ins * 0.25;
            if (j < n_out) next[di] += a * e.trans * marg_emission(y[j], p0, p.p_s);
        }
        double mx = 0.0;
        for (int di = 0; di < w; ++di) mx = std::max(mx, next[di]);
        if (mx == 0.0) return kNegInf;
        const double inv = 1.0 / mx;
        for (int di = 0; di < w; ++di) next[di] *= inv;
        log_norm += std::log(mx);
        cur = next;
    }

    const double terminal = cur[d_final + p.d_max];
    if (terminal == 0.0) return kNegInf;
    return log_norm + std::log(terminal);
}

double Detector::sequence_log_likelihood(const BitSeq& x, const BitSeq& y,
                                         const ChannelParams& p) {
    return forward(y, x.size(), known_priors(x), p, false);
}

double Detector::marginal_log_likelihood(const BitSeq& y, std::size_t n,
                                         const PriorSeq& priors,
                                         const ChannelParams& p) {
    return forward(y, n, priors, p, false);
}

LlrSeq Detector::detect(const BitSeq& y, std::size_t n, const PriorSeq& priors,
                        const ChannelParams& p) {
    const double total = forward(y, n, priors, p, true);
    if (total == kNegInf)
        throw DesyncError("detect: received frame is infeasible for the drift lattice");

    const int n_out = static_cast<int>(y.size());
    const int d_final = n_out - static_cast<int>(n);
    const int w = 2 * p.d_max + 1;
    std::vector<EventProbs> ev(w);
    for (int di = 0; di < w; ++di) ev[di] = event_probs(p, di - p.d_max);

    beta_.assign(2 * w, 0.0);
    double* beta_next = beta_.data();
    beta_next[d_final + p.d_max] = 1.0;

    LlrSeq llrs(n);
    for (std::size_t ti = n; ti-- > 0;) {
        const double* alpha_col = alpha_.data() + ti * w;
        const double p0 = priors[ti].p0;
        double* beta_cur = beta_.data() + ((n - ti) & 1) * w;

        double num0 = 0.0, num1 = 0.0;
        for (int di = 0; di < w; ++di) {
            const int j = static_cast<int>(ti) + di - p.d_max;
            if (j < 0 || j > n_out) {
                beta_cur[di] = 0.0;
                continue;
            }
            const EventProbs& e = ev[di];
            double common = 0.0;
            if (e.del > 0.0) common += e.del * beta_next[di - 1];
            if (e.ins > 0.0 && j + 2 <= n_out) common += e.ins * 0.25 * beta_next[di + 1];
            double t0 = 0.0, t1 = 0.0;  // transmission terms for bit 0 / bit 1
            if (j < n_out) {
                const double bt = e.trans * beta_next[di];
                const double like0 = y[j] == 0 ? 1.0 - p.p_s : p.p_s;
                t0 = bt * like0;
                t1 = bt * (1.0 - like0);
            }
            beta_cur[di] = common + p0 * t0 + (1.0 - p0) * t1;
            const double a = alpha_col[di];
            if (a != 0.0) {
                num0 += a * (common + t0);
                num1 += a * (common + t1);
            }
        }
        const double post0 = p0 * num0;
        const double post1 = (1.0 - p0) * num1;
        if (post0 == 0.0 && post1 == 0.0)
            llrs[ti] = p0 == 0.5 ? 0.0 : llr_clip(std::log(p0) - std::log(1.0 - p0));
        else if (post1 == 0.0)
            llrs[ti] = kLlrClip;
        else if (post0 == 0.0)
            llrs[ti] = -kLlrClip;
        else
            llrs[ti] = llr_clip(std::log(post0) - std::log(post1));

        double mx = 0.0;
        for (int di = 0; di < w; ++di) mx = std::max(mx, beta_cur[di]);
        if (mx > 0.0) {
            const double inv = 1.0 / mx;
            for (int di = 0; di < w; ++di) beta_cur[di] *= inv;
        }
        beta_next = beta_cur;
    }
    return llrs;
}

double sequence_log_likelihood(const BitSeq& x, const BitSeq& y,
                               const ChannelParams& p) {
    Detector d;
    return d.sequence_log_likelihood(x, y, p);
}

double marginal_log_likelihood(const BitSeq& y, std::size_t n,
                               const PriorSeq& priors, const ChannelParams& p) {
    Detector d;
    return d.marginal_log_likelihood(y, n, priors, p);
}

LlrSeq detect(const BitSeq& y, std::size_t n, const PriorSeq& priors,
              const ChannelParams& p) {
    Detector d;
    return d.detect(y, n, priors, p);
}

}  // namespace dcsim
