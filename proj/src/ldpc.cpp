#include "dcsim/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "dcsim/llr_math.hpp"

namespace dcsim {

void DegreeDist::validate() const {
    const auto check_side = [](const std::map<int, double>& side, const char* name) {
        if (side.empty()) throw std::invalid_argument(std::string(name) + " is empty");
        double sum = 0.0;
        for (const auto& [deg, frac] : side) {
            if (deg < 2) throw std::invalid_argument(std::string(name) + ": degree < 2");
            if (frac < 0.0) throw std::invalid_argument(std::string(name) + ": negative fraction");
            sum += frac;
        }
        if (std::fabs(sum - 1.0) > 1e-6)
            throw std::invalid_argument(std::string(name) + ": fractions do not sum to 1");
    };
    check_side(lambda, "lambda");
    check_side(rho, "rho");
}

double DegreeDist::lambda_integral() const {
    double s = 0.0;
    for (const auto& [deg, frac] : lambda) s += frac / deg;
    return s;
}

double DegreeDist::rho_integral() const {
    double s = 0.0;
    for (const auto& [deg, frac] : rho) s += frac / deg;
    return s;
}

double design_rate(const DegreeDist& dd) {
    dd.validate();
    const double li = dd.lambda_integral();
    if (li <= 0.0) throw std::invalid_argument("design_rate: zero lambda integral");
    return 1.0 - dd.rho_integral() / li;
}

DegreeDist preset_degree_dist(const std::string& name) {
    if (name == "bi-awgn") {
        return DegreeDist{
            {{2, 0.24426}, {3, 0.25907}, {4, 0.01054}, {5, 0.05510},
             {8, 0.01455}, {10, 0.01275}, {12, 0.40373}},
            {{7, 0.25475}, {8, 0.73438}, {9, 0.01087}}};
    }
    if (name == "id") {
        return DegreeDist{
            {{2, 0.39884}, {3, 0.45664}, {12, 0.14452}},
            {{2, 0.10018}, {4, 0.30375}, {9, 0.22102}, {12, 0.37505}}};
    }
    if (name == "ids") {
        return DegreeDist{
            {{2, 0.24136}, {3, 0.49091}, {5, 0.11696}, {7, 0.07771},
             {9, 0.00506}, {12, 0.06800}},
            {{2, 0.08363}, {6, 0.45892}, {9, 0.13615}, {11, 0.30544},
             {12, 0.01586}}};
    }
    if (name == "regular-3-6") {
        return DegreeDist{{{3, 1.0}}, {{6, 1.0}}};
    }
    throw std::invalid_argument("unknown degree distribution preset: " + name);
}

std::vector<std::string> preset_names() {
    return {"bi-awgn", "id", "ids", "regular-3-6"};
}

DegreeDist load_degree_dist(std::istream& in) {
    DegreeDist dd;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string side;
        int deg;
        double frac;
        if (!(ls >> side)) continue;
        if (!(ls >> deg >> frac))
            throw std::invalid_argument("degree dist: bad line: " + line);
        if (side == "lambda")
            dd.lambda[deg] += frac;
        else if (side == "rho")
            dd.rho[deg] += frac;
        else
            throw std::invalid_argument("degree dist: expected lambda/rho: " + line);
    }
    dd.validate();
    return dd;
}

DegreeDist load_degree_dist_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open degree dist file: " + path);
    return load_degree_dist(in);
}

void save_degree_dist(std::ostream& out, const DegreeDist& dd) {
    for (const auto& [deg, frac] : dd.lambda) out << "lambda " << deg << " " << frac << "\n";
    for (const auto& [deg, frac] : dd.rho) out << "rho " << deg << " " << frac << "\n";
}

std::size_t ParityCheck::edges() const {
    std::size_t e = 0;
    for (const auto& row : check_vars) e += row.size();
    return e;
}

namespace {

// Largest-remainder rounding of degree->target counts to integers summing to
// total.
std::map<int, long long> lr_round(const std::map<int, double>& targets, long long total) {
    std::map<int, long long> counts;
    std::vector<std::pair<double, int>> rema;  // (fraction, degree)
    long long assigned = 0;
    for (const auto& [deg, tgt] : targets) {
        const double t = std::max(0.0, tgt);
        const long long fl = static_cast<long long>(std::floor(t));
        counts[deg] = fl;
        assigned += fl;
        rema.push_back({t - fl, deg});
    }
    std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    long long leftover = total - assigned;
    for (std::size_t i = 0; leftover > 0; i = (i + 1) % rema.size(), --leftover)
        ++counts[rema[i].second];
    while (leftover < 0) {  // targets overshot; trim from smallest remainders
        for (std::size_t i = rema.size(); i-- > 0 && leftover < 0;) {
            if (counts[rema[i].second] > 0) {
                --counts[rema[i].second];
                ++leftover;
            }
        }
    }
    return counts;
}

std::vector<int> node_degree_sequence(const std::map<int, long long>& counts) {
    std::vector<int> seq;
    for (const auto& [deg, cnt] : counts)
        for (long long k = 0; k < cnt; ++k) seq.push_back(deg);
    return seq;
}

}  // namespace

ParityCheck sample_code(const DegreeDist& dd, int n, std::uint64_t seed) {
    dd.validate();
    if (n < 2) throw std::invalid_argument("sample_code: n too small");

    // Variable-node degree counts from the node perspective of lambda.
    const double li = dd.lambda_integral();
    std::map<int, double> var_targets;
    for (const auto& [deg, frac] : dd.lambda)
        var_targets[deg] = n * (frac / deg) / li;
    const auto var_counts = lr_round(var_targets, n);
    std::vector<int> var_deg = node_degree_sequence(var_counts);

    long long num_edges = 0;
    for (int d : var_deg) num_edges += d;

    // Check-node degree counts; socket imbalance absorbed round-robin.
    const double ri = dd.rho_integral();
    const long long m = std::max<long long>(1, std::llround(num_edges * ri));
    std::map<int, double> chk_targets;
    for (const auto& [deg, frac] : dd.rho)
        chk_targets[deg] = num_edges * (frac / deg);
    auto chk_counts = lr_round(chk_targets, m);
    std::vector<int> chk_deg = node_degree_sequence(chk_counts);

    long long chk_sockets = 0;
    for (int d : chk_deg) chk_sockets += d;
    for (std::size_t i = 0; chk_sockets < num_edges;
         i = (i + 1) % chk_deg.size(), ++chk_sockets)
        ++chk_deg[i];
    for (std::size_t i = 0; chk_sockets > num_edges;
         i = (i + 1) % chk_deg.size()) {
        if (chk_deg[i] > 1) {
            --chk_deg[i];
            --chk_sockets;
        }
    }

    // Socket lists.
    std::vector<int> var_sock, chk_sock;
    var_sock.reserve(num_edges);
    chk_sock.reserve(num_edges);
    for (int v = 0; v < n; ++v)
        for (int k = 0; k < var_deg[v]; ++k) var_sock.push_back(v);
    for (std::size_t c = 0; c < chk_deg.size(); ++c)
        for (int k = 0; k < chk_deg[c]; ++k) chk_sock.push_back(static_cast<int>(c));
    if (var_sock.size() != chk_sock.size())
        throw std::logic_error("sample_code: socket imbalance");

    Philox rng(seed, seed_tag::kCodeSample);
    const std::size_t e_total = var_sock.size();
    for (std::size_t i = e_total; i-- > 1;) {
        const std::size_t j = rng.next_below(i + 1);
        std::swap(chk_sock[i], chk_sock[j]);
    }

    // Re-pair sockets until no parallel edges remain.
    const auto key = [](int c, int v) {
        return (static_cast<std::uint64_t>(c) << 32) | static_cast<std::uint32_t>(v);
    };
    for (int pass = 0; pass < 1000; ++pass) {
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(e_total * 2);
        std::vector<std::size_t> dup;
        for (std::size_t e = 0; e < e_total; ++e)
            if (!seen.insert(key(chk_sock[e], var_sock[e])).second) dup.push_back(e);
        if (dup.empty()) break;
        if (pass == 999)
            throw std::runtime_error("sample_code: could not remove parallel edges");
        for (std::size_t e : dup)
            std::swap(chk_sock[e], chk_sock[rng.next_below(e_total)]);
    }

    ParityCheck h;
    h.n = n;
    h.m = static_cast<int>(chk_deg.size());
    h.check_vars.resize(h.m);
    h.var_checks.resize(h.n);
    for (std::size_t e = 0; e < e_total; ++e) {
        h.check_vars[chk_sock[e]].push_back(var_sock[e]);
        h.var_checks[var_sock[e]].push_back(chk_sock[e]);
    }
    for (auto& row : h.check_vars) std::sort(row.begin(), row.end());
    for (auto& col : h.var_checks) std::sort(col.begin(), col.end());
    return h;
}

BitSeq coset_syndrome(const ParityCheck& h, const BitSeq& x) {
    if (static_cast<int>(x.size()) != h.n)
        throw std::invalid_argument("coset_syndrome: length mismatch");
    BitSeq s(h.m, 0);
    for (int c = 0; c < h.m; ++c) {
        Bit acc = 0;
        for (int v : h.check_vars[c]) acc ^= x[v];
        s[c] = acc;
    }
    return s;
}

BpDecoder::BpDecoder(const ParityCheck& h, BitSeq syndrome)
    : h_(h), syndrome_(std::move(syndrome)) {
    if (static_cast<int>(syndrome_.size()) != h_.m)
        throw std::invalid_argument("BpDecoder: syndrome length mismatch");
    check_off_.assign(h_.m + 1, 0);
    for (int c = 0; c < h_.m; ++c)
        check_off_[c + 1] = check_off_[c] + h_.check_vars[c].size();
    const std::size_t e_total = check_off_[h_.m];
    edge_var_.resize(e_total);
    var_edges_.assign(h_.n, {});
    std::size_t max_deg = 1;
    for (int c = 0; c < h_.m; ++c) {
        max_deg = std::max(max_deg, h_.check_vars[c].size());
        std::size_t e = check_off_[c];
        for (int v : h_.check_vars[c]) {
            edge_var_[e] = v;
            var_edges_[v].push_back(e);
            ++e;
        }
    }
    v2c_.assign(e_total, 0.0);
    c2v_.assign(e_total, 0.0);
    fwd_.assign(max_deg, 0.0);
    bwd_.assign(max_deg, 0.0);
    hard_.assign(h_.n, 0);
    first_ = true;
}

void BpDecoder::reset() {
    std::fill(v2c_.begin(), v2c_.end(), 0.0);
    std::fill(c2v_.begin(), c2v_.end(), 0.0);
    std::fill(hard_.begin(), hard_.end(), 0);
    first_ = true;
}

BpDecoder::Step BpDecoder::step(const LlrSeq& channel) {
    if (static_cast<int>(channel.size()) != h_.n)
        throw std::invalid_argument("BpDecoder: channel LLR length mismatch");
    const std::size_t e_total = edge_var_.size();
    if (first_) {
        for (std::size_t e = 0; e < e_total; ++e)
            v2c_[e] = llr_clip(channel[edge_var_[e]]);
        first_ = false;
    }

    // Check-node update via forward/backward partial combines; the syndrome
    // bit flips the outgoing sign.
    for (int c = 0; c < h_.m; ++c) {
        const std::size_t b = check_off_[c];
        const std::size_t deg = check_off_[c + 1] - b;
        const double sign = syndrome_[c] ? -1.0 : 1.0;
        if (deg == 1) {
            c2v_[b] = sign * kLlrClip;
            continue;
        }
        fwd_[0] = v2c_[b];
        for (std::size_t k = 1; k < deg; ++k)
            fwd_[k] = boxplus(fwd_[k - 1], v2c_[b + k]);
        bwd_[deg - 1] = v2c_[b + deg - 1];
        for (std::size_t k = deg - 1; k-- > 0;)
            bwd_[k] = boxplus(bwd_[k + 1], v2c_[b + k]);
        c2v_[b] = sign * bwd_[1];
        c2v_[b + deg - 1] = sign * fwd_[deg - 2];
        for (std::size_t k = 1; k + 1 < deg; ++k)
            c2v_[b + k] = sign * boxplus(fwd_[k - 1], bwd_[k + 1]);
    }

    // Variable-node update and hard decision.
    for (int v = 0; v < h_.n; ++v) {
        double total = channel[v];
        for (std::size_t e : var_edges_[v]) total += c2v_[e];
        hard_[v] = total < 0.0 ? 1 : 0;
        for (std::size_t e : var_edges_[v]) v2c_[e] = llr_clip(total - c2v_[e]);
    }
    return Step{parity_ok(hard_)};
}

LlrSeq BpDecoder::extrinsic() const {
    LlrSeq out(h_.n, 0.0);
    for (int v = 0; v < h_.n; ++v) {
        double s = 0.0;
        for (std::size_t e : var_edges_[v]) s += c2v_[e];
        out[v] = llr_clip(s);
    }
    return out;
}

LlrSeq BpDecoder::posterior(const LlrSeq& channel) const {
    LlrSeq out(h_.n, 0.0);
    for (int v = 0; v < h_.n; ++v) {
        double s = channel[v];
        for (std::size_t e : var_edges_[v]) s += c2v_[e];
        out[v] = s;
    }
    return out;
}

bool BpDecoder::parity_ok(const BitSeq& candidate) const {
    for (int c = 0; c < h_.m; ++c) {
        Bit acc = 0;
        for (int v : h_.check_vars[c]) acc ^= candidate[v];
        if (acc != syndrome_[c]) return false;
    }
    return true;
}

BpResult bp_decode(const LlrSeq& channel, const ParityCheck& h,
                   const BitSeq& syndrome, int max_iters) {
    BpDecoder dec(h, syndrome);
    BpResult res;
    for (int it = 1; it <= max_iters; ++it) {
        const auto s = dec.step(channel);
        res.iterations = it;
        if (s.parity_ok) {
            res.converged = true;
            break;
        }
    }
    res.hard = dec.hard();
    res.extrinsic = dec.extrinsic();
    if (max_iters == 0)
        for (std::size_t v = 0; v < channel.size(); ++v)
            res.hard[v] = channel[v] < 0.0 ? 1 : 0;
    return res;
}

namespace {

std::vector<long long> read_ints(std::istream& in) {
    std::vector<long long> vals;
    long long v;
    while (in >> v) vals.push_back(v);
    return vals;
}

}  // namespace

ParityCheck load_alist(std::istream& in) {
    const auto vals = read_ints(in);
    std::size_t pos = 0;
    const auto next = [&]() -> long long {
        if (pos >= vals.size()) throw std::invalid_argument("alist: truncated file");
        return vals[pos++];
    };
    ParityCheck h;
    h.n = static_cast<int>(next());
    h.m = static_cast<int>(next());
    if (h.n <= 0 || h.m <= 0) throw std::invalid_argument("alist: bad dimensions");
    const long long max_col = next();
    const long long max_row = next();
    std::vector<int> col_deg(h.n), row_deg(h.m);
    long long col_sum = 0, row_sum = 0;
    for (auto& d : col_deg) { d = static_cast<int>(next()); col_sum += d; }
    for (auto& d : row_deg) { d = static_cast<int>(next()); row_sum += d; }
    if (col_sum != row_sum) throw std::invalid_argument("alist: socket mismatch");

    const std::size_t remaining = vals.size() - pos;
    bool padded;
    if (remaining == static_cast<std::size_t>(h.n) * max_col +
                         static_cast<std::size_t>(h.m) * max_row)
        padded = true;
    else if (remaining == static_cast<std::size_t>(col_sum + row_sum))
        padded = false;
    else
        throw std::invalid_argument("alist: adjacency token count mismatch");

    h.check_vars.assign(h.m, {});
    h.var_checks.assign(h.n, {});
    for (int v = 0; v < h.n; ++v) {
        const int take = padded ? static_cast<int>(max_col) : col_deg[v];
        for (int k = 0; k < take; ++k) {
            const long long c = next();
            if (k < col_deg[v]) {
                if (c < 1 || c > h.m) throw std::invalid_argument("alist: check id out of range");
                h.var_checks[v].push_back(static_cast<int>(c - 1));
                h.check_vars[c - 1].push_back(v);
            }
        }
    }
    // Row section: verify degrees and membership against the column section.
    for (int c = 0; c < h.m; ++c) {
        const int take = padded ? static_cast<int>(max_row) : row_deg[c];
        std::vector<int> row;
        for (int k = 0; k < take; ++k) {
            const long long v = next();
            if (k < row_deg[c]) {
                if (v < 1 || v > h.n) throw std::invalid_argument("alist: var id out of range");
                row.push_back(static_cast<int>(v - 1));
            }
        }
        auto expected = h.check_vars[c];
        std::sort(expected.begin(), expected.end());
        std::sort(row.begin(), row.end());
        if (row != expected)
            throw std::invalid_argument("alist: row/column sections disagree");
    }
    for (auto& row : h.check_vars) std::sort(row.begin(), row.end());
    for (auto& col : h.var_checks) std::sort(col.begin(), col.end());
    return h;
}

ParityCheck load_alist_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open alist file: " + path);
    return load_alist(in);
}

void save_alist(std::ostream& out, const ParityCheck& h) {
    std::size_t max_col = 0, max_row = 0;
    for (const auto& col : h.var_checks) max_col = std::max(max_col, col.size());
    for (const auto& row : h.check_vars) max_row = std::max(max_row, row.size());
    out << h.n << " " << h.m << "\n" << max_col << " " << max_row << "\n";
    for (int v = 0; v < h.n; ++v)
        out << h.var_checks[v].size() << (v + 1 < h.n ? " " : "\n");
    for (int c = 0; c < h.m; ++c)
        out << h.check_vars[c].size() << (c + 1 < h.m ? " " : "\n");
    for (const auto& col : h.var_checks) {
        for (std::size_t k = 0; k < max_col; ++k)
            out << (k < col.size() ? col[k] + 1 : 0) << (k + 1 < max_col ? " " : "\n");
    }
    for (const auto& row : h.check_vars) {
        for (std::size_t k = 0; k < max_row; ++k)
            out << (k < row.size() ? row[k] + 1 : 0) << (k + 1 < max_row ? " " : "\n");
    }
}

void save_alist_file(const std::string& path, const ParityCheck& h) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open alist file for write: " + path);
    save_alist(out, h);
}

}  // namespace dcsim
