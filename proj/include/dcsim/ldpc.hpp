#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dcsim/bits.hpp"
#include "dcsim/trellis.hpp"

namespace dcsim {

// Edge-perspective degree distribution pair (lambda for variable nodes, rho
// for check nodes), degrees >= 2.
struct DegreeDist {
    std::map<int, double> lambda;
    std::map<int, double> rho;

    void validate() const;          // throws std::invalid_argument
    double lambda_integral() const; // sum lambda_i / i
    double rho_integral() const;    // sum rho_i / i
};

// 1 - int(rho)/int(lambda).
double design_rate(const DegreeDist& dd);

// Built-in distributions: "bi-awgn", "id", "ids" (all rate ~0.5).
DegreeDist preset_degree_dist(const std::string& name);
std::vector<std::string> preset_names();

// Key-value text format: lines "lambda <degree> <fraction>" and
// "rho <degree> <fraction>", '#' comments.
DegreeDist load_degree_dist(std::istream& in);
DegreeDist load_degree_dist_file(const std::string& path);
void save_degree_dist(std::ostream& out, const DegreeDist& dd);

// Sparse parity-check matrix in adjacency form.
struct ParityCheck {
    int n = 0;  // variables (columns)
    int m = 0;  // checks (rows)
    std::vector<std::vector<int>> check_vars;  // per check, variable ids
    std::vector<std::vector<int>> var_checks;  // per variable, check ids

    std::size_t edges() const;
};

// Configuration-model sample of the (lambda, rho) ensemble with n variables.
// Node-degree counts come from largest-remainder rounding of the node
// perspective; the residual socket imbalance (at most a few edges) is
// absorbed by +-1 degree adjustments spread round-robin over check nodes.
// Parallel edges are removed by re-pairing sockets. Deterministic given seed.
ParityCheck sample_code(const DegreeDist& dd, int n, std::uint64_t seed);

// s = H x over GF(2).
BitSeq coset_syndrome(const ParityCheck& h, const BitSeq& x);

// Standard alist text format.
ParityCheck load_alist(std::istream& in);
ParityCheck load_alist_file(const std::string& path);
void save_alist(std::ostream& out, const ParityCheck& h);
void save_alist_file(const std::string& path, const ParityCheck& h);

struct BpResult {
    BitSeq hard;
    LlrSeq extrinsic;   // posterior minus channel, clipped
    int iterations = 0;
    bool converged = false;
};

// Flooding sum-product decoder with check signs adjusted by the coset
// syndrome. Incremental interface: `step` runs one flooding iteration with
// the given channel LLRs, so callers can interleave iterations with detector
// passes. Message state persists across steps until reset().
class BpDecoder {
public:
    BpDecoder(const ParityCheck& h, BitSeq syndrome);

    void reset();

    struct Step {
        bool parity_ok = false;
    };
    Step step(const LlrSeq& channel);

    const BitSeq& hard() const { return hard_; }
    LlrSeq extrinsic() const;           // sum of check-to-variable messages
    LlrSeq posterior(const LlrSeq& channel) const;
    bool parity_ok(const BitSeq& candidate) const;

private:
    const ParityCheck& h_;
    BitSeq syndrome_;
    std::vector<int> edge_var_;          // per edge (grouped by check), variable id
    std::vector<std::size_t> check_off_; // edge offsets per check
    std::vector<std::vector<std::size_t>> var_edges_;
    std::vector<double> v2c_, c2v_, fwd_, bwd_;
    BitSeq hard_;
    bool first_ = true;
};

// Runs up to max_iters flooding iterations with fixed channel LLRs; stops as
// soon as H x^ = s.
BpResult bp_decode(const LlrSeq& channel, const ParityCheck& h,
                   const BitSeq& syndrome, int max_iters);

}  // namespace dcsim
