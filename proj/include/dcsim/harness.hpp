#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcsim/channel.hpp"
#include "dcsim/dc.hpp"
#include "dcsim/ldpc.hpp"

namespace dcsim {

// One experiment run; every run is fully determined by (config, seed).
struct ExperimentConfig {
    // channel
    double p_id = 0.06;
    double p_s = 0.0;
    int d_max = 8;
    std::vector<double> p_id_list;  // sweep; empty = {p_id}
    std::vector<double> p_s_list;   // sweep; empty = {p_s}

    // delay scheme
    int t_max = 15;
    std::vector<int> delays;     // explicit T; empty = (0..t_max)
    std::vector<int> t_max_list; // sweep; empty = {t_max}

    // code
    std::string preset = "bi-awgn";
    std::string alist_path;  // overrides preset sampling when set
    int n = 10000;
    int num_codewords = 50;  // L
    int bp_iters = 100;

    // workload
    int trials = 20;
    long long target_bits = 1000000;  // ber: decoded bits per point
    int marker_period = 10;           // d
    std::size_t n_s = 0;              // 0: n / m
    int max_global_iters = 300;       // iterative baseline cap

    // rates / limits
    double target_rate = 0.5;
    double limit_tolerance = 0.002;
    std::string estimator = "sir";  // limits: sir | dc | iud | marker
    bool with_iud = false;
    int marker_curve_d = 0;  // rates: also emit a marker curve with this d

    // thresholds
    std::size_t n_pop = 100000;
    double eps_de = 1e-4;
    int de_iters = 500;
    double search_lo = 0.001;
    double search_hi = 0.3;
    double resolution = 1e-3;

    // run control
    std::uint64_t seed = 1;
    int threads = 0;     // 0: DCSIM_THREADS env or hardware
    bool timing = true;  // false: seconds column reports 0
    std::string output;  // CSV path; empty = stdout

    std::vector<double> p_ids() const;
    std::vector<double> p_ss() const;
    std::vector<int> t_maxes() const;
    DelayScheme scheme_for(int t_max_value) const;
    ChannelParams channel(double p_id_value, double p_s_value) const;
    DegreeDist code_dist() const;
    ParityCheck code_matrix() const;  // alist file or sampled preset
    int worker_threads() const;
};

struct ResultRow {
    std::string experiment;
    nlohmann::ordered_json params;
    std::string metric;
    double value = 0.0;
    double std_error = 0.0;
    long long trials = 0;
    double seconds = 0.0;
};

extern const char* kCsvHeader;  // experiment,param_json,metric,value,stderr,trials,seconds
std::string format_double(double v);  // shortest round-trip representation
std::string to_csv_line(const ResultRow& row);
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);

// Experiment drivers. Each validates its configuration up front and throws
// std::invalid_argument before any computation on inconsistency.
std::vector<ResultRow> run_ber_experiment(const ExperimentConfig& cfg);
std::vector<ResultRow> run_iterative_baseline(const ExperimentConfig& cfg);
std::vector<ResultRow> run_noniterative_marker_baseline(const ExperimentConfig& cfg);
std::vector<ResultRow> run_rate_sweep(const ExperimentConfig& cfg);
std::vector<ResultRow> run_sir(const ExperimentConfig& cfg);
std::vector<ResultRow> run_threshold_search(const ExperimentConfig& cfg);
std::vector<ResultRow> run_rate_limits(const ExperimentConfig& cfg);

}  // namespace dcsim
