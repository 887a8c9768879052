#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcsim/harness.hpp"

namespace {

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoi(item));
    return out;
}

struct ListFlags {
    std::string p_ids, p_ss, t_maxes, delays;
};

void add_common_options(CLI::App* sub, dcsim::ExperimentConfig& cfg, ListFlags& lists) {
    sub->set_config("--config", "", "key = value config file; flags override it");
    sub->add_option("--p-id", cfg.p_id, "insertion+deletion probability");
    sub->add_option("--p-s", cfg.p_s, "substitution probability");
    sub->add_option("--d-max", cfg.d_max, "maximum drift");
    sub->add_option("--p-ids", lists.p_ids, "comma-separated p_id sweep");
    sub->add_option("--p-ss", lists.p_ss, "comma-separated p_s sweep");
    sub->add_option("--seed", cfg.seed, "master seed");
    sub->add_option("--threads", cfg.threads,
                    "worker threads (0 = DCSIM_THREADS env or hardware)");
    sub->add_flag("!--no-timing", cfg.timing, "report 0 in the seconds column");
    sub->add_option("--output,-o", cfg.output, "CSV output path (default stdout)");
}

void add_scheme_options(CLI::App* sub, dcsim::ExperimentConfig& cfg, ListFlags& lists) {
    sub->add_option("--t-max", cfg.t_max, "maximum delay; scheme T = (0..t_max)");
    sub->add_option("--delays", lists.delays, "explicit comma-separated delay vector T");
    sub->add_option("--t-maxes", lists.t_maxes, "comma-separated t_max sweep");
}

void add_code_options(CLI::App* sub, dcsim::ExperimentConfig& cfg) {
    sub->add_option("--preset", cfg.preset, "degree distribution preset")
        ->check(CLI::IsMember(dcsim::preset_names()));
    sub->add_option("--alist", cfg.alist_path, "parity-check matrix in alist format");
    sub->add_option("--n", cfg.n, "code length");
    sub->add_option("--bp-iters", cfg.bp_iters, "BP iteration cap");
}

void apply_lists(dcsim::ExperimentConfig& cfg, const ListFlags& lists) {
    if (!lists.p_ids.empty()) cfg.p_id_list = parse_double_list(lists.p_ids);
    if (!lists.p_ss.empty()) cfg.p_s_list = parse_double_list(lists.p_ss);
    if (!lists.t_maxes.empty()) cfg.t_max_list = parse_int_list(lists.t_maxes);
    if (!lists.delays.empty()) cfg.delays = parse_int_list(lists.delays);
}

void emit(const dcsim::ExperimentConfig& cfg, const std::vector<dcsim::ResultRow>& rows) {
    if (cfg.output.empty()) {
        dcsim::write_csv(std::cout, rows);
        return;
    }
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + cfg.output);
    dcsim::write_csv(out, rows);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delayed-coding simulation toolkit for insertion/deletion/substitution channels"};
    app.require_subcommand(1);

    dcsim::ExperimentConfig cfg;
    ListFlags lists;

    auto* ber = app.add_subcommand("ber", "finite-length BER of the delayed coding scheme");
    add_common_options(ber, cfg, lists);
    add_scheme_options(ber, cfg, lists);
    add_code_options(ber, cfg);
    ber->add_option("--codewords,-L", cfg.num_codewords, "codewords per chain block");
    ber->add_option("--target-bits", cfg.target_bits, "decoded bits per parameter point");

    auto* iterative =
        app.add_subcommand("iterative", "joint iterative detection/decoding baseline");
    add_common_options(iterative, cfg, lists);
    add_code_options(iterative, cfg);
    iterative->add_option("--trials", cfg.trials, "codewords per point");
    iterative->add_option("--max-global-iters", cfg.max_global_iters,
                          "cap on detection/BP rounds");

    auto* marker =
        app.add_subcommand("marker", "non-iterative concatenated marker baseline");
    add_common_options(marker, cfg, lists);
    add_code_options(marker, cfg);
    marker->add_option("--trials", cfg.trials, "codewords per point");
    marker->add_option("--marker-d", cfg.marker_period, "payload bits between markers");

    auto* rates = app.add_subcommand("rates", "BCJR-once rate sweep for the delay scheme");
    add_common_options(rates, cfg, lists);
    add_scheme_options(rates, cfg, lists);
    rates->add_option("--trials", cfg.trials, "Monte Carlo trials per point");
    rates->add_option("--n", cfg.n, "target frame length (n_s = n/m)");
    rates->add_option("--ns", cfg.n_s, "explicit per-subblock length n_s");
    rates->add_flag("--iud", cfg.with_iud, "also emit the i.u.d.-input curve");
    rates->add_option("--marker-curve-d", cfg.marker_curve_d,
                      "also emit a marker curve with this spacing");

    auto* sir = app.add_subcommand("sir", "symmetric information rate estimates");
    add_common_options(sir, cfg, lists);
    sir->add_option("--trials", cfg.trials, "Monte Carlo trials per point");
    sir->add_option("--n", cfg.n, "sequence length per trial");

    auto* threshold =
        app.add_subcommand("threshold", "BP threshold search via density evolution");
    add_common_options(threshold, cfg, lists);
    add_scheme_options(threshold, cfg, lists);
    threshold->add_option("--preset", cfg.preset, "degree distribution preset")
        ->check(CLI::IsMember(dcsim::preset_names()));
    threshold->add_option("--n-pop", cfg.n_pop, "density population size");
    threshold->add_option("--eps-de", cfg.eps_de, "target error probability");
    threshold->add_option("--de-iters", cfg.de_iters, "density evolution iteration cap");
    threshold->add_option("--search-lo", cfg.search_lo, "lower p_id probe");
    threshold->add_option("--search-hi", cfg.search_hi, "upper p_id probe");
    threshold->add_option("--resolution", cfg.resolution, "bisection resolution");
    threshold->add_option("--ns", cfg.n_s, "explicit per-subblock length n_s");

    auto* limits = app.add_subcommand("limits", "p_id at which a rate estimator hits a target");
    add_common_options(limits, cfg, lists);
    add_scheme_options(limits, cfg, lists);
    limits->add_option("--estimator", cfg.estimator, "sir | dc | iud | marker");
    limits->add_option("--target-rate", cfg.target_rate, "rate the limit refers to");
    limits->add_option("--tolerance", cfg.limit_tolerance, "bisection bracket width");
    limits->add_option("--trials", cfg.trials, "initial trials per probe");
    limits->add_option("--n", cfg.n, "sequence length per trial");
    limits->add_option("--ns", cfg.n_s, "explicit per-subblock length n_s");
    limits->add_option("--marker-d", cfg.marker_period, "marker spacing for the marker estimator");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        apply_lists(cfg, lists);
        std::vector<dcsim::ResultRow> rows;
        if (ber->parsed()) rows = dcsim::run_ber_experiment(cfg);
        else if (iterative->parsed()) rows = dcsim::run_iterative_baseline(cfg);
        else if (marker->parsed()) rows = dcsim::run_noniterative_marker_baseline(cfg);
        else if (rates->parsed()) rows = dcsim::run_rate_sweep(cfg);
        else if (sir->parsed()) rows = dcsim::run_sir(cfg);
        else if (threshold->parsed()) rows = dcsim::run_threshold_search(cfg);
        else if (limits->parsed()) rows = dcsim::run_rate_limits(cfg);
        emit(cfg, rows);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
