#include "dcsim/harness.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "dcsim/parallel.hpp"

namespace dcsim {

std::vector<double> ExperimentConfig::p_ids() const {
    return p_id_list.empty() ? std::vector<double>{p_id} : p_id_list;
}

std::vector<double> ExperimentConfig::p_ss() const {
    return p_s_list.empty() ? std::vector<double>{p_s} : p_s_list;
}

std::vector<int> ExperimentConfig::t_maxes() const {
    return t_max_list.empty() ? std::vector<int>{t_max} : t_max_list;
}

DelayScheme ExperimentConfig::scheme_for(int t_max_value) const {
    if (!delays.empty()) return build_delay_scheme(delays);
    return uniform_delay_scheme(t_max_value);
}

ChannelParams ExperimentConfig::channel(double p_id_value, double p_s_value) const {
    ChannelParams p{p_id_value, p_s_value, d_max};
    p.validate();
    return p;
}

DegreeDist ExperimentConfig::code_dist() const { return preset_degree_dist(preset); }

ParityCheck ExperimentConfig::code_matrix() const {
    if (!alist_path.empty()) return load_alist_file(alist_path);
    return sample_code(code_dist(), n, mix_seed(seed, seed_tag::kCodeSample, 0));
}

int ExperimentConfig::worker_threads() const { return default_threads(threads); }

const char* kCsvHeader = "experiment,param_json,metric,value,stderr,trials,seconds";

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace

std::string to_csv_line(const ResultRow& row) {
    std::string out = row.experiment;
    out += ",";
    out += csv_quote(row.params.dump());
    out += ",";
    out += row.metric;
    out += ",";
    out += format_double(row.value);
    out += ",";
    out += format_double(row.std_error);
    out += ",";
    out += std::to_string(row.trials);
    out += ",";
    out += format_double(row.seconds);
    return out;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << kCsvHeader << "\n";
    for (const auto& row : rows) out << to_csv_line(row) << "\n";
}

}  // namespace dcsim
