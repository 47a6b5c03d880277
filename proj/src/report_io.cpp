#include "qkdlab/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace qkdlab {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
}

namespace {

std::string opt_bool(const std::optional<bool>& b) {
    return b.has_value() ? (*b ? "1" : "0") : "";
}

std::string opt_double(const std::optional<double>& d) {
    return d.has_value() ? format_double(*d) : "";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(cell);
    return cells;
}

std::optional<bool> parse_opt_bool(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return s == "1";
}

std::optional<double> parse_opt_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return std::stod(s);
}

}  // namespace

const std::vector<std::string>& report_csv_columns() {
    static const std::vector<std::string> cols = {
        "n_sifted", "n_test", "n_key", "seed",
        "attack", "attack_param", "channel", "code", "ecc_mode",
        "test_fraction", "qber_threshold", "f_factor", "d_target", "auth_cost_bits",
        "measured_qber", "aborted",
        "l_assumed", "l_assumed_source",
        "out_bits", "out_bits_single_log",
        "leak_ec", "disclosed_bits", "cover_bits_consumed",
        "net_bits", "d_floor",
        "residual_error", "pa_degenerate",
        "oracle",
        "oracle_pguess_sifted", "oracle_pguess_corrected", "oracle_pguess_amplified",
        "oracle_l_sifted", "oracle_l_corrected", "oracle_l_amplified",
        "eq4_violation_flagged", "transcript_digest"};
    return cols;
}

std::string report_to_csv_row(const KeyRateReport& r) {
    std::ostringstream out;
    out << r.n_sifted << ',' << r.n_test << ',' << r.n_key << ',' << r.seed << ','
        << r.attack_kind << ',' << format_double(r.attack_param) << ','
        << r.channel_kind << ',' << r.code_name << ',' << r.ecc_mode << ','
        << format_double(r.test_fraction) << ',' << format_double(r.qber_threshold)
        << ',' << format_double(r.f_factor) << ',' << format_double(r.d_target) << ','
        << r.auth_cost_bits << ',' << format_double(r.measured_qber) << ','
        << (r.aborted ? "1" : "0") << ',' << format_double(r.l_assumed) << ','
        << r.l_assumed_source << ',' << r.out_bits << ',' << r.out_bits_single_log
        << ',' << format_double(r.leak_ec) << ',' << r.disclosed_bits << ','
        << r.cover_bits_consumed << ',' << format_double(r.net_bits) << ','
        << format_double(r.d_floor) << ',' << opt_bool(r.residual_error) << ','
        << opt_bool(r.pa_degenerate) << ',' << (r.oracle ? "1" : "0") << ','
        << opt_double(r.oracle_pguess_sifted) << ','
        << opt_double(r.oracle_pguess_corrected) << ','
        << opt_double(r.oracle_pguess_amplified) << ','
        << opt_double(r.oracle_l_sifted) << ',' << opt_double(r.oracle_l_corrected)
        << ',' << opt_double(r.oracle_l_amplified) << ','
        << opt_bool(r.eq4_violation_flagged) << ',' << r.transcript_digest;
    return out.str();
}

std::string reports_to_csv(const std::vector<KeyRateReport>& rows) {
    std::string out;
    const auto& cols = report_csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out += ',';
        out += cols[i];
    }
    out += '\n';
    for (const KeyRateReport& r : rows) {
        out += report_to_csv_row(r);
        out += '\n';
    }
    return out;
}

std::vector<KeyRateReport> parse_report_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "report csv: empty file");
    {
        std::vector<std::string> header = split_csv_line(line);
        require(header == report_csv_columns(), "report csv: unexpected header");
    }
    std::vector<KeyRateReport> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> c = split_csv_line(line);
        require(c.size() == report_csv_columns().size(), "report csv: bad row width");
        KeyRateReport r;
        std::size_t i = 0;
        r.n_sifted = std::stol(c[i++]);
        r.n_test = std::stol(c[i++]);
        r.n_key = std::stol(c[i++]);
        r.seed = std::stoull(c[i++]);
        r.attack_kind = c[i++];
        r.attack_param = std::stod(c[i++]);
        r.channel_kind = c[i++];
        r.code_name = c[i++];
        r.ecc_mode = c[i++];
        r.test_fraction = std::stod(c[i++]);
        r.qber_threshold = std::stod(c[i++]);
        r.f_factor = std::stod(c[i++]);
        r.d_target = std::stod(c[i++]);
        r.auth_cost_bits = std::stol(c[i++]);
        r.measured_qber = std::stod(c[i++]);
        r.aborted = c[i++] == "1";
        r.l_assumed = std::stod(c[i++]);
        r.l_assumed_source = c[i++];
        r.out_bits = std::stol(c[i++]);
        r.out_bits_single_log = std::stol(c[i++]);
        r.leak_ec = std::stod(c[i++]);
        r.disclosed_bits = std::stol(c[i++]);
        r.cover_bits_consumed = std::stol(c[i++]);
        r.net_bits = std::stod(c[i++]);
        r.d_floor = std::stod(c[i++]);
        r.residual_error = parse_opt_bool(c[i++]);
        r.pa_degenerate = parse_opt_bool(c[i++]);
        r.oracle = c[i++] == "1";
        r.oracle_pguess_sifted = parse_opt_double(c[i++]);
        r.oracle_pguess_corrected = parse_opt_double(c[i++]);
        r.oracle_pguess_amplified = parse_opt_double(c[i++]);
        r.oracle_l_sifted = parse_opt_double(c[i++]);
        r.oracle_l_corrected = parse_opt_double(c[i++]);
        r.oracle_l_amplified = parse_opt_double(c[i++]);
        r.eq4_violation_flagged = parse_opt_bool(c[i++]);
        r.transcript_digest = c[i++];
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

json stage_to_json(const TraceStage& s) {
    json j;
    j["bits"] = s.key.size();
    j["key"] = s.key.to_string();
    j["exact"] = s.metrics_exact;
    if (s.metrics_exact) {
        j["pguess"] = s.metrics.pguess;
        j["min_entropy_bits"] = s.metrics.min_entropy_bits;
        j["stat_distance"] = s.metrics.stat_distance;
    }
    return j;
}

void stage_from_json(const json& j, StageMetrics& m, bool& exact, std::string& key) {
    key = j.at("key").get<std::string>();
    exact = j.at("exact").get<bool>();
    if (exact) {
        m.pguess = j.at("pguess").get<double>();
        m.min_entropy_bits = j.at("min_entropy_bits").get<double>();
        m.stat_distance = j.at("stat_distance").get<double>();
    }
}

}  // namespace

std::string trace_to_json(const PipelineTrace& trace, const KeyRateReport& report) {
    json j;
    j["schema"] = "qkdlab-trace-v1";
    j["stages"]["sifted"] = stage_to_json(trace.sifted);
    j["stages"]["corrected"] = stage_to_json(trace.corrected);
    j["stages"]["amplified"] = stage_to_json(trace.amplified);
    j["residual_error"] = trace.residual_error;
    json transcript = json::array();
    for (const TranscriptEntry& e : trace.transcript)
        transcript.push_back(json{{"label", e.label}, {"data", e.data}});
    j["transcript"] = transcript;
    j["transcript_digest"] = report.transcript_digest;
    j["report"] = json::parse(R"({})");
    j["report"]["aborted"] = report.aborted;
    j["report"]["measured_qber"] = report.measured_qber;
    j["report"]["out_bits"] = report.out_bits;
    j["report"]["net_bits"] = report.net_bits;
    j["conventions"] = {
        {"qber_threshold", "artifact convention, not a derived value"},
        {"auth_cost_bits", "artifact convention, not a derived value"},
        {"f_factor", "free parameter; 1.1 is a commonly cited choice"}};
    return j.dump(2) + "\n";
}

TraceSummary parse_trace_json(const std::string& text) {
    json j = json::parse(text);
    require(j.at("schema").get<std::string>() == "qkdlab-trace-v1",
            "trace json: unknown schema");
    TraceSummary t;
    stage_from_json(j.at("stages").at("sifted"), t.sifted, t.sifted_exact, t.sifted_key);
    stage_from_json(j.at("stages").at("corrected"), t.corrected, t.corrected_exact,
                    t.corrected_key);
    stage_from_json(j.at("stages").at("amplified"), t.amplified, t.amplified_exact,
                    t.amplified_key);
    t.residual_error = j.at("residual_error").get<bool>();
    for (const json& e : j.at("transcript"))
        t.transcript.push_back(TranscriptEntry{e.at("label").get<std::string>(),
                                               e.at("data").get<std::string>()});
    t.transcript_digest = j.at("transcript_digest").get<std::string>();
    return t;
}

std::string sweep_manifest_json(const ProtocolConfig& base,
                                const std::vector<double>& d_grid,
                                const std::vector<double>& qber_grid) {
    json j;
    j["schema"] = "qkdlab-sweep-manifest-v1";
    j["row_order"] = "d_grid outer, qber_grid inner";
    j["d_grid"] = d_grid;
    j["qber_grid"] = qber_grid;
    j["n_sifted"] = base.n_sifted;
    j["seed"] = base.seed;
    j["code"] = base.code_name;
    j["ecc_mode"] = base.ecc_mode == EccMode::open_syndrome ? "open" : "covered";
    j["f_factor"] = base.f_factor;
    j["l_assumed"] = base.l_assumed;
    j["test_fraction"] = base.test_fraction;
    j["qber_threshold"] = base.qber_threshold;
    j["auth_cost_bits"] = base.auth_cost_bits;
    j["conventions"] = {
        {"qber_threshold", "artifact convention, not a derived value"},
        {"auth_cost_bits", "artifact convention, not a derived value"},
        {"f_factor", "free parameter; 1.1 is a commonly cited choice"}};
    return j.dump(2) + "\n";
}

}  // namespace qkdlab
