// qkdlab: desk-scale laboratory for QKD post-processing security analysis.
//
// Subcommands: run, sweep, verify, report. Data goes to files (or stdout
// for verify/report); diagnostics go to stderr. Exit codes: 0 success,
// 1 failed verification, 2 invalid config or usage, 3 enumeration
// capacity exceeded.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkdlab/pipeline.hpp"
#include "qkdlab/report_io.hpp"
#include "qkdlab/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCapacity = 3;

[[noreturn]] void config_fail(const std::string& msg) {
    throw qkdlab::validation_error(msg);
}

void check_known_keys(const json& obj, const std::string& where,
                      const std::vector<std::string>& allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const std::string& k : allowed)
            if (item.key() == k) { known = true; break; }
        if (!known) config_fail("unknown key \"" + item.key() + "\" in " + where);
    }
}

qkdlab::AttackModel parse_attack(const json& a) {
    check_known_keys(a, "attack", {"kind", "q", "delta"});
    std::string kind = a.value("kind", "none");
    if (kind == "none") {
        if (a.contains("q") || a.contains("delta"))
            config_fail("attack \"none\" takes no parameters");
        return qkdlab::AttackModel::none();
    }
    if (kind == "intercept_resend") {
        if (!a.contains("q")) config_fail("attack intercept_resend needs \"q\"");
        return qkdlab::AttackModel::intercept_resend(a.at("q").get<double>());
    }
    if (kind == "know_all_with_prob") {
        if (!a.contains("delta")) config_fail("attack know_all_with_prob needs \"delta\"");
        return qkdlab::AttackModel::know_all(a.at("delta").get<double>());
    }
    config_fail("unknown attack kind \"" + kind + "\"");
}

qkdlab::ChannelNoise parse_channel(const json& c) {
    check_known_keys(c, "channel",
                     {"kind", "p", "p_good_to_bad", "p_bad_to_good", "flip_good",
                      "flip_bad"});
    qkdlab::ChannelNoise ch;
    std::string kind = c.value("kind", "none");
    if (kind == "none") {
        ch.kind = qkdlab::ChannelNoise::Kind::none;
    } else if (kind == "bsc") {
        ch.kind = qkdlab::ChannelNoise::Kind::bsc;
        if (!c.contains("p")) config_fail("channel bsc needs \"p\"");
        ch.bsc_p = c.at("p").get<double>();
    } else if (kind == "markov") {
        ch.kind = qkdlab::ChannelNoise::Kind::markov;
        ch.markov.p_good_to_bad = c.value("p_good_to_bad", ch.markov.p_good_to_bad);
        ch.markov.p_bad_to_good = c.value("p_bad_to_good", ch.markov.p_bad_to_good);
        ch.markov.flip_good = c.value("flip_good", ch.markov.flip_good);
        ch.markov.flip_bad = c.value("flip_bad", ch.markov.flip_bad);
    } else {
        config_fail("unknown channel kind \"" + kind + "\"");
    }
    return ch;
}

struct LoadedConfig {
    qkdlab::ProtocolConfig protocol;
    std::vector<double> d_grid;
    std::vector<double> qber_grid;
    bool has_sweep = false;
};

LoadedConfig config_from_json(const json& j) {
    check_known_keys(j, "config",
                     {"n_sifted", "seed", "qber_threshold", "test_fraction", "attack",
                      "channel", "code_name", "ecc_mode", "cover_bias", "f_factor",
                      "d_target", "auth_cost_bits", "oracle", "l_assumed",
                      "eps_smooth", "degenerate_policy", "sweep"});
    LoadedConfig out;
    qkdlab::ProtocolConfig& cfg = out.protocol;
    if (!j.contains("n_sifted")) config_fail("config needs \"n_sifted\"");
    if (!j.contains("seed")) config_fail("config needs \"seed\"");
    cfg.n_sifted = j.at("n_sifted").get<long>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.qber_threshold = j.value("qber_threshold", cfg.qber_threshold);
    cfg.test_fraction = j.value("test_fraction", cfg.test_fraction);
    if (j.contains("attack")) cfg.attack = parse_attack(j.at("attack"));
    if (j.contains("channel")) cfg.channel = parse_channel(j.at("channel"));
    cfg.code_name = j.value("code_name", cfg.code_name);
    if (j.contains("ecc_mode")) {
        std::string mode = j.at("ecc_mode").get<std::string>();
        if (mode == "open") cfg.ecc_mode = qkdlab::EccMode::open_syndrome;
        else if (mode == "covered") cfg.ecc_mode = qkdlab::EccMode::covered_syndrome;
        else config_fail("ecc_mode must be \"open\" or \"covered\"");
    }
    cfg.cover_bias = j.value("cover_bias", cfg.cover_bias);
    cfg.f_factor = j.value("f_factor", cfg.f_factor);
    cfg.d_target = j.value("d_target", cfg.d_target);
    cfg.auth_cost_bits = j.value("auth_cost_bits", cfg.auth_cost_bits);
    cfg.oracle = j.value("oracle", cfg.oracle);
    cfg.l_assumed = j.value("l_assumed", cfg.l_assumed);
    if (j.contains("eps_smooth")) {
        const json& e = j.at("eps_smooth");
        check_known_keys(e, "eps_smooth", {"delta_l", "epsilon"});
        cfg.eps_smooth.delta_l = e.value("delta_l", 0.0);
        cfg.eps_smooth.epsilon = e.value("epsilon", 0.0);
    }
    if (j.contains("degenerate_policy")) {
        std::string p = j.at("degenerate_policy").get<std::string>();
        if (p == "keep") cfg.degenerate_policy = qkdlab::DegeneratePolicy::keep;
        else if (p == "resample") cfg.degenerate_policy = qkdlab::DegeneratePolicy::resample;
        else if (p == "reject") cfg.degenerate_policy = qkdlab::DegeneratePolicy::reject;
        else config_fail("degenerate_policy must be keep, resample or reject");
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        check_known_keys(s, "sweep", {"d_grid", "qber_grid"});
        if (!s.contains("d_grid") || !s.contains("qber_grid"))
            config_fail("sweep needs \"d_grid\" and \"qber_grid\"");
        out.d_grid = s.at("d_grid").get<std::vector<double>>();
        out.qber_grid = s.at("qber_grid").get<std::vector<double>>();
        out.has_sweep = true;
    }
    return out;
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_fail("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        config_fail("config is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) config_fail("config root must be a JSON object");
    return j;
}

// --set key=value with dotted paths into the JSON config; values parse as
// JSON scalars, bare words fall back to strings.
void apply_override(json& cfg, const std::string& spec) {
    std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        config_fail("override must look like key=value: " + spec);
    std::string path = spec.substr(0, eq);
    std::string raw = spec.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;  // plain string
    }
    json* node = &cfg;
    std::size_t begin = 0;
    while (true) {
        std::size_t dot = path.find('.', begin);
        std::string key = path.substr(begin, dot == std::string::npos
                                                 ? std::string::npos
                                                 : dot - begin);
        if (key.empty()) config_fail("empty key in override path: " + spec);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = json::object();
        node = &(*node)[key];
        begin = dot + 1;
    }
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) config_fail("cannot write file: " + path.string());
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) config_fail("cannot read file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::vector<std::string> overrides;
    std::string oracle_flag;  // "", "on", "off"
    int threads = 1;
};

LoadedConfig resolve_config(const CommonArgs& args) {
    json j = load_config_file(args.config_path);
    for (const std::string& o : args.overrides) apply_override(j, o);
    LoadedConfig loaded = config_from_json(j);
    if (args.oracle_flag == "on") loaded.protocol.oracle = true;
    else if (args.oracle_flag == "off") loaded.protocol.oracle = false;
    else if (!args.oracle_flag.empty())
        config_fail("--oracle takes on|off");
    return loaded;
}

int cmd_run(const CommonArgs& args) {
    LoadedConfig loaded = resolve_config(args);
    qkdlab::RunResult result = qkdlab::run_protocol(loaded.protocol);
    fs::create_directories(args.out_dir);
    write_file(fs::path(args.out_dir) / "report.csv",
               qkdlab::reports_to_csv({result.report}));
    write_file(fs::path(args.out_dir) / "trace.json",
               qkdlab::trace_to_json(result.trace, result.report));
    std::cerr << "run: " << (result.report.aborted ? "aborted" : "completed")
              << ", outputs in " << args.out_dir << "\n";
    return kExitOk;
}

int cmd_sweep(const CommonArgs& args) {
    LoadedConfig loaded = resolve_config(args);
    if (!loaded.has_sweep) config_fail("sweep needs a \"sweep\" section in the config");
    if (loaded.d_grid.empty() || loaded.qber_grid.empty())
        config_fail("sweep grids must be nonempty");
    std::vector<qkdlab::KeyRateReport> rows = qkdlab::sweep_tradeoff(
        loaded.protocol, loaded.d_grid, loaded.qber_grid, args.threads);
    fs::create_directories(args.out_dir);
    write_file(fs::path(args.out_dir) / "sweep.csv", qkdlab::reports_to_csv(rows));
    write_file(fs::path(args.out_dir) / "sweep_manifest.json",
               qkdlab::sweep_manifest_json(loaded.protocol, loaded.d_grid,
                                           loaded.qber_grid));
    std::cerr << "sweep: " << rows.size() << " rows written to " << args.out_dir << "\n";
    return kExitOk;
}

int cmd_verify(int max_n, const std::string& fault) {
    qkdlab::VerifyOptions options;
    options.max_n = max_n;
    options.inject_fault = fault;
    std::vector<qkdlab::GroupResult> results = qkdlab::run_verify(options);
    for (const qkdlab::GroupResult& r : results) {
        if (r.passed) {
            std::cout << "PASS  " << r.name << " (" << r.checks << " checks)\n";
        } else {
            std::cout << "FAIL  " << r.name << " (" << r.checks
                      << " checks): " << r.failure_detail << "\n";
        }
    }
    return qkdlab::all_passed(results) ? kExitOk : kExitVerifyFailed;
}

int cmd_report(const std::string& in_dir) {
    fs::path dir(in_dir);
    bool found = false;
    if (fs::exists(dir / "report.csv")) {
        found = true;
        std::vector<qkdlab::KeyRateReport> rows =
            qkdlab::parse_report_csv(read_file(dir / "report.csv"));
        for (const qkdlab::KeyRateReport& r : rows) {
            std::cout << "run seed=" << r.seed << " code=" << r.code_name << "/"
                      << r.ecc_mode << " qber=" << qkdlab::format_double(r.measured_qber)
                      << (r.aborted ? " ABORTED" : "")
                      << " out=" << r.out_bits
                      << " leak_ec=" << qkdlab::format_double(r.leak_ec)
                      << " net=" << qkdlab::format_double(r.net_bits) << "\n";
            if (r.oracle && r.oracle_pguess_sifted.has_value()) {
                std::cout << "  oracle pguess chain: "
                          << qkdlab::format_double(*r.oracle_pguess_sifted) << " -> "
                          << qkdlab::format_double(*r.oracle_pguess_corrected) << " -> "
                          << qkdlab::format_double(*r.oracle_pguess_amplified)
                          << (r.eq4_violation_flagged.value_or(false)
                                  ? "  [assumed exponent exceeds oracle]"
                                  : "")
                          << "\n";
            }
        }
    }
    if (fs::exists(dir / "trace.json")) {
        found = true;
        qkdlab::TraceSummary t = qkdlab::parse_trace_json(read_file(dir / "trace.json"));
        std::cout << "trace digest=" << t.transcript_digest
                  << " residual_error=" << (t.residual_error ? "1" : "0") << "\n";
        if (t.sifted_exact)
            std::cout << "  sifted    pguess=" << qkdlab::format_double(t.sifted.pguess)
                      << " H_min=" << qkdlab::format_double(t.sifted.min_entropy_bits)
                      << "\n";
        if (t.corrected_exact)
            std::cout << "  corrected pguess=" << qkdlab::format_double(t.corrected.pguess)
                      << " H_min=" << qkdlab::format_double(t.corrected.min_entropy_bits)
                      << "\n";
        if (t.amplified_exact)
            std::cout << "  amplified pguess=" << qkdlab::format_double(t.amplified.pguess)
                      << " H_min=" << qkdlab::format_double(t.amplified.min_entropy_bits)
                      << "\n";
    }
    if (fs::exists(dir / "sweep.csv")) {
        found = true;
        std::vector<qkdlab::KeyRateReport> rows =
            qkdlab::parse_report_csv(read_file(dir / "sweep.csv"));
        std::cout << "sweep with " << rows.size() << " rows";
        if (!rows.empty()) {
            double best = rows[0].net_bits;
            for (const auto& r : rows) best = std::max(best, r.net_bits);
            std::cout << ", best net_bits=" << qkdlab::format_double(best);
        }
        std::cout << "\n";
    }
    if (!found) config_fail("no report.csv, trace.json or sweep.csv in " + in_dir);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale QKD post-processing security laboratory"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args;
    int verify_max_n = 6;
    std::string verify_fault;
    std::string report_in;

    CLI::App* run = app.add_subcommand("run", "single protocol run");
    run->add_option("--config", run_args.config_path, "JSON config path")->required();
    run->add_option("--out", run_args.out_dir, "output directory");
    run->add_option("--set", run_args.overrides, "override key=value (repeatable)");
    run->add_option("--oracle", run_args.oracle_flag, "on|off");
    run->add_option("--threads", run_args.threads, "worker threads (speed only)");

    CLI::App* sweep = app.add_subcommand("sweep", "tradeoff grid");
    sweep->add_option("--config", sweep_args.config_path, "JSON config path")->required();
    sweep->add_option("--out", sweep_args.out_dir, "output directory");
    sweep->add_option("--set", sweep_args.overrides, "override key=value (repeatable)");
    sweep->add_option("--oracle", sweep_args.oracle_flag, "on|off");
    sweep->add_option("--threads", sweep_args.threads, "worker threads (speed only)");

    CLI::App* verify = app.add_subcommand("verify", "run the invariant suites");
    verify->add_option("--max-n", verify_max_n, "cap on exhaustive key lengths (2..8)");
    verify->add_option("--inject-fault", verify_fault,
                       "self-test fault injection (see README)");

    CLI::App* report = app.add_subcommand("report", "summarize emitted artifacts");
    report->add_option("--in", report_in, "directory with run/sweep outputs")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args);
        if (verify->parsed()) return cmd_verify(verify_max_n, verify_fault);
        if (report->parsed()) return cmd_report(report_in);
    } catch (const qkdlab::capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const qkdlab::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
