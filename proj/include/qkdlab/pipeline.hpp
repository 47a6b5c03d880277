#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qkdlab/adversary.hpp"
#include "qkdlab/ecc.hpp"
#include "qkdlab/hashing.hpp"

namespace qkdlab {

enum class DegeneratePolicy { keep, resample, reject };

struct ChannelNoise {
    enum class Kind { none, bsc, markov };
    Kind kind = Kind::none;
    double bsc_p = 0.0;
    MarkovChannel markov;

    void validate() const;
    std::string kind_name() const;
};

// Full configuration of one protocol execution. Everything observable is a
// deterministic function of this struct, seed included.
//
// qber_threshold = 0.11, auth_cost_bits = 32 and f_factor = 1.1 are
// conventions of this artifact, not derived values; emitted reports mark
// them as such.
struct ProtocolConfig {
    long n_sifted = 0;
    std::uint64_t seed = 0;
    double qber_threshold = 0.11;
    double test_fraction = 0.25;
    AttackModel attack;
    ChannelNoise channel;
    std::string code_name = "hamming-7-4";
    EccMode ecc_mode = EccMode::open_syndrome;
    double cover_bias = 0.0;  // bias of covered-mode pad bits, 0 = one-time pad
    double f_factor = 1.1;
    double d_target = 1e-6;
    long auth_cost_bits = 32;
    bool oracle = false;
    // < 0 means: take the exponent from the oracle's sifted joint (the
    // identical-exponents assumption); requires oracle mode.
    double l_assumed = -1.0;
    EpsSmoothShift eps_smooth;
    DegeneratePolicy degenerate_policy = DegeneratePolicy::keep;
    bool keep_joints = false;

    long test_count() const;
    long kept_count() const;
    void validate() const;
};

// Everything the accounting formulas say about one parameter point, plus
// the oracle's exact chain when available.
struct KeyRateReport {
    long n_sifted = 0;
    long n_test = 0;
    long n_key = 0;
    std::uint64_t seed = 0;
    std::string attack_kind;
    double attack_param = 0.0;
    std::string channel_kind;
    std::string code_name;
    std::string ecc_mode;
    double test_fraction = 0.0;
    double qber_threshold = 0.0;
    double f_factor = 0.0;
    double d_target = 0.0;
    long auth_cost_bits = 0;

    double measured_qber = 0.0;
    bool aborted = false;

    double l_assumed = 0.0;
    std::string l_assumed_source;  // "oracle" or "user"
    long out_bits = 0;
    long out_bits_single_log = 0;  // the single-log reading, side by side
    double leak_ec = 0.0;          // f * n * h(qber)
    long disclosed_bits = 0;       // actually sent in the open
    long cover_bits_consumed = 0;  // pre-shared bits spent on covering
    double net_bits = 0.0;         // out - leak_ec - auth (may be negative)
    double d_floor = 0.0;          // minimum distance at this (l, out)

    std::optional<bool> residual_error;
    std::optional<bool> pa_degenerate;
    bool oracle = false;
    std::optional<double> oracle_pguess_sifted;
    std::optional<double> oracle_pguess_corrected;
    std::optional<double> oracle_pguess_amplified;
    std::optional<double> oracle_l_sifted;
    std::optional<double> oracle_l_corrected;
    std::optional<double> oracle_l_amplified;
    std::optional<bool> eq4_violation_flagged;
    std::string transcript_digest;
};

struct RunResult {
    PipelineTrace trace;
    KeyRateReport report;
};

// sift -> QBER test -> reconcile -> amplify, deterministic given the seed.
// Oracle mode additionally computes Eve's exact joint at every stage and
// flags runs where the assumed exponent exceeds the oracle's true one.
RunResult run_protocol(const ProtocolConfig& cfg);

// out_bits - leak_ec - auth_cost. Negative values are reported as is:
// the sign is the finding, clamping would hide it.
double net_key(long out_bits, double leak_ec, long auth_cost);

// 2^(-lambda n + g). Perfect keys are exactly the lambda = 1, g = 0 corner.
double asymptotic_p1(double lambda, int n, double g_of_n);
bool asymptotic_is_perfect(double lambda, double g_of_n);

// Accounting-level tradeoff table: one report row per (d_target, qber)
// grid point, using the nominal qber as the channel parameter so the
// monotonicity contracts are exact. Requires a user-supplied l_assumed.
// Row order: d_grid outer, qber_grid inner.
std::vector<KeyRateReport> sweep_tradeoff(const ProtocolConfig& base,
                                          const std::vector<double>& d_grid,
                                          const std::vector<double>& qber_grid,
                                          int threads = 1);

}  // namespace qkdlab
