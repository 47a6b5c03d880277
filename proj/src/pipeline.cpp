#include "qkdlab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>

namespace qkdlab {

namespace {

constexpr std::uint64_t kPurposeAliceBits = 1;
constexpr std::uint64_t kPurposeAttack = 2;
constexpr std::uint64_t kPurposeTestPick = 3;
constexpr std::uint64_t kPurposeChannel = 4;
constexpr std::uint64_t kPurposePaSeed = 5;
constexpr std::uint64_t kPurposeCover = 6;

std::string attack_kind_name(const AttackModel& a) {
    switch (a.kind) {
        case AttackModel::Kind::none: return "none";
        case AttackModel::Kind::intercept_resend: return "intercept_resend";
        case AttackModel::Kind::know_all_with_prob: return "know_all_with_prob";
    }
    return "?";
}

double attack_param_of(const AttackModel& a) {
    switch (a.kind) {
        case AttackModel::Kind::none: return 0.0;
        case AttackModel::Kind::intercept_resend: return a.intercept_fraction;
        case AttackModel::Kind::know_all_with_prob: return a.know_prob;
    }
    return 0.0;
}

// FNV-1a over the transcript stream; fingerprints a run in reports.
std::string transcript_digest(const std::vector<TranscriptEntry>& transcript) {
    std::uint64_t h = 14695981039346656037ULL;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= 0x1f;
        h *= 1099511628211ULL;
    };
    for (const TranscriptEntry& e : transcript) {
        feed(e.label);
        feed(e.data);
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

Bits apply_attack_to_bob(const ProtocolConfig& cfg, const Bits& alice,
                         std::mt19937_64& rng) {
    Bits bob = alice;
    if (cfg.attack.kind == AttackModel::Kind::intercept_resend) {
        double q = cfg.attack.intercept_fraction;
        for (std::size_t i = 0; i < bob.size(); ++i) {
            double u = uniform_unit(rng);
            if (u >= 1.0 - q / 2.0) {  // mismatched basis: coin-flip resend
                if (uniform_unit(rng) < 0.5) bob.flip(i);
            }
        }
    }
    // none and know_all_with_prob leave the channel undisturbed
    return bob;
}

Bits apply_channel_noise(const ProtocolConfig& cfg, const Bits& bob) {
    switch (cfg.channel.kind) {
        case ChannelNoise::Kind::none:
            return bob;
        case ChannelNoise::Kind::bsc:
            return bsc_transmit(bob, cfg.channel.bsc_p, cfg.seed ^ kPurposeChannel);
        case ChannelNoise::Kind::markov:
            return markov_transmit(bob, cfg.channel.markov, cfg.seed ^ kPurposeChannel);
    }
    return bob;
}

JointDistribution build_sifted_joint(const ProtocolConfig& cfg, int n_keep) {
    switch (cfg.attack.kind) {
        case AttackModel::Kind::none:
            return JointDistribution::uniform_key(n_keep);
        case AttackModel::Kind::intercept_resend:
            return build_intercept_resend(n_keep, cfg.attack.intercept_fraction);
        case AttackModel::Kind::know_all_with_prob:
            return make_know_all(n_keep, cfg.attack.know_prob);
    }
    throw validation_error("unknown attack kind");
}

}  // namespace

void ChannelNoise::validate() const {
    if (kind == Kind::bsc)
        require(bsc_p >= 0.0 && bsc_p <= 1.0, "channel: bsc p must be in [0,1]");
    if (kind == Kind::markov) markov.validate();
}

std::string ChannelNoise::kind_name() const {
    switch (kind) {
        case Kind::none: return "none";
        case Kind::bsc: return "bsc";
        case Kind::markov: return "markov";
    }
    return "?";
}

long ProtocolConfig::test_count() const {
    long t = static_cast<long>(std::floor(test_fraction * static_cast<double>(n_sifted)));
    return std::max<long>(1, t);
}

long ProtocolConfig::kept_count() const { return n_sifted - test_count(); }

void ProtocolConfig::validate() const {
    require(n_sifted >= 2, "config: n_sifted must be >= 2");
    require(test_fraction > 0.0 && test_fraction < 1.0,
            "config: test_fraction must be in (0,1)");
    require(kept_count() >= 1, "config: no key bits left after testing");
    require(qber_threshold > 0.0 && qber_threshold <= 0.5,
            "config: qber_threshold must be in (0, 1/2]");
    require(d_target > 0.0 && d_target <= 1.0, "config: d_target must be in (0,1]");
    require(f_factor >= 1.0, "config: f_factor must be >= 1");
    require(auth_cost_bits >= 0, "config: auth_cost_bits must be >= 0");
    require(cover_bias >= 0.0 && cover_bias <= 0.5,
            "config: cover_bias must be in [0, 1/2]");
    require(eps_smooth.delta_l >= 0.0 && eps_smooth.epsilon >= 0.0,
            "config: smoothing shift must be nonnegative");
    require(d_target + eps_smooth.epsilon <= 1.0,
            "config: d_target + epsilon exceeds 1");
    attack.validate();
    channel.validate();
    LinearCode::by_name(code_name);  // throws for unknown names
    if (l_assumed < 0.0)
        require(oracle, "config: automatic l_assumed requires oracle mode");
}

double net_key(long out_bits, double leak_ec, long auth_cost) {
    require(out_bits >= 0, "net_key: out_bits must be >= 0");
    require(leak_ec >= 0.0, "net_key: leak_ec must be >= 0");
    require(auth_cost >= 0, "net_key: auth_cost must be >= 0");
    return static_cast<double>(out_bits) - leak_ec - static_cast<double>(auth_cost);
}

double asymptotic_p1(double lambda, int n, double g_of_n) {
    require(lambda >= 0.0 && lambda <= 1.0, "asymptotic_p1: lambda must be in [0,1]");
    require(n >= 1, "asymptotic_p1: n must be >= 1");
    double exponent = -lambda * static_cast<double>(n) + g_of_n;
    require(exponent <= 0.0, "asymptotic_p1: parameters exceed probability 1");
    return std::exp2(exponent);
}

bool asymptotic_is_perfect(double lambda, double g_of_n) {
    return lambda == 1.0 && g_of_n == 0.0;
}

RunResult run_protocol(const ProtocolConfig& cfg) {
    cfg.validate();
    LinearCode code = LinearCode::by_name(cfg.code_name);

    RunResult result;
    KeyRateReport& rep = result.report;
    PipelineTrace& trace = result.trace;
    rep.n_sifted = cfg.n_sifted;
    rep.n_test = cfg.test_count();
    rep.n_key = cfg.kept_count();
    rep.seed = cfg.seed;
    rep.attack_kind = attack_kind_name(cfg.attack);
    rep.attack_param = attack_param_of(cfg.attack);
    rep.channel_kind = cfg.channel.kind_name();
    rep.code_name = cfg.code_name;
    rep.ecc_mode = cfg.ecc_mode == EccMode::open_syndrome ? "open" : "covered";
    rep.test_fraction = cfg.test_fraction;
    rep.qber_threshold = cfg.qber_threshold;
    rep.f_factor = cfg.f_factor;
    rep.d_target = cfg.d_target;
    rep.auth_cost_bits = cfg.auth_cost_bits;
    rep.oracle = cfg.oracle;

    std::mt19937_64 bits_rng = rng_stream(cfg.seed, kPurposeAliceBits);
    std::mt19937_64 attack_rng = rng_stream(cfg.seed, kPurposeAttack);
    std::mt19937_64 test_rng = rng_stream(cfg.seed, kPurposeTestPick);
    std::mt19937_64 pa_rng = rng_stream(cfg.seed, kPurposePaSeed);
    std::mt19937_64 cover_rng = rng_stream(cfg.seed, kPurposeCover);

    Bits alice = random_bits(bits_rng, static_cast<std::size_t>(cfg.n_sifted));
    Bits bob = apply_channel_noise(cfg, apply_attack_to_bob(cfg, alice, attack_rng));

    // QBER estimate on a seeded random sample, which is then discarded
    std::vector<std::size_t> order =
        seeded_permutation(static_cast<std::size_t>(cfg.n_sifted), test_rng);
    std::size_t n_test = static_cast<std::size_t>(cfg.test_count());
    std::vector<bool> is_test(static_cast<std::size_t>(cfg.n_sifted), false);
    long mismatches = 0;
    for (std::size_t i = 0; i < n_test; ++i) {
        is_test[order[i]] = true;
        if (alice.get(order[i]) != bob.get(order[i])) ++mismatches;
    }
    rep.measured_qber = static_cast<double>(mismatches) / static_cast<double>(n_test);

    long n_keep = cfg.kept_count();
    Bits alice_kept(static_cast<std::size_t>(n_keep));
    Bits bob_kept(static_cast<std::size_t>(n_keep));
    std::size_t pos = 0;
    for (std::size_t i = 0; i < alice.size(); ++i) {
        if (is_test[i]) continue;
        alice_kept.set(pos, alice.get(i));
        bob_kept.set(pos, bob.get(i));
        ++pos;
    }

    trace.sifted.key = alice_kept;
    trace.transcript.push_back({"code", cfg.code_name});
    trace.transcript.push_back({"ecc-mode", rep.ecc_mode});

    rep.aborted = rep.measured_qber > cfg.qber_threshold;
    if (rep.aborted) {
        // abort: no key material leaves this run
        rep.out_bits = 0;
        rep.out_bits_single_log = 0;
        rep.leak_ec = 0.0;
        rep.net_bits = 0.0;
        rep.l_assumed = 0.0;
        rep.l_assumed_source = cfg.l_assumed >= 0.0 ? "user" : "oracle";
        rep.d_floor = 1.0;
        trace.transcript.push_back({"aborted", "qber-above-threshold"});
        rep.transcript_digest = transcript_digest(trace.transcript);
        return result;
    }

    // oracle joint for the sifted stage (needed early for automatic l_assumed)
    std::optional<JointDistribution> j_sifted;
    if (cfg.oracle) {
        j_sifted = build_sifted_joint(cfg, static_cast<int>(n_keep));
        trace.sifted.metrics = stage_metrics(*j_sifted);
        trace.sifted.metrics_exact = true;
    }

    if (cfg.l_assumed >= 0.0) {
        rep.l_assumed = cfg.l_assumed;
        rep.l_assumed_source = "user";
    } else {
        rep.l_assumed = trace.sifted.metrics.min_entropy_bits;
        rep.l_assumed_source = "oracle";
    }

    // reconciliation
    std::size_t n_blocks = static_cast<std::size_t>(n_keep) / static_cast<std::size_t>(code.m);
    std::optional<Bits> cover;
    if (cfg.ecc_mode == EccMode::covered_syndrome) {
        std::size_t cover_len = n_blocks * static_cast<std::size_t>(code.syndrome_bits());
        Bits c(cover_len);
        for (std::size_t i = 0; i < cover_len; ++i)
            c.set(i, uniform_unit(cover_rng) < 0.5 - cfg.cover_bias ? 1 : 0);
        cover = c;
    }
    ReconciliationResult rec =
        reconcile_blocks(alice_kept, bob_kept, code, cfg.ecc_mode, cover);
    rep.residual_error = rec.residual_error;
    rep.disclosed_bits = rec.disclosed_bits;
    rep.cover_bits_consumed = rec.cover_bits_consumed;
    trace.residual_error = rec.residual_error;
    trace.corrected.key = alice_kept;
    trace.transcript.push_back({"syndrome", cfg.ecc_mode == EccMode::open_syndrome
                                                ? rec.transmitted_syndrome.to_string()
                                                : "covered"});

    std::optional<JointDistribution> j_corrected;
    if (cfg.oracle) {
        BitMatrix h = block_parity_check(code, static_cast<int>(n_keep));
        if (cfg.ecc_mode == EccMode::open_syndrome) {
            j_corrected = condition_on_syndrome(*j_sifted, h);
        } else if (cfg.cover_bias > 0.0) {
            j_corrected = condition_on_covered_syndrome(*j_sifted, h, cfg.cover_bias);
        } else {
            // one-time-pad cover: the padded syndrome is information-free
            j_corrected = *j_sifted;
        }
        trace.corrected.metrics = stage_metrics(*j_corrected);
        trace.corrected.metrics_exact = true;
    }

    // privacy amplification
    long out_bits = lhl_key_length(rep.l_assumed, cfg.d_target, cfg.eps_smooth);
    out_bits = std::min(out_bits, n_keep);
    long out_single = lhl_key_length(rep.l_assumed, cfg.d_target, cfg.eps_smooth,
                                     LhlReading::single_log);
    out_single = std::min(out_single, n_keep);
    rep.out_bits = out_bits;
    rep.out_bits_single_log = out_single;

    if (out_bits > 0) {
        HashFamily family = make_family(HashFamilyKind::toeplitz,
                                        static_cast<int>(n_keep),
                                        static_cast<int>(out_bits));
        Bits pa_seed = random_bits(pa_rng, static_cast<std::size_t>(family.seed_bits()));
        BitMatrix pa = family.member(pa_seed);
        bool degenerate = rank_gf2(pa) < pa.rows();
        if (degenerate && cfg.degenerate_policy == DegeneratePolicy::resample) {
            for (int attempt = 0; attempt < 64 && degenerate; ++attempt) {
                pa_seed = random_bits(pa_rng, static_cast<std::size_t>(family.seed_bits()));
                pa = family.member(pa_seed);
                degenerate = rank_gf2(pa) < pa.rows();
            }
            require(!degenerate, "run_protocol: could not resample a full-rank compressor");
        }
        if (degenerate && cfg.degenerate_policy == DegeneratePolicy::reject)
            throw validation_error("run_protocol: degenerate compressor rejected by policy");
        rep.pa_degenerate = degenerate;
        trace.transcript.push_back({"pa-seed", bits_to_hex(pa_seed)});
        trace.amplified.key = apply_hash(pa, alice_kept);
        if (cfg.oracle) {
            JointDistribution j_amplified = condition_on_hash(*j_corrected, pa);
            trace.amplified.metrics = stage_metrics(j_amplified);
            trace.amplified.metrics_exact = true;
            if (cfg.keep_joints) trace.amplified.joint = std::move(j_amplified);
        }
    } else {
        // nothing extractable: the generated key is empty
        trace.transcript.push_back({"pa-seed", "none"});
        trace.amplified.key = Bits(0);
        if (cfg.oracle) {
            trace.amplified.metrics = StageMetrics{1.0, 0.0, 0.0};
            trace.amplified.metrics_exact = true;
        }
    }

    rep.leak_ec = leak_open(n_keep, rep.measured_qber, cfg.f_factor);
    rep.net_bits = net_key(rep.out_bits, rep.leak_ec, cfg.auth_cost_bits);
    double l_for_floor = rep.l_assumed + cfg.eps_smooth.delta_l;
    rep.d_floor = lhl_min_distance(l_for_floor,
                                   std::min<double>(static_cast<double>(rep.out_bits),
                                                    l_for_floor));

    if (cfg.oracle) {
        rep.oracle_pguess_sifted = trace.sifted.metrics.pguess;
        rep.oracle_pguess_corrected = trace.corrected.metrics.pguess;
        rep.oracle_pguess_amplified = trace.amplified.metrics.pguess;
        rep.oracle_l_sifted = trace.sifted.metrics.min_entropy_bits;
        rep.oracle_l_corrected = trace.corrected.metrics.min_entropy_bits;
        rep.oracle_l_amplified = trace.amplified.metrics.min_entropy_bits;
        // the identical-exponents assumption feeds l_assumed into the
        // tradeoff as if it were the exponent of K'; flag any run where
        // the oracle says K' is actually weaker
        rep.eq4_violation_flagged = rep.l_assumed > *rep.oracle_l_corrected + 1e-9;
        if (cfg.keep_joints) {
            trace.sifted.joint = std::move(*j_sifted);
            trace.corrected.joint = std::move(*j_corrected);
        }
    }

    rep.transcript_digest = transcript_digest(trace.transcript);
    return result;
}

namespace {

KeyRateReport accounting_row(const ProtocolConfig& base, const LinearCode& code,
                             double d_target, double qber) {
    KeyRateReport rep;
    rep.n_sifted = base.n_sifted;
    rep.n_test = base.test_count();
    rep.n_key = base.kept_count();
    rep.seed = base.seed;
    rep.attack_kind = attack_kind_name(base.attack);
    rep.attack_param = attack_param_of(base.attack);
    rep.channel_kind = base.channel.kind_name();
    rep.code_name = base.code_name;
    rep.ecc_mode = base.ecc_mode == EccMode::open_syndrome ? "open" : "covered";
    rep.test_fraction = base.test_fraction;
    rep.qber_threshold = base.qber_threshold;
    rep.f_factor = base.f_factor;
    rep.d_target = d_target;
    rep.auth_cost_bits = base.auth_cost_bits;
    rep.measured_qber = qber;  // nominal channel parameter for this row
    rep.aborted = qber > base.qber_threshold;
    rep.l_assumed = base.l_assumed;
    rep.l_assumed_source = "user";

    long n_keep = base.kept_count();
    long out_bits = std::min(
        lhl_key_length(base.l_assumed, d_target, base.eps_smooth), n_keep);
    long out_single = std::min(
        lhl_key_length(base.l_assumed, d_target, base.eps_smooth, LhlReading::single_log),
        n_keep);
    rep.out_bits = out_bits;
    rep.out_bits_single_log = out_single;
    rep.leak_ec = leak_open(n_keep, qber, base.f_factor);
    long n_blocks = n_keep / code.m;
    long syndrome_bits = n_blocks * code.syndrome_bits();
    if (base.ecc_mode == EccMode::open_syndrome) rep.disclosed_bits = syndrome_bits;
    else rep.cover_bits_consumed = syndrome_bits;
    rep.net_bits = net_key(out_bits, rep.leak_ec, base.auth_cost_bits);
    double l_for_floor = base.l_assumed + base.eps_smooth.delta_l;
    rep.d_floor = lhl_min_distance(
        l_for_floor, std::min<double>(static_cast<double>(out_bits), l_for_floor));
    return rep;
}

}  // namespace

std::vector<KeyRateReport> sweep_tradeoff(const ProtocolConfig& base,
                                          const std::vector<double>& d_grid,
                                          const std::vector<double>& qber_grid,
                                          int threads) {
    base.validate();
    require(!d_grid.empty() && !qber_grid.empty(), "sweep: empty grid");
    require(base.l_assumed >= 0.0, "sweep: requires a user-supplied l_assumed");
    for (double d : d_grid)
        require(d > 0.0 && d <= 1.0, "sweep: d grid values must be in (0,1]");
    for (double q : qber_grid)
        require(q >= 0.0 && q <= 0.5, "sweep: qber grid values must be in [0, 1/2]");
    LinearCode code = LinearCode::by_name(base.code_name);

    std::size_t n_rows = d_grid.size() * qber_grid.size();
    std::vector<KeyRateReport> rows(n_rows);
    auto fill = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double d = d_grid[i / qber_grid.size()];
            double q = qber_grid[i % qber_grid.size()];
            rows[i] = accounting_row(base, code, d, q);
        }
    };
    int n_threads = std::max(1, threads);
    if (n_threads == 1 || n_rows < 2) {
        fill(0, n_rows);
    } else {
        std::vector<std::future<void>> futures;
        std::size_t chunk = (n_rows + static_cast<std::size_t>(n_threads) - 1) /
                            static_cast<std::size_t>(n_threads);
        for (std::size_t begin = 0; begin < n_rows; begin += chunk)
            futures.push_back(std::async(std::launch::async, fill, begin,
                                         std::min(begin + chunk, n_rows)));
        for (auto& f : futures) f.get();
    }
    return rows;
}

}  // namespace qkdlab
