#include "qkdlab/verify.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "qkdlab/adversary.hpp"
#include "qkdlab/ecc.hpp"
#include "qkdlab/hashing.hpp"
#include "qkdlab/pipeline.hpp"
#include "qkdlab/report_io.hpp"
#include "qkdlab/secmetrics.hpp"

namespace qkdlab {

namespace {

struct Faults {
    bool eq1_drop_uniform_term = false;
    bool lhl_drop_factor_2 = false;
    bool parity_flip_sign = false;
    bool chain_reverse = false;
};

Faults parse_faults(const std::string& name) {
    Faults f;
    if (name.empty()) return f;
    if (name == "eq1-drop-uniform-term") f.eq1_drop_uniform_term = true;
    else if (name == "lhl-drop-factor-2") f.lhl_drop_factor_2 = true;
    else if (name == "parity-flip-sign") f.parity_flip_sign = true;
    else if (name == "chain-reverse") f.chain_reverse = true;
    else throw validation_error("unknown fault name: " + name);
    return f;
}

class Group {
public:
    explicit Group(std::string name) { result_.name = std::move(name); result_.passed = true; }

    void check(bool ok, const std::string& detail) {
        ++result_.checks;
        if (!ok && result_.passed) {
            result_.passed = false;
            result_.failure_detail = detail;
        }
    }

    GroupResult take() { return std::move(result_); }

private:
    GroupResult result_;
};

std::string fmt(double v) { return format_double(v); }

// random joint tables for bound fuzzing; entries iid uniform, normalized
JointDistribution random_joint(std::mt19937_64& rng, int n_bits, std::size_t symbols) {
    JointDistribution j(n_bits, symbols);
    double total = 0.0;
    for (std::uint64_t k = 0; k < j.num_keys(); ++k)
        for (std::size_t e = 0; e < symbols; ++e) {
            double v = uniform_unit(rng);
            j.at(k, e) = v;
            total += v;
        }
    for (std::uint64_t k = 0; k < j.num_keys(); ++k)
        for (std::size_t e = 0; e < symbols; ++e) j.at(k, e) /= total;
    return j;
}

GroupResult verify_eq1(const Faults& faults, int max_n) {
    Group g("eq1-tightness");
    for (int n = 2; n <= max_n; ++n) {
        double cap = 1.0 - std::exp2(-n);
        for (double d = 0.0; d <= 0.2001 && d <= cap; d += 0.01) {
            JointDistribution j = make_eq1_extremal(n, d);
            double sd = stat_distance(j);
            double pg = pguess(j);
            double bound = faults.eq1_drop_uniform_term ? d : check_p1_bound(d, n);
            std::ostringstream at;
            at << "n=" << n << " d=" << fmt(d);
            g.check(std::abs(sd - d) <= 1e-12, "stat_distance mismatch at " + at.str());
            g.check(std::abs(pg - (d + std::exp2(-n))) <= 1e-12,
                    "pguess mismatch at " + at.str());
            g.check(pg <= bound + 1e-12, "bound violated at " + at.str());
        }
    }
    return g.take();
}

GroupResult verify_eq1_random(const Faults& faults, int max_n) {
    Group g("eq1-bound-random");
    std::mt19937_64 rng = rng_stream(20260809, 11);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(
                                                            std::min(max_n, 6))));
        std::size_t symbols = 1 + uniform_below(rng, 9);
        JointDistribution j = random_joint(rng, n, symbols);
        double bound = stat_distance(j) + (faults.eq1_drop_uniform_term ? 0.0 : std::exp2(-n));
        g.check(pguess(j) <= bound + 1e-12,
                "bound violated on random table trial " + std::to_string(trial));
    }
    return g.take();
}

GroupResult verify_monotone_postprocessing(int max_n) {
    Group g("postprocessing-monotone");
    std::mt19937_64 rng = rng_stream(20260809, 12);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(
                                                            std::min(max_n, 5) - 1)));
        int out = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n)));
        JointDistribution j = random_joint(rng, n, 1 + uniform_below(rng, 5));
        std::vector<std::uint64_t> table(static_cast<std::size_t>(j.num_keys()));
        for (auto& v : table) v = uniform_below(rng, std::uint64_t{1} << out);
        JointDistribution mapped = map_key_axis(
            j, [&table](std::uint64_t k) { return table[static_cast<std::size_t>(k)]; },
            out);
        g.check(pguess(mapped) >= pguess(j) - 1e-12,
                "post-processing lowered pguess, trial " + std::to_string(trial));
    }
    return g.take();
}

GroupResult verify_lhl(const Faults& faults, int max_n) {
    Group g("lhl-average-bound");
    LhlReading reading = faults.lhl_drop_factor_2 ? LhlReading::single_log
                                                  : LhlReading::two_log;
    // (a) measured averages never beat the tradeoff bound
    int n_cap = std::min(max_n, 6);
    for (int n = 2; n <= n_cap; ++n) {
        std::vector<JointDistribution> inputs;
        inputs.push_back(JointDistribution::uniform_key(n));
        inputs.push_back(make_eq1_extremal(n, 0.1));
        inputs.push_back(make_iac_counterexample(n, 0.5));
        for (const JointDistribution& j : inputs) {
            double l = -std::log2(pguess(j));
            for (int out = 1; out <= std::min(3, n); ++out) {
                HashFamily family = make_family(HashFamilyKind::toeplitz, n, out);
                double avg = avg_stat_distance(family, j);
                double bound = std::exp2(-(l - out) / 2.0);
                std::ostringstream at;
                at << "n=" << n << " out=" << out;
                g.check(avg <= bound + 1e-12, "average exceeds bound at " + at.str());
            }
        }
    }
    // (b) the length and min-distance forms are mutually inverse
    for (int l = 2; l <= 60; l += 7)
        for (int out = 0; out < l; out += 3) {
            double d_min = lhl_min_distance(l, out);
            double back = lhl_required_exponent(out, d_min, reading);
            std::ostringstream at;
            at << "l=" << l << " out=" << out;
            g.check(std::abs(back - l) <= 1e-6,
                    "length/distance forms disagree at " + at.str());
        }
    return g.take();
}

GroupResult verify_universality(int max_n) {
    Group g("universality");
    int in_cap = std::min(max_n, 4);
    for (int in = 1; in <= in_cap; ++in)
        for (int out = 1; out <= std::min(3, in); ++out)
            for (HashFamilyKind kind :
                 {HashFamilyKind::toeplitz, HashFamilyKind::full_random}) {
                HashFamily family = make_family(kind, in, out);
                std::uint64_t members = family.member_count();
                std::vector<BitMatrix> ms;
                ms.reserve(static_cast<std::size_t>(members));
                for (std::uint64_t s = 0; s < members; ++s) ms.push_back(family.member(s));
                for (std::uint64_t x = 0; x < (std::uint64_t{1} << in); ++x)
                    for (std::uint64_t y = x + 1; y < (std::uint64_t{1} << in); ++y) {
                        std::uint64_t collisions = 0;
                        for (const BitMatrix& m : ms)
                            if (m.apply_u64(x) == m.apply_u64(y)) ++collisions;
                        std::ostringstream at;
                        at << (kind == HashFamilyKind::toeplitz ? "toeplitz" : "full_random")
                           << " " << in << "->" << out << " x=" << x << " y=" << y;
                        g.check(collisions * (std::uint64_t{1} << out) == members,
                                "collision fraction not 2^-k at " + at.str());
                    }
            }
    return g.take();
}

GroupResult verify_degenerate_fraction() {
    Group g("degenerate-fraction");
    for (HashFamilyKind kind : {HashFamilyKind::toeplitz, HashFamilyKind::full_random})
        for (int in = 1; in <= 4; ++in)
            for (int out = 1; out <= in; ++out) {
                HashFamily family = make_family(kind, in, out);
                if (family.seed_bits() > 24) continue;
                double f = degenerate_fraction(family);
                std::ostringstream at;
                at << (kind == HashFamilyKind::toeplitz ? "toeplitz" : "full_random")
                   << " " << in << "->" << out;
                g.check(f > 0.0, "no degenerate members found at " + at.str());
                g.check(f < 1.0, "all members degenerate at " + at.str());
            }
    return g.take();
}

GroupResult verify_parity(const Faults& faults) {
    Group g("parity-formula");
    for (int m = 1; m <= 12; ++m)
        for (double p : {0.05, 0.11, 0.25, 0.45}) {
            // exhaustive convolution over the 2^m error patterns
            double odd = 0.0;
            for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << m); ++pattern) {
                int w = std::popcount(pattern);
                if (w % 2 == 1)
                    odd += std::pow(p, w) * std::pow(1.0 - p, m - w);
            }
            double formula = parity_error_prob(m, p);
            if (faults.parity_flip_sign)
                formula = 0.5 + 0.5 * std::pow(1.0 - 2.0 * p, m);
            std::ostringstream at;
            at << "m=" << m << " p=" << fmt(p);
            g.check(std::abs(formula - odd) <= 1e-12,
                    "formula disagrees with convolution at " + at.str());
        }
    return g.take();
}

GroupResult verify_codes() {
    Group g("code-exhaustives");
    std::vector<std::string> names = LinearCode::builtin_names();
    names.push_back("random-6-3-7");
    names.push_back("random-8-4-1");
    for (const std::string& name : names) {
        LinearCode code = LinearCode::by_name(name);
        bool invariants_ok = true;
        try {
            code.check_invariants();
        } catch (const error&) {
            invariants_ok = false;
        }
        g.check(invariants_ok, "code invariants failed for " + name);
        // syndrome decoding corrects exactly the coset-leader patterns
        Bits alice(static_cast<std::size_t>(code.m));  // zero key suffices: linearity
        for (std::uint64_t e = 0; e < (std::uint64_t{1} << code.m); ++e) {
            Bits err = Bits::from_uint(e, static_cast<std::size_t>(code.m));
            Bits bob = alice ^ err;
            ReconciliationResult r =
                reconcile(alice, bob, code, EccMode::open_syndrome);
            bool should_correct =
                code.coset_leaders[code.syndrome(err).to_uint()] == err;
            std::ostringstream at;
            at << name << " e=" << e;
            g.check(r.residual_error != should_correct,
                    "correctability mismatch at " + at.str());
        }
    }
    return g.take();
}

GroupResult verify_leak() {
    Group g("leak-formulas");
    for (int i = 0; i <= 49; ++i) {
        double q = 0.01 * i;
        g.check(std::abs(leak_open(1000, q, 1.0) - leak_parity(1000, q)) <= 1e-12,
                "open(f=1) != parity at q=" + fmt(q));
        if (q > 0.0)
            g.check(leak_covered_expanded(1000, q) > leak_parity(1000, q),
                    "expanded cover cost not above parity at q=" + fmt(q));
    }
    // concavity of h on a grid
    for (int i = 0; i <= 100; ++i)
        for (int j = i; j <= 100; ++j) {
            double a = 0.01 * i, b = 0.01 * j;
            double lhs = binary_entropy((a + b) / 2.0);
            double rhs = 0.5 * (binary_entropy(a) + binary_entropy(b));
            g.check(lhs >= rhs - 1e-12, "h not concave at a=" + fmt(a) + " b=" + fmt(b));
        }
    return g.take();
}

GroupResult verify_chain_group(const Faults& faults, int max_n) {
    Group g("chain-monotone");
    std::uint64_t trace_seed = 1;
    for (int n = 2; n <= max_n; ++n)
        for (double q : {0.0, 0.5, 1.0})
            for (const std::string& name : {std::string("rep-3-1"), std::string("hamming-7-4")})
                for (EccMode mode : {EccMode::open_syndrome, EccMode::covered_syndrome}) {
                    LinearCode code = LinearCode::by_name(name);
                    int out = std::max(1, n / 2);
                    PipelineTrace trace =
                        make_exhaustive_trace(n, q, code, mode, out, trace_seed++);
                    ChainReport r = verify_chain(trace);
                    bool ok = faults.chain_reverse
                                  ? (r.sifted.pguess >= r.corrected.pguess - 1e-12 &&
                                     r.corrected.pguess >= r.amplified.pguess - 1e-12)
                                  : r.chain_ok;
                    std::ostringstream at;
                    at << "n=" << n << " q=" << fmt(q) << " code=" << name << " mode="
                       << (mode == EccMode::open_syndrome ? "open" : "covered");
                    g.check(ok, "stage monotonicity violated at " + at.str());
                }
    return g.take();
}

GroupResult verify_covered_identity(int max_n) {
    Group g("covered-identity");
    int n_cap = std::min(max_n, 4);
    for (int n = 3; n <= n_cap; ++n)
        for (double q : {0.25, 1.0}) {
            LinearCode code = LinearCode::by_name("rep-3-1");
            BitMatrix h = block_parity_check(code, n);
            JointDistribution j = build_intercept_resend(n, q);
            JointDistribution padded = condition_on_covered_syndrome(j, h, 0.0);
            StageMetrics before = stage_metrics(j);
            StageMetrics after = stage_metrics(padded);
            std::ostringstream at;
            at << "n=" << n << " q=" << fmt(q);
            g.check(std::abs(before.pguess - after.pguess) <= 1e-12 &&
                        std::abs(before.stat_distance - after.stat_distance) <= 1e-12,
                    "one-time-pad cover changed Eve's view at " + at.str());
        }
    return g.take();
}

GroupResult verify_determinism() {
    Group g("determinism");
    ProtocolConfig cfg;
    cfg.n_sifted = 64;
    cfg.seed = 99;
    cfg.attack = AttackModel::intercept_resend(0.4);
    cfg.l_assumed = 20.0;
    cfg.d_target = 0.01;
    std::vector<double> d_grid = {0.1, 0.01};
    std::vector<double> q_grid = {0.0, 0.05, 0.1};
    std::string a = reports_to_csv(sweep_tradeoff(cfg, d_grid, q_grid));
    std::string b = reports_to_csv(sweep_tradeoff(cfg, d_grid, q_grid, 2));
    g.check(a == b, "sweep output differs between runs");
    RunResult r1 = run_protocol(cfg);
    RunResult r2 = run_protocol(cfg);
    g.check(report_to_csv_row(r1.report) == report_to_csv_row(r2.report),
            "run report differs between runs");
    g.check(trace_to_json(r1.trace, r1.report) == trace_to_json(r2.trace, r2.report),
            "trace differs between runs");
    return g.take();
}

}  // namespace

std::vector<GroupResult> run_verify(const VerifyOptions& options) {
    require(options.max_n >= 2 && options.max_n <= 8,
            "verify: max_n must be in [2, 8]");
    Faults faults = parse_faults(options.inject_fault);
    std::vector<GroupResult> results;
    results.push_back(verify_eq1(faults, options.max_n));
    results.push_back(verify_eq1_random(faults, options.max_n));
    results.push_back(verify_monotone_postprocessing(options.max_n));
    results.push_back(verify_lhl(faults, options.max_n));
    results.push_back(verify_universality(options.max_n));
    results.push_back(verify_degenerate_fraction());
    results.push_back(verify_parity(faults));
    results.push_back(verify_codes());
    results.push_back(verify_leak());
    results.push_back(verify_chain_group(faults, options.max_n));
    results.push_back(verify_covered_identity(options.max_n));
    results.push_back(verify_determinism());
    return results;
}

bool all_passed(const std::vector<GroupResult>& results) {
    for (const GroupResult& r : results)
        if (!r.passed) return false;
    return true;
}

}  // namespace qkdlab
