#include "qkdlab/adversary.hpp"

#include <array>
#include <bit>
#include <cmath>

namespace qkdlab {

namespace {

// The four intercept-resend cases per bit, given Alice's bit a.
// eve: 0 = blank, 1 = saw 0, 2 = saw 1 (the two no-information cases share
// the blank symbol).
struct BitCase {
    double prob;
    bool eve_sees_bit;
    bool bob_flips;
};

std::array<BitCase, 4> intercept_cases(double q) {
    return {BitCase{1.0 - q, false, false},    // not intercepted
            BitCase{q / 2.0, true, false},     // matched basis
            BitCase{q / 4.0, false, false},    // mismatched, resend agreed
            BitCase{q / 4.0, false, true}};    // mismatched, resend flipped
}

JointDistribution intercept_bit_joint(double q) {
    JointDistribution j(1, 3);
    for (const BitCase& c : intercept_cases(q)) {
        for (std::uint64_t a = 0; a < 2; ++a) {
            std::size_t eve = c.eve_sees_bit ? 1 + static_cast<std::size_t>(a) : 0;
            j.at(a, eve) += 0.5 * c.prob;
        }
    }
    return j;
}

}  // namespace

void AttackModel::validate() const {
    require(intercept_fraction >= 0.0 && intercept_fraction <= 1.0,
            "AttackModel: intercept fraction must be in [0,1]");
    require(know_prob >= 0.0 && know_prob <= 1.0,
            "AttackModel: know probability must be in [0,1]");
}

AttackModel AttackModel::none() { return AttackModel{}; }

AttackModel AttackModel::intercept_resend(double q) {
    AttackModel a;
    a.kind = Kind::intercept_resend;
    a.intercept_fraction = q;
    a.validate();
    return a;
}

AttackModel AttackModel::know_all(double delta) {
    AttackModel a;
    a.kind = Kind::know_all_with_prob;
    a.know_prob = delta;
    a.validate();
    return a;
}

JointDistribution build_intercept_resend(int n, double q) {
    require(q >= 0.0 && q <= 1.0, "build_intercept_resend: q must be in [0,1]");
    require(n >= 1, "build_intercept_resend: n must be >= 1");
    JointDistribution bit = intercept_bit_joint(q);
    JointDistribution j = bit;
    for (int i = 1; i < n; ++i) j = product(j, bit);
    return j.compress_zero_eve_columns();
}

double intercept_resend_qber(double q) {
    require(q >= 0.0 && q <= 1.0, "intercept_resend_qber: q must be in [0,1]");
    double flip = 0.0;
    for (const BitCase& c : intercept_cases(q))
        if (c.bob_flips) flip += c.prob;
    return flip;
}

double intercept_resend_bit_pguess(double q) {
    return pguess(intercept_bit_joint(q));
}

JointDistribution condition_on_syndrome(const JointDistribution& j, const BitMatrix& h) {
    require(h.cols() == j.n_key_bits(),
            "condition_on_syndrome: parity check width must match key bits");
    // syndrome contribution of each key bit, XOR-combined per key value
    std::vector<std::uint64_t> column(static_cast<std::size_t>(h.cols()), 0);
    for (int c = 0; c < h.cols(); ++c)
        for (int r = 0; r < h.rows(); ++r)
            if (h.get(r, c))
                column[static_cast<std::size_t>(c)] |= std::uint64_t{1} << r;
    std::size_t values = std::size_t{1} << h.rows();
    auto syn = [&column, &j](std::uint64_t k) {
        std::uint64_t s = 0;
        for (int b = 0; b < j.n_key_bits(); ++b)
            if ((k >> b) & 1) s ^= column[static_cast<std::size_t>(b)];
        return s;
    };
    return augment_eve_with_key_function(j, syn, values).compress_zero_eve_columns();
}

JointDistribution condition_on_syndrome(const JointDistribution& j,
                                        const LinearCode& code) {
    require(code.m == j.n_key_bits(),
            "condition_on_syndrome: code length must match key bits");
    return condition_on_syndrome(j, code.parity_check);
}

JointDistribution condition_on_covered_syndrome(const JointDistribution& j,
                                                const BitMatrix& h, double cover_bias) {
    require(cover_bias >= 0.0 && cover_bias <= 0.5,
            "condition_on_covered_syndrome: bias must be in [0, 1/2]");
    require(h.cols() == j.n_key_bits(),
            "condition_on_covered_syndrome: parity check width must match key bits");
    int sb = h.rows();
    require_capacity(sb <= 20, "condition_on_covered_syndrome: pad space too large");
    std::size_t values = std::size_t{1} << sb;
    double p1 = 0.5 - cover_bias;  // probability a pad bit is 1
    // pad value probabilities by weight
    std::vector<double> pad_prob(values);
    for (std::size_t u = 0; u < values; ++u) {
        int w = std::popcount(static_cast<std::uint64_t>(u));
        pad_prob[u] = std::pow(p1, w) * std::pow(1.0 - p1, sb - w);
    }
    std::vector<std::uint64_t> column(static_cast<std::size_t>(h.cols()), 0);
    for (int c = 0; c < h.cols(); ++c)
        for (int r = 0; r < h.rows(); ++r)
            if (h.get(r, c))
                column[static_cast<std::size_t>(c)] |= std::uint64_t{1} << r;

    JointDistribution out(j.n_key_bits(), j.eve_symbols() * values);
    for (std::uint64_t k = 0; k < j.num_keys(); ++k) {
        std::uint64_t s = 0;
        for (int b = 0; b < j.n_key_bits(); ++b)
            if ((k >> b) & 1) s ^= column[static_cast<std::size_t>(b)];
        for (std::size_t e = 0; e < j.eve_symbols(); ++e) {
            double p = j.prob(k, e);
            if (p == 0.0) continue;
            for (std::size_t c = 0; c < values; ++c)
                out.at(k, e * values + c) = p * pad_prob[c ^ s];
        }
    }
    return out;
}

JointDistribution condition_on_hash(const JointDistribution& j, const BitMatrix& m) {
    return hash_key_axis(j, m);
}

StageMetrics stage_metrics(const JointDistribution& j) {
    double pg = pguess(j);
    return StageMetrics{pg, -std::log2(pg), stat_distance(j)};
}

ChainReport verify_chain(const PipelineTrace& trace) {
    require(trace.sifted.metrics_exact && trace.corrected.metrics_exact &&
                trace.amplified.metrics_exact,
            "verify_chain: incomplete trace (oracle metrics missing)");
    ChainReport r;
    r.sifted = trace.sifted.metrics;
    r.corrected = trace.corrected.metrics;
    r.amplified = trace.amplified.metrics;
    r.chain_ok = r.sifted.pguess <= r.corrected.pguess + 1e-12 &&
                 r.corrected.pguess <= r.amplified.pguess + 1e-12;
    r.exponent_drop_ecc = r.sifted.min_entropy_bits - r.corrected.min_entropy_bits;
    r.exponent_drop_pa = r.corrected.min_entropy_bits - r.amplified.min_entropy_bits;
    return r;
}

PipelineTrace make_exhaustive_trace(int n, double q, const LinearCode& code,
                                    EccMode mode, int pa_out_bits,
                                    std::uint64_t pa_seed, bool keep_joints) {
    require(pa_out_bits >= 1 && pa_out_bits <= n,
            "make_exhaustive_trace: pa_out_bits must be in [1, n]");
    PipelineTrace trace;

    // sampled key material (deterministic; the metrics do not depend on it)
    std::mt19937_64 key_rng = rng_stream(pa_seed, 1);
    std::mt19937_64 attack_rng = rng_stream(pa_seed, 2);
    std::mt19937_64 cover_rng = rng_stream(pa_seed, 3);
    Bits alice = random_bits(key_rng, static_cast<std::size_t>(n));
    Bits bob = alice;
    for (std::size_t i = 0; i < bob.size(); ++i) {
        double u = uniform_unit(attack_rng);
        if (u >= 1.0 - q / 2.0) {  // mismatched basis: coin-flip resend
            if (uniform_unit(attack_rng) < 0.5) bob.flip(i);
        }
    }

    JointDistribution j_sifted = build_intercept_resend(n, q);
    trace.sifted.key = alice;
    trace.sifted.metrics = stage_metrics(j_sifted);
    trace.sifted.metrics_exact = true;

    BitMatrix h = block_parity_check(code, n);
    std::size_t cover_bits =
        static_cast<std::size_t>(static_cast<int>(alice.size()) / code.m) *
        static_cast<std::size_t>(code.syndrome_bits());
    std::optional<Bits> cover;
    JointDistribution j_corrected =
        mode == EccMode::open_syndrome
            ? condition_on_syndrome(j_sifted, h)
            : j_sifted;  // uniform pad carries zero information (see tests)
    if (mode == EccMode::covered_syndrome)
        cover = random_bits(cover_rng, cover_bits);
    ReconciliationResult rec = reconcile_blocks(alice, bob, code, mode, cover);
    trace.residual_error = rec.residual_error;
    trace.corrected.key = alice;
    trace.corrected.metrics = stage_metrics(j_corrected);
    trace.corrected.metrics_exact = true;
    trace.transcript.push_back({"code", code.name});
    trace.transcript.push_back(
        {"ecc-mode", mode == EccMode::open_syndrome ? "open" : "covered"});
    trace.transcript.push_back({"syndrome", rec.transmitted_syndrome.to_string()});

    HashFamily family = make_family(HashFamilyKind::toeplitz, n, pa_out_bits);
    std::mt19937_64 pa_rng = rng_stream(pa_seed, 4);
    Bits seed = random_bits(pa_rng, static_cast<std::size_t>(family.seed_bits()));
    BitMatrix pa = family.member(seed);
    trace.transcript.push_back({"pa-seed", bits_to_hex(seed)});

    JointDistribution j_amplified = condition_on_hash(j_corrected, pa);
    trace.amplified.key = apply_hash(pa, alice);
    trace.amplified.metrics = stage_metrics(j_amplified);
    trace.amplified.metrics_exact = true;

    if (keep_joints) {
        trace.sifted.joint = std::move(j_sifted);
        trace.corrected.joint = std::move(j_corrected);
        trace.amplified.joint = std::move(j_amplified);
    }
    return trace;
}

}  // namespace qkdlab
