#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qkdlab/ecc.hpp"
#include "qkdlab/hashing.hpp"
#include "qkdlab/joint_distribution.hpp"
#include "qkdlab/secmetrics.hpp"

namespace qkdlab {

// Attack families modeled exactly. intercept_resend acts per sifted bit;
// know_all_with_prob is the joint-attack stand-in used by the accessible-
// information counterexample.
struct AttackModel {
    enum class Kind { none, intercept_resend, know_all_with_prob };
    Kind kind = Kind::none;
    double intercept_fraction = 0.0;  // q, for intercept_resend
    double know_prob = 0.0;           // delta, for know_all_with_prob

    void validate() const;
    static AttackModel none();
    static AttackModel intercept_resend(double q);
    static AttackModel know_all(double delta);
};

// Per sifted bit under intercept-resend at fraction q:
//   1-q   not intercepted: Eve sees nothing, Bob receives faithfully;
//   q/2   matched basis:   Eve sees the true bit, Bob receives faithfully;
//   q/2   mismatched:      Eve learns nothing about the bit, Bob's bit
//                          flips with probability 1/2.
// Eve's two no-information cases collapse into one symbol; that is
// lossless for every metric about Alice's key. The per-bit alphabet is
// {0: blank, 1: saw 0, 2: saw 1}, the n-bit symbol base-3 over positions.
JointDistribution build_intercept_resend(int n, double q);

// Bob's error marginal, computed exactly from the same per-bit cases: q/4.
double intercept_resend_qber(double q);

// Eve's per-bit guessing probability 1/2 + q/4, from the same table.
double intercept_resend_bit_pguess(double q);

// Public syndrome s = H*key appended to Eve's observation. H is the
// (possibly blockwise-expanded) parity check of the code in use.
JointDistribution condition_on_syndrome(const JointDistribution& j, const BitMatrix& h);
JointDistribution condition_on_syndrome(const JointDistribution& j, const LinearCode& code);

// Covered syndrome: Eve sees s xor u for a pad u of iid bits with
// P(1) = 1/2 - cover_bias. At bias 0 the pad is a one-time pad and the
// result carries exactly the information of j (checked exhaustively in
// tests); positive bias leaks.
JointDistribution condition_on_covered_syndrome(const JointDistribution& j,
                                                const BitMatrix& h, double cover_bias);

// Key axis replaced by y = Mx; the matrix is public and already fixed.
JointDistribution condition_on_hash(const JointDistribution& j, const BitMatrix& m);

struct StageMetrics {
    double pguess = 0.0;
    double min_entropy_bits = 0.0;
    double stat_distance = 0.0;
};
StageMetrics stage_metrics(const JointDistribution& j);

struct TranscriptEntry {
    std::string label;
    std::string data;
};

struct TraceStage {
    Bits key;                               // Alice's value at this stage
    std::optional<JointDistribution> joint; // kept only when requested
    StageMetrics metrics;
    bool metrics_exact = false;             // true iff oracle-computed
};

// Per-stage record of one protocol run: sifted K'', corrected K',
// amplified K, plus everything Eve saw in public.
struct PipelineTrace {
    TraceStage sifted;
    TraceStage corrected;
    TraceStage amplified;
    std::vector<TranscriptEntry> transcript;
    bool residual_error = false;
};

struct ChainReport {
    StageMetrics sifted, corrected, amplified;
    bool chain_ok = false;           // monotone within 1e-12
    double exponent_drop_ecc = 0.0;  // l(K'') - l(K')
    double exponent_drop_pa = 0.0;   // l(K') - l(K)
};

// Checks pguess(K'') <= pguess(K') <= pguess(K) on an oracle trace and
// reports the per-stage exponents and their drops.
ChainReport verify_chain(const PipelineTrace& trace);

// Exhaustive three-stage trace for grid studies: intercept-resend at
// fraction q on n bits, blockwise code in the given mode, then a Toeplitz
// compressor n -> pa_out_bits drawn from pa_seed. Keys are sampled
// deterministically from the same seed; joints and metrics are exact.
PipelineTrace make_exhaustive_trace(int n, double q, const LinearCode& code,
                                    EccMode mode, int pa_out_bits,
                                    std::uint64_t pa_seed, bool keep_joints = false);

}  // namespace qkdlab
