#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qkdlab/bit_matrix.hpp"
#include "qkdlab/joint_distribution.hpp"

namespace qkdlab {

// h(q) = -q log2 q - (1-q) log2(1-q), h(0) = h(1) = 0.
double binary_entropy(double q);

// f * n * h(qber): the ad hoc open-reconciliation leak charge.
double leak_open(long n, double qber, double f);

// n * h(qber): parity bits needed at channel capacity, i.e. leak_open at f=1.
double leak_parity(long n, double qber);

// n * h(qber) / (1 - h(qber)): cover-key cost when the information length is
// pinned to n and the code expands to m = n / (1 - h). Singularity at h = 1.
double leak_covered_expanded(long n, double qber);

// Binary symmetric channel, each bit flipped independently with
// probability p; identical seed means identical output.
Bits bsc_transmit(const Bits& x, double p, std::uint64_t seed);

// Two-state Markov (burst) error channel, the counterpoint to the
// memoryless assumption: flips with flip_good in the good state and
// flip_bad in the bad state, switching states with the given probabilities.
struct MarkovChannel {
    double p_good_to_bad = 0.05;
    double p_bad_to_good = 0.5;
    double flip_good = 0.0;
    double flip_bad = 0.5;

    void validate() const;
    double stationary_flip_prob() const;
};
Bits markov_transmit(const Bits& x, const MarkovChannel& ch, std::uint64_t seed);

// (m, k) binary linear code with an exhaustively built syndrome-decoding
// table. Coset leaders have minimal weight; ties break toward the lowest
// numeric error pattern (Bits integer convention).
struct LinearCode {
    int m = 0;  // code length
    int k = 0;  // information length
    std::string name;
    BitMatrix generator;     // k x m
    BitMatrix parity_check;  // (m-k) x m
    std::vector<Bits> coset_leaders;  // indexed by syndrome value

    int syndrome_bits() const { return m - k; }
    Bits syndrome(const Bits& word) const;
    Bits encode(const Bits& info) const;

    // Throws validation_error if G H^T != 0, ranks are off, or any coset
    // leader is not minimal-weight in its coset.
    void check_invariants() const;

    // Systematic construction G = [I | P], H = [P^T | I].
    static LinearCode systematic(int m, int k, const BitMatrix& p, std::string name);
    // "rep-3-1", "rep-5-1", "hamming-7-4", "ext-hamming-8-4",
    // "random-<m>-<k>-<seed>" (random systematic codes, m <= 10).
    static LinearCode by_name(const std::string& name);
    static std::vector<std::string> builtin_names();
};

enum class EccMode { open_syndrome, covered_syndrome };

struct ReconciliationResult {
    Bits corrected_key;
    int disclosed_bits = 0;        // m-k in open mode, 0 in covered mode
    int cover_bits_consumed = 0;   // m-k in covered mode, 0 in open mode
    bool residual_error = false;   // corrected != alice
    EccMode mode = EccMode::open_syndrome;
    Bits transmitted_syndrome;     // what went over the wire (padded if covered)
};

// One block: Alice sends H*alice (XOR cover in covered mode); Bob decodes
// the syndrome difference through the coset table and flips the leader.
ReconciliationResult reconcile(const Bits& alice, const Bits& bob,
                               const LinearCode& code, EccMode mode,
                               const std::optional<Bits>& cover_key = std::nullopt);

// The same applied blockwise over a long key: floor(n/m) blocks, tail bits
// pass through uncorrected.
ReconciliationResult reconcile_blocks(const Bits& alice, const Bits& bob,
                                      const LinearCode& code, EccMode mode,
                                      const std::optional<Bits>& cover_key = std::nullopt);

// Parity-check of the blockwise layout: diag(H,...,H) over floor(n/m)
// blocks, zero columns on the tail.
BitMatrix block_parity_check(const LinearCode& code, int n_bits);

enum class CodeIndexDisclosure { revealed, hidden };

// Classical analog of mixing over the covered-code ensemble: Eve's joint
// becomes the prior-weighted mixture of per-code syndrome-conditioned
// distributions. With the index revealed her symbol also carries which
// code was used; hidden mode requires equal syndrome widths so the
// per-code symbol spaces align.
JointDistribution eve_mixture(const JointDistribution& j,
                              const std::vector<LinearCode>& codes,
                              const std::vector<double>& priors,
                              CodeIndexDisclosure disclosure);

}  // namespace qkdlab
