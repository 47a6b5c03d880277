#pragma once

#include <cstdint>

#include "qkdlab/bit_matrix.hpp"
#include "qkdlab/joint_distribution.hpp"

namespace qkdlab {

enum class HashFamilyKind { toeplitz, full_random };

// Universal2 matrix family for privacy amplification.
//
// Seed layouts (fixed for reproducibility):
//   toeplitz    - seed bits 0..m-1 are the first row left to right,
//                 bits m..m+k-2 the first column from row 1 downward;
//                 M[i][j] = row[j-i] for j >= i, else col[i-j-1].
//   full_random - seed bit i*m+j is M[i][j] (row-major).
// Seeds print as hex with the most significant digit first.
struct HashFamily {
    HashFamilyKind kind;
    int in_bits;   // m
    int out_bits;  // k

    int seed_bits() const;
    std::uint64_t member_count() const;  // 2^seed_bits, requires seed_bits <= 62

    BitMatrix member(const Bits& seed) const;
    BitMatrix member(std::uint64_t seed) const;
};

HashFamily make_family(HashFamilyKind kind, int in_bits, int out_bits);

// y_i = xor_j M[i][j] x_j. Thin wrapper kept as the module's public verb.
Bits apply_hash(const BitMatrix& m, const Bits& x);

// Fraction of family members with rank < out_bits, by exhaustive scan.
// Throws capacity_error when seed_bits > 24; use the sampled variant then.
double degenerate_fraction(const HashFamily& family);

struct DegenerateEstimate {
    double fraction;
    double std_error;
    std::uint64_t samples;
};
DegenerateEstimate degenerate_fraction_sampled(const HashFamily& family,
                                               std::uint64_t samples,
                                               std::uint64_t seed);

// Two readings of the length/distance tradeoff. two_log is the printed
// form |K| >= l - 2 log2(1/d); single_log replaces the 2 with 1 and is
// reported alongside for comparison (see lhl_required_exponent callers).
enum class LhlReading { two_log, single_log };

// Guaranteed extractable length floor(l - c log2(1/d)), clamped at 0.
// half_prefactor switches to the sharper statement carrying a 1/2 in
// front of the distance bound, which buys c extra bits.
long lhl_key_length(double l_bits, double d_target,
                    LhlReading reading = LhlReading::two_log,
                    bool half_prefactor = false);

// Optional smoothing shift: inputs to the tradeoff become (l + delta_l,
// d + epsilon). This is the only smoothing the project models.
struct EpsSmoothShift {
    double delta_l = 0.0;
    double epsilon = 0.0;
};
long lhl_key_length(double l_bits, double d_target, const EpsSmoothShift& shift,
                    LhlReading reading = LhlReading::two_log,
                    bool half_prefactor = false);

// Inverse view: the input exponent needed to extract out_bits at distance
// level d_target under the given reading.
double lhl_required_exponent(double out_bits, double d_target,
                             LhlReading reading = LhlReading::two_log);

// Smallest distance level consistent with the tradeoff at the given output
// length: 2^(-(l - out)/2); at out = 0 this is the absolute floor 2^(-l/2).
double lhl_min_distance(double l_bits, double out_bits, bool half_prefactor = false);

// Exact average over all family members of the hashed joint's distance
// from ideal, with the member index on Eve's side. Exhaustive; requires
// seed_bits <= 24 and in_bits == j.n_key_bits().
double avg_stat_distance(const HashFamily& family, const JointDistribution& j);

// Eve's error probability on the XOR of m bits she knows each with error
// probability p: 1/2 - (1-2p)^m / 2.
double parity_error_prob(int m, double p);

// Markov conversion of an average guarantee into an individual one:
// level t * avg holds except with probability 1/t.
double markov_individual_bound(double avg_value, double confidence_denominator);

// Hash applied to the key axis of a joint table (Eve unchanged; the matrix
// is treated as public and fixed).
JointDistribution hash_key_axis(const JointDistribution& j, const BitMatrix& m);

}  // namespace qkdlab
