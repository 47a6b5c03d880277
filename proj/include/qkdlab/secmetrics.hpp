#pragma once

#include <cstdint>
#include <functional>

#include "qkdlab/joint_distribution.hpp"

namespace qkdlab {

// All logarithms base 2; entropies in bits.

struct SecurityReport {
    double pguess;            // Eve's optimal average success probability
    double min_entropy_bits;  // -log2(pguess)
    double stat_distance;     // half L1 distance from ideal x Eve-marginal
    double mutual_info_bits;  // I(K;E)
};

// Sum over Eve symbols of the largest joint entry: the attacker's maximum
// average probability of guessing the whole key.
double pguess(const JointDistribution& j);

// (1/2) sum |P(k,e) - P(e)/N|: distance of (K,E) from an ideal key
// independent of Eve's view.
double stat_distance(const JointDistribution& j);

// I(K;E) = H(K) + H(E) - H(K,E), with 0 log 0 = 0.
double mutual_info(const JointDistribution& j);

SecurityReport analyze(const JointDistribution& j);

// Upper bound d + 2^-n on the guessing probability at distance level d.
double check_p1_bound(double d, int n_bits);

// Single-Eve-symbol distribution achieving that bound with equality:
// one key value at 1/N + d, the rest at 1/N - d/(N-1).
JointDistribution make_eq1_extremal(int n_bits, double d);

// With delta = 2^(-lambda n): Eve sees the full key with probability delta
// and a null symbol otherwise. Mutual information n*delta stays tiny while
// the guessing probability stays at least 2^(-lambda n).
JointDistribution make_iac_counterexample(int n_bits, double lambda);

// The same construction with the knowledge probability given directly.
JointDistribution make_know_all(int n_bits, double delta);

// ---- generic surgery on joint tables (exact, used by all later stages) ----

// Deterministic post-processing of the key axis: key k is replaced by
// map(k) < 2^out_bits. Probabilities of merged keys add.
JointDistribution map_key_axis(const JointDistribution& j,
                               const std::function<std::uint64_t(std::uint64_t)>& map,
                               int out_bits);

// Publishes a deterministic function of the key: Eve symbol e becomes
// e * n_values + fn(k). No renormalization is needed; entries off the
// graph of fn are zero. Zero columns are kept so callers can align
// symbol spaces; compress afterwards if alignment is not needed.
JointDistribution augment_eve_with_key_function(
    const JointDistribution& j,
    const std::function<std::uint64_t(std::uint64_t)>& fn,
    std::size_t n_values);

// Independent product: key bits concatenate (a low), Eve symbols pair up
// as e = e_a + e_b * a.eve_symbols().
JointDistribution product(const JointDistribution& a, const JointDistribution& b);

}  // namespace qkdlab
