#include "qkdlab/hashing.hpp"

#include <cmath>

#include "qkdlab/secmetrics.hpp"

namespace qkdlab {

int HashFamily::seed_bits() const {
    return kind == HashFamilyKind::toeplitz ? in_bits + out_bits - 1
                                            : in_bits * out_bits;
}

std::uint64_t HashFamily::member_count() const {
    int sb = seed_bits();
    require_capacity(sb <= 62, "HashFamily: seed space too large to enumerate");
    return std::uint64_t{1} << sb;
}

BitMatrix HashFamily::member(const Bits& seed) const {
    require(static_cast<int>(seed.size()) == seed_bits(),
            "HashFamily::member: seed length mismatch");
    BitMatrix m(out_bits, in_bits);
    if (kind == HashFamilyKind::toeplitz) {
        for (int i = 0; i < out_bits; ++i)
            for (int j = 0; j < in_bits; ++j) {
                int bit = j >= i ? seed.get(static_cast<std::size_t>(j - i))
                                 : seed.get(static_cast<std::size_t>(in_bits + (i - j) - 1));
                if (bit) m.set(i, j, 1);
            }
    } else {
        for (int i = 0; i < out_bits; ++i)
            for (int j = 0; j < in_bits; ++j)
                if (seed.get(static_cast<std::size_t>(i * in_bits + j))) m.set(i, j, 1);
    }
    return m;
}

BitMatrix HashFamily::member(std::uint64_t seed) const {
    return member(Bits::from_uint(seed, static_cast<std::size_t>(seed_bits())));
}

HashFamily make_family(HashFamilyKind kind, int in_bits, int out_bits) {
    require(in_bits >= 1 && out_bits >= 1, "make_family: sizes must be >= 1");
    require(out_bits <= in_bits, "make_family: compressor needs out_bits <= in_bits");
    return HashFamily{kind, in_bits, out_bits};
}

Bits apply_hash(const BitMatrix& m, const Bits& x) { return m.apply(x); }

double degenerate_fraction(const HashFamily& family) {
    require_capacity(family.seed_bits() <= 24,
                     "degenerate_fraction: seed space too large; use sampling");
    std::uint64_t count = family.member_count();
    std::uint64_t degenerate = 0;
    for (std::uint64_t s = 0; s < count; ++s)
        if (rank_gf2(family.member(s)) < family.out_bits) ++degenerate;
    return static_cast<double>(degenerate) / static_cast<double>(count);
}

DegenerateEstimate degenerate_fraction_sampled(const HashFamily& family,
                                               std::uint64_t samples,
                                               std::uint64_t seed) {
    require(samples >= 1, "degenerate_fraction_sampled: need samples >= 1");
    std::mt19937_64 rng = rng_stream(seed, 0x68617368ULL);
    std::uint64_t degenerate = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        Bits s = random_bits(rng, static_cast<std::size_t>(family.seed_bits()));
        if (rank_gf2(family.member(s)) < family.out_bits) ++degenerate;
    }
    double f = static_cast<double>(degenerate) / static_cast<double>(samples);
    double se = std::sqrt(f * (1.0 - f) / static_cast<double>(samples));
    return DegenerateEstimate{f, se, samples};
}

namespace {

double log_factor(LhlReading reading) {
    return reading == LhlReading::two_log ? 2.0 : 1.0;
}

}  // namespace

long lhl_key_length(double l_bits, double d_target, LhlReading reading,
                    bool half_prefactor) {
    require(l_bits >= 0.0, "lhl_key_length: l_bits must be >= 0");
    require(d_target > 0.0 && d_target <= 1.0, "lhl_key_length: d_target in (0,1]");
    double c = log_factor(reading);
    double value = l_bits - c * std::log2(1.0 / d_target);
    if (half_prefactor) value += c;
    if (value < 0.0) return 0;
    return static_cast<long>(std::floor(value));
}

long lhl_key_length(double l_bits, double d_target, const EpsSmoothShift& shift,
                    LhlReading reading, bool half_prefactor) {
    require(shift.delta_l >= 0.0 && shift.epsilon >= 0.0,
            "lhl_key_length: smoothing shift must be nonnegative");
    require(d_target + shift.epsilon <= 1.0,
            "lhl_key_length: shifted d_target exceeds 1");
    return lhl_key_length(l_bits + shift.delta_l, d_target + shift.epsilon,
                          reading, half_prefactor);
}

double lhl_required_exponent(double out_bits, double d_target, LhlReading reading) {
    require(out_bits >= 0.0, "lhl_required_exponent: out_bits must be >= 0");
    require(d_target > 0.0 && d_target <= 1.0,
            "lhl_required_exponent: d_target in (0,1]");
    return out_bits + log_factor(reading) * std::log2(1.0 / d_target);
}

double lhl_min_distance(double l_bits, double out_bits, bool half_prefactor) {
    require(out_bits >= 0.0, "lhl_min_distance: out_bits must be >= 0");
    require(l_bits >= out_bits, "lhl_min_distance: need l_bits >= out_bits");
    double d = std::exp2(-(l_bits - out_bits) / 2.0);
    return half_prefactor ? 0.5 * d : d;
}

double avg_stat_distance(const HashFamily& family, const JointDistribution& j) {
    require(family.in_bits == j.n_key_bits(),
            "avg_stat_distance: family input width must match key length");
    require_capacity(family.seed_bits() <= 24,
                     "avg_stat_distance: seed space too large to enumerate");
    std::uint64_t count = family.member_count();
    double total = 0.0;
    for (std::uint64_t s = 0; s < count; ++s)
        total += stat_distance(hash_key_axis(j, family.member(s)));
    return total / static_cast<double>(count);
}

double parity_error_prob(int m, double p) {
    require(m >= 1, "parity_error_prob: m must be >= 1");
    require(p >= 0.0 && p <= 0.5, "parity_error_prob: p must be in [0, 1/2]");
    return 0.5 - 0.5 * std::pow(1.0 - 2.0 * p, m);
}

double markov_individual_bound(double avg_value, double confidence_denominator) {
    require(avg_value >= 0.0, "markov_individual_bound: average must be >= 0");
    require(confidence_denominator > 1.0, "markov_individual_bound: t must be > 1");
    return confidence_denominator * avg_value;
}

JointDistribution hash_key_axis(const JointDistribution& j, const BitMatrix& m) {
    require(m.cols() == j.n_key_bits(), "hash_key_axis: dimension mismatch");
    return map_key_axis(
        j, [&m](std::uint64_t k) { return m.apply_u64(k); }, m.rows());
}

}  // namespace qkdlab
