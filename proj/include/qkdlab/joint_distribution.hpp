#pragma once

#include <cstdint>
#include <vector>

#include "qkdlab/errors.hpp"

namespace qkdlab {

// Exact joint probability table over (key value, Eve observation).
// The single source of truth for every security metric in the project:
// all bounds are checked against sums over this table, never against
// sampled estimates.
//
// Layout is key-major: entry (k, e) lives at probs[k * eve_symbols + e].
class JointDistribution {
public:
    // Exact-enumeration caps. Everything must stay in memory and finish
    // in seconds, so both the key length and the table size are bounded.
    static constexpr int kMaxKeyBits = 12;
    static constexpr std::size_t kMaxTableEntries = std::size_t{1} << 26;

    JointDistribution(int n_key_bits, std::size_t eve_symbols);

    static JointDistribution uniform_key(int n_key_bits);  // one vacuous Eve symbol

    int n_key_bits() const { return n_key_bits_; }
    std::uint64_t num_keys() const { return std::uint64_t{1} << n_key_bits_; }
    std::size_t eve_symbols() const { return eve_symbols_; }
    std::size_t table_entries() const { return probs_.size(); }

    double prob(std::uint64_t key, std::size_t eve) const {
        return probs_[key * eve_symbols_ + eve];
    }
    double& at(std::uint64_t key, std::size_t eve) {
        return probs_[key * eve_symbols_ + eve];
    }

    double sum() const;
    std::vector<double> eve_marginal() const;
    std::vector<double> key_marginal() const;

    // Drops Eve symbols of probability exactly zero (lossless for every
    // metric; keeps the table compact after conditioning).
    JointDistribution compress_zero_eve_columns() const;

    // Throws validation_error unless entries are nonnegative and the total
    // is 1 within 1e-12.
    void validate() const;

private:
    int n_key_bits_;
    std::size_t eve_symbols_;
    std::vector<double> probs_;
};

}  // namespace qkdlab
