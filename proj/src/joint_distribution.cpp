#include "qkdlab/joint_distribution.hpp"

#include <cmath>

namespace qkdlab {

JointDistribution::JointDistribution(int n_key_bits, std::size_t eve_symbols)
    : n_key_bits_(n_key_bits), eve_symbols_(eve_symbols) {
    require(n_key_bits >= 1, "JointDistribution: n_key_bits must be >= 1");
    require(eve_symbols >= 1, "JointDistribution: eve_symbols must be >= 1");
    require_capacity(n_key_bits <= kMaxKeyBits,
                     "JointDistribution: n_key_bits exceeds enumeration cap");
    std::uint64_t keys = std::uint64_t{1} << n_key_bits;
    require_capacity(eve_symbols <= kMaxTableEntries / keys,
                     "JointDistribution: table exceeds enumeration cap");
    probs_.assign(static_cast<std::size_t>(keys) * eve_symbols, 0.0);
}

JointDistribution JointDistribution::uniform_key(int n_key_bits) {
    JointDistribution j(n_key_bits, 1);
    double p = 1.0 / static_cast<double>(j.num_keys());
    for (std::uint64_t k = 0; k < j.num_keys(); ++k) j.at(k, 0) = p;
    return j;
}

double JointDistribution::sum() const {
    double total = 0.0;
    for (double p : probs_) total += p;
    return total;
}

std::vector<double> JointDistribution::eve_marginal() const {
    std::vector<double> m(eve_symbols_, 0.0);
    std::size_t i = 0;
    for (std::uint64_t k = 0; k < num_keys(); ++k)
        for (std::size_t e = 0; e < eve_symbols_; ++e) m[e] += probs_[i++];
    return m;
}

std::vector<double> JointDistribution::key_marginal() const {
    std::vector<double> m(num_keys(), 0.0);
    std::size_t i = 0;
    for (std::uint64_t k = 0; k < num_keys(); ++k)
        for (std::size_t e = 0; e < eve_symbols_; ++e) m[k] += probs_[i++];
    return m;
}

JointDistribution JointDistribution::compress_zero_eve_columns() const {
    std::vector<double> marg = eve_marginal();
    std::vector<std::size_t> keep;
    for (std::size_t e = 0; e < eve_symbols_; ++e)
        if (marg[e] != 0.0) keep.push_back(e);
    if (keep.size() == eve_symbols_) return *this;
    JointDistribution out(n_key_bits_, keep.size());
    for (std::uint64_t k = 0; k < num_keys(); ++k)
        for (std::size_t i = 0; i < keep.size(); ++i)
            out.at(k, i) = prob(k, keep[i]);
    return out;
}

void JointDistribution::validate() const {
    for (double p : probs_)
        require(p >= -1e-15, "JointDistribution: negative probability entry");
    double total = sum();
    require(std::abs(total - 1.0) <= 1e-12,
            "JointDistribution: probabilities do not sum to 1");
}

}  // namespace qkdlab
