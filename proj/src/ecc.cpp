#include "qkdlab/ecc.hpp"

#include <bit>
#include <cmath>
#include <cstdio>

#include "qkdlab/secmetrics.hpp"

namespace qkdlab {

double binary_entropy(double q) {
    require(q >= 0.0 && q <= 1.0, "binary_entropy: q must be in [0,1]");
    double h = 0.0;
    if (q > 0.0) h -= q * std::log2(q);
    if (q < 1.0) h -= (1.0 - q) * std::log2(1.0 - q);
    return h;
}

double leak_open(long n, double qber, double f) {
    require(n >= 1, "leak_open: n must be >= 1");
    require(qber >= 0.0 && qber <= 0.5, "leak_open: qber must be in [0, 1/2]");
    require(f >= 1.0, "leak_open: f must be >= 1");
    return f * static_cast<double>(n) * binary_entropy(qber);
}

double leak_parity(long n, double qber) { return leak_open(n, qber, 1.0); }

double leak_covered_expanded(long n, double qber) {
    require(n >= 1, "leak_covered_expanded: n must be >= 1");
    require(qber >= 0.0 && qber <= 0.5,
            "leak_covered_expanded: qber must be in [0, 1/2]");
    double h = binary_entropy(qber);
    if (h >= 1.0)
        throw singularity_error("leak_covered_expanded: h(qber) = 1 pole");
    return static_cast<double>(n) * h / (1.0 - h);
}

Bits bsc_transmit(const Bits& x, double p, std::uint64_t seed) {
    require(p >= 0.0 && p <= 1.0, "bsc_transmit: p must be in [0,1]");
    std::mt19937_64 rng = rng_stream(seed, 0x627363ULL);
    Bits y = x;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (uniform_unit(rng) < p) y.flip(i);
    return y;
}

void MarkovChannel::validate() const {
    require(p_good_to_bad >= 0.0 && p_good_to_bad <= 1.0 &&
                p_bad_to_good >= 0.0 && p_bad_to_good <= 1.0,
            "MarkovChannel: transition probabilities must be in [0,1]");
    require(flip_good >= 0.0 && flip_good <= 1.0 && flip_bad >= 0.0 && flip_bad <= 1.0,
            "MarkovChannel: flip probabilities must be in [0,1]");
    require(p_good_to_bad + p_bad_to_good > 0.0,
            "MarkovChannel: absorbing chain has no stationary distribution");
}

double MarkovChannel::stationary_flip_prob() const {
    validate();
    double pi_bad = p_good_to_bad / (p_good_to_bad + p_bad_to_good);
    return (1.0 - pi_bad) * flip_good + pi_bad * flip_bad;
}

Bits markov_transmit(const Bits& x, const MarkovChannel& ch, std::uint64_t seed) {
    ch.validate();
    std::mt19937_64 rng = rng_stream(seed, 0x6d6b76ULL);
    Bits y = x;
    // start in the stationary distribution so short keys are unbiased
    double pi_bad = ch.p_good_to_bad / (ch.p_good_to_bad + ch.p_bad_to_good);
    bool bad = uniform_unit(rng) < pi_bad;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (uniform_unit(rng) < (bad ? ch.flip_bad : ch.flip_good)) y.flip(i);
        bad = uniform_unit(rng) < (bad ? 1.0 - ch.p_bad_to_good : ch.p_good_to_bad);
    }
    return y;
}

Bits LinearCode::syndrome(const Bits& word) const {
    return parity_check.apply(word);
}

Bits LinearCode::encode(const Bits& info) const { return generator.apply(info); }

void LinearCode::check_invariants() const {
    require(m >= 2 && k >= 1 && k < m, "LinearCode: need m >= 2, 1 <= k < m");
    require(generator.rows() == k && generator.cols() == m,
            "LinearCode: generator must be k x m");
    require(parity_check.rows() == m - k && parity_check.cols() == m,
            "LinearCode: parity check must be (m-k) x m");
    require(generator.multiply(parity_check.transpose()).is_zero(),
            "LinearCode: G H^T != 0");
    require(rank_gf2(generator) == k, "LinearCode: generator rank != k");
    require(rank_gf2(parity_check) == m - k, "LinearCode: parity check rank != m-k");
    std::size_t n_syndromes = std::size_t{1} << (m - k);
    require(coset_leaders.size() == n_syndromes,
            "LinearCode: coset table has wrong size");
    // minimal weight and lowest numeric pattern, checked exhaustively
    std::vector<std::size_t> best_weight(n_syndromes, static_cast<std::size_t>(m) + 1);
    std::vector<std::uint64_t> best_pattern(n_syndromes, 0);
    for (std::uint64_t e = 0; e < (std::uint64_t{1} << m); ++e) {
        Bits pattern = Bits::from_uint(e, static_cast<std::size_t>(m));
        std::uint64_t s = syndrome(pattern).to_uint();
        if (pattern.weight() < best_weight[s]) {
            best_weight[s] = pattern.weight();
            best_pattern[s] = e;
        }
    }
    for (std::size_t s = 0; s < n_syndromes; ++s) {
        require(coset_leaders[s].weight() == best_weight[s],
                "LinearCode: coset leader is not minimum weight");
        require(coset_leaders[s].to_uint() == best_pattern[s],
                "LinearCode: coset leader tie-break is not lowest pattern");
        require(syndrome(coset_leaders[s]).to_uint() == s,
                "LinearCode: coset leader has wrong syndrome");
    }
}

namespace {

std::vector<Bits> build_coset_table(const BitMatrix& parity_check, int m) {
    int sb = parity_check.rows();
    std::size_t n_syndromes = std::size_t{1} << sb;
    std::vector<Bits> leaders(n_syndromes);
    std::vector<bool> seen(n_syndromes, false);
    std::vector<std::size_t> weight(n_syndromes, 0);
    for (std::uint64_t e = 0; e < (std::uint64_t{1} << m); ++e) {
        std::uint64_t s = parity_check.apply_u64(e);
        std::size_t w = static_cast<std::size_t>(std::popcount(e));
        if (!seen[s] || w < weight[s]) {  // ascending e keeps the lowest pattern on ties
            seen[s] = true;
            weight[s] = w;
            leaders[s] = Bits::from_uint(e, static_cast<std::size_t>(m));
        }
    }
    return leaders;
}

}  // namespace

LinearCode LinearCode::systematic(int m, int k, const BitMatrix& p, std::string name) {
    require(m >= 2 && k >= 1 && k < m, "LinearCode: need m >= 2, 1 <= k < m");
    require_capacity(m <= 16, "LinearCode: m too large for exhaustive coset table");
    require(p.rows() == k && p.cols() == m - k,
            "LinearCode::systematic: P must be k x (m-k)");
    LinearCode code;
    code.m = m;
    code.k = k;
    code.name = std::move(name);
    code.generator = BitMatrix(k, m);
    for (int i = 0; i < k; ++i) {
        code.generator.set(i, i, 1);
        for (int j = 0; j < m - k; ++j)
            if (p.get(i, j)) code.generator.set(i, k + j, 1);
    }
    code.parity_check = BitMatrix(m - k, m);
    for (int i = 0; i < m - k; ++i) {
        code.parity_check.set(i, k + i, 1);
        for (int j = 0; j < k; ++j)
            if (p.get(j, i)) code.parity_check.set(i, j, 1);
    }
    code.coset_leaders = build_coset_table(code.parity_check, m);
    return code;
}

LinearCode LinearCode::by_name(const std::string& name) {
    if (name == "rep-3-1")
        return systematic(3, 1, BitMatrix::from_rows({"11"}), name);
    if (name == "rep-5-1")
        return systematic(5, 1, BitMatrix::from_rows({"1111"}), name);
    if (name == "hamming-7-4")
        return systematic(7, 4, BitMatrix::from_rows({"110", "101", "011", "111"}), name);
    if (name == "ext-hamming-8-4")
        return systematic(8, 4, BitMatrix::from_rows({"0111", "1011", "1101", "1110"}),
                          name);
    // random-m-k-seed
    if (name.rfind("random-", 0) == 0) {
        int m = 0, k = 0;
        unsigned long long seed = 0;
        if (std::sscanf(name.c_str(), "random-%d-%d-%llu", &m, &k, &seed) == 3) {
            require(m >= 2 && k >= 1 && k < m, "random code: need 1 <= k < m");
            require_capacity(m <= 10, "random code: m must be <= 10");
            std::mt19937_64 rng = rng_stream(seed, 0x636f6465ULL);
            BitMatrix p = BitMatrix::random(k, m - k, rng);
            return systematic(m, k, p, name);
        }
    }
    throw validation_error("unknown code name: " + name);
}

std::vector<std::string> LinearCode::builtin_names() {
    return {"rep-3-1", "rep-5-1", "hamming-7-4", "ext-hamming-8-4"};
}

ReconciliationResult reconcile(const Bits& alice, const Bits& bob,
                               const LinearCode& code, EccMode mode,
                               const std::optional<Bits>& cover_key) {
    require(static_cast<int>(alice.size()) == code.m &&
                static_cast<int>(bob.size()) == code.m,
            "reconcile: key length must equal code length");
    Bits s_alice = code.syndrome(alice);
    ReconciliationResult out;
    out.mode = mode;
    if (mode == EccMode::covered_syndrome) {
        require(cover_key.has_value() &&
                    static_cast<int>(cover_key->size()) == code.syndrome_bits(),
                "reconcile: covered mode needs an (m-k)-bit cover key");
        out.transmitted_syndrome = s_alice ^ *cover_key;
        out.cover_bits_consumed = code.syndrome_bits();
    } else {
        out.transmitted_syndrome = s_alice;
        out.disclosed_bits = code.syndrome_bits();
    }
    // Bob strips the pad (he shares the cover key), so decoding always
    // sees s_alice xor H*bob = H*(alice xor bob).
    Bits diff = s_alice ^ code.syndrome(bob);
    const Bits& leader = code.coset_leaders[diff.to_uint()];
    out.corrected_key = bob ^ leader;
    out.residual_error = !(out.corrected_key == alice);
    return out;
}

ReconciliationResult reconcile_blocks(const Bits& alice, const Bits& bob,
                                      const LinearCode& code, EccMode mode,
                                      const std::optional<Bits>& cover_key) {
    require(alice.size() == bob.size(), "reconcile_blocks: length mismatch");
    std::size_t n = alice.size();
    std::size_t block = static_cast<std::size_t>(code.m);
    std::size_t n_blocks = n / block;
    if (mode == EccMode::covered_syndrome) {
        require(cover_key.has_value() &&
                    cover_key->size() ==
                        n_blocks * static_cast<std::size_t>(code.syndrome_bits()),
                "reconcile_blocks: cover key must supply (m-k) bits per block");
    }
    ReconciliationResult out;
    out.mode = mode;
    out.corrected_key = Bits(0);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        Bits a = alice.slice(b * block, block);
        Bits bb = bob.slice(b * block, block);
        std::optional<Bits> cover;
        if (mode == EccMode::covered_syndrome)
            cover = cover_key->slice(b * static_cast<std::size_t>(code.syndrome_bits()),
                                     static_cast<std::size_t>(code.syndrome_bits()));
        ReconciliationResult r = reconcile(a, bb, code, mode, cover);
        out.corrected_key.append(r.corrected_key);
        out.disclosed_bits += r.disclosed_bits;
        out.cover_bits_consumed += r.cover_bits_consumed;
        out.transmitted_syndrome.append(r.transmitted_syndrome);
    }
    if (n_blocks * block < n) {  // uncorrected tail
        Bits tail = bob.slice(n_blocks * block, n - n_blocks * block);
        out.corrected_key.append(tail);
    }
    out.residual_error = !(out.corrected_key == alice);
    return out;
}

BitMatrix block_parity_check(const LinearCode& code, int n_bits) {
    require(n_bits >= 1, "block_parity_check: n_bits must be >= 1");
    int n_blocks = n_bits / code.m;
    int rows = n_blocks * code.syndrome_bits();
    if (rows == 0) return BitMatrix::zeros(1, n_bits);  // no disclosure
    BitMatrix h(rows, n_bits);
    for (int b = 0; b < n_blocks; ++b)
        for (int r = 0; r < code.syndrome_bits(); ++r)
            for (int c = 0; c < code.m; ++c)
                if (code.parity_check.get(r, c))
                    h.set(b * code.syndrome_bits() + r, b * code.m + c, 1);
    return h;
}

JointDistribution eve_mixture(const JointDistribution& j,
                              const std::vector<LinearCode>& codes,
                              const std::vector<double>& priors,
                              CodeIndexDisclosure disclosure) {
    require(!codes.empty(), "eve_mixture: empty code set");
    require(codes.size() == priors.size(), "eve_mixture: priors/codes size mismatch");
    double total = 0.0;
    for (double p : priors) {
        require(p >= 0.0, "eve_mixture: negative prior");
        total += p;
    }
    require(std::abs(total - 1.0) <= 1e-12, "eve_mixture: priors must sum to 1");
    for (const LinearCode& c : codes)
        require(c.m == j.n_key_bits(), "eve_mixture: code length must match key bits");

    int sb0 = codes[0].syndrome_bits();
    if (disclosure == CodeIndexDisclosure::hidden)
        for (const LinearCode& c : codes)
            require(c.syndrome_bits() == sb0,
                    "eve_mixture: hidden index needs equal syndrome widths");

    auto conditioned = [&](const LinearCode& c) {
        std::size_t values = std::size_t{1} << c.syndrome_bits();
        return augment_eve_with_key_function(
            j, [&c](std::uint64_t k) { return c.parity_check.apply_u64(k); }, values);
    };

    if (disclosure == CodeIndexDisclosure::hidden) {
        JointDistribution out(j.n_key_bits(),
                              j.eve_symbols() * (std::size_t{1} << sb0));
        for (std::size_t i = 0; i < codes.size(); ++i) {
            JointDistribution ji = conditioned(codes[i]);
            for (std::uint64_t k = 0; k < out.num_keys(); ++k)
                for (std::size_t e = 0; e < out.eve_symbols(); ++e)
                    out.at(k, e) += priors[i] * ji.prob(k, e);
        }
        return out;
    }

    // revealed: symbol blocks are concatenated per code
    std::size_t total_symbols = 0;
    for (const LinearCode& c : codes)
        total_symbols += j.eve_symbols() * (std::size_t{1} << c.syndrome_bits());
    JointDistribution out(j.n_key_bits(), total_symbols);
    std::size_t offset = 0;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        JointDistribution ji = conditioned(codes[i]);
        for (std::uint64_t k = 0; k < out.num_keys(); ++k)
            for (std::size_t e = 0; e < ji.eve_symbols(); ++e)
                out.at(k, offset + e) = priors[i] * ji.prob(k, e);
        offset += ji.eve_symbols();
    }
    return out;
}

}  // namespace qkdlab
