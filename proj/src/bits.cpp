#include "qkdlab/bits.hpp"

#include <algorithm>

namespace qkdlab {

Bits Bits::from_uint(std::uint64_t value, std::size_t n_bits) {
    require(n_bits <= 63, "Bits::from_uint: width > 63");
    Bits b(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) b.v_[i] = (value >> i) & 1;
    return b;
}

Bits Bits::parse(std::string_view s) {
    Bits b(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        require(c == '0' || c == '1', "Bits::parse: expected '0' or '1'");
        b.v_[i] = static_cast<std::uint8_t>(c - '0');
    }
    return b;
}

std::uint64_t Bits::to_uint() const {
    require(size() <= 63, "Bits::to_uint: width > 63");
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < v_.size(); ++i)
        value |= static_cast<std::uint64_t>(v_[i]) << i;
    return value;
}

std::string Bits::to_string() const {
    std::string s(v_.size(), '0');
    for (std::size_t i = 0; i < v_.size(); ++i) s[i] = static_cast<char>('0' + v_[i]);
    return s;
}

std::size_t Bits::weight() const {
    std::size_t w = 0;
    for (auto bit : v_) w += bit;
    return w;
}

int Bits::parity() const { return static_cast<int>(weight() & 1); }

Bits Bits::operator^(const Bits& other) const {
    require(size() == other.size(), "Bits::xor: length mismatch");
    Bits out(size());
    for (std::size_t i = 0; i < v_.size(); ++i) out.v_[i] = v_[i] ^ other.v_[i];
    return out;
}

Bits Bits::slice(std::size_t begin, std::size_t len) const {
    require(begin + len <= size(), "Bits::slice: out of range");
    Bits out(len);
    std::copy_n(v_.begin() + static_cast<std::ptrdiff_t>(begin), len, out.v_.begin());
    return out;
}

void Bits::append(const Bits& other) {
    v_.insert(v_.end(), other.v_.begin(), other.v_.end());
}

std::vector<std::uint64_t> Bits::packed() const {
    std::vector<std::uint64_t> words((size() + 63) / 64, 0);
    for (std::size_t i = 0; i < v_.size(); ++i)
        if (v_[i]) words[i / 64] |= std::uint64_t{1} << (i % 64);
    return words;
}

std::string bits_to_hex(const Bits& b) {
    static const char digits[] = "0123456789abcdef";
    std::size_t n_nibbles = (b.size() + 3) / 4;
    if (n_nibbles == 0) return "0";
    std::string s(n_nibbles, '0');
    for (std::size_t nib = 0; nib < n_nibbles; ++nib) {
        unsigned v = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            std::size_t pos = nib * 4 + j;
            if (pos < b.size() && b.get(pos)) v |= 1u << j;
        }
        // most significant nibble first
        s[n_nibbles - 1 - nib] = digits[v];
    }
    return s;
}

Bits bits_from_hex(std::string_view hex, std::size_t n_bits) {
    require(!hex.empty(), "bits_from_hex: empty string");
    Bits b(n_bits);
    std::size_t n_nibbles = hex.size();
    for (std::size_t i = 0; i < n_nibbles; ++i) {
        char c = hex[n_nibbles - 1 - i];  // i-th nibble from the LSB end
        unsigned v;
        if (c >= '0' && c <= '9') v = static_cast<unsigned>(c - '0');
        else if (c >= 'a' && c <= 'f') v = static_cast<unsigned>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') v = static_cast<unsigned>(c - 'A' + 10);
        else throw validation_error("bits_from_hex: bad hex digit");
        for (std::size_t j = 0; j < 4; ++j) {
            std::size_t pos = i * 4 + j;
            bool bit = (v >> j) & 1;
            if (pos < n_bits) {
                b.set(pos, bit);
            } else {
                require(!bit, "bits_from_hex: value wider than n_bits");
            }
        }
    }
    return b;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t purpose) {
    std::uint64_t state = seed ^ (0xa076'1d64'78bd'642fULL * (purpose + 1));
    std::seed_seq seq{static_cast<unsigned>(splitmix64(state) >> 32),
                      static_cast<unsigned>(splitmix64(state)),
                      static_cast<unsigned>(splitmix64(state) >> 32),
                      static_cast<unsigned>(splitmix64(state))};
    return std::mt19937_64(seq);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    require(bound > 0, "uniform_below: zero bound");
    // rejection sampling on the top multiple of bound
    std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Bits random_bits(std::mt19937_64& rng, std::size_t n) {
    Bits b(n);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 64 == 0) word = rng();
        b.set(i, static_cast<int>((word >> (i % 64)) & 1));
    }
    return b;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

}  // namespace qkdlab
