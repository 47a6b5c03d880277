#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qkdlab/errors.hpp"

namespace qkdlab {

// Bit string with one addressable bit per position.
//
// Conventions used throughout the project:
//   - position i of a Bits corresponds to bit i (LSB) of its integer value,
//     so Bits::parse("110").to_uint() == 3;
//   - the text form reads position 0 first: character i is position i;
//   - hex seed strings render the integer value most-significant digit first.
class Bits {
public:
    Bits() = default;
    explicit Bits(std::size_t n) : v_(n, 0) {}

    static Bits from_uint(std::uint64_t value, std::size_t n_bits);
    static Bits parse(std::string_view s);

    std::size_t size() const { return v_.size(); }
    bool empty() const { return v_.empty(); }

    int get(std::size_t i) const { return v_[i]; }
    void set(std::size_t i, int bit) { v_[i] = static_cast<std::uint8_t>(bit & 1); }
    void flip(std::size_t i) { v_[i] ^= 1; }

    std::uint64_t to_uint() const;  // requires size() <= 63
    std::string to_string() const;

    std::size_t weight() const;
    int parity() const;

    Bits operator^(const Bits& other) const;
    bool operator==(const Bits& other) const = default;

    Bits slice(std::size_t begin, std::size_t len) const;
    void append(const Bits& other);

    // Row-major 64-bit packing, position i at word i/64 bit i%64.
    std::vector<std::uint64_t> packed() const;

private:
    std::vector<std::uint8_t> v_;
};

// Hex codec for seeds: value interpretation per the Bits convention,
// rendered most-significant nibble first, zero-padded to ceil(n/4) digits.
std::string bits_to_hex(const Bits& b);
Bits bits_from_hex(std::string_view hex, std::size_t n_bits);

// Deterministic RNG plumbing. Every random decision in the project draws
// from a stream obtained here, so identical (seed, purpose) pairs replay
// bit-identically across runs and platforms.
std::uint64_t splitmix64(std::uint64_t& state);
std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t purpose);

// Platform-stable helpers (std::uniform_* distributions are not pinned by
// the standard, so sampling goes through these instead).
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);
double uniform_unit(std::mt19937_64& rng);  // [0, 1)
Bits random_bits(std::mt19937_64& rng, std::size_t n);
std::vector<std::size_t> seeded_permutation(std::size_t n, std::mt19937_64& rng);

}  // namespace qkdlab
