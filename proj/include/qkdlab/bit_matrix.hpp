#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qkdlab/bits.hpp"

namespace qkdlab {

// Dense matrix over GF(2), rows packed into 64-bit words.
// Used both for hash compressors (rows = output length) and for code
// generator / parity-check matrices.
class BitMatrix {
public:
    BitMatrix() : rows_(0), cols_(0), wpr_(0) {}
    BitMatrix(int rows, int cols);

    static BitMatrix identity(int n);
    static BitMatrix zeros(int rows, int cols) { return BitMatrix(rows, cols); }
    static BitMatrix from_rows(const std::vector<std::string>& rows);
    static BitMatrix random(int rows, int cols, std::mt19937_64& rng);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    int get(int r, int c) const {
        return static_cast<int>((words_[idx(r, c)] >> (c % 64)) & 1);
    }
    void set(int r, int c, int bit) {
        std::uint64_t mask = std::uint64_t{1} << (c % 64);
        if (bit & 1) words_[idx(r, c)] |= mask;
        else words_[idx(r, c)] &= ~mask;
    }

    // y = M x over GF(2); x must have cols() bits.
    Bits apply(const Bits& x) const;
    // Fast path for cols() <= 63 with x as a key index.
    std::uint64_t apply_u64(std::uint64_t x) const;

    BitMatrix transpose() const;
    BitMatrix multiply(const BitMatrix& rhs) const;
    bool is_zero() const;

    bool operator==(const BitMatrix& other) const = default;

    // Text exchange format: one row per line of '0'/'1' characters.
    std::string to_text() const;
    static BitMatrix parse_text(std::string_view text);

private:
    std::size_t idx(int r, int c) const {
        return static_cast<std::size_t>(r) * wpr_ + static_cast<std::size_t>(c) / 64;
    }

    int rows_, cols_;
    std::size_t wpr_;  // words per row
    std::vector<std::uint64_t> words_;

    friend int rank_gf2(const BitMatrix&);
};

// GF(2) rank via Gaussian elimination. A compressor is degenerate iff
// rank < rows.
int rank_gf2(const BitMatrix& m);

}  // namespace qkdlab
