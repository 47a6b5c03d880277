#include "qkdlab/bit_matrix.hpp"

#include <bit>
#include <sstream>

namespace qkdlab {

BitMatrix::BitMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), wpr_((static_cast<std::size_t>(cols) + 63) / 64) {
    require(rows >= 1 && cols >= 1, "BitMatrix: rows and cols must be >= 1");
    words_.assign(static_cast<std::size_t>(rows) * wpr_, 0);
}

BitMatrix BitMatrix::identity(int n) {
    BitMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<std::string>& rows) {
    require(!rows.empty(), "BitMatrix::from_rows: no rows");
    BitMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int r = 0; r < m.rows_; ++r) {
        require(static_cast<int>(rows[r].size()) == m.cols_,
                "BitMatrix::from_rows: ragged rows");
        for (int c = 0; c < m.cols_; ++c) {
            char ch = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            require(ch == '0' || ch == '1', "BitMatrix::from_rows: expected '0'/'1'");
            if (ch == '1') m.set(r, c, 1);
        }
    }
    return m;
}

BitMatrix BitMatrix::random(int rows, int cols, std::mt19937_64& rng) {
    BitMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        std::uint64_t word = 0;
        for (int c = 0; c < cols; ++c) {
            if (c % 64 == 0) word = rng();
            if ((word >> (c % 64)) & 1) m.set(r, c, 1);
        }
    }
    return m;
}

Bits BitMatrix::apply(const Bits& x) const {
    require(static_cast<int>(x.size()) == cols_, "BitMatrix::apply: length mismatch");
    std::vector<std::uint64_t> xw = x.packed();
    Bits y(static_cast<std::size_t>(rows_));
    for (int r = 0; r < rows_; ++r) {
        std::uint64_t acc = 0;
        const std::uint64_t* row = words_.data() + static_cast<std::size_t>(r) * wpr_;
        for (std::size_t w = 0; w < wpr_; ++w) acc ^= row[w] & xw[w];
        y.set(static_cast<std::size_t>(r), std::popcount(acc) & 1);
    }
    return y;
}

std::uint64_t BitMatrix::apply_u64(std::uint64_t x) const {
    require(cols_ <= 63 && rows_ <= 63, "BitMatrix::apply_u64: width > 63");
    std::uint64_t y = 0;
    for (int r = 0; r < rows_; ++r) {
        std::uint64_t acc = words_[static_cast<std::size_t>(r) * wpr_] & x;
        if (std::popcount(acc) & 1) y |= std::uint64_t{1} << r;
    }
    return y;
}

BitMatrix BitMatrix::transpose() const {
    BitMatrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c)
            if (get(r, c)) t.set(c, r, 1);
    return t;
}

BitMatrix BitMatrix::multiply(const BitMatrix& rhs) const {
    require(cols_ == rhs.rows_, "BitMatrix::multiply: inner dimensions differ");
    BitMatrix out(rows_, rhs.cols_);
    for (int r = 0; r < rows_; ++r)
        for (int k = 0; k < cols_; ++k)
            if (get(r, k))
                for (int c = 0; c < rhs.cols_; ++c)
                    if (rhs.get(k, c)) out.set(r, c, out.get(r, c) ^ 1);
    return out;
}

bool BitMatrix::is_zero() const {
    for (auto w : words_)
        if (w) return false;
    return true;
}

std::string BitMatrix::to_text() const {
    std::string s;
    s.reserve(static_cast<std::size_t>(rows_) * (static_cast<std::size_t>(cols_) + 1));
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) s += static_cast<char>('0' + get(r, c));
        s += '\n';
    }
    return s;
}

BitMatrix BitMatrix::parse_text(std::string_view text) {
    std::vector<std::string> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(line);
    }
    return from_rows(rows);
}

int rank_gf2(const BitMatrix& m) {
    std::vector<std::vector<std::uint64_t>> rows(static_cast<std::size_t>(m.rows_));
    for (int r = 0; r < m.rows_; ++r)
        rows[static_cast<std::size_t>(r)].assign(
            m.words_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(r) * m.wpr_),
            m.words_.begin() + static_cast<std::ptrdiff_t>((static_cast<std::size_t>(r) + 1) * m.wpr_));

    int rank = 0;
    for (int c = 0; c < m.cols_ && rank < m.rows_; ++c) {
        std::size_t word = static_cast<std::size_t>(c) / 64;
        std::uint64_t mask = std::uint64_t{1} << (c % 64);
        int pivot = -1;
        for (int r = rank; r < m.rows_; ++r) {
            if (rows[static_cast<std::size_t>(r)][word] & mask) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        std::swap(rows[static_cast<std::size_t>(rank)], rows[static_cast<std::size_t>(pivot)]);
        for (int r = 0; r < m.rows_; ++r) {
            if (r != rank && (rows[static_cast<std::size_t>(r)][word] & mask)) {
                for (std::size_t w = 0; w < m.wpr_; ++w)
                    rows[static_cast<std::size_t>(r)][w] ^= rows[static_cast<std::size_t>(rank)][w];
            }
        }
        ++rank;
    }
    return rank;
}

}  // namespace qkdlab
