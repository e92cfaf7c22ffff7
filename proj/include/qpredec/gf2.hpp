#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qpredec {

// Bit-packed vector over GF(2).
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(size_t n) : size_(n), words_((n + 63) / 64, 0) {}

    size_t size() const { return size_; }

    bool test(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(size_t i) { words_[i >> 6] |= (uint64_t{1} << (i & 63)); }
    void reset(size_t i) { words_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }
    void flip(size_t i) { words_[i >> 6] ^= (uint64_t{1} << (i & 63)); }

    void clear() { words_.assign(words_.size(), 0); }

    BitVec& operator^=(const BitVec& o) {
        for (size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
        return *this;
    }
    BitVec& operator&=(const BitVec& o) {
        for (size_t w = 0; w < words_.size(); ++w) words_[w] &= o.words_[w];
        return *this;
    }
    // this &= ~o
    void and_not(const BitVec& o) {
        for (size_t w = 0; w < words_.size(); ++w) words_[w] &= ~o.words_[w];
    }
    BitVec& operator|=(const BitVec& o) {
        for (size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
        return *this;
    }

    bool any() const {
        for (uint64_t w : words_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    size_t popcount() const {
        size_t c = 0;
        for (uint64_t w : words_) c += static_cast<size_t>(std::popcount(w));
        return c;
    }

    // True when every set bit of `o` is also set here.
    bool contains(const BitVec& o) const {
        for (size_t w = 0; w < words_.size(); ++w)
            if ((o.words_[w] & ~words_[w]) != 0) return false;
        return true;
    }

    bool intersects(const BitVec& o) const {
        for (size_t w = 0; w < words_.size(); ++w)
            if (words_[w] & o.words_[w]) return true;
        return false;
    }

    bool operator==(const BitVec& o) const = default;

    std::vector<size_t> set_bits() const {
        std::vector<size_t> out;
        for (size_t w = 0; w < words_.size(); ++w) {
            uint64_t bits = words_[w];
            while (bits) {
                out.push_back(w * 64 + static_cast<size_t>(std::countr_zero(bits)));
                bits &= bits - 1;
            }
        }
        return out;
    }

  private:
    size_t size_ = 0;
    std::vector<uint64_t> words_;
};

inline BitVec bitvec_from(size_t n, const std::vector<size_t>& bits) {
    BitVec v(n);
    for (size_t b : bits) {
        if (b >= n) throw std::out_of_range("bit index out of range");
        v.set(b);
    }
    return v;
}

// parity of <a, b> over GF(2)
inline int gf2_dot(const BitVec& a, const BitVec& b) {
    BitVec t = a;
    t &= b;
    return static_cast<int>(t.popcount() & 1);
}

}  // namespace qpredec
