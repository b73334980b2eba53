#pragma once

// Arbitrary-precision nonnegative integers.
//
// Little-endian 64-bit limbs, schoolbook multiplication. Sizes in this
// library stay modest (at most a few megabits, guarded by the tower size
// cap), so asymptotically fast multiplication is not needed.

#include <algorithm>
#include <cassert>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace canon {

class BigNat {
public:
    BigNat() = default;
    BigNat(uint64_t v) {  // NOLINT: implicit by design, mirrors integer literals
        if (v != 0) limbs_.push_back(v);
    }

    static BigNat from_decimal(std::string_view s) {
        if (s.empty()) throw std::invalid_argument("BigNat: empty decimal string");
        BigNat r;
        for (char c : s) {
            if (c < '0' || c > '9') throw std::invalid_argument("BigNat: bad digit");
            r = r.mul_small(10);
            r = r + BigNat(uint64_t(c - '0'));
        }
        return r;
    }

    // 2^bits
    static BigNat pow2(uint64_t bits) {
        BigNat r;
        r.limbs_.assign(bits / 64 + 1, 0);
        r.limbs_[bits / 64] = uint64_t(1) << (bits % 64);
        return r;
    }

    bool is_zero() const { return limbs_.empty(); }

    bool fits_u64() const { return limbs_.size() <= 1; }
    uint64_t to_u64() const {
        if (limbs_.size() > 1) throw std::overflow_error("BigNat: does not fit in u64");
        return limbs_.empty() ? 0 : limbs_[0];
    }

    uint64_t bit_length() const {
        if (limbs_.empty()) return 0;
        uint64_t top = limbs_.back();
        uint64_t bits = 0;
        while (top) { bits++; top >>= 1; }
        return (limbs_.size() - 1) * 64 + bits;
    }

    bool is_pow2() const {
        if (limbs_.empty()) return false;
        uint64_t top = limbs_.back();
        if ((top & (top - 1)) != 0) return false;
        for (size_t i = 0; i + 1 < limbs_.size(); ++i)
            if (limbs_[i] != 0) return false;
        return true;
    }

    bool bit(uint64_t i) const {
        size_t w = i / 64;
        if (w >= limbs_.size()) return false;
        return (limbs_[w] >> (i % 64)) & 1;
    }

    friend std::strong_ordering operator<=>(const BigNat& a, const BigNat& b) {
        if (a.limbs_.size() != b.limbs_.size())
            return a.limbs_.size() <=> b.limbs_.size();
        for (size_t i = a.limbs_.size(); i-- > 0;) {
            if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] <=> b.limbs_[i];
        }
        return std::strong_ordering::equal;
    }
    friend bool operator==(const BigNat& a, const BigNat& b) { return a.limbs_ == b.limbs_; }

    friend BigNat operator+(const BigNat& a, const BigNat& b) {
        BigNat r;
        const auto& x = a.limbs_;
        const auto& y = b.limbs_;
        size_t n = std::max(x.size(), y.size());
        r.limbs_.resize(n, 0);
        unsigned __int128 carry = 0;
        for (size_t i = 0; i < n; ++i) {
            unsigned __int128 s = carry;
            if (i < x.size()) s += x[i];
            if (i < y.size()) s += y[i];
            r.limbs_[i] = uint64_t(s);
            carry = s >> 64;
        }
        if (carry) r.limbs_.push_back(uint64_t(carry));
        return r;
    }

    // requires a >= b
    friend BigNat operator-(const BigNat& a, const BigNat& b) {
        if (a < b) throw std::underflow_error("BigNat: negative difference");
        BigNat r;
        r.limbs_.resize(a.limbs_.size(), 0);
        int64_t borrow = 0;
        for (size_t i = 0; i < a.limbs_.size(); ++i) {
            unsigned __int128 ai = a.limbs_[i];
            unsigned __int128 sub = (i < b.limbs_.size() ? b.limbs_[i] : 0);
            sub += uint64_t(borrow);
            if (ai >= sub) {
                r.limbs_[i] = uint64_t(ai - sub);
                borrow = 0;
            } else {
                r.limbs_[i] = uint64_t((ai + ((unsigned __int128)1 << 64)) - sub);
                borrow = 1;
            }
        }
        r.trim();
        return r;
    }

    friend BigNat operator*(const BigNat& a, const BigNat& b) {
        if (a.is_zero() || b.is_zero()) return BigNat();
        BigNat r;
        r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (size_t i = 0; i < a.limbs_.size(); ++i) {
            uint64_t carry = 0;
            uint64_t ai = a.limbs_[i];
            if (ai == 0) continue;
            for (size_t j = 0; j < b.limbs_.size(); ++j) {
                unsigned __int128 cur = (unsigned __int128)ai * b.limbs_[j] + r.limbs_[i + j] + carry;
                r.limbs_[i + j] = uint64_t(cur);
                carry = uint64_t(cur >> 64);
            }
            size_t k = i + b.limbs_.size();
            while (carry) {
                unsigned __int128 cur = (unsigned __int128)r.limbs_[k] + carry;
                r.limbs_[k] = uint64_t(cur);
                carry = uint64_t(cur >> 64);
                ++k;
            }
        }
        r.trim();
        return r;
    }

    BigNat mul_small(uint64_t m) const {
        if (m == 0 || is_zero()) return BigNat();
        BigNat r;
        r.limbs_.resize(limbs_.size(), 0);
        uint64_t carry = 0;
        for (size_t i = 0; i < limbs_.size(); ++i) {
            unsigned __int128 cur = (unsigned __int128)limbs_[i] * m + carry;
            r.limbs_[i] = uint64_t(cur);
            carry = uint64_t(cur >> 64);
        }
        if (carry) r.limbs_.push_back(carry);
        return r;
    }

    // quotient and remainder by a small divisor
    std::pair<BigNat, uint64_t> divmod_small(uint64_t d) const {
        if (d == 0) throw std::domain_error("BigNat: division by zero");
        BigNat q;
        q.limbs_.resize(limbs_.size(), 0);
        unsigned __int128 rem = 0;
        for (size_t i = limbs_.size(); i-- > 0;) {
            unsigned __int128 cur = (rem << 64) | limbs_[i];
            q.limbs_[i] = uint64_t(cur / d);
            rem = cur % d;
        }
        q.trim();
        return {q, uint64_t(rem)};
    }

    BigNat shl_bits(uint64_t bits) const {
        if (is_zero()) return BigNat();
        size_t words = bits / 64;
        unsigned shift = bits % 64;
        BigNat r;
        r.limbs_.assign(limbs_.size() + words + 1, 0);
        for (size_t i = 0; i < limbs_.size(); ++i) {
            r.limbs_[i + words] |= shift ? (limbs_[i] << shift) : limbs_[i];
            if (shift) r.limbs_[i + words + 1] |= limbs_[i] >> (64 - shift);
        }
        r.trim();
        return r;
    }

    BigNat pow(uint64_t e) const {
        BigNat base = *this, r = 1;
        while (e) {
            if (e & 1) r = r * base;
            e >>= 1;
            if (e) base = base * base;
        }
        return r;
    }

    static BigNat gcd(BigNat a, BigNat b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        uint64_t shift = 0;
        while (a.even() && b.even()) { a = a.half(); b = b.half(); ++shift; }
        while (a.even()) a = a.half();
        while (!b.is_zero()) {
            while (b.even()) b = b.half();
            if (a > b) std::swap(a, b);
            b = b - a;
        }
        return a.shl_bits(shift);
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        std::vector<uint64_t> chunks;  // base 10^18, little-endian
        BigNat cur = *this;
        while (!cur.is_zero()) {
            auto [q, r] = cur.divmod_small(1000000000000000000ULL);
            chunks.push_back(r);
            cur = std::move(q);
        }
        std::string out = std::to_string(chunks.back());
        for (size_t i = chunks.size() - 1; i-- > 0;) {
            std::string p = std::to_string(chunks[i]);
            out += std::string(18 - p.size(), '0') + p;
        }
        return out;
    }

    // decimal digit count without converting (exact)
    uint64_t decimal_digits() const {
        if (is_zero()) return 1;
        // digits = floor(log10 v) + 1; bracket via bit length, then fix up.
        uint64_t bits = bit_length();
        uint64_t lo = (bits - 1) * 30103ULL / 100000ULL + 1;  // log10(2) > 0.30103 - eps
        BigNat p = BigNat(10).pow(lo);
        uint64_t d = lo;
        while (p <= *this) { p = p.mul_small(10); ++d; }
        return d;
    }

    // Compact rendering: full decimal up to max_digits, otherwise "2^k" for
    // exact powers of two and "~2^k" (k = bit length - 1) for everything else.
    std::string str_brief(uint64_t max_digits = 64) const {
        if (is_zero()) return "0";
        uint64_t bits = bit_length();
        bool fits;
        if (bits >= 4 * max_digits + 8) fits = false;  // digits >= bits/4 > max
        else if (bits <= 3 * max_digits && max_digits >= 32) fits = true;
        else fits = decimal_digits() <= max_digits;
        if (fits) return to_string();
        if (is_pow2()) return "2^" + std::to_string(bit_length() - 1);
        return "~2^" + std::to_string(bit_length() - 1);
    }

    bool even() const { return limbs_.empty() || (limbs_[0] & 1) == 0; }

private:
    BigNat half() const {
        BigNat r;
        r.limbs_.resize(limbs_.size(), 0);
        for (size_t i = 0; i < limbs_.size(); ++i) {
            r.limbs_[i] = limbs_[i] >> 1;
            if (i + 1 < limbs_.size() && (limbs_[i + 1] & 1))
                r.limbs_[i] |= uint64_t(1) << 63;
        }
        r.trim();
        return r;
    }

    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    }

    std::vector<uint64_t> limbs_;
};

}  // namespace canon
