#pragma once

// Exact signed rationals over BigNat, plus certified dyadic brackets for
// log2 of a positive rational. No floating point.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "canon/bignat.hpp"

namespace canon {

class Rat {
public:
    Rat() : neg_(false), num_(0), den_(1) {}
    Rat(int64_t v) : neg_(v < 0), num_(uint64_t(v < 0 ? -v : v)), den_(1) {}  // NOLINT
    Rat(BigNat n) : neg_(false), num_(std::move(n)), den_(1) {}               // NOLINT
    Rat(BigNat n, BigNat d, bool negative = false)
        : neg_(negative), num_(std::move(n)), den_(std::move(d)) {
        if (den_.is_zero()) throw std::domain_error("Rat: zero denominator");
        normalize();
    }

    static Rat frac(int64_t n, int64_t d) {
        if (d == 0) throw std::domain_error("Rat: zero denominator");
        bool neg = (n < 0) != (d < 0);
        return Rat(BigNat(uint64_t(n < 0 ? -n : n)), BigNat(uint64_t(d < 0 ? -d : d)), neg);
    }

    // Skips normalization; caller guarantees gcd(n, d) == 1 and d > 0.
    static Rat raw_coprime(BigNat n, BigNat d, bool negative = false) {
        Rat r;
        r.num_ = std::move(n);
        r.den_ = std::move(d);
        r.neg_ = negative && !r.num_.is_zero();
        return r;
    }

    const BigNat& num() const { return num_; }
    const BigNat& den() const { return den_; }
    bool negative() const { return neg_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_integer() const { return den_ == BigNat(1); }

    friend Rat operator+(const Rat& a, const Rat& b) {
        BigNat l = a.num_ * b.den_;
        BigNat r = b.num_ * a.den_;
        BigNat d = a.den_ * b.den_;
        if (a.neg_ == b.neg_) return Rat(l + r, std::move(d), a.neg_);
        if (l >= r) return Rat(l - r, std::move(d), a.neg_);
        return Rat(r - l, std::move(d), b.neg_);
    }
    friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }
    Rat operator-() const {
        Rat r = *this;
        if (!r.num_.is_zero()) r.neg_ = !r.neg_;
        return r;
    }
    friend Rat operator*(const Rat& a, const Rat& b) {
        return Rat(a.num_ * b.num_, a.den_ * b.den_, a.neg_ != b.neg_);
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.is_zero()) throw std::domain_error("Rat: division by zero");
        return Rat(a.num_ * b.den_, a.den_ * b.num_, a.neg_ != b.neg_);
    }

    // num/den stay coprime under powering, so skip renormalization
    Rat pow(uint64_t e) const {
        return raw_coprime(num_.pow(e), den_.pow(e), neg_ && (e % 2 == 1));
    }

    friend bool operator==(const Rat& a, const Rat& b) {
        return a.neg_ == b.neg_ && a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
        if (a.neg_ != b.neg_) return a.neg_ ? std::strong_ordering::less : std::strong_ordering::greater;
        auto mag = (a.num_ * b.den_) <=> (b.num_ * a.den_);
        if (!a.neg_) return mag;
        if (mag == std::strong_ordering::less) return std::strong_ordering::greater;
        if (mag == std::strong_ordering::greater) return std::strong_ordering::less;
        return std::strong_ordering::equal;
    }

    static Rat max(const Rat& a, const Rat& b) { return a >= b ? a : b; }
    static Rat min(const Rat& a, const Rat& b) { return a <= b ? a : b; }

    std::string to_string() const {
        std::string s = neg_ ? "-" : "";
        s += num_.to_string();
        if (!is_integer()) s += "/" + den_.to_string();
        return s;
    }

    // True iff the value equals 2^j for some integer j (possibly negative);
    // log2 of a rational is rational exactly in this case.
    bool is_pow2(int64_t* j = nullptr) const {
        if (neg_ || num_.is_zero()) return false;
        if (num_.is_pow2() && den_.is_pow2()) {
            if (j) *j = int64_t(num_.bit_length()) - int64_t(den_.bit_length());
            return true;
        }
        return false;
    }

private:
    void normalize() {
        if (num_.is_zero()) {
            neg_ = false;
            den_ = 1;
            return;
        }
        BigNat g = BigNat::gcd(num_, den_);
        if (g > BigNat(1)) {
            num_ = div_exact(num_, g);
            den_ = div_exact(den_, g);
        }
    }

    // exact division via limb-sized chunks of the divisor is not available;
    // use repeated subtraction-free long division by reconstructing from gcd:
    // here divisor always divides evenly, so divide via binary long division.
    static BigNat div_exact(const BigNat& a, const BigNat& b) {
        // binary long division (b != 0, b | a)
        BigNat q = 0, rem = 0;
        uint64_t bits = a.bit_length();
        for (uint64_t i = bits; i-- > 0;) {
            rem = rem.shl_bits(1);
            if (a.bit(i)) rem = rem + BigNat(1);
            q = q.shl_bits(1);
            if (rem >= b) {
                rem = rem - b;
                q = q + BigNat(1);
            }
        }
        return q;
    }

    bool neg_;
    BigNat num_;
    BigNat den_;
};

// floor(log2 r) for r > 0, exact.
inline int64_t floor_log2(const Rat& r) {
    if (r.negative() || r.is_zero()) throw std::domain_error("floor_log2: nonpositive");
    int64_t d = int64_t(r.num().bit_length()) - int64_t(r.den().bit_length());
    // 2^(d-1) <= num/den < 2^(d+1); compare against 2^d to pick.
    BigNat lhs, rhs;
    if (d >= 0) {
        lhs = r.num();
        rhs = r.den().shl_bits(uint64_t(d));
    } else {
        lhs = r.num().shl_bits(uint64_t(-d));
        rhs = r.den();
    }
    return lhs >= rhs ? d : d - 1;
}

// Certified bracket lo <= log2(q) <= hi with hi - lo <= 2^-prec
// (equality lo == hi exactly when q is a power of two).
// prec is the number of fractional bits; cost grows as q's size times 2^prec,
// so keep prec small (<= 12). All bounds are exact rationals.
inline std::pair<Rat, Rat> log2_bounds(const Rat& q, unsigned prec) {
    if (q.negative() || q.is_zero()) throw std::domain_error("log2_bounds: nonpositive");
    int64_t j;
    if (q.is_pow2(&j)) {
        Rat e(j);
        return {e, e};
    }
    // a = floor(2^prec * log2 q) via floor_log2(q^(2^prec))
    Rat p = q;
    for (unsigned i = 0; i < prec; ++i)
        p = Rat::raw_coprime(p.num() * p.num(), p.den() * p.den());
    int64_t a = floor_log2(p);
    Rat scale = Rat(BigNat(1), BigNat::pow2(prec));
    return {Rat(a) * scale, Rat(a + 1) * scale};
}

}  // namespace canon
