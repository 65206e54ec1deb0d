#pragma once

#include <cstdint>
#include <vector>

#include "padicdyn/errors.hpp"

namespace padicdyn {

/// Configured bounds: everything downstream is table-driven and exhaustive,
/// so the prime and the point count stay desk-sized.
inline constexpr std::uint32_t kMaxPrime = 251;           // largest prime < 2^8
inline constexpr std::uint64_t kMaxPoints = 1ull << 24;   // cap on p^{kn}

bool is_small_prime(std::uint32_t p);

/// p^e with overflow checking (throws std::overflow_error).
std::uint64_t pow_u64(std::uint64_t base, std::uint32_t exp);

/// A p-adic integer truncated to n base-p digits, least significant first.
/// Canonical integer value is sum(digit[i] * p^i), in [0, p^n). Immutable.
class TruncatedPadic {
public:
    TruncatedPadic(std::uint32_t p, std::uint32_t n, std::vector<std::uint32_t> digits);

    /// Digits of `value mod p^n`.
    static TruncatedPadic from_value(std::uint32_t p, std::uint32_t n, std::uint64_t value);

    std::uint32_t p() const { return p_; }
    std::uint32_t n() const { return n_; }
    const std::vector<std::uint32_t>& digits() const { return digits_; }
    std::uint32_t digit(std::uint32_t i) const { return digits_[i]; }

    /// Canonical integer value; requires p^n to fit in 64 bits.
    std::uint64_t value() const;

    bool operator==(const TruncatedPadic& other) const = default;

private:
    std::uint32_t p_;
    std::uint32_t n_;
    std::vector<std::uint32_t> digits_;
};

/// A point of (Z/p^n)^k: k components sharing (p, n). Immutable.
class TruncatedVector {
public:
    TruncatedVector(std::uint32_t p, std::uint32_t k, std::uint32_t n,
                    std::vector<TruncatedPadic> components);

    static TruncatedVector from_values(std::uint32_t p, std::uint32_t k, std::uint32_t n,
                                       const std::vector<std::uint64_t>& values);

    std::uint32_t p() const { return p_; }
    std::uint32_t k() const { return k_; }
    std::uint32_t n() const { return n_; }
    const std::vector<TruncatedPadic>& components() const { return comps_; }
    const TruncatedPadic& component(std::uint32_t j) const { return comps_[j]; }

    bool operator==(const TruncatedVector& other) const = default;

private:
    std::uint32_t p_;
    std::uint32_t k_;
    std::uint32_t n_;
    std::vector<TruncatedPadic> comps_;
};

/// |x|_p at finite precision: either p^{-order} with 0 <= order < n, or
/// zero_at_precision when all n digits vanish (x == 0 mod p^n).
struct Valuation {
    bool zero_at_precision = false;
    std::uint32_t order = 0;  // meaningful only when !zero_at_precision

    static Valuation zero() { return {true, 0}; }
    static Valuation finite(std::uint32_t v) { return {false, v}; }

    /// Norm comparison: larger norm means smaller order; zero_at_precision is
    /// the smallest possible norm.
    bool norm_leq(const Valuation& other) const {
        if (zero_at_precision) return true;
        if (other.zero_at_precision) return false;
        return order >= other.order;
    }

    bool operator==(const Valuation& other) const = default;
};

/// Canonical index of a vector: the digit-interleaved value
/// sum over i,j of digit(i of component j) * p^{i*k + j}, in [0, p^{kn}).
/// For k=1 this is the plain base-p value. The interleaved choice makes
/// vector-level reduction a plain modulus on indices.
std::uint64_t encode(const TruncatedVector& x);
TruncatedVector decode(std::uint64_t index, std::uint32_t p, std::uint32_t k, std::uint32_t n);

/// Keep the m lowest digits (of every component). Requires 1 <= m <= n.
TruncatedPadic reduce(const TruncatedPadic& x, std::uint32_t m);
TruncatedVector reduce(const TruncatedVector& x, std::uint32_t m);

Valuation valuation(const TruncatedPadic& x);

/// |x - y|_p; for vectors, max over component norms (= min over orders).
Valuation distance(const TruncatedPadic& x, const TruncatedPadic& y);
Valuation distance(const TruncatedVector& x, const TruncatedVector& y);

/// (value(x) + c) mod p^n, digit-wise with carry.
TruncatedPadic add_with_carry(const TruncatedPadic& x, std::uint64_t c);

/// Every digit i.i.d. uniform over {0,...,p-1}; deterministic given seed.
TruncatedVector sample_uniform(std::uint32_t p, std::uint32_t k, std::uint32_t n,
                               std::uint64_t seed);

}  // namespace padicdyn
