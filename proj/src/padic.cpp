#include "padicdyn/padic.hpp"

#include <algorithm>
#include <stdexcept>

#include "padicdyn/rng.hpp"

namespace padicdyn {

bool is_small_prime(std::uint32_t p) {
    if (p < 2) return false;
    for (std::uint32_t d = 2; d * d <= p; ++d) {
        if (p % d == 0) return false;
    }
    return true;
}

std::uint64_t pow_u64(std::uint64_t base, std::uint32_t exp) {
    std::uint64_t r = 1;
    for (std::uint32_t i = 0; i < exp; ++i) {
        if (base != 0 && r > ~std::uint64_t{0} / base) {
            throw std::overflow_error("pow_u64 overflow");
        }
        r *= base;
    }
    return r;
}

namespace {

void check_p(std::uint32_t p) {
    if (!is_small_prime(p) || p > kMaxPrime) {
        throw std::invalid_argument("p must be a prime <= " + std::to_string(kMaxPrime));
    }
}

}  // namespace

TruncatedPadic::TruncatedPadic(std::uint32_t p, std::uint32_t n,
                               std::vector<std::uint32_t> digits)
    : p_(p), n_(n), digits_(std::move(digits)) {
    check_p(p_);
    if (n_ < 1) throw std::invalid_argument("precision must be >= 1");
    if (digits_.size() != n_) throw std::invalid_argument("digit count must equal precision");
    for (std::uint32_t d : digits_) {
        if (d >= p_) throw std::invalid_argument("digit out of range");
    }
}

TruncatedPadic TruncatedPadic::from_value(std::uint32_t p, std::uint32_t n,
                                          std::uint64_t value) {
    check_p(p);
    std::vector<std::uint32_t> digits(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        digits[i] = static_cast<std::uint32_t>(value % p);
        value /= p;
    }
    return TruncatedPadic(p, n, std::move(digits));
}

std::uint64_t TruncatedPadic::value() const {
    std::uint64_t v = 0;
    for (std::uint32_t i = n_; i-- > 0;) {
        if (v > (~std::uint64_t{0} - digits_[i]) / p_) {
            throw std::overflow_error("canonical value does not fit in 64 bits");
        }
        v = v * p_ + digits_[i];
    }
    return v;
}

TruncatedVector::TruncatedVector(std::uint32_t p, std::uint32_t k, std::uint32_t n,
                                 std::vector<TruncatedPadic> components)
    : p_(p), k_(k), n_(n), comps_(std::move(components)) {
    check_p(p_);
    if (k_ < 1) throw std::invalid_argument("dimension must be >= 1");
    if (n_ < 1) throw std::invalid_argument("precision must be >= 1");
    if (comps_.size() != k_) throw std::invalid_argument("component count must equal k");
    for (const auto& c : comps_) {
        if (c.p() != p_ || c.n() != n_) {
            throw ShapeMismatch("components must share (p, n)");
        }
    }
}

TruncatedVector TruncatedVector::from_values(std::uint32_t p, std::uint32_t k,
                                             std::uint32_t n,
                                             const std::vector<std::uint64_t>& values) {
    if (values.size() != k) throw std::invalid_argument("value count must equal k");
    std::vector<TruncatedPadic> comps;
    comps.reserve(k);
    for (std::uint64_t v : values) comps.push_back(TruncatedPadic::from_value(p, n, v));
    return TruncatedVector(p, k, n, std::move(comps));
}

std::uint64_t encode(const TruncatedVector& x) {
    const std::uint64_t total = pow_u64(x.p(), x.k() * x.n());
    if (total > kMaxPoints) throw std::invalid_argument("p^{kn} exceeds configured bound");
    // Horner over interleaved digit positions i*k + j, most significant first.
    std::uint64_t v = 0;
    for (std::uint32_t i = x.n(); i-- > 0;) {
        for (std::uint32_t j = x.k(); j-- > 0;) {
            v = v * x.p() + x.component(j).digit(i);
        }
    }
    return v;
}

TruncatedVector decode(std::uint64_t index, std::uint32_t p, std::uint32_t k,
                       std::uint32_t n) {
    check_p(p);
    const std::uint64_t total = pow_u64(p, k * n);
    if (total > kMaxPoints) throw std::invalid_argument("p^{kn} exceeds configured bound");
    if (index >= total) throw std::invalid_argument("index out of range");
    std::vector<std::vector<std::uint32_t>> digits(k, std::vector<std::uint32_t>(n));
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < k; ++j) {
            digits[j][i] = static_cast<std::uint32_t>(index % p);
            index /= p;
        }
    }
    std::vector<TruncatedPadic> comps;
    comps.reserve(k);
    for (std::uint32_t j = 0; j < k; ++j) comps.emplace_back(p, n, std::move(digits[j]));
    return TruncatedVector(p, k, n, std::move(comps));
}

TruncatedPadic reduce(const TruncatedPadic& x, std::uint32_t m) {
    if (m < 1 || m > x.n()) throw std::invalid_argument("level out of range");
    std::vector<std::uint32_t> digits(x.digits().begin(), x.digits().begin() + m);
    return TruncatedPadic(x.p(), m, std::move(digits));
}

TruncatedVector reduce(const TruncatedVector& x, std::uint32_t m) {
    if (m < 1 || m > x.n()) throw std::invalid_argument("level out of range");
    std::vector<TruncatedPadic> comps;
    comps.reserve(x.k());
    for (const auto& c : x.components()) comps.push_back(reduce(c, m));
    return TruncatedVector(x.p(), x.k(), m, std::move(comps));
}

Valuation valuation(const TruncatedPadic& x) {
    for (std::uint32_t i = 0; i < x.n(); ++i) {
        if (x.digit(i) != 0) return Valuation::finite(i);
    }
    return Valuation::zero();
}

namespace {

// x - y digit-wise with borrow, mod p^n.
TruncatedPadic subtract(const TruncatedPadic& x, const TruncatedPadic& y) {
    std::vector<std::uint32_t> digits(x.n());
    std::uint32_t borrow = 0;
    for (std::uint32_t i = 0; i < x.n(); ++i) {
        std::int64_t d = static_cast<std::int64_t>(x.digit(i)) - y.digit(i) - borrow;
        borrow = d < 0 ? 1 : 0;
        digits[i] = static_cast<std::uint32_t>(d + (borrow ? x.p() : 0));
    }
    return TruncatedPadic(x.p(), x.n(), std::move(digits));
}

}  // namespace

Valuation distance(const TruncatedPadic& x, const TruncatedPadic& y) {
    if (x.p() != y.p() || x.n() != y.n()) throw ShapeMismatch("operands must share (p, n)");
    return valuation(subtract(x, y));
}

Valuation distance(const TruncatedVector& x, const TruncatedVector& y) {
    if (x.p() != y.p() || x.k() != y.k() || x.n() != y.n()) {
        throw ShapeMismatch("operands must share (p, k, n)");
    }
    // max norm = min order over components
    Valuation best = Valuation::zero();
    for (std::uint32_t j = 0; j < x.k(); ++j) {
        Valuation v = distance(x.component(j), y.component(j));
        if (best.norm_leq(v)) best = v;
    }
    return best;
}

TruncatedPadic add_with_carry(const TruncatedPadic& x, std::uint64_t c) {
    std::vector<std::uint32_t> digits(x.n());
    unsigned __int128 carry = c;
    for (std::uint32_t i = 0; i < x.n(); ++i) {
        unsigned __int128 t = carry + x.digit(i);
        digits[i] = static_cast<std::uint32_t>(t % x.p());
        carry = t / x.p();
    }
    return TruncatedPadic(x.p(), x.n(), std::move(digits));
}

TruncatedVector sample_uniform(std::uint32_t p, std::uint32_t k, std::uint32_t n,
                               std::uint64_t seed) {
    check_p(p);
    Rng rng(seed);
    std::vector<TruncatedPadic> comps;
    comps.reserve(k);
    for (std::uint32_t j = 0; j < k; ++j) {
        std::vector<std::uint32_t> digits(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            digits[i] = static_cast<std::uint32_t>(rng.below(p));
        }
        comps.emplace_back(p, n, std::move(digits));
    }
    return TruncatedVector(p, k, n, std::move(comps));
}

}  // namespace padicdyn
