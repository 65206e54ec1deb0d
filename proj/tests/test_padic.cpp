#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "oracles.hpp"
#include "padicdyn/padic.hpp"
#include "padicdyn/rng.hpp"

using namespace padicdyn;

TEST_CASE("encode follows the interleaving formula") {
    // zero vector
    CHECK(encode(TruncatedVector::from_values(2, 2, 1, {0, 0})) == 0);
    // p=2,k=2,n=2, components (1, 2): digits x^0=(1,0), x^1=(0,1)
    // -> 1*2^0 + 0*2^1 + 0*2^2 + 1*2^3 = 9
    CHECK(encode(TruncatedVector::from_values(2, 2, 2, {1, 2})) == 9);
    // p=3,k=2,n=1, (2,1) -> 2 + 1*3 = 5
    CHECK(encode(TruncatedVector::from_values(3, 2, 1, {2, 1})) == 5);
}

TEST_CASE("encode/decode is a bijection on [0, p^{kn})") {
    struct Shape {
        std::uint32_t p, k, n;
    };
    for (Shape s : {Shape{2, 2, 8}, Shape{3, 2, 4}, Shape{5, 1, 5}, Shape{2, 3, 4}}) {
        const std::uint64_t total = oracles::ipow(s.p, s.k * s.n);
        REQUIRE(total <= (1u << 16));
        for (std::uint64_t i = 0; i < total; ++i) {
            CHECK(encode(decode(i, s.p, s.k, s.n)) == i);
        }
    }
}

TEST_CASE("encode positions component digits at i*k + j") {
    // against an independent digit-expansion oracle
    for (std::uint64_t i = 0; i < 3 * 3 * 3 * 3; ++i) {
        const TruncatedVector v = decode(i, 3, 2, 2);
        const auto scalar = oracles::base_digits(i, 3, 4);
        for (std::uint32_t pos = 0; pos < 4; ++pos) {
            CHECK(v.component(pos % 2).digit(pos / 2) == scalar[pos]);
        }
    }
}

TEST_CASE("reduce truncates digits") {
    const TruncatedPadic x = TruncatedPadic::from_value(2, 3, 6);  // digits 0,1,1
    CHECK(reduce(x, 2).value() == 2);

    const TruncatedVector v = TruncatedVector::from_values(3, 2, 2, {4, 7});
    SUBCASE("m = n is the identity") { CHECK(reduce(v, 2) == v); }
    SUBCASE("frozen from the base-3 digit expansion") {
        // oracle: 4 = 1 + 1*3 -> low digit 1; 7 = 1 + 2*3 -> low digit 1
        CHECK(oracles::base_digits(4, 3, 2)[0] == 1);
        CHECK(oracles::base_digits(7, 3, 2)[0] == 1);
        CHECK(reduce(v, 1) == TruncatedVector::from_values(3, 2, 1, {1, 1}));
    }
    SUBCASE("out-of-range level") {
        CHECK_THROWS_AS(reduce(v, 0), std::invalid_argument);
        CHECK_THROWS_AS(reduce(v, 3), std::invalid_argument);
    }
}

TEST_CASE("reduction in encoded form is a modulus") {
    for (std::uint64_t i = 0; i < 3 * 3 * 3 * 3 * 3 * 3; ++i) {
        const TruncatedVector v = decode(i, 3, 2, 3);
        for (std::uint32_t m = 1; m <= 3; ++m) {
            CHECK(encode(reduce(v, m)) == i % oracles::ipow(3, 2 * m));
        }
    }
}

TEST_CASE("distance") {
    SUBCASE("identical points") {
        const TruncatedVector v = TruncatedVector::from_values(2, 2, 3, {5, 1});
        CHECK(distance(v, v) == Valuation::zero());
    }
    SUBCASE("scalar order") {
        const auto x = TruncatedPadic::from_value(2, 4, 12);
        const auto y = TruncatedPadic::from_value(2, 4, 0);
        CHECK(distance(x, y) == Valuation::finite(2));  // 12 = 4 * 3
    }
    SUBCASE("vector order is the min over components") {
        // oracle on the component expansions: ord_2(4) = 2, ord_2(2) = 1
        CHECK(oracles::padic_order(4, 2, 3) == 2);
        CHECK(oracles::padic_order(2, 2, 3) == 1);
        const auto x = TruncatedVector::from_values(2, 2, 3, {4, 2});
        const auto y = TruncatedVector::from_values(2, 2, 3, {0, 0});
        CHECK(distance(x, y) == Valuation::finite(1));
    }
    SUBCASE("shape mismatch") {
        const auto x = TruncatedVector::from_values(2, 2, 3, {0, 0});
        const auto y = TruncatedVector::from_values(2, 2, 2, {0, 0});
        CHECK_THROWS_AS(distance(x, y), ShapeMismatch);
    }
}

TEST_CASE("ultrametric inequality") {
    auto order_of = [](const TruncatedVector& a, const TruncatedVector& b,
                       std::uint32_t n) {
        const Valuation v = distance(a, b);
        return v.zero_at_precision ? n : v.order;
    };
    SUBCASE("exhaustive at p=2, k=1, n<=3") {
        for (std::uint32_t n = 1; n <= 3; ++n) {
            const std::uint64_t total = oracles::ipow(2, n);
            for (std::uint64_t a = 0; a < total; ++a) {
                for (std::uint64_t b = 0; b < total; ++b) {
                    for (std::uint64_t c = 0; c < total; ++c) {
                        const auto x = decode(a, 2, 1, n);
                        const auto y = decode(b, 2, 1, n);
                        const auto z = decode(c, 2, 1, n);
                        CHECK(order_of(x, z, n) >=
                              std::min(order_of(x, y, n), order_of(y, z, n)));
                    }
                }
            }
        }
    }
    SUBCASE("random triples at p=5, k=3, n=3") {
        Rng rng(2024);
        const std::uint64_t total = oracles::ipow(5, 9);
        for (int trial = 0; trial < 2000; ++trial) {
            const auto x = decode(rng.below(total), 5, 3, 3);
            const auto y = decode(rng.below(total), 5, 3, 3);
            const auto z = decode(rng.below(total), 5, 3, 3);
            CHECK(order_of(x, z, 3) >= std::min(order_of(x, y, 3), order_of(y, z, 3)));
        }
    }
}

TEST_CASE("add_with_carry") {
    CHECK(add_with_carry(TruncatedPadic::from_value(2, 3, 7), 1).value() == 0);
    CHECK(add_with_carry(TruncatedPadic::from_value(2, 3, 0), 0).value() == 0);
    CHECK(add_with_carry(TruncatedPadic::from_value(5, 2, 24), 3).value() ==
          (24 + 3) % 25);
    // large carries
    CHECK(add_with_carry(TruncatedPadic::from_value(3, 4, 5), 1'000'000'007ull).value() ==
          (5 + 1'000'000'007ull) % 81);
}

TEST_CASE("sample_uniform") {
    SUBCASE("deterministic given seed") {
        CHECK(sample_uniform(3, 2, 5, 42) == sample_uniform(3, 2, 5, 42));
        CHECK(sample_uniform(3, 2, 5, 42) != sample_uniform(3, 2, 5, 43));
    }
    SUBCASE("digit frequencies within 5 sigma") {
        const int trials = 100'000;
        const std::uint32_t p = 3;
        std::vector<std::uint64_t> counts(p, 0);
        std::uint64_t total = 0;
        for (int s = 0; s < trials / 100; ++s) {
            const TruncatedVector v = sample_uniform(p, 2, 50, 1000 + s);
            for (const auto& comp : v.components()) {
                for (std::uint32_t d : comp.digits()) {
                    ++counts[d];
                    ++total;
                }
            }
        }
        const double q = 1.0 / p;
        const double sigma = std::sqrt(static_cast<double>(total) * q * (1 - q));
        for (std::uint64_t c : counts) {
            CHECK(std::abs(static_cast<double>(c) - total * q) <= 5 * sigma);
        }
    }
    SUBCASE("single binary digit is a fair coin") {
        const int trials = 100'000;
        std::uint64_t ones = 0;
        for (int s = 0; s < trials; ++s) {
            ones += sample_uniform(2, 1, 1, s).component(0).digit(0);
        }
        CHECK(std::abs(ones / static_cast<double>(trials) - 0.5) <= 0.01);
    }
}

TEST_CASE("construction guards") {
    CHECK_THROWS_AS(TruncatedPadic(4, 2, {0, 0}), std::invalid_argument);  // not prime
    CHECK_THROWS_AS(TruncatedPadic(2, 2, {0, 2}), std::invalid_argument);  // digit range
    CHECK_THROWS_AS(TruncatedPadic(2, 2, {0}), std::invalid_argument);     // length
    CHECK_THROWS_AS(TruncatedVector::from_values(2, 2, 1, {0}), std::invalid_argument);
    CHECK_THROWS_AS(decode(1u << 20, 2, 2, 2), std::invalid_argument);
}
