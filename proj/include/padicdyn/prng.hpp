#pragma once

#include <cstdint>
#include <vector>

#include "padicdyn/maps.hpp"

namespace padicdyn {

/// A random compatible bijection built level by level: the level-1 table is a
/// permutation of the p^k points, and each extension level picks, per residue
/// class c mod p^{km}, a permutation of the p^k digit-vectors that may sit on
/// top of it. Compatible and bijective at every vector level by construction.
struct TreeSampledMap {
    std::uint32_t p = 2;
    std::uint32_t k = 1;
    std::uint32_t n = 1;
    std::uint64_t seed = 0;
    /// node_perms[m] holds p^{km} class permutations of {0..p^k-1},
    /// class-major (class c occupies [c*p^k, (c+1)*p^k)); node_perms[0] is the
    /// level-1 table itself.
    std::vector<std::vector<std::uint32_t>> node_perms;
    TruncatedMap table;
};

TreeSampledMap tree_sample(std::uint32_t p, std::uint32_t k, std::uint32_t n,
                           std::uint64_t seed);

/// The materialized table only (what induce() uses for TreeSampledSpec).
TruncatedMap tree_sampled_table(std::uint32_t p, std::uint32_t k, std::uint32_t n,
                                std::uint64_t seed);

/// Rejection-sample tree maps until one is transitive at every level <= n.
/// Levels are grown lazily with an early exit, so failed attempts are cheap;
/// each restart counts against max_retries. Deterministic given seed.
/// Throws RetriesExhausted when the budget runs out.
TruncatedMap sample_transitive(std::uint32_t p, std::uint32_t k, std::uint32_t n,
                               std::uint64_t seed, std::uint64_t max_retries);

enum class Extractor : std::uint8_t {
    low_digit,   // lowest base-p digit of the (interleaved) state
    full_state,  // the encoded state itself
};

struct KeystreamConfig {
    MapSpec spec = OdometerSpec{};
    std::uint32_t p = 2;
    std::uint32_t k = 1;
    std::uint32_t n = 1;
    std::uint64_t state = 0;  // initial encoded state
    std::uint64_t count = 1;
    Extractor extractor = Extractor::low_digit;
};

/// Iterate s <- map(s) and emit extractor(s) per step. Requires the map to be
/// measure preserving up to level n.
std::vector<std::uint64_t> keystream(const KeystreamConfig& cfg);

/// Pack a p=2 low-digit stream into bytes, 8 digits per byte, low digit first.
std::vector<std::uint8_t> pack_bits(const std::vector<std::uint64_t>& digits);

struct UniformityLevel {
    std::uint32_t m = 1;
    std::uint64_t class_count = 0;    // p^{km}
    std::uint64_t expected = 0;       // p^{k(n-m)}
    std::uint64_t max_deviation = 0;  // max |count - expected|, must be 0
    std::vector<std::uint64_t> histogram;
};

struct UniformityReport {
    std::uint64_t period = 0;  // p^{kn}
    std::vector<UniformityLevel> levels;

    std::uint64_t max_deviation() const;
};

/// Walk one full period of the level-n cycle and count every residue class
/// mod p^{km} for each m <= n. Transitivity makes the counts exactly
/// p^{k(n-m)}; this verifies it by counting rather than assuming it.
/// Throws NotTransitive when the map is not a single cycle at level n.
UniformityReport uniformity_report(const TruncatedMap& map, std::uint32_t n);

}  // namespace padicdyn
