#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "padicdyn/padic.hpp"

namespace padicdyn {

/// An induced map mod p^n, stored as an explicit image table over the p^{kn}
/// encoded points: table[i] is the encoded image of encoded point i.
/// Reduced-level behavior is always derived from this one table by modulus.
struct TruncatedMap {
    std::uint32_t p = 2;
    std::uint32_t k = 1;
    std::uint32_t n = 1;
    std::vector<std::uint32_t> table;
    std::string provenance = "constructed";

    std::uint64_t size() const { return table.size(); }

    /// p^{km}: the encoded modulus of vector level m.
    std::uint64_t modulus_at(std::uint32_t m) const;

    /// Throws if any invariant is violated (entry range, length, bounds).
    void validate() const;
};

// ---- map zoo -------------------------------------------------------------

struct OdometerSpec {
    std::uint64_t c = 1;  // x -> x + c on Z_p (k = 1 only)
};
struct AffineSpec {
    std::uint64_t a = 1;  // x -> a*x + b on Z_p (k = 1 only)
    std::uint64_t b = 0;
};
/// On Z_p^k: deinterleave . (+1) . interleave. With the interleaved point
/// encoding its table is (index + 1) mod p^{kn}.
struct InterleavedOdometerSpec {};
struct IdentitySpec {};
struct TreeSampledSpec {
    std::uint64_t seed = 0;  // random compatible bijection (see prng.hpp)
};
struct TableSpec {
    TruncatedMap map;
};

using MapSpec =
    std::variant<OdometerSpec, AffineSpec, InterleavedOdometerSpec, IdentitySpec,
                 TreeSampledSpec, TableSpec>;

/// Materialize the induced table mod p^n: table[i] = encode(F(decode(i))).
TruncatedMap induce(const MapSpec& spec, std::uint32_t p, std::uint32_t k, std::uint32_t n);

std::string spec_name(const MapSpec& spec);

TruncatedMap identity_map(std::uint32_t p, std::uint32_t k, std::uint32_t n);

// ---- checks ---------------------------------------------------------------

/// Outcome of the compatibility scan. On failure, (level, x, y) is the first
/// witness in scan order (level ascending, then points ascending): x == y mod
/// p^{k*level} but the images differ at that modulus.
struct LipschitzReport {
    bool pass = true;
    std::uint32_t level = 0;
    std::uint64_t x = 0;
    std::uint64_t y = 0;
};

/// Compatibility at a single vector level m: table[x] mod p^{km} is a
/// function of x mod p^{km}.
bool level_well_defined(const TruncatedMap& map, std::uint32_t m);

/// Compatibility at every vector level m <= n (for k = 1 these are the scalar
/// levels). Vector levels are what the max-metric quantizes to; intermediate
/// scalar levels of k>1 tables are the conjugation module's business.
LipschitzReport is_one_lipschitz(const TruncatedMap& map);

/// The induced table on p^{km} points. Throws IllFormed if the level is not
/// well defined.
std::vector<std::uint32_t> reduced_table(const TruncatedMap& map, std::uint32_t m);

/// The map as a TruncatedMap at a lower level (same k).
TruncatedMap reduce_map(const TruncatedMap& map, std::uint32_t m);

/// Whether the reduced map at level m is a permutation. Throws IllFormed if
/// the reduction is not well defined.
bool is_bijective_at(const TruncatedMap& map, std::uint32_t m);

/// Bijective at every level m <= n.
bool is_measure_preserving_up_to(const TruncatedMap& map);

/// Multiset of cycle lengths of the level-m permutation, ascending.
/// Throws NotBijective (or IllFormed) if there is no permutation to walk.
std::vector<std::uint64_t> cycle_structure(const TruncatedMap& map, std::uint32_t m);

/// Single cycle of length p^{km}?
bool is_transitive_at(const TruncatedMap& map, std::uint32_t m);

/// Transitive at every level m <= n.
bool is_ergodic_up_to(const TruncatedMap& map);

// ---- algebra ----------------------------------------------------------------

/// compose(f, g): apply g first, then f.
TruncatedMap compose(const TruncatedMap& f, const TruncatedMap& g);

/// Table inversion; throws NotBijective if f is not a permutation at level n.
TruncatedMap invert(const TruncatedMap& f);

// ---- persistence ------------------------------------------------------------

/// One JSON object: {format_version:1, p, k, n, encoding:"interleaved",
/// table:[...]}. load_map validates every invariant and throws MapIoError on
/// anything malformed.
void save_map(const TruncatedMap& map, const std::filesystem::path& path);
TruncatedMap load_map(const std::filesystem::path& path);

}  // namespace padicdyn
