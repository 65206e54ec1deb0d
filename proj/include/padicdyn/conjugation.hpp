#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "padicdyn/maps.hpp"
#include "padicdyn/padic.hpp"

namespace padicdyn {

// Conjugation machinery: digit interleaving between Z_p^k and Z_p, orbit-block
// partitions of a per-level permutation, the block re-indexing transform, the
// permutation solver, and the forward/backward conjugation with exhaustive
// verification.

/// A permutation of the block indices {1, ..., p^k}. Stored 1-based:
/// images()[i-1] is the image of i.
class BlockPermutation {
public:
    explicit BlockPermutation(std::vector<std::uint32_t> images);

    static BlockPermutation identity(std::uint32_t size);

    std::uint32_t size() const { return static_cast<std::uint32_t>(images_.size()); }
    std::uint32_t operator()(std::uint32_t i) const { return images_[i - 1]; }
    const std::vector<std::uint32_t>& images() const { return images_; }

    BlockPermutation inverse() const;

    bool operator==(const BlockPermutation& other) const = default;

private:
    std::vector<std::uint32_t> images_;
};

/// Digit interleaving Z_p^k -> Z_p: component j digit i lands at scalar digit
/// position i*k + j. On encoded indices this is the identity (the canonical
/// encoding is the interleaved value); these functions carry the digit-level
/// meaning and the precision bookkeeping (k*n scalar digits).
TruncatedPadic interleave(const TruncatedVector& x);

/// Inverse of interleave; the scalar precision must be divisible by k.
TruncatedVector deinterleave(const TruncatedPadic& z, std::uint32_t k);

/// The decomposition of a level-m permutation D into blocks of length p^k.
///
/// Start class: points whose every component is 0 mod start_modulus (on
/// encoded indices: index == 0 mod start_modulus^k). Blocks use shifted
/// indexing: each point z carries the unique (x0, i) with i in {1,...,p^k} and
/// z = D^i(x0), where x0 is the start-class point reached by walking 1..p^k
/// steps backward. A start point therefore sits at index p^k of the previous
/// start's block. Exists iff start-class visits along every cycle are exactly
/// p^k apart.
struct OrbitPartition {
    std::uint32_t level = 1;            // m
    std::uint64_t block_len = 1;        // p^k
    std::uint64_t start_modulus = 2;    // s, per component
    std::vector<std::uint32_t> start_of;  // for each point: its x0
    std::vector<std::uint32_t> index_of;  // for each point: i in 1..p^k
    std::vector<std::uint32_t> starts;    // start-class points, ascending

    std::pair<std::uint32_t, std::uint32_t> locate(std::uint64_t z) const {
        return {start_of[z], index_of[z]};
    }
};

/// Partition the level-m permutation of `map` into orbit blocks.
/// start_modulus is the per-component modulus s (a power of p): s = p on the
/// vector side, s = p^k for k = 1 scalar tables. Throws IllFormed /
/// NotBijective for a non-permutation and PartitionError when start-class
/// spacing is not exactly the block length.
///
/// The block length defaults to p^k of the map itself; a scalar table that
/// stands in for a k-dimensional one takes it explicitly (the block length
/// belongs to the transform, not to the carrier space).
OrbitPartition orbit_blocks(const TruncatedMap& map, std::uint32_t m,
                            std::uint64_t start_modulus, std::uint64_t block_len);
OrbitPartition orbit_blocks(const TruncatedMap& map, std::uint32_t m,
                            std::uint64_t start_modulus);

/// The block transform at level m: for locate(z) = (x0, i), z maps to
/// D^{P(i)}(x0), with D the level-m reduction of `map` and the block length
/// taken from P. A permutation of the level-m points; the identity when P is
/// the identity.
TruncatedMap apply_block_transform(const TruncatedMap& map, const BlockPermutation& P,
                                   std::uint32_t m, std::uint64_t start_modulus);

/// x -> x + 1 mod p^k as a scalar table: the canonical single-cycle
/// compatible target.
TruncatedMap odometer_target(std::uint32_t p, std::uint32_t k);

/// Solve for the block permutation P that makes the conjugate of F agree with
/// `target` mod p^k. With y_i the encoded i-th iterate of the level-1
/// reduction of F starting at 0 (and y_{p^k} = y_0), P is the unique
/// permutation with y_{P(j+1)} = target(y_j) for all j.
///
/// Requires F transitive mod p and target a single-cycle compatible
/// permutation of Z/p^k (throws TargetNotSingleCycle / TargetNotCompatible).
BlockPermutation solve_block_permutation(const TruncatedMap& F, const TruncatedMap& target);

// ---- bundle ----------------------------------------------------------------

enum class CheckStatus : std::uint8_t { pass, fail, ill_formed };

struct ScalarWitness {
    std::uint32_t level = 0;
    std::uint64_t x = 0;
    std::uint64_t y = 0;
};

/// Verification record for one constructed level n (the scalar table G_n of
/// precision kn). Indices of the by-level vectors are scalar levels l-1 for
/// l = 1..kn. Statuses at levels not divisible by k are recorded findings,
/// not construction guarantees: bijective/transitive are ill_formed wherever
/// the level itself is not well defined.
struct LevelChecks {
    bool tower_ok = true;      // G_n mod p^{k(n-1)} == G_{n-1} (true for n = 1)
    bool t_inverse_ok = true;  // stored inverse == table inverse of T_n
    std::vector<CheckStatus> lipschitz;
    std::vector<CheckStatus> bijective;
    std::vector<CheckStatus> transitive;
    std::optional<ScalarWitness> lipschitz_witness;  // first failing level

    bool lipschitz_all_levels() const;
};

struct BundleChecks {
    std::vector<LevelChecks> levels;  // index n-1

    bool scalar_lipschitz_everywhere() const;
};

/// Everything the forward conjugation produces: F, the solved P, the tower of
/// scalar tables G_1..G_N, the per-level block transforms with their exact
/// inverses, and the verification record.
struct ConjugationBundle {
    std::uint32_t p = 2;
    std::uint32_t k = 2;
    std::uint32_t N = 1;
    TruncatedMap F;  // vector table at level N
    BlockPermutation P;
    std::string target_name = "odometer";
    std::vector<TruncatedMap> G;      // G[n-1]: scalar, precision k*n
    std::vector<TruncatedMap> T;      // T[n-1]: block transform at level n
    std::vector<TruncatedMap> T_inv;  // exact inverses of T
    BundleChecks checks;
};

/// Build G_n = T_n . F_n on encoded indices for every n <= N, verifying as it
/// goes. Construction-guaranteed properties (tower compatibility, exactness of
/// the stored T inverse, bijectivity and transitivity at levels divisible by
/// k) throw VerificationFailure when violated; the compatibility status at
/// the remaining scalar levels is recorded in the bundle for inspection.
/// Requires F transitive mod p^m for all m <= N.
ConjugationBundle conjugate_forward(const TruncatedMap& F, const BlockPermutation& P,
                                    std::uint32_t N);

/// Recover F mod p^n by composing the stored level-n T inverse with G_n.
/// Verifies the recovered table equals F mod p^n exactly and throws
/// VerificationFailure (with the first differing point) otherwise.
TruncatedMap conjugate_backward(const ConjugationBundle& bundle, std::uint32_t n);

/// Report of the scalar-side re-derivation experiment at level n: rebuild the
/// inverse block transform from G's OWN orbit blocks (start modulus p^k on
/// the scalar side), apply it after G, and compare with F mod p^n. Also
/// checks that building the transform before or after interleaving gives the
/// same table. Report-only: partition failures and counter-witnesses are
/// recorded, never thrown.
struct ConventionReport {
    std::uint32_t level = 1;
    std::uint64_t start_modulus = 0;  // per-component modulus used on the scalar side
    bool partition_ok = false;
    std::string partition_error;      // set when !partition_ok
    bool convention_holds = false;    // meaningful when partition_ok
    std::optional<ScalarWitness> counter_witness;  // x, recovered, expected
    bool commutation_ok = false;      // vector-side T == scalar-pullback T
};

ConventionReport verify_scalar_t_convention(const ConjugationBundle& bundle, std::uint32_t n,
                                            std::optional<std::uint64_t> start_modulus = {});

// ---- persistence -------------------------------------------------------------

/// Directory of map-table files F_n.map, G_n.map, T_n.map for n = 1..N plus
/// manifest.json {p, k, N, P, target, checks}.
void export_bundle(const ConjugationBundle& bundle, const std::filesystem::path& dir);

/// Rebuild a bundle from an exported directory: T inverses are recomputed by
/// table inversion and the whole construction is re-verified (throws
/// VerificationFailure on tampering, MapIoError on malformed input).
ConjugationBundle import_bundle(const std::filesystem::path& dir);

}  // namespace padicdyn
