// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
// Everything here is exact (zero tolerance); there are no numeric thresholds
// to calibrate.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "padicdyn/conjugation.hpp"
#include "padicdyn/maps.hpp"
#include "padicdyn/prng.hpp"
#include "padicdyn/rng.hpp"

using namespace padicdyn;

namespace {

struct Criterion {
    int id;
    std::string title;
    bool pass = true;
    std::vector<std::string> notes;

    void fail(const std::string& why) {
        pass = false;
        if (notes.size() < 8) notes.push_back(why);
    }
};

constexpr std::uint64_t kMaxRetries = 1u << 22;
constexpr int kSampledMaps = 20;

// Levels with p^{kn} <= 2^16 at k = 2.
std::uint32_t max_level(std::uint32_t p) {
    std::uint32_t n = 0;
    while (pow_u64(p, 2 * (n + 1)) <= (1u << 16)) ++n;
    return n;
}

struct RunStats {
    int bundles = 0;
    int convention_holds = 0;
    int convention_counter = 0;
    int lipschitz_clean = 0;
    int lipschitz_witnessed = 0;
};

// The shared run over criterion 1's map population. Feeds criteria 1-4, 6, 8
// and the transitive half of 7.
void theorem_runs(std::vector<Criterion>& cs, RunStats& stats) {
    Criterion& c1 = cs[0];
    Criterion& c2 = cs[1];
    Criterion& c3 = cs[2];
    Criterion& c4 = cs[3];
    Criterion& c6 = cs[5];
    Criterion& c7 = cs[6];
    Criterion& c8 = cs[7];

    for (std::uint32_t p : {2u, 3u}) {
        const std::uint32_t N = max_level(p);
        const std::uint64_t B = pow_u64(p, 2);
        const TruncatedMap target = odometer_target(p, 2);

        std::vector<TruncatedMap> population;
        population.push_back(induce(InterleavedOdometerSpec{}, p, 2, N));
        for (int i = 0; i < kSampledMaps; ++i) {
            population.push_back(sample_transitive(p, 2, N, 1000 + i, kMaxRetries));
        }

        for (const TruncatedMap& F : population) {
            const std::string tag =
                "p=" + std::to_string(p) + " " + F.provenance;

            // criterion 2 precondition (the forward direction's hypothesis)
            for (std::uint32_t m = 1; m <= N; ++m) {
                if (!is_transitive_at(F, m)) {
                    c2.fail(tag + ": F not transitive at level " + std::to_string(m));
                }
            }

            ConjugationBundle bundle = [&] {
                try {
                    return conjugate_forward(F, solve_block_permutation(F, target), N);
                } catch (const std::exception& e) {
                    c1.fail(tag + ": forward construction failed: " + e.what());
                    throw;
                }
            }();
            ++stats.bundles;

            // criterion 1: exact round trip at every level
            for (std::uint32_t n = 1; n <= N; ++n) {
                try {
                    const TruncatedMap rec = conjugate_backward(bundle, n);
                    if (rec.table != reduce_map(F, n).table) {
                        c1.fail(tag + ": mismatch at level " + std::to_string(n));
                    }
                } catch (const std::exception& e) {
                    c1.fail(tag + ": backward failed at level " + std::to_string(n) +
                            ": " + e.what());
                }
            }

            // criterion 2: G transitive mod p^{km} for all m <= N, and mod p^k
            const TruncatedMap& G_N = bundle.G[N - 1];
            if (!is_transitive_at(G_N, 2)) {
                c2.fail(tag + ": G not transitive mod p^k");
            }
            for (std::uint32_t m = 1; m <= N; ++m) {
                if (!is_transitive_at(G_N, 2 * m)) {
                    c2.fail(tag + ": G not transitive at scalar level " +
                            std::to_string(2 * m));
                }
            }

            // criterion 3: tower compatibility between consecutive levels
            for (std::uint32_t n = 1; n < N; ++n) {
                const TruncatedMap& lo = bundle.G[n - 1];
                const TruncatedMap& hi = bundle.G[n];
                const std::uint64_t M = lo.size();
                for (std::uint64_t z = 0; z < hi.size(); ++z) {
                    if (hi.table[z] % M != lo.table[z % M]) {
                        c3.fail(tag + ": tower broken between " + std::to_string(n) +
                                " and " + std::to_string(n + 1));
                        break;
                    }
                }
            }

            // criterion 4: scalar compatibility at ALL levels
            bool clean = true;
            for (std::uint32_t n = 1; n <= N; ++n) {
                const LevelChecks& checks = bundle.checks.levels[n - 1];
                if (!checks.lipschitz_all_levels()) {
                    clean = false;
                    const ScalarWitness w = *checks.lipschitz_witness;
                    c4.fail(tag + ": G_" + std::to_string(n) +
                            " not one-lipschitz at scalar level " + std::to_string(w.level) +
                            "; witness x=" + std::to_string(w.x) +
                            " y=" + std::to_string(w.y) + " images " +
                            std::to_string(bundle.G[n - 1].table[w.x]) + "," +
                            std::to_string(bundle.G[n - 1].table[w.y]));
                    break;
                }
            }
            clean ? ++stats.lipschitz_clean : ++stats.lipschitz_witnessed;

            // criterion 6: block structure at every level
            for (std::uint32_t m = 1; m <= N; ++m) {
                try {
                    const OrbitPartition part = orbit_blocks(F, m, p);
                    const auto D = reduced_table(F, m);
                    if (part.starts.size() != D.size() / B) {
                        c6.fail(tag + ": start count wrong at level " + std::to_string(m));
                    }
                    for (std::uint32_t z0 : part.starts) {
                        std::uint64_t x = z0;
                        for (std::uint64_t step = 0; step < B; ++step) x = D[x];
                        if (x % B != 0) {
                            c6.fail(tag + ": D^{p^k} leaves the start class at level " +
                                    std::to_string(m));
                            break;
                        }
                    }
                } catch (const std::exception& e) {
                    c6.fail(tag + ": orbit_blocks failed at level " + std::to_string(m) +
                            ": " + e.what());
                }
            }

            // criterion 7, transitive population: exact full-period counts for F
            // and for the constructed G
            try {
                if (uniformity_report(F, N).max_deviation() != 0) {
                    c7.fail(tag + ": F full-period counts deviate");
                }
                if (uniformity_report(G_N, 2 * N).max_deviation() != 0) {
                    c7.fail(tag + ": G full-period counts deviate");
                }
            } catch (const std::exception& e) {
                c7.fail(tag + std::string(": uniformity_report failed: ") + e.what());
            }

            // criterion 8: the convention report must deliver a verdict for
            // every bundle; only machinery errors fail the criterion
            try {
                const ConventionReport report = verify_scalar_t_convention(bundle, N);
                if (!report.partition_ok) {
                    c8.fail(tag + ": scalar-side partition failed: " +
                            report.partition_error);
                } else if (report.convention_holds) {
                    ++stats.convention_holds;
                } else if (report.counter_witness.has_value()) {
                    ++stats.convention_counter;
                } else {
                    c8.fail(tag + ": verdict missing a counter-witness");
                }
                if (!report.commutation_ok) {
                    c8.fail(tag + ": interleave/transform commutation failed");
                }
            } catch (const std::exception& e) {
                c8.fail(tag + std::string(": report machinery error: ") + e.what());
            }
        }
    }
}

// criterion 2, reverse direction: a non-ergodic F must be rejected (or yield a
// non-transitive G); exercised on maps transitive mod p but not everywhere.
void ergodicity_reverse(Criterion& c2) {
    int exercised = 0;
    for (std::uint64_t seed = 0; seed < 400 && exercised < 10; ++seed) {
        const TruncatedMap F = tree_sampled_table(2, 2, 3, seed);
        if (!is_transitive_at(F, 1) || is_ergodic_up_to(F)) continue;
        ++exercised;
        try {
            const auto bundle =
                conjugate_forward(F, solve_block_permutation(F, odometer_target(2, 2)), 3);
            // if construction went through anyway, G must fail transitivity
            bool g_transitive = true;
            for (std::uint32_t m = 1; m <= 3; ++m) {
                g_transitive = g_transitive && is_transitive_at(bundle.G[2], 2 * m);
            }
            if (g_transitive) {
                c2.fail("non-ergodic F seed " + std::to_string(seed) +
                        " produced a fully transitive G");
            }
        } catch (const NotTransitive&) {
            // expected rejection
        } catch (const PartitionError&) {
            // acceptable: the partition itself can fail at the bad level
        }
    }
    if (exercised < 10) c2.fail("reverse direction under-exercised");
}

// criterion 5: checkers vs literal brute-force quantifier oracles.
void oracle_agreement(Criterion& c5) {
    struct Shape {
        std::uint32_t p, k, n;
    };
    const std::vector<Shape> shapes = {
        {2, 1, 6}, {2, 2, 3}, {2, 1, 12}, {3, 1, 4}, {3, 2, 2}, {5, 1, 3}, {7, 1, 2},
    };
    Rng rng(4242);
    int tested = 0;

    auto outcomes_match = [&](const TruncatedMap& map, const std::string& tag) {
        for (std::uint32_t m = 1; m <= map.n; ++m) {
            const std::uint64_t M = map.modulus_at(m);
            const oracles::LevelOutcomes expected = oracles::outcomes_at(map.table, M);

            const bool lip = level_well_defined(map, m);
            if (lip != (expected.lipschitz == oracles::Outcome::pass)) {
                c5.fail(tag + ": lipschitz disagrees at level " + std::to_string(m));
                return;
            }
            oracles::Outcome bij, tra;
            try {
                bij = is_bijective_at(map, m) ? oracles::Outcome::pass
                                              : oracles::Outcome::fail;
            } catch (const IllFormed&) {
                bij = oracles::Outcome::ill_formed;
            }
            try {
                tra = is_transitive_at(map, m) ? oracles::Outcome::pass
                                               : oracles::Outcome::fail;
            } catch (const Error&) {
                tra = oracles::Outcome::ill_formed;
            }
            if (bij != expected.bijective) {
                c5.fail(tag + ": bijectivity disagrees at level " + std::to_string(m));
                return;
            }
            if (tra != expected.transitive) {
                c5.fail(tag + ": transitivity disagrees at level " + std::to_string(m));
                return;
            }
        }
    };

    for (const Shape& s : shapes) {
        const std::uint64_t size = pow_u64(s.p, s.k * s.n);
        if (size > (1u << 12)) continue;
        for (int i = 0; i < 8; ++i) {
            // fully random tables: mostly incompatible
            TruncatedMap random_map{s.p, s.k, s.n, std::vector<std::uint32_t>(size), "random"};
            for (auto& v : random_map.table) {
                v = static_cast<std::uint32_t>(rng.below(size));
            }
            outcomes_match(random_map, "random table");
            ++tested;

            // compatible bijections, sometimes transitive
            outcomes_match(tree_sampled_table(s.p, s.k, s.n, rng.next()), "tree table");
            ++tested;

            // compatible but sometimes non-bijective: clamp a few entries
            TruncatedMap squashed = tree_sampled_table(s.p, s.k, s.n, rng.next());
            squashed.table[rng.below(size)] = static_cast<std::uint32_t>(rng.below(size));
            outcomes_match(squashed, "squashed table");
            ++tested;
        }
    }
    if (tested < 100) {
        c5.fail("only " + std::to_string(tested) + " tables exercised");
    }
}

// criterion 7, dedicated sweeps beyond the criterion-1 population.
void uniformity_sweeps(Criterion& c7) {
    try {
        if (uniformity_report(induce(OdometerSpec{1}, 2, 1, 4), 4).max_deviation() != 0) {
            c7.fail("odometer p=2 n=4 counts deviate");
        }
        if (uniformity_report(induce(OdometerSpec{1}, 5, 1, 4), 4).max_deviation() != 0) {
            c7.fail("odometer p=5 n=4 counts deviate");
        }
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const TruncatedMap m = sample_transitive(2, 2, 3, seed, kMaxRetries);
            if (uniformity_report(m, 3).max_deviation() != 0) {
                c7.fail("sampled map seed " + std::to_string(seed) + " counts deviate");
            }
        }
    } catch (const std::exception& e) {
        c7.fail(std::string("uniformity sweep error: ") + e.what());
    }
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<Criterion> cs = {
        {1, "theorem round trip is exact at every level (p in {2,3}, k=2)", true, {}},
        {2, "ergodicity transfers in both directions", true, {}},
        {3, "tower compatibility is exact", true, {}},
        {4, "scalar compatibility holds at ALL levels of every constructed G", true, {}},
        {5, "checkers agree with brute-force oracles on random tables", true, {}},
        {6, "orbit blocks tile every level with spacing p^k", true, {}},
        {7, "full-period counts are exactly uniform at every level", true, {}},
        {8, "scalar-side convention report delivers a verdict per bundle", true, {}},
    };

    RunStats stats;
    theorem_runs(cs, stats);
    ergodicity_reverse(cs[1]);
    oracle_agreement(cs[4]);
    uniformity_sweeps(cs[6]);

    cs[0].notes.push_back(std::to_string(stats.bundles) + " bundles built");
    cs[3].notes.push_back(std::to_string(stats.lipschitz_clean) + " maps clean, " +
                          std::to_string(stats.lipschitz_witnessed) +
                          " maps with counter-witnesses");
    cs[7].notes.push_back("convention held for " + std::to_string(stats.convention_holds) +
                          ", counter-witness for " +
                          std::to_string(stats.convention_counter) + " bundles");

    bool all_pass = true;
    for (const Criterion& c : cs) {
        all_pass = all_pass && c.pass;
        std::printf("[%s] criterion %d: %s\n", c.pass ? "PASS" : "FAIL", c.id,
                    c.title.c_str());
        for (const std::string& note : c.notes) {
            std::printf("         %s\n", note.c_str());
        }
    }

    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    std::printf("total runtime: %lld ms (budget 60000 ms)\n",
                static_cast<long long>(elapsed));
    if (elapsed > 60000) {
        std::printf("[FAIL] runtime budget exceeded\n");
        all_pass = false;
    }
    return all_pass ? 0 : 1;
}
