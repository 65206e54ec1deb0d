#include "padicdyn/prng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "padicdyn/rng.hpp"

namespace padicdyn {

namespace {

void check_shape(std::uint32_t p, std::uint32_t k, std::uint32_t n) {
    if (!is_small_prime(p) || p > kMaxPrime) {
        throw std::invalid_argument("p must be a prime <= " + std::to_string(kMaxPrime));
    }
    if (k < 1 || n < 1) throw std::invalid_argument("k and n must be >= 1");
    if (pow_u64(p, k * n) > kMaxPoints) {
        throw std::invalid_argument("p^{kn} exceeds configured bound");
    }
}

std::vector<std::uint32_t> random_block_perm(Rng& rng, std::uint64_t B) {
    std::vector<std::uint32_t> perm(B);
    std::iota(perm.begin(), perm.end(), 0u);
    rng.shuffle(perm);
    return perm;
}

// Extend a level-m table by one level using fresh per-class permutations of
// the p^k digit-vectors. Puts the drawn perms into node_perms when asked.
std::vector<std::uint32_t> grow_level(Rng& rng, const std::vector<std::uint32_t>& tab,
                                      std::uint64_t B,
                                      std::vector<std::uint32_t>* node_perms) {
    const std::uint64_t M = tab.size();
    std::vector<std::uint32_t> next(M * B);
    for (std::uint64_t c = 0; c < M; ++c) {
        const std::vector<std::uint32_t> pi = random_block_perm(rng, B);
        for (std::uint64_t t = 0; t < B; ++t) {
            next[c + t * M] = static_cast<std::uint32_t>(tab[c] + pi[t] * M);
        }
        if (node_perms) {
            node_perms->insert(node_perms->end(), pi.begin(), pi.end());
        }
    }
    return next;
}

bool single_cycle(const std::vector<std::uint32_t>& tab) {
    std::uint64_t x = 0;
    std::uint64_t steps = 0;
    do {
        x = tab[x];
        ++steps;
    } while (x != 0);
    return steps == tab.size();
}

}  // namespace

TreeSampledMap tree_sample(std::uint32_t p, std::uint32_t k, std::uint32_t n,
                           std::uint64_t seed) {
    check_shape(p, k, n);
    const std::uint64_t B = pow_u64(p, k);
    Rng rng(seed);

    TreeSampledMap out;
    out.p = p;
    out.k = k;
    out.n = n;
    out.seed = seed;
    out.node_perms.resize(n);

    std::vector<std::uint32_t> tab = random_block_perm(rng, B);
    out.node_perms[0] = tab;
    for (std::uint32_t m = 1; m < n; ++m) {
        tab = grow_level(rng, tab, B, &out.node_perms[m]);
    }
    out.table = TruncatedMap{p, k, n, std::move(tab),
                             "tree(" + std::to_string(seed) + ")"};
    return out;
}

TruncatedMap tree_sampled_table(std::uint32_t p, std::uint32_t k, std::uint32_t n,
                                std::uint64_t seed) {
    return tree_sample(p, k, n, seed).table;
}

TruncatedMap sample_transitive(std::uint32_t p, std::uint32_t k, std::uint32_t n,
                               std::uint64_t seed, std::uint64_t max_retries) {
    check_shape(p, k, n);
    if (max_retries < 1) throw std::invalid_argument("max_retries must be >= 1");
    const std::uint64_t B = pow_u64(p, k);
    Rng rng(seed);

    for (std::uint64_t attempt = 0; attempt < max_retries; ++attempt) {
        std::vector<std::uint32_t> tab = random_block_perm(rng, B);
        if (!single_cycle(tab)) continue;
        bool ok = true;
        for (std::uint32_t m = 1; m < n; ++m) {
            tab = grow_level(rng, tab, B, nullptr);
            if (!single_cycle(tab)) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;

        TruncatedMap map{p, k, n, std::move(tab),
                         "tree-transitive(" + std::to_string(seed) + ")"};
        // The construction guarantees these; keep the cheap paranoia.
        if (!is_one_lipschitz(map).pass || !is_measure_preserving_up_to(map) ||
            !is_ergodic_up_to(map)) {
            throw NoSolution("sampled map failed its construction guarantees");
        }
        return map;
    }
    throw RetriesExhausted("no transitive map found in " + std::to_string(max_retries) +
                           " attempts");
}

std::vector<std::uint64_t> keystream(const KeystreamConfig& cfg) {
    if (cfg.count < 1) throw std::invalid_argument("count must be >= 1");
    const TruncatedMap map = induce(cfg.spec, cfg.p, cfg.k, cfg.n);
    if (cfg.state >= map.size()) throw std::invalid_argument("state out of range");
    if (!is_one_lipschitz(map).pass || !is_measure_preserving_up_to(map)) {
        throw NotBijective("keystream map must be measure preserving up to level n");
    }
    std::vector<std::uint64_t> out;
    out.reserve(cfg.count);
    std::uint64_t s = cfg.state;
    for (std::uint64_t i = 0; i < cfg.count; ++i) {
        s = map.table[s];
        out.push_back(cfg.extractor == Extractor::low_digit ? s % cfg.p : s);
    }
    return out;
}

std::vector<std::uint8_t> pack_bits(const std::vector<std::uint64_t>& digits) {
    std::vector<std::uint8_t> bytes((digits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (digits[i] > 1) throw std::invalid_argument("pack_bits needs binary digits");
        bytes[i / 8] |= static_cast<std::uint8_t>(digits[i] << (i % 8));
    }
    return bytes;
}

std::uint64_t UniformityReport::max_deviation() const {
    std::uint64_t worst = 0;
    for (const auto& l : levels) worst = std::max(worst, l.max_deviation);
    return worst;
}

UniformityReport uniformity_report(const TruncatedMap& map, std::uint32_t n) {
    if (n < 1 || n > map.n) throw std::invalid_argument("level out of range");
    if (!is_transitive_at(map, n)) {
        throw NotTransitive("map is not transitive at level " + std::to_string(n));
    }
    const std::vector<std::uint32_t> t = reduced_table(map, n);

    UniformityReport report;
    report.period = t.size();
    report.levels.resize(n);
    for (std::uint32_t m = 1; m <= n; ++m) {
        auto& lvl = report.levels[m - 1];
        lvl.m = m;
        lvl.class_count = map.modulus_at(m);
        lvl.expected = pow_u64(map.p, map.k * (n - m));
        lvl.histogram.assign(lvl.class_count, 0);
    }

    std::uint64_t x = 0;
    for (std::uint64_t step = 0; step < report.period; ++step) {
        x = t[x];
        for (auto& lvl : report.levels) ++lvl.histogram[x % lvl.class_count];
    }
    for (auto& lvl : report.levels) {
        for (std::uint64_t count : lvl.histogram) {
            const std::uint64_t dev =
                count > lvl.expected ? count - lvl.expected : lvl.expected - count;
            lvl.max_deviation = std::max(lvl.max_deviation, dev);
        }
    }
    return report;
}

}  // namespace padicdyn
