#include "padicdyn/maps.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

#include "json.hpp"
#include "padicdyn/prng.hpp"

namespace padicdyn {

std::uint64_t TruncatedMap::modulus_at(std::uint32_t m) const {
    return pow_u64(p, k * m);
}

void TruncatedMap::validate() const {
    if (!is_small_prime(p) || p > kMaxPrime) {
        throw std::invalid_argument("p must be a prime <= " + std::to_string(kMaxPrime));
    }
    if (k < 1 || n < 1) throw std::invalid_argument("k and n must be >= 1");
    const std::uint64_t points = pow_u64(p, k * n);
    if (points > kMaxPoints) throw std::invalid_argument("p^{kn} exceeds configured bound");
    if (table.size() != points) throw std::invalid_argument("table length must equal p^{kn}");
    for (std::uint32_t v : table) {
        if (v >= points) throw std::invalid_argument("table entry out of range");
    }
}

TruncatedMap identity_map(std::uint32_t p, std::uint32_t k, std::uint32_t n) {
    TruncatedMap m{p, k, n, {}, "identity"};
    const std::uint64_t size = pow_u64(p, k * n);
    if (size > kMaxPoints) throw std::invalid_argument("p^{kn} exceeds configured bound");
    m.table.resize(size);
    for (std::uint64_t x = 0; x < size; ++x) m.table[x] = static_cast<std::uint32_t>(x);
    return m;
}

std::string spec_name(const MapSpec& spec) {
    struct Namer {
        std::string operator()(const OdometerSpec& s) const {
            return "odometer(" + std::to_string(s.c) + ")";
        }
        std::string operator()(const AffineSpec& s) const {
            return "affine(" + std::to_string(s.a) + "," + std::to_string(s.b) + ")";
        }
        std::string operator()(const InterleavedOdometerSpec&) const {
            return "interleaved-odometer";
        }
        std::string operator()(const IdentitySpec&) const { return "identity"; }
        std::string operator()(const TreeSampledSpec& s) const {
            return "tree(" + std::to_string(s.seed) + ")";
        }
        std::string operator()(const TableSpec& s) const { return s.map.provenance; }
    };
    return std::visit(Namer{}, spec);
}

TruncatedMap induce(const MapSpec& spec, std::uint32_t p, std::uint32_t k,
                    std::uint32_t n) {
    const std::uint64_t size = pow_u64(p, k * n);
    if (size > kMaxPoints) throw std::invalid_argument("p^{kn} exceeds configured bound");

    TruncatedMap out{p, k, n, {}, spec_name(spec)};

    if (const auto* od = std::get_if<OdometerSpec>(&spec)) {
        if (k != 1) throw ShapeMismatch("odometer is a map on Z_p; use k=1");
        const std::uint64_t c = od->c % size;
        out.table.resize(size);
        for (std::uint64_t x = 0; x < size; ++x) {
            out.table[x] = static_cast<std::uint32_t>((x + c) % size);
        }
    } else if (const auto* af = std::get_if<AffineSpec>(&spec)) {
        if (k != 1) throw ShapeMismatch("affine maps are on Z_p; use k=1");
        const std::uint64_t a = af->a % size;
        const std::uint64_t b = af->b % size;
        out.table.resize(size);
        for (std::uint64_t x = 0; x < size; ++x) {
            out.table[x] = static_cast<std::uint32_t>((a * x + b) % size);
        }
    } else if (std::holds_alternative<InterleavedOdometerSpec>(spec)) {
        // deinterleave . (+1) . interleave; on interleaved indices that is
        // plain +1 mod p^{kn} (exercised digit-wise in the tests).
        out.table.resize(size);
        for (std::uint64_t x = 0; x < size; ++x) {
            out.table[x] = static_cast<std::uint32_t>((x + 1) % size);
        }
    } else if (std::holds_alternative<IdentitySpec>(spec)) {
        out = identity_map(p, k, n);
    } else if (const auto* tr = std::get_if<TreeSampledSpec>(&spec)) {
        out = tree_sampled_table(p, k, n, tr->seed);
    } else if (const auto* tb = std::get_if<TableSpec>(&spec)) {
        const TruncatedMap& src = tb->map;
        if (src.p != p || src.k != k) throw ShapeMismatch("table spec disagrees on (p, k)");
        if (src.n < n) throw ShapeMismatch("table spec has too little precision");
        out = src.n == n ? src : reduce_map(src, n);
    }
    out.validate();
    return out;
}

bool level_well_defined(const TruncatedMap& map, std::uint32_t m) {
    const std::uint64_t M = map.modulus_at(m);
    for (std::uint64_t x = M; x < map.size(); ++x) {
        if (map.table[x] % M != map.table[x % M] % M) return false;
    }
    return true;
}

LipschitzReport is_one_lipschitz(const TruncatedMap& map) {
    for (std::uint32_t m = 1; m <= map.n; ++m) {
        const std::uint64_t M = map.modulus_at(m);
        // The first point of each residue class in ascending scan is the
        // class value itself, so it serves as the comparison representative.
        for (std::uint64_t x = M; x < map.size(); ++x) {
            if (map.table[x] % M != map.table[x % M] % M) {
                return {false, m, x % M, x};
            }
        }
    }
    return {};
}

std::vector<std::uint32_t> reduced_table(const TruncatedMap& map, std::uint32_t m) {
    if (m < 1 || m > map.n) throw std::invalid_argument("level out of range");
    if (!level_well_defined(map, m)) {
        throw IllFormed("reduction at level " + std::to_string(m) + " is not well defined");
    }
    const std::uint64_t M = map.modulus_at(m);
    std::vector<std::uint32_t> t(M);
    for (std::uint64_t r = 0; r < M; ++r) t[r] = static_cast<std::uint32_t>(map.table[r] % M);
    return t;
}

TruncatedMap reduce_map(const TruncatedMap& map, std::uint32_t m) {
    TruncatedMap out{map.p, map.k, m, reduced_table(map, m), map.provenance};
    return out;
}

namespace {

bool table_is_permutation(const std::vector<std::uint32_t>& t) {
    std::vector<bool> seen(t.size(), false);
    for (std::uint32_t v : t) {
        if (v >= t.size() || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

}  // namespace

bool is_bijective_at(const TruncatedMap& map, std::uint32_t m) {
    return table_is_permutation(reduced_table(map, m));
}

bool is_measure_preserving_up_to(const TruncatedMap& map) {
    for (std::uint32_t m = 1; m <= map.n; ++m) {
        if (!is_bijective_at(map, m)) return false;
    }
    return true;
}

std::vector<std::uint64_t> cycle_structure(const TruncatedMap& map, std::uint32_t m) {
    const std::vector<std::uint32_t> t = reduced_table(map, m);
    if (!table_is_permutation(t)) {
        throw NotBijective("level " + std::to_string(m) + " table is not a permutation");
    }
    std::vector<bool> visited(t.size(), false);
    std::vector<std::uint64_t> lengths;
    for (std::uint64_t x0 = 0; x0 < t.size(); ++x0) {
        if (visited[x0]) continue;
        std::uint64_t len = 0;
        std::uint64_t x = x0;
        while (!visited[x]) {
            visited[x] = true;
            x = t[x];
            ++len;
        }
        lengths.push_back(len);
    }
    std::sort(lengths.begin(), lengths.end());
    return lengths;
}

bool is_transitive_at(const TruncatedMap& map, std::uint32_t m) {
    const std::vector<std::uint32_t> t = reduced_table(map, m);
    if (!table_is_permutation(t)) {
        throw NotBijective("level " + std::to_string(m) + " table is not a permutation");
    }
    std::uint64_t x = 0;
    std::uint64_t steps = 0;
    do {
        x = t[x];
        ++steps;
    } while (x != 0);
    return steps == t.size();
}

bool is_ergodic_up_to(const TruncatedMap& map) {
    for (std::uint32_t m = 1; m <= map.n; ++m) {
        if (!is_transitive_at(map, m)) return false;
    }
    return true;
}

TruncatedMap compose(const TruncatedMap& f, const TruncatedMap& g) {
    if (f.p != g.p || f.k != g.k || f.n != g.n) {
        throw ShapeMismatch("compose requires matching (p, k, n)");
    }
    TruncatedMap out{f.p, f.k, f.n, std::vector<std::uint32_t>(f.size()), "composed"};
    for (std::uint64_t x = 0; x < f.size(); ++x) out.table[x] = f.table[g.table[x]];
    return out;
}

TruncatedMap invert(const TruncatedMap& f) {
    TruncatedMap out{f.p, f.k, f.n, std::vector<std::uint32_t>(f.size()), "inverted"};
    std::vector<bool> seen(f.size(), false);
    for (std::uint64_t x = 0; x < f.size(); ++x) {
        const std::uint32_t y = f.table[x];
        if (seen[y]) throw NotBijective("map is not a permutation at level n");
        seen[y] = true;
        out.table[y] = static_cast<std::uint32_t>(x);
    }
    return out;
}

void save_map(const TruncatedMap& map, const std::filesystem::path& path) {
    map.validate();
    nlohmann::json j;
    j["format_version"] = 1;
    j["p"] = map.p;
    j["k"] = map.k;
    j["n"] = map.n;
    j["encoding"] = "interleaved";
    j["table"] = map.table;
    std::ofstream out(path);
    if (!out) throw MapIoError("cannot open " + path.string() + " for writing");
    out << j.dump() << '\n';
}

TruncatedMap load_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MapIoError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw MapIoError(path.string() + ": " + e.what());
    }
    TruncatedMap map;
    try {
        if (j.at("format_version").get<int>() != 1) {
            throw MapIoError(path.string() + ": unsupported format_version");
        }
        if (j.at("encoding").get<std::string>() != "interleaved") {
            throw MapIoError(path.string() + ": unsupported encoding");
        }
        map.p = j.at("p").get<std::uint32_t>();
        map.k = j.at("k").get<std::uint32_t>();
        map.n = j.at("n").get<std::uint32_t>();
        map.table = j.at("table").get<std::vector<std::uint32_t>>();
    } catch (const nlohmann::json::exception& e) {
        throw MapIoError(path.string() + ": " + e.what());
    }
    map.provenance = "file:" + path.string();
    try {
        map.validate();
    } catch (const std::exception& e) {
        throw MapIoError(path.string() + ": " + e.what());
    }
    return map;
}

}  // namespace padicdyn
