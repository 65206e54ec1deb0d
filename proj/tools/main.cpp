// Command-line surface for the toolkit.
//
// Exit codes: 0 all requested checks pass, 1 a check failed, 2 usage error,
// 3 internal error. Every failure prints a machine-parseable WITNESS line.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "padicdyn/conjugation.hpp"
#include "padicdyn/maps.hpp"
#include "padicdyn/prng.hpp"

using namespace padicdyn;
using nlohmann::json;

namespace {

struct CommonFlags {
    std::uint32_t p = 2;
    std::uint32_t k = 1;
    std::uint32_t n = 1;
    std::string spec = "odometer";
    std::uint64_t seed = 0;
    std::uint64_t retries = 1u << 22;
    std::string format = "text";
    std::string in_path;
    std::string out_path;
};

void add_shape_flags(CLI::App* cmd, CommonFlags& f, bool required = true) {
    cmd->add_option("-p,--prime", f.p, "prime modulus")->required(required);
    cmd->add_option("-k,--dimension", f.k, "Cartesian power");
    cmd->add_option("-n,-N,--levels", f.n, "precision / verification level")
        ->required(required);
    cmd->add_option("--spec", f.spec,
                    "map: odometer[:c] | affine:a:b | interleaved-odometer | identity | "
                    "tree[:seed] | tree-transitive[:seed] | file:PATH");
    cmd->add_option("--seed", f.seed, "seed for sampled specs");
    cmd->add_option("--retries", f.retries, "rejection budget for tree-transitive");
    cmd->add_option("--format", f.format, "text | json (keystream: text | raw)");
}

void validate_shape(const CommonFlags& f) {
    if (!is_small_prime(f.p) || f.p > kMaxPrime) {
        throw std::invalid_argument("p must be a prime <= " + std::to_string(kMaxPrime));
    }
    if (f.k < 1 || f.n < 1) throw std::invalid_argument("k and n must be >= 1");
    if (pow_u64(f.p, f.k * f.n) > kMaxPoints) {
        throw std::invalid_argument("p^{kn} exceeds the configured bound 2^24");
    }
    if (f.format != "text" && f.format != "json" && f.format != "raw") {
        throw std::invalid_argument("unknown --format " + f.format);
    }
}

std::uint64_t parse_u64(const std::string& s) {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad integer '" + s + "'");
    return v;
}

TruncatedMap make_map(const CommonFlags& f) {
    const std::string& s = f.spec;
    auto rest = [&](std::size_t at) { return s.substr(at); };
    if (s == "odometer") return induce(OdometerSpec{1}, f.p, f.k, f.n);
    if (s.rfind("odometer:", 0) == 0) {
        return induce(OdometerSpec{parse_u64(rest(9))}, f.p, f.k, f.n);
    }
    if (s.rfind("affine:", 0) == 0) {
        const std::string ab = rest(7);
        const std::size_t colon = ab.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("affine needs a:b");
        return induce(AffineSpec{parse_u64(ab.substr(0, colon)),
                                 parse_u64(ab.substr(colon + 1))},
                      f.p, f.k, f.n);
    }
    if (s == "interleaved-odometer") return induce(InterleavedOdometerSpec{}, f.p, f.k, f.n);
    if (s == "identity") return induce(IdentitySpec{}, f.p, f.k, f.n);
    if (s == "tree") return induce(TreeSampledSpec{f.seed}, f.p, f.k, f.n);
    if (s.rfind("tree:", 0) == 0) {
        return induce(TreeSampledSpec{parse_u64(rest(5))}, f.p, f.k, f.n);
    }
    if (s == "tree-transitive") return sample_transitive(f.p, f.k, f.n, f.seed, f.retries);
    if (s.rfind("tree-transitive:", 0) == 0) {
        return sample_transitive(f.p, f.k, f.n, parse_u64(rest(16)), f.retries);
    }
    if (s.rfind("file:", 0) == 0) {
        TruncatedMap m = load_map(rest(5));
        if (m.p != f.p || m.k != f.k) throw std::invalid_argument("file disagrees on (p, k)");
        if (m.n < f.n) throw std::invalid_argument("file has too little precision");
        return m.n == f.n ? m : reduce_map(m, f.n);
    }
    throw std::invalid_argument("unknown --spec " + s);
}

// per-level findings of `check`
struct LevelFinding {
    std::string lipschitz = "pass";
    std::string bijective = "pass";
    std::string transitive = "pass";
    std::vector<std::string> witnesses;
    bool ok() const {
        return lipschitz == "pass" && bijective == "pass" && transitive == "pass";
    }
};

LevelFinding check_level(const TruncatedMap& map, std::uint32_t m) {
    LevelFinding out;
    const std::uint64_t M = map.modulus_at(m);
    for (std::uint64_t x = M; x < map.size(); ++x) {
        if (map.table[x] % M != map.table[x % M] % M) {
            out.lipschitz = "fail";
            out.witnesses.push_back("WITNESS check=one-lipschitz level=" +
                                    std::to_string(m) + " x=" + std::to_string(x % M) +
                                    " y=" + std::to_string(x) +
                                    " fx=" + std::to_string(map.table[x % M] % M) +
                                    " fy=" + std::to_string(map.table[x] % M));
            break;
        }
    }
    if (out.lipschitz != "pass") {
        out.bijective = "ill-formed";
        out.transitive = "ill-formed";
        return out;
    }
    // first image collision, if any
    std::vector<std::uint32_t> first(M, UINT32_MAX);
    for (std::uint64_t r = 0; r < M; ++r) {
        const std::uint32_t img = static_cast<std::uint32_t>(map.table[r] % M);
        if (first[img] != UINT32_MAX) {
            out.bijective = "fail";
            out.witnesses.push_back("WITNESS check=bijective level=" + std::to_string(m) +
                                    " x=" + std::to_string(first[img]) +
                                    " y=" + std::to_string(r) +
                                    " image=" + std::to_string(img));
            break;
        }
        first[img] = static_cast<std::uint32_t>(r);
    }
    if (out.bijective != "pass") {
        out.transitive = "ill-formed";
        return out;
    }
    if (!is_transitive_at(map, m)) {
        const auto lengths = cycle_structure(map, m);
        out.transitive = "fail";
        out.witnesses.push_back("WITNESS check=transitive level=" + std::to_string(m) +
                                " cycles=" + std::to_string(lengths.size()) +
                                " shortest=" + std::to_string(lengths.front()));
    }
    return out;
}

int cmd_check(const CommonFlags& f) {
    validate_shape(f);
    const TruncatedMap map = make_map(f);
    bool all_ok = true;
    json levels = json::array();
    if (f.format == "text") {
        std::cout << "check spec=" << map.provenance << " p=" << f.p << " k=" << f.k
                  << " n=" << f.n << '\n';
    }
    for (std::uint32_t m = 1; m <= f.n; ++m) {
        const LevelFinding finding = check_level(map, m);
        all_ok = all_ok && finding.ok();
        if (f.format == "json") {
            levels.push_back({{"level", m},
                              {"one_lipschitz", finding.lipschitz},
                              {"bijective", finding.bijective},
                              {"transitive", finding.transitive},
                              {"witnesses", finding.witnesses}});
        } else {
            std::cout << "level " << m << ": one-lipschitz=" << finding.lipschitz
                      << " bijective=" << finding.bijective
                      << " transitive=" << finding.transitive << '\n';
            for (const auto& w : finding.witnesses) std::cout << w << '\n';
        }
    }
    if (f.format == "json") {
        std::cout << json{{"command", "check"},
                          {"spec", map.provenance},
                          {"p", f.p},
                          {"k", f.k},
                          {"n", f.n},
                          {"levels", levels},
                          {"pass", all_ok}}
                         .dump(2)
                  << '\n';
    } else {
        std::cout << "result: " << (all_ok ? "pass" : "FAIL") << '\n';
    }
    return all_ok ? 0 : 1;
}

int cmd_cycles(const CommonFlags& f) {
    validate_shape(f);
    const TruncatedMap map = make_map(f);
    json levels = json::array();
    if (f.format == "text") {
        std::cout << "cycles spec=" << map.provenance << " p=" << f.p << " k=" << f.k
                  << " n=" << f.n << '\n';
    }
    for (std::uint32_t m = 1; m <= f.n; ++m) {
        const auto lengths = cycle_structure(map, m);
        std::map<std::uint64_t, std::uint64_t> hist;
        for (std::uint64_t len : lengths) ++hist[len];
        if (f.format == "json") {
            json h = json::object();
            for (const auto& [len, count] : hist) h[std::to_string(len)] = count;
            levels.push_back({{"level", m}, {"lengths", h}});
        } else {
            std::cout << "level " << m << ":";
            for (const auto& [len, count] : hist) {
                std::cout << ' ' << count << "x" << len;
            }
            std::cout << '\n';
        }
    }
    if (f.format == "json") {
        std::cout << json{{"command", "cycles"},
                          {"spec", map.provenance},
                          {"levels", levels}}
                         .dump(2)
                  << '\n';
    }
    return 0;
}

void print_bundle_summary(const ConjugationBundle& bundle, const std::string& format) {
    if (format == "json") return;  // the manifest carries the same data
    std::cout << "P = [";
    for (std::size_t i = 0; i < bundle.P.images().size(); ++i) {
        std::cout << (i ? "," : "") << bundle.P.images()[i];
    }
    std::cout << "]\n";
    for (std::uint32_t n = 1; n <= bundle.N; ++n) {
        const LevelChecks& checks = bundle.checks.levels[n - 1];
        std::cout << "level " << n << ": tower=" << (checks.tower_ok ? "ok" : "FAIL")
                  << " t-inverse=" << (checks.t_inverse_ok ? "ok" : "FAIL")
                  << " scalar-lipschitz="
                  << (checks.lipschitz_all_levels() ? "pass" : "counter-witness");
        if (checks.lipschitz_witness) {
            const ScalarWitness& w = *checks.lipschitz_witness;
            std::cout << " (WITNESS check=one-lipschitz level=" << w.level << " x=" << w.x
                      << " y=" << w.y << ")";
        }
        std::cout << '\n';
    }
}

int cmd_conjugate(const CommonFlags& f) {
    validate_shape(f);
    if (f.out_path.empty()) throw std::invalid_argument("conjugate requires --out DIR");
    const TruncatedMap F = make_map(f);
    const BlockPermutation P = solve_block_permutation(F, odometer_target(f.p, f.k));
    const ConjugationBundle bundle = conjugate_forward(F, P, f.n);
    export_bundle(bundle, f.out_path);
    if (f.format == "text") {
        std::cout << "conjugate spec=" << F.provenance << " p=" << f.p << " k=" << f.k
                  << " N=" << f.n << '\n';
    }
    print_bundle_summary(bundle, f.format);
    if (f.format == "json") {
        std::cout << json{{"command", "conjugate"},
                          {"spec", F.provenance},
                          {"P", bundle.P.images()},
                          {"scalar_lipschitz_everywhere",
                           bundle.checks.scalar_lipschitz_everywhere()},
                          {"out", f.out_path}}
                         .dump(2)
                  << '\n';
    } else {
        std::cout << "bundle written to " << f.out_path << '\n' << "result: pass\n";
    }
    return 0;
}

int cmd_roundtrip(const CommonFlags& f) {
    json levels = json::array();
    std::optional<ConjugationBundle> bundle;
    if (!f.in_path.empty()) {
        bundle = import_bundle(f.in_path);
    } else {
        validate_shape(f);
        const TruncatedMap F = make_map(f);
        const BlockPermutation P = solve_block_permutation(F, odometer_target(f.p, f.k));
        bundle = conjugate_forward(F, P, f.n);
    }
    if (f.format == "text") {
        std::cout << "roundtrip spec=" << bundle->F.provenance << " p=" << bundle->p
                  << " k=" << bundle->k << " N=" << bundle->N << '\n';
    }
    bool all_exact = true;
    for (std::uint32_t n = 1; n <= bundle->N; ++n) {
        std::string roundtrip = "exact";
        try {
            conjugate_backward(*bundle, n);
        } catch (const VerificationFailure& e) {
            all_exact = false;
            roundtrip = "FAIL";
            std::cout << "WITNESS check=roundtrip level=" << e.level << " x=" << e.witness
                      << '\n';
        }
        const ConventionReport report = verify_scalar_t_convention(*bundle, n);
        const std::string convention = !report.partition_ok ? "partition-error"
                                       : report.convention_holds ? "holds"
                                                                 : "counter-witness";
        if (f.format == "json") {
            levels.push_back({{"level", n},
                              {"roundtrip", roundtrip},
                              {"convention", convention},
                              {"commutation", report.commutation_ok}});
        } else {
            std::cout << "level " << n << ": roundtrip=" << roundtrip
                      << " convention=" << convention
                      << " commutation=" << (report.commutation_ok ? "ok" : "FAIL");
            if (report.counter_witness) {
                std::cout << " (WITNESS check=convention level=" << n
                          << " x=" << report.counter_witness->x
                          << " got=" << report.counter_witness->y << ")";
            }
            std::cout << '\n';
        }
    }
    if (f.format == "json") {
        std::cout << json{{"command", "roundtrip"},
                          {"levels", levels},
                          {"pass", all_exact}}
                         .dump(2)
                  << '\n';
    } else {
        std::cout << "result: " << (all_exact ? "pass" : "FAIL") << '\n';
    }
    return all_exact ? 0 : 1;
}

int cmd_keystream(const CommonFlags& f, std::uint64_t state, std::uint64_t count,
                  const std::string& extractor) {
    validate_shape(f);
    KeystreamConfig cfg;
    if (f.spec == "odometer") {
        cfg.spec = OdometerSpec{1};
    } else {
        // materialize whatever the selector names; keeps sampled maps exact
        cfg.spec = TableSpec{make_map(f)};
    }
    cfg.p = f.p;
    cfg.k = f.k;
    cfg.n = f.n;
    cfg.state = state;
    cfg.count = count;
    if (extractor == "low-digit") {
        cfg.extractor = Extractor::low_digit;
    } else if (extractor == "full-state") {
        cfg.extractor = Extractor::full_state;
    } else {
        throw std::invalid_argument("extractor must be low-digit or full-state");
    }
    const std::vector<std::uint64_t> stream = keystream(cfg);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!f.out_path.empty()) {
        file.open(f.out_path, std::ios::binary);
        if (!file) throw std::invalid_argument("cannot open --out " + f.out_path);
        out = &file;
    }
    if (f.format == "raw") {
        if (f.p != 2 || cfg.extractor != Extractor::low_digit) {
            throw std::invalid_argument("raw output needs p=2 and the low-digit extractor");
        }
        const std::vector<std::uint8_t> bytes = pack_bits(stream);
        out->write(reinterpret_cast<const char*>(bytes.data()),
                   static_cast<std::streamsize>(bytes.size()));
    } else {
        for (std::uint64_t v : stream) *out << v << '\n';
    }
    return 0;
}

int cmd_report(const CommonFlags& f) {
    validate_shape(f);
    const TruncatedMap map = make_map(f);
    const UniformityReport report = uniformity_report(map, f.n);
    if (f.format == "json") {
        json levels = json::array();
        for (const auto& lvl : report.levels) {
            levels.push_back({{"m", lvl.m},
                              {"class_count", lvl.class_count},
                              {"expected", lvl.expected},
                              {"max_deviation", lvl.max_deviation}});
        }
        std::cout << json{{"period", report.period}, {"levels", levels}}.dump(2) << '\n';
    } else {
        std::cout << "report spec=" << map.provenance << " p=" << f.p << " k=" << f.k
                  << " n=" << f.n << " period=" << report.period << '\n';
        for (const auto& lvl : report.levels) {
            std::cout << "level " << lvl.m << ": classes=" << lvl.class_count
                      << " expected=" << lvl.expected
                      << " max_deviation=" << lvl.max_deviation << '\n';
        }
        std::cout << "result: " << (report.max_deviation() == 0 ? "exact" : "FAIL") << '\n';
    }
    return report.max_deviation() == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-precision toolkit for compatible dynamics on Z_p^k"};
    app.require_subcommand(1);

    CommonFlags f;
    std::uint64_t state = 0;
    std::uint64_t count = 1;
    std::string extractor = "low-digit";

    CLI::App* check = app.add_subcommand(
        "check", "compatibility/bijectivity/transitivity per level, with witnesses");
    add_shape_flags(check, f);

    CLI::App* cycles = app.add_subcommand("cycles", "cycle structure per level");
    add_shape_flags(cycles, f);

    CLI::App* conjugate =
        app.add_subcommand("conjugate", "solve P, build the conjugate tower, write a bundle");
    add_shape_flags(conjugate, f);
    conjugate->add_option("--out", f.out_path, "bundle output directory");

    CLI::App* roundtrip = app.add_subcommand(
        "roundtrip", "recover F from its bundle and run the convention report");
    add_shape_flags(roundtrip, f, false);
    roundtrip->add_option("--in", f.in_path, "read a previously written bundle");

    CLI::App* ks = app.add_subcommand("keystream", "iterate a map and emit digits");
    add_shape_flags(ks, f);
    ks->add_option("--state", state, "initial encoded state");
    ks->add_option("--count", count, "number of outputs");
    ks->add_option("--extractor", extractor, "low-digit | full-state");
    ks->add_option("--out", f.out_path, "write to a file instead of stdout");

    CLI::App* report = app.add_subcommand("report", "full-period uniformity counts");
    add_shape_flags(report, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (check->parsed()) return cmd_check(f);
        if (cycles->parsed()) return cmd_cycles(f);
        if (conjugate->parsed()) return cmd_conjugate(f);
        if (roundtrip->parsed()) {
            if (f.in_path.empty() &&
                (roundtrip->count("-p") == 0 || roundtrip->count("-n") == 0)) {
                throw std::invalid_argument("roundtrip needs either --in DIR or --spec with -p/-N");
            }
            return cmd_roundtrip(f);
        }
        if (ks->parsed()) return cmd_keystream(f, state, count, extractor);
        if (report->parsed()) return cmd_report(f);
    } catch (const MapIoError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const NoSolution& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    } catch (const VerificationFailure& e) {
        std::cerr << "check failure: " << e.what() << '\n'
                  << "WITNESS check=verification level=" << e.level << " x=" << e.witness
                  << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "check failure: " << e.what() << '\n'
                  << "WITNESS check=precondition message=\"" << e.what() << "\"\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
