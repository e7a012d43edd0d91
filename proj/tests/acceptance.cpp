// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any criterion fails.

#include "oracles.hpp"

#include "vcsp/io.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace vcsp;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Same corpus for criteria 4-6: languages whose closed graph has no soft
// self-loop.
const std::vector<Language>& loop_free_corpus()
{
    static const std::vector<Language> corpus = [] {
        std::vector<Language> out;
        std::mt19937_64 rng(20240601);
        while (out.size() < 500) {
            Language lang = oracle::corpus_language(rng);
            if (!find_soft_self_loop(build_pair_graph(lang))) out.push_back(std::move(lang));
        }
        return out;
    }();
    return corpus;
}

Outcome boolean_dichotomy()
{
    const auto t0 = Clock::now();
    int disagreements = 0, missing_witness = 0, hard = 0;
    for (int code = 0; code < 81; ++code) {
        std::vector<Cost> t;
        for (int k = 0, c = code; k < 4; ++k, c /= 3) t.emplace_back(c % 3);
        const Language lang{2, {CostFunction("f", 2, 2, t)}};
        const Classification c = classify(lang);
        const bool tractable = oracle::has_stp(oracle::from_language(lang));
        if ((c.verdict == Verdict::Tractable) != tractable || (!tractable && c.verdict != Verdict::NpHard)) ++disagreements;
        if (c.verdict == Verdict::NpHard) {
            ++hard;
            if (!c.witness || c.reason != HardnessReason::SoftSelfLoop) ++missing_witness;
        }
    }
    const double s = seconds_since(t0);
    std::ostringstream d;
    d << "81 languages, " << hard << " NP_HARD, " << disagreements << " disagreements, " << missing_witness
      << " without witness, " << s << " s";
    return {disagreements == 0 && missing_witness == 0 && s < 10.0, d.str()};
}

// Criteria 2 and 3: one witness language, 200 random graphs with n <= 10.
Outcome gadget(const Language& lang, WitnessKind expected, std::uint64_t seed)
{
    const auto t0 = Clock::now();
    const Classification c = classify(lang);
    if (c.verdict != Verdict::NpHard || !c.witness) return {false, "language not classified NP_HARD with a witness"};
    const HardnessWitness w = normalize_witness(c.witness->view, c.witness->node.first, c.witness->node.second);
    if (w.kind != expected) return {false, std::string("witness has kind ") + to_string(w.kind)};
    std::mt19937_64 rng(seed);
    int wrong = 0;
    for (int round = 0; round < 200; ++round) {
        const SourceGraph g = oracle::random_graph(rng, 10);
        const Reduction red = expected == WitnessKind::BothFinite ? reduce_maxcut(g, w) : reduce_mis(g, w);
        const Cost opt = brute_force(red.instance).cost;
        const int truth = expected == WitnessKind::BothFinite ? oracle::max_cut(g.vertex_count, g.edges)
                                                              : oracle::max_independent_set(g.vertex_count, g.edges);
        if (opt.is_infinite() || red.decoder.decode(opt.value()) != truth) ++wrong;
    }
    const double s = seconds_since(t0);
    std::ostringstream d;
    d << "200 graphs, " << wrong << " mismatches, " << s << " s";
    return {wrong == 0 && s < 30.0, d.str()};
}

Outcome graph_properties()
{
    int failures = 0;
    for (const auto& lang : loop_free_corpus()) {
        const PairGraph g = build_pair_graph(lang);
        const oracle::GraphFacts f = oracle::graph_facts(g);
        const bool library_ok = check_graph_properties(g).empty();
        if (!(f.mirror_ok && f.no_cross && f.bipartite && f.mirror_opposite) || !library_ok) ++failures;
    }
    return {failures == 0, "500 languages, " + std::to_string(failures) + " failures"};
}

Outcome sign_contract()
{
    int failures = 0, conflicts = 0;
    for (const auto& lang : loop_free_corpus()) {
        const PairGraph g = build_pair_graph(lang);
        const auto r = two_color(g);
        if (!std::holds_alternative<SignAssignment>(r)) {
            ++conflicts;
            continue;
        }
        const auto& s = std::get<SignAssignment>(r);
        const MSplit split = compute_m(g);
        const PairIndex idx(g.domain_size);
        auto in_m = [&](PairNode p) { return static_cast<bool>(split.in_m[static_cast<std::size_t>(idx(p))]); };
        bool ok = true;
        for (const auto& e : g.edges)
            if (in_m(e.p) && in_m(e.q) && s(e.p) != -s(e.q)) ok = false;
        for (const auto& p : split.m)
            if (s(p) == 0 || s(p) != -s(p.swapped())) ok = false;
        failures += !ok;
    }
    return {failures == 0 && conflicts == 0,
            "500 languages, " + std::to_string(failures) + " failures, " + std::to_string(conflicts) + " coloring conflicts"};
}

Outcome sigma_end_to_end()
{
    int disagreements = 0, sigma_failed = 0;
    for (const auto& lang : loop_free_corpus()) {
        const PairGraph g = build_pair_graph(lang);
        const auto r = two_color(g);
        bool sigma_ok = false;
        if (std::holds_alternative<SignAssignment>(r)) {
            const MSplit split = compute_m(g);
            const OperationPair pair = build_meet_join(std::get<SignAssignment>(r), split.in_m, lang.domain_size);
            sigma_ok = !verify_multimorphism(pair, lang, VerifyMode::Full);
            for (const auto& v : g.pool) sigma_ok = sigma_ok && !verify_function(pair, v.table, VerifyMode::Full);
        }
        sigma_failed += !sigma_ok;
        // classify() itself falls back to the exhaustive search when the
        // σ-built pair fails.
        const Classification c = classify(lang);
        const bool tractable = oracle::has_stp(oracle::from_language(lang));
        if ((c.verdict == Verdict::Tractable) != tractable) ++disagreements;
        if (sigma_ok && !tractable) ++disagreements;
    }
    return {disagreements == 0, "500 languages, " + std::to_string(sigma_failed) + " sigma pairs rejected (fallback), " +
                                    std::to_string(disagreements) + " disagreements with the oracle"};
}

Outcome solver_equivalence()
{
    const auto t0 = Clock::now();
    std::mt19937_64 rng(77);
    int wrong = 0, duality = 0;
    for (int round = 0; round < 1000; ++round) {
        const int d = 2 + static_cast<int>(rng() % 3);
        const int n = 1 + static_cast<int>(rng() % 8);
        std::vector<Label> order(static_cast<std::size_t>(d));
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        const VcspInstance inst = oracle::submodular_instance(rng, d, n, order);
        SolveResult m;
        try {
            m = solve_mincut(inst, order);
        } catch (const std::logic_error&) {
            ++duality;
            continue;
        }
        if (m.stats.duality_checked != m.stats.flow_solves) ++duality;
        const SolveResult b = brute_force(inst);
        if (m.cost != b.cost || m.assignment != b.assignment) ++wrong;
    }
    const double s = seconds_since(t0);
    std::ostringstream out;
    out << "1000 instances, " << wrong << " mismatches, " << duality << " duality failures, " << s << " s";
    return {wrong == 0 && duality == 0 && s < 60.0, out.str()};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome invariance()
{
    std::vector<Language> fixtures;
    for (const auto& e : std::filesystem::directory_iterator(VCSP_TEST_DATA)) {
        if (e.path().extension() != ".json") continue;
        try {
            fixtures.push_back(parse_language(slurp(e.path())));
        } catch (const InputError&) {
            // instance files and the deliberately broken fixture
        }
    }
    std::mt19937_64 rng(91);
    while (fixtures.size() < 100) fixtures.push_back(oracle::corpus_language(rng));
    fixtures.resize(100);

    int changed = 0;
    std::uniform_int_distribution<int> num(1, 20), den(1, 6);
    for (const auto& lang : fixtures) {
        const Verdict v = classify(lang).verdict;
        Language shifted = lang;
        const Rational delta = oracle::ratio(num(rng), den(rng));
        for (auto& f : shifted.functions) f = shift_costs(f, delta);
        Language unaries = lang;
        for (int k = 0; k < 5; ++k)
            unaries.functions.push_back(oracle::random_function(rng, "u" + std::to_string(k), 1, lang.domain_size, 9));
        if (classify(shifted).verdict != v || classify(unaries).verdict != v) ++changed;
    }
    return {changed == 0, "100 languages, " + std::to_string(changed) + " verdict changes"};
}

}  // namespace

int main()
{
    const Language equality{2, {CostFunction("eq", 2, 2, {1, 0, 0, 1})}};
    const Language one_infinite{2, {CostFunction("g", 2, 2, {0, 0, 0, Cost::infinity()})}};

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 boolean dichotomy", boolean_dichotomy},
        {"2 max-cut gadget", [&] { return gadget(equality, WitnessKind::BothFinite, 2); }},
        {"3 independent-set gadget", [&] { return gadget(one_infinite, WitnessKind::OneInfinite, 3); }},
        {"4 pair graph properties", graph_properties},
        {"5 sign contract", sign_contract},
        {"6 sign-built pair end to end", sigma_end_to_end},
        {"7 min-cut vs brute force", solver_equivalence},
        {"8 shift and unary invariance", invariance},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << std::fixed << std::setprecision(2)
                  << seconds_since(t0) << " s]" << std::defaultfloat << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
