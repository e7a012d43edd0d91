#include "oracles.hpp"

#include <doctest.h>

using namespace vcsp;

namespace {

const Cost inf = Cost::infinity();

Language lang2(std::vector<Cost> t) { return Language{2, {CostFunction("f", 2, 2, std::move(t))}}; }

Language absdiff3() { return Language{3, {CostFunction("d", 2, 3, {0, 1, 2, 1, 0, 1, 2, 1, 0})}}; }

PairEdge edge(PairNode p, PairNode q)
{
    if (q < p) std::swap(p, q);
    return PairEdge{p, q, Softness::Soft, DetectedBy{}, DetectedBy{}};
}

void check_sigma_contract(const PairGraph& g, const SignAssignment& sigma)
{
    const MSplit split = compute_m(g);
    const PairIndex idx(g.domain_size);
    for (const auto& e : g.edges)
        if (split.in_m[static_cast<std::size_t>(idx(e.p))] && split.in_m[static_cast<std::size_t>(idx(e.q))])
            CHECK(sigma(e.p) == -sigma(e.q));
    for (const auto& p : split.m) {
        CHECK(sigma(p) != 0);
        CHECK(sigma(p) == -sigma(p.swapped()));
    }
}

}  // namespace

TEST_SUITE("dichotomy")
{
    TEST_CASE("two_color on a single mirrored edge")
    {
        auto g = make_graph(2, {edge({0, 1}, {1, 0})});
        auto r = two_color(g);
        REQUIRE(std::holds_alternative<SignAssignment>(r));
        const auto& s = std::get<SignAssignment>(r);
        CHECK(s({0, 1}) == 1);
        CHECK(s({1, 0}) == -1);
    }

    TEST_CASE("two_color without edges")
    {
        auto g = make_graph(3, {});
        auto r = two_color(g);
        REQUIRE(std::holds_alternative<SignAssignment>(r));
        const auto& s = std::get<SignAssignment>(r);
        for (auto p : std::vector<PairNode>{{0, 1}, {0, 2}, {1, 2}}) {
            CHECK(s(p) == 1);
            CHECK(s(p.swapped()) == -1);
        }
        check_sigma_contract(g, s);
    }

    TEST_CASE("two_color reports odd cycles")
    {
        auto g = make_graph(3, {edge({0, 1}, {0, 2}), edge({0, 2}, {1, 2}), edge({0, 1}, {1, 2})});
        auto r = two_color(g);
        REQUIRE(std::holds_alternative<ColoringConflict>(r));
        const auto& c = std::get<ColoringConflict>(r);
        CHECK(c.kind == ColoringConflict::Kind::OddCycle);
        CHECK(c.witness.size() >= 3);
    }

    TEST_CASE("two_color reports p and its mirror forced equal")
    {
        // (0,1) - (1,2) - (1,0): even path from a node to its mirror.
        auto g = make_graph(3, {edge({0, 1}, {1, 2}), edge({1, 2}, {1, 0})});
        auto r = two_color(g);
        REQUIRE(std::holds_alternative<ColoringConflict>(r));
        CHECK(std::get<ColoringConflict>(r).kind == ColoringConflict::Kind::MirrorSameSign);
    }

    TEST_CASE("build_meet_join")
    {
        SignAssignment s(2);
        s.set({0, 1}, 1);
        s.set({1, 0}, -1);
        auto pair = build_meet_join(s, {true, true}, 2);
        CHECK(pair.meet(0, 1) == 0);
        CHECK(pair.meet(1, 0) == 0);
        CHECK(pair.join(0, 1) == 1);
        CHECK(pair.join(1, 0) == 1);

        auto proj = build_meet_join(SignAssignment(3), {false, false, false, false, false, false}, 3);
        CHECK(proj.meet(0, 1) == 0);
        CHECK(proj.join(0, 1) == 1);
        CHECK(proj.meet(1, 0) == 1);
        CHECK(proj.join(1, 0) == 0);
        CHECK(proj.meet(2, 2) == 2);
        CHECK(proj.join(2, 2) == 2);

        SignAssignment bad(2);
        bad.set({0, 1}, 1);
        bad.set({1, 0}, 1);
        CHECK_THROWS_AS(build_meet_join(bad, {true, true}, 2), InputError);
    }

    TEST_CASE("sign-built pairs are conservative, idempotent and commutative on M")
    {
        std::mt19937_64 rng(7);
        int checked = 0;
        for (int round = 0; round < 150; ++round) {
            Language lang = oracle::corpus_language(rng);
            const PairGraph g = build_pair_graph(lang);
            auto r = two_color(g);
            if (!std::holds_alternative<SignAssignment>(r)) continue;
            const auto& s = std::get<SignAssignment>(r);
            check_sigma_contract(g, s);
            const MSplit split = compute_m(g);
            auto pair = build_meet_join(s, split.in_m, lang.domain_size);
            CHECK(pair.conservative());
            CHECK(pair.idempotent());
            for (const auto& p : split.m) CHECK(pair.commutative_on(p));
            ++checked;
        }
        CHECK(checked > 50);
    }

    TEST_CASE("verify_multimorphism")
    {
        auto minmax = OperationPair::from_order({0, 1, 2});
        CHECK_FALSE(verify_multimorphism(minmax, absdiff3(), VerifyMode::Full));
        CHECK_FALSE(verify_multimorphism(minmax, absdiff3(), VerifyMode::Delta2));

        const Language eq = lang2({1, 0, 0, 1});
        for (bool bit : {false, true}) {
            auto pair = OperationPair::from_orientation(2, {bit});
            auto v = verify_multimorphism(pair, eq, VerifyMode::Full);
            REQUIRE(v.has_value());
        }
        auto v = verify_function(OperationPair::from_orientation(2, {false}), eq.functions[0], VerifyMode::Full);
        REQUIRE(v);
        CHECK(((v->x == std::vector<Label>{0, 1} && v->y == std::vector<Label>{1, 0}) ||
               (v->x == std::vector<Label>{1, 0} && v->y == std::vector<Label>{0, 1})));

        Language unary{3, {CostFunction("u", 1, 3, {4, 1, 7})}};
        std::mt19937_64 rng(1);
        for (int round = 0; round < 10; ++round) {
            std::vector<bool> bits(3);
            for (std::size_t k = 0; k < 3; ++k) bits[k] = rng() & 1;
            CHECK_FALSE(verify_multimorphism(OperationPair::from_orientation(3, bits), unary, VerifyMode::Full));
        }
    }

    TEST_CASE("full and delta2 verification agree on binary languages")
    {
        std::mt19937_64 rng(13);
        for (int round = 0; round < 1000; ++round) {
            Language lang;
            lang.domain_size = 2 + static_cast<int>(rng() % 3);
            const int count = 1 + static_cast<int>(rng() % 3);
            for (int k = 0; k < count; ++k)
                lang.functions.push_back(oracle::random_function(rng, "f" + std::to_string(k), 2, lang.domain_size, 4));
            const int pairs = lang.domain_size * (lang.domain_size - 1) / 2;
            std::vector<bool> bits(static_cast<std::size_t>(pairs));
            for (auto&& b : bits) b = rng() & 1;
            auto pair = OperationPair::from_orientation(lang.domain_size, bits);
            CHECK(verify_multimorphism(pair, lang, VerifyMode::Full).has_value() ==
                  verify_multimorphism(pair, lang, VerifyMode::Delta2).has_value());
        }
    }

    TEST_CASE("search_stp")
    {
        auto cert = search_stp(absdiff3(), build_pair_graph(absdiff3()));
        REQUIRE(cert);
        CHECK(cert->pair == OperationPair::from_order({0, 1, 2}));

        const Language eq = lang2({1, 0, 0, 1});
        SearchStats stats;
        CHECK_FALSE(search_stp(eq, build_pair_graph(eq), {}, &stats));

        // Without edges both orientations are examined.
        SearchStats both;
        CHECK_FALSE(search_stp(eq, make_graph(2, {}), {}, &both));
        CHECK(both.candidates == 2);

        const Language none{3, {}};
        auto any = search_stp(none, build_pair_graph(none));
        REQUIRE(any);
        CHECK(any->pair == OperationPair::from_order({0, 1, 2}));

        SearchConfig small;
        small.max_domain = 2;
        CHECK_THROWS_AS(search_stp(absdiff3(), build_pair_graph(absdiff3()), small), BudgetError);
    }

    TEST_CASE("search_stp matches brute-force enumeration")
    {
        std::mt19937_64 rng(29);
        for (int round = 0; round < 300; ++round) {
            Language lang = oracle::corpus_language(rng);
            const bool expected = oracle::has_stp(oracle::from_language(lang));
            CHECK(search_stp(lang, build_pair_graph(lang)).has_value() == expected);
            // The graph only prunes: an edge-free search gives the same answer.
            CHECK(search_stp(lang, make_graph(lang.domain_size, {})).has_value() == expected);
        }
    }

    TEST_CASE("certificates also hold on every pooled view")
    {
        std::mt19937_64 rng(37);
        for (int round = 0; round < 150; ++round) {
            Language lang = oracle::corpus_language(rng);
            const PairGraph g = build_pair_graph(lang);
            auto cert = search_stp(lang, g);
            if (!cert) continue;
            for (const auto& v : g.pool) CHECK_FALSE(verify_function(cert->pair, v.table, VerifyMode::Full));
        }
    }

    TEST_CASE("find_submodular_order")
    {
        auto cert = search_stp(absdiff3(), build_pair_graph(absdiff3()));
        REQUIRE(cert);
        auto order = find_submodular_order(absdiff3(), *cert);
        REQUIRE(order);
        CHECK(*order == std::vector<Label>{0, 1, 2});
        CHECK(oracle::order_works(oracle::from_language(absdiff3()), {2, 1, 0}));

        const Language two = lang2({0, 1, 1, 0});
        auto c2 = search_stp(two, build_pair_graph(two));
        REQUIRE(c2);
        auto o2 = find_submodular_order(two, *c2);
        REQUIRE(o2);
        CHECK(OperationPair::from_order(*o2) == c2->pair);
    }

    TEST_CASE("orders found are valid for the brute-force checker")
    {
        std::mt19937_64 rng(43);
        for (int round = 0; round < 200; ++round) {
            Language lang = oracle::corpus_language(rng);
            auto c = classify(lang);
            if (c.verdict != Verdict::Tractable) continue;
            REQUIRE(c.order);
            CHECK(oracle::order_works(oracle::from_language(lang), *c.order));
        }
    }

    TEST_CASE("classify")
    {
        auto eq = classify(lang2({1, 0, 0, 1}));
        CHECK(eq.verdict == Verdict::NpHard);
        CHECK(eq.reason == HardnessReason::SoftSelfLoop);
        CHECK(eq.witness.has_value());

        auto ad = classify(absdiff3());
        CHECK(ad.verdict == Verdict::Tractable);
        REQUIRE(ad.certificate);
        CHECK(ad.order == std::vector<Label>{0, 1, 2});

        auto ne = classify(lang2({inf, 0, 0, inf}));
        CHECK(ne.mode == LanguageMode::GeneralValued);
        CHECK(ne.verdict == Verdict::GeneralConjecturedTractable);
        CHECK_FALSE(ne.witness.has_value());

        auto gi = classify(lang2({0, 0, 0, inf}));
        CHECK(gi.verdict == Verdict::NpHard);
        CHECK(gi.witness.has_value());
    }

    TEST_CASE("verdicts survive shifts and added unary functions")
    {
        std::mt19937_64 rng(53);
        for (int round = 0; round < 40; ++round) {
            Language lang = oracle::corpus_language(rng);
            const Verdict v = classify(lang).verdict;
            Language shifted = lang;
            for (auto& f : shifted.functions) f = shift_costs(f, Rational(3, 2));
            CHECK(classify(shifted).verdict == v);
            Language with_unary = lang;
            with_unary.functions.push_back(oracle::random_function(rng, "u", 1, lang.domain_size, 9));
            CHECK(classify(with_unary).verdict == v);
        }
    }
}
