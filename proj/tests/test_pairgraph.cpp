#include "oracles.hpp"

#include <doctest.h>

using namespace vcsp;

namespace {

const Cost inf = Cost::infinity();

Language lang2(std::vector<Cost> t) { return Language{2, {CostFunction("f", 2, 2, std::move(t))}}; }

PairEdge edge(PairNode p, PairNode q, Softness s)
{
    if (q < p) std::swap(p, q);
    PairEdge e{p, q, s, DetectedBy{}, std::nullopt};
    if (s == Softness::Soft) e.soft_origin = DetectedBy{};
    return e;
}

bool has(const std::vector<PairEdge>& es, PairNode p, PairNode q, std::optional<Softness> s = std::nullopt)
{
    if (q < p) std::swap(p, q);
    return std::any_of(es.begin(), es.end(), [&](const PairEdge& e) { return e.p == p && e.q == q && (!s || e.softness == *s); });
}

bool has_property(const std::vector<PropertyFailure>& fs, GraphProperty p)
{
    return std::any_of(fs.begin(), fs.end(), [&](const PropertyFailure& f) { return f.property == p; });
}

}  // namespace

TEST_SUITE("pairgraph")
{
    TEST_CASE("pair index is a lexicographic bijection")
    {
        for (int d = 2; d <= 5; ++d) {
            PairIndex idx(d);
            int expect = 0;
            for (Label a = 0; a < d; ++a)
                for (Label b = 0; b < d; ++b) {
                    if (a == b) continue;
                    CHECK(idx({a, b}) == expect);
                    CHECK(idx.node(expect) == PairNode{a, b});
                    CHECK(idx.node(idx.mirror(expect)) == PairNode{b, a});
                    ++expect;
                }
            CHECK(idx.size() == expect);
        }
    }

    TEST_CASE("detect_edges")
    {
        auto eq = enumerate_binary_pool(lang2({1, 0, 0, 1}));
        auto e1 = detect_edges(eq.views, 2);
        CHECK(has(e1, {0, 1}, {0, 1}, Softness::Soft));

        auto ad = enumerate_binary_pool(lang2({0, 1, 1, 0}));
        auto e2 = detect_edges(ad.views, 2);
        CHECK(has(e2, {0, 1}, {1, 0}, Softness::Soft));
        CHECK_FALSE(has(e2, {0, 1}, {0, 1}));

        auto ne = enumerate_binary_pool(lang2({inf, 0, 0, inf}));
        auto e3 = detect_edges(ne.views, 2);
        CHECK(has(e3, {0, 1}, {0, 1}, Softness::Hard));
    }

    TEST_CASE("detected edges re-verify against their views")
    {
        std::mt19937_64 rng(17);
        for (int round = 0; round < 40; ++round) {
            Language lang{3, {oracle::random_function(rng, "f", 2 + static_cast<int>(rng() % 2), 3, 4, round % 2 ? 0.15 : 0.0)}};
            auto pool = enumerate_binary_pool(lang);
            for (const auto& e : detect_edges(pool.views, 3)) {
                const auto& d = std::get<DetectedBy>(e.origin);
                const auto& q = d.quad;
                auto s = fence(pool.views.at(d.view).table, q[0], q[1], q[2], q[3]);
                REQUIRE(s.has_value());
                if (!e.soft()) CHECK(*s == Softness::Hard);
                if (e.soft_origin) {
                    const auto& sd = std::get<DetectedBy>(*e.soft_origin);
                    const auto& sq = sd.quad;
                    CHECK(fence(pool.views.at(sd.view).table, sq[0], sq[1], sq[2], sq[3]) == Softness::Soft);
                }
            }
        }
    }

    TEST_CASE("close_edges rules")
    {
        // A single mirror-symmetric edge is already closed.
        auto one = close_edges({edge({0, 1}, {1, 0}, Softness::Soft)}, 2);
        CHECK(one.size() == 1);

        // {p, q} and {q, p} give {p, p̄} by composition.
        auto comp = close_edges({edge({0, 1}, {2, 3}, Softness::Soft)}, 4);
        CHECK(has(comp, {0, 1}, {1, 0}, Softness::Soft));
        CHECK(has(comp, {1, 0}, {3, 2}, Softness::Soft));

        // Hard {p, q} with soft {q, r} gives soft {p, r̄}.
        auto mixed = close_edges({edge({0, 1}, {0, 2}, Softness::Hard), edge({0, 2}, {1, 2}, Softness::Soft)}, 3);
        CHECK(has(mixed, {0, 1}, {2, 1}, Softness::Soft));
        // And hard with hard stays hard.
        auto hard = close_edges({edge({0, 1}, {0, 2}, Softness::Hard), edge({0, 2}, {1, 2}, Softness::Hard)}, 3);
        CHECK(has(hard, {0, 1}, {2, 1}, Softness::Hard));
    }

    TEST_CASE("closure is idempotent and mirror symmetric")
    {
        std::mt19937_64 rng(23);
        for (int round = 0; round < 60; ++round) {
            const int d = 2 + static_cast<int>(rng() % 3);
            Language lang{d, {oracle::random_function(rng, "f", 2, d, 4, round % 3 == 0 ? 0.2 : 0.0)}};
            auto pool = enumerate_binary_pool(lang);
            auto closed = close_edges(detect_edges(pool.views, d), d);
            auto again = close_edges(closed, d);
            REQUIRE(again.size() == closed.size());
            for (const auto& e : closed) CHECK(has(again, e.p, e.q, e.softness));
            for (const auto& e : closed) CHECK(has(closed, e.p.swapped(), e.q.swapped(), e.softness));
        }
    }

    TEST_CASE("compute_m")
    {
        auto eq = build_pair_graph(lang2({1, 0, 0, 1}));
        auto m1 = compute_m(eq);
        CHECK(m1.m.empty());
        CHECK(m1.m_bar == std::vector<PairNode>{{0, 1}, {1, 0}});

        auto ad = build_pair_graph(lang2({0, 1, 1, 0}));
        CHECK(compute_m(ad).m == std::vector<PairNode>{{0, 1}, {1, 0}});

        auto empty = make_graph(3, {});
        CHECK(compute_m(empty).m.size() == 6);
    }

    TEST_CASE("find_soft_self_loop")
    {
        auto w = find_soft_self_loop(build_pair_graph(lang2({1, 0, 0, 1})));
        REQUIRE(w.has_value());
        CHECK(w->node == PairNode{0, 1});
        CHECK(w->quad == std::array<Label, 4>{0, 1, 0, 1});

        CHECK_FALSE(find_soft_self_loop(build_pair_graph(lang2({0, 1, 1, 0}))).has_value());
        CHECK_FALSE(find_soft_self_loop(build_pair_graph(lang2({inf, 0, 0, inf}))).has_value());
    }

    TEST_CASE("every edge is realised by a witnessing view")
    {
        std::mt19937_64 rng(31);
        for (int round = 0; round < 25; ++round) {
            const int d = 3;
            Language lang{d, {oracle::random_function(rng, "f", 2, d, 4, round % 4 == 0 ? 0.2 : 0.0)}};
            const PairGraph g = build_pair_graph(lang);
            for (std::size_t id = 0; id < g.edges.size(); ++id) {
                const auto& e = g.edges[id];
                for (PairNode row : {e.p, e.q}) {
                    const PairNode col = row == e.p ? e.q : e.p;
                    const BinaryView v = realize_edge(g, id, row, e.soft());
                    auto s = fence(v.table, row.first, row.second, col.first, col.second);
                    REQUIRE(s.has_value());
                    if (e.soft()) CHECK(*s == Softness::Soft);
                }
            }
        }
    }

    TEST_CASE("graph properties")
    {
        CHECK(check_graph_properties(build_pair_graph(lang2({0, 1, 1, 0}))).empty());
        Language ad3{3, {CostFunction("d", 2, 3, {0, 1, 2, 1, 0, 1, 2, 1, 0})}};
        CHECK(check_graph_properties(build_pair_graph(ad3)).empty());

        auto cross = make_graph(3, {edge({0, 1}, {0, 1}, Softness::Hard), edge({1, 0}, {1, 0}, Softness::Hard),
                                    edge({0, 1}, {0, 2}, Softness::Hard), edge({1, 0}, {2, 0}, Softness::Hard)});
        auto fc = check_graph_properties(cross);
        CHECK(has_property(fc, GraphProperty::NoCrossEdge));

        auto odd = make_graph(3, {edge({0, 1}, {0, 2}, Softness::Soft), edge({0, 2}, {1, 2}, Softness::Soft),
                                  edge({0, 1}, {1, 2}, Softness::Soft)});
        auto fo = check_graph_properties(odd);
        REQUIRE(has_property(fo, GraphProperty::Bipartite));
        for (const auto& f : fo)
            if (f.property == GraphProperty::Bipartite) CHECK(f.path.size() >= 3);
    }

    TEST_CASE("finite-valued graphs without a soft self-loop have M = P")
    {
        std::mt19937_64 rng(41);
        int seen = 0;
        for (int round = 0; round < 200 && seen < 40; ++round) {
            Language lang = oracle::corpus_language(rng);
            const PairGraph g = build_pair_graph(lang);
            if (find_soft_self_loop(g)) continue;
            ++seen;
            CHECK(compute_m(g).m.size() == static_cast<std::size_t>(PairIndex(lang.domain_size).size()));
            for (const auto& e : g.edges) CHECK(e.soft());
        }
        CHECK(seen > 0);
    }

    TEST_CASE("dot output")
    {
        const std::string ad = to_dot(build_pair_graph(lang2({0, 1, 1, 0})));
        CHECK(ad.find("\"0|1\" -- \"1|0\" [style=solid]") != std::string::npos);

        Language unary{3, {CostFunction("u", 1, 3, {4, 1, 7})}};
        const std::string u = to_dot(build_pair_graph(unary));
        CHECK(u.find("--") == std::string::npos);
        CHECK(std::count(u.begin(), u.end(), '\n') == 8);

        const std::string eq = to_dot(build_pair_graph(lang2({1, 0, 0, 1})));
        CHECK(eq.find("\"0|1\" -- \"0|1\"") != std::string::npos);
        CHECK(eq.find("fillcolor=lightgray") != std::string::npos);

        const std::string ne = to_dot(build_pair_graph(lang2({inf, 0, 0, inf})));
        CHECK(ne.find("style=dashed") != std::string::npos);
        CHECK(ne == to_dot(build_pair_graph(lang2({inf, 0, 0, inf}))));
    }
}
