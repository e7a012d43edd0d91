#include "vcsp/hardness.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>

namespace vcsp {

const char* to_string(WitnessKind k) { return k == WitnessKind::BothFinite ? "both_finite" : "one_infinite"; }

namespace {

void require_normalized(const HardnessWitness& w, WitnessKind kind)
{
    if (w.kind != kind)
        throw InputError(std::string("reduction needs a ") + to_string(kind) + " witness, got " + to_string(w.kind));
    const auto& h = w.normalized;
    const Label a = w.a(), b = w.b();
    bool ok = h.domain_size >= 2 && h.arity == 2 && a != b;
    if (ok && kind == WitnessKind::BothFinite)
        ok = h.at(a, a).is_finite() && h.at(a, a) == h.at(b, b) && h.at(a, b) == h.at(b, a) && h.at(a, a) > h.at(a, b);
    if (ok && kind == WitnessKind::OneInfinite)
        ok = h.at(a, a).is_finite() && h.at(a, a) == h.at(a, b) && h.at(a, b) == h.at(b, a) && h.at(b, b).is_infinite();
    if (!ok) throw InputError("witness is not in normalized form");
}

}  // namespace

HardnessWitness normalize_witness(const BinaryView& view, Label a, Label b)
{
    const CostFunction& f = view.table;
    if (f.arity != 2 || a == b || a < 0 || b < 0 || a >= f.domain_size || b >= f.domain_size)
        throw InputError("witness needs a binary view and two distinct labels");
    if (fence(f, a, b, a, b) != Softness::Soft)
        throw InputError("view is not a soft self-loop at " + to_string(PairNode{a, b}));

    HardnessWitness w;
    w.view = view;
    if (f.at(a, a).is_finite() && f.at(b, b).is_finite()) {
        w.kind = WitnessKind::BothFinite;
        w.pair_node = {a, b};
        CostFunction g = f;
        if (f.at(a, b) != f.at(b, a)) {
            g = symmetrize(view).table;
            w.normalization = "sym";
        }
        const Rational alpha = g.at(a, a).value(), beta = g.at(b, b).value();
        if (alpha != beta) {
            const Label low = alpha < beta ? a : b;
            const Rational delta = abs(beta - alpha) / 2;
            for (Label x = 0; x < g.domain_size; ++x)
                for (Label y = 0; y < g.domain_size; ++y) {
                    const int hits = (x == low) + (y == low);
                    if (hits) g.at(x, y) = g.at(x, y).shifted(delta * hits);
                }
            if (!w.normalization.empty()) w.normalization += "; ";
            w.normalization += "unary " + std::to_string(low) + "=" + to_string(delta);
        }
        w.normalized = std::move(g);
    } else {
        w.kind = WitnessKind::OneInfinite;
        if (f.at(a, a).is_infinite()) std::swap(a, b);
        w.pair_node = {a, b};
        // h(x, y) = f(x, y) + u1(x) + u2(y) with u1, u2 chosen so that the
        // three finite corner entries meet at f(a,a) + 2s.
        const Rational faa = f.at(a, a).value(), fab = f.at(a, b).value(), fba = f.at(b, a).value();
        const Rational s = std::max({Rational(0), Rational(fab - faa), Rational(fba - faa)});
        std::vector<Rational> u1(static_cast<std::size_t>(f.domain_size), 0), u2 = u1;
        u1[static_cast<std::size_t>(a)] = s;
        u2[static_cast<std::size_t>(a)] = s;
        u2[static_cast<std::size_t>(b)] = faa + s - fab;
        u1[static_cast<std::size_t>(b)] = faa + s - fba;
        CostFunction g = f;
        for (Label x = 0; x < g.domain_size; ++x)
            for (Label y = 0; y < g.domain_size; ++y)
                g.at(x, y) = g.at(x, y).shifted(u1[static_cast<std::size_t>(x)] + u2[static_cast<std::size_t>(y)]);
        if (sgn(s) != 0 || u1[static_cast<std::size_t>(b)] != 0 || u2[static_cast<std::size_t>(b)] != 0)
            w.normalization = "unary1 " + std::to_string(a) + "=" + to_string(s) + "," + std::to_string(b) + "=" +
                              to_string(u1[static_cast<std::size_t>(b)]) + "; unary2 " + std::to_string(a) + "=" +
                              to_string(s) + "," + std::to_string(b) + "=" + to_string(u2[static_cast<std::size_t>(b)]);
        w.normalized = std::move(g);
    }
    w.normalized.name = "h";
    require_normalized(w, w.kind);
    return w;
}

void SourceGraph::check() const
{
    if (vertex_count < 0) throw InputError("negative vertex count");
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count)
            throw InputError("edge " + std::to_string(u) + " " + std::to_string(v) + " out of range");
        if (u == v) throw InputError("self-loop at vertex " + std::to_string(u));
        if (!seen.insert(std::minmax(u, v)).second)
            throw InputError("duplicate edge " + std::to_string(u) + " " + std::to_string(v));
    }
}

SourceGraph parse_edge_list(std::string_view text)
{
    SourceGraph g;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = line.substr(0, line.find('#'));
        std::istringstream fields(line);
        long u, v;
        if (!(fields >> u)) continue;
        std::string extra;
        if (!(fields >> v) || (fields >> extra))
            throw InputError("line " + std::to_string(line_no) + ": expected two vertex indices");
        if (u < 0 || v < 0 || u > 1'000'000 || v > 1'000'000)
            throw InputError("line " + std::to_string(line_no) + ": vertex index out of range");
        g.edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
        g.vertex_count = std::max(g.vertex_count, static_cast<int>(std::max(u, v)) + 1);
    }
    g.check();
    return g;
}

Reduction reduce_maxcut(const SourceGraph& src, const HardnessWitness& w)
{
    require_normalized(w, WitnessKind::BothFinite);
    src.check();
    const auto& h = w.normalized;
    const Rational diag = h.at(w.a(), w.a()).value();
    const Rational off = h.at(w.a(), w.b()).value();
    const auto edges = static_cast<long>(src.edges.size());

    Reduction r;
    auto hp = std::make_shared<const CostFunction>(h);
    r.functions.push_back(hp);
    r.instance.domain_size = h.domain_size;
    r.instance.node_count = src.vertex_count;
    for (auto [u, v] : src.edges) r.instance.add_term(hp, {u, v});
    if (h.domain_size > 2) {
        const Rational big = 1 + edges * diag;
        CostFunction restrict_fn("r", 1, h.domain_size, std::vector<Cost>(static_cast<std::size_t>(h.domain_size), Cost(big)));
        restrict_fn.table[static_cast<std::size_t>(w.a())] = Cost(0);
        restrict_fn.table[static_cast<std::size_t>(w.b())] = Cost(0);
        auto rp = std::make_shared<const CostFunction>(std::move(restrict_fn));
        r.functions.push_back(rp);
        for (int v = 0; v < src.vertex_count; ++v) r.instance.add_term(rp, {v});
    }
    r.decoder = {"max-cut", edges * diag, diag - off};
    return r;
}

Reduction reduce_mis(const SourceGraph& src, const HardnessWitness& w)
{
    require_normalized(w, WitnessKind::OneInfinite);
    src.check();
    const auto& h = w.normalized;
    const Rational k = h.at(w.a(), w.a()).value();
    const auto edges = static_cast<long>(src.edges.size());
    const Rational offset = src.vertex_count + edges * k;

    Reduction r;
    auto hp = std::make_shared<const CostFunction>(h);
    r.functions.push_back(hp);
    r.instance.domain_size = h.domain_size;
    r.instance.node_count = src.vertex_count;
    for (auto [u, v] : src.edges) r.instance.add_term(hp, {u, v});
    // Label b marks membership in the independent set; a costs 1.
    CostFunction weight("m", 1, h.domain_size, std::vector<Cost>(static_cast<std::size_t>(h.domain_size), Cost(Rational(1 + offset))));
    weight.table[static_cast<std::size_t>(w.a())] = Cost(1);
    weight.table[static_cast<std::size_t>(w.b())] = Cost(0);
    auto mp = std::make_shared<const CostFunction>(std::move(weight));
    r.functions.push_back(mp);
    for (int v = 0; v < src.vertex_count; ++v) r.instance.add_term(mp, {v});
    r.decoder = {"max-independent-set", offset, 1};
    return r;
}

namespace {

std::vector<std::uint32_t> neighbour_masks(const SourceGraph& g)
{
    if (g.vertex_count > 24) throw BudgetError("exact graph oracles are limited to 24 vertices");
    std::vector<std::uint32_t> adj(static_cast<std::size_t>(g.vertex_count), 0);
    for (auto [u, v] : g.edges) {
        adj[static_cast<std::size_t>(u)] |= 1u << v;
        adj[static_cast<std::size_t>(v)] |= 1u << u;
    }
    return adj;
}

}  // namespace

int max_cut(const SourceGraph& g)
{
    neighbour_masks(g);
    int best = 0;
    for (std::uint32_t s = 0; s < (1u << g.vertex_count); ++s) {
        int cut = 0;
        for (auto [u, v] : g.edges) cut += ((s >> u) & 1) != ((s >> v) & 1);
        best = std::max(best, cut);
    }
    return best;
}

int max_independent_set(const SourceGraph& g)
{
    const auto adj = neighbour_masks(g);
    int best = 0;
    for (std::uint32_t s = 0; s < (1u << g.vertex_count); ++s) {
        bool independent = true;
        for (int v = 0; v < g.vertex_count && independent; ++v)
            if (((s >> v) & 1) && (adj[static_cast<std::size_t>(v)] & s)) independent = false;
        if (independent) best = std::max(best, std::popcount(s));
    }
    return best;
}

ReductionCheck verify_reduction(const SourceGraph& src, const Reduction& reduction)
{
    if (src.vertex_count > 16) throw BudgetError("reduction verification is limited to 16 vertices");
    ReductionCheck c;
    c.expected = reduction.decoder.quantity == "max-cut" ? max_cut(src) : max_independent_set(src);
    c.optimum = brute_force(reduction.instance).cost;
    if (c.optimum.is_finite()) {
        c.decoded = reduction.decoder.decode(c.optimum.value());
        c.ok = c.decoded == c.expected;
    }
    return c;
}

}  // namespace vcsp
