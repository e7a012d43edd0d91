#include "vcsp/pairgraph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>

namespace vcsp {

std::string to_string(PairNode p) { return std::to_string(p.first) + "|" + std::to_string(p.second); }

std::optional<Softness> fence(const CostFunction& f, Label a, Label b, Label a2, Label b2)
{
    const Cost& off1 = f.at(a, b2);
    const Cost& off2 = f.at(b, a2);
    if (off1.is_infinite() || off2.is_infinite()) return std::nullopt;
    const Cost& d1 = f.at(a, a2);
    const Cost& d2 = f.at(b, b2);
    if (!(d1 + d2 > off1 + off2)) return std::nullopt;
    return d1.is_finite() || d2.is_finite() ? Softness::Soft : Softness::Hard;
}

namespace {

// Mutable edge set keyed by node-index pairs.
class EdgeSet {
public:
    explicit EdgeSet(int domain_size)
        : index_(domain_size), slots_(static_cast<std::size_t>(index_.size() * index_.size()), -1)
    {
    }

    const PairIndex& index() const { return index_; }
    std::vector<PairEdge>& edges() { return edges_; }

    int lookup(PairNode p, PairNode q) const
    {
        return slots_[static_cast<std::size_t>(index_(p) * index_.size() + index_(q))];
    }

    /// Inserts or upgrades; returns the edge id when something changed.
    std::optional<std::size_t> offer(PairNode p, PairNode q, Softness s, const EdgeOrigin& origin)
    {
        if (q < p) std::swap(p, q);
        int id = lookup(p, q);
        if (id < 0) {
            PairEdge e{p, q, s, origin, std::nullopt};
            if (s == Softness::Soft) e.soft_origin = origin;
            id = static_cast<int>(edges_.size());
            edges_.push_back(std::move(e));
            slots_[static_cast<std::size_t>(index_(p) * index_.size() + index_(q))] = id;
            slots_[static_cast<std::size_t>(index_(q) * index_.size() + index_(p))] = id;
            adjacency_.resize(static_cast<std::size_t>(index_.size()));
            adjacency_[static_cast<std::size_t>(index_(p))].push_back(id);
            if (p != q) adjacency_[static_cast<std::size_t>(index_(q))].push_back(id);
            return static_cast<std::size_t>(id);
        }
        auto& e = edges_[static_cast<std::size_t>(id)];
        if (s == Softness::Soft && !e.soft()) {
            e.softness = Softness::Soft;
            e.soft_origin = origin;
            return static_cast<std::size_t>(id);
        }
        return std::nullopt;
    }

    std::vector<int> incident(PairNode p) const
    {
        if (adjacency_.empty()) return {};
        return adjacency_[static_cast<std::size_t>(index_(p))];
    }

private:
    PairIndex index_;
    std::vector<int> slots_;
    std::vector<PairEdge> edges_;
    std::vector<std::vector<int>> adjacency_;
};

PairNode other_end(const PairEdge& e, PairNode at) { return e.p == at ? e.q : e.p; }

}  // namespace

std::vector<PairEdge> detect_edges(const std::vector<BinaryView>& pool, int domain_size)
{
    EdgeSet set(domain_size);
    const int n = domain_size;
    for (std::size_t v = 0; v < pool.size(); ++v) {
        const auto& f = pool[v].table;
        if (f.domain_size != n || f.arity != 2) throw InputError("detect_edges: pool view has wrong shape");
        for (Label a = 0; a < n; ++a)
            for (Label b = 0; b < n; ++b) {
                if (a == b) continue;
                for (Label a2 = 0; a2 < n; ++a2)
                    for (Label b2 = 0; b2 < n; ++b2) {
                        if (a2 == b2) continue;
                        if (auto s = fence(f, a, b, a2, b2))
                            set.offer({a, b}, {a2, b2}, *s, DetectedBy{v, {a, b, a2, b2}});
                    }
            }
    }
    return std::move(set.edges());
}

std::vector<PairEdge> close_edges(std::vector<PairEdge> edges, int domain_size)
{
    EdgeSet set(domain_size);
    std::deque<std::size_t> work;
    for (auto& e : edges) {
        // Input ids may be renumbered only if the input had duplicates; derived
        // parents always refer to ids in `set`.
        auto id = set.offer(e.p, e.q, e.softness, e.soft_origin ? *e.soft_origin : e.origin);
        if (id) {
            auto& stored = set.edges()[*id];
            stored.origin = e.origin;
            work.push_back(*id);
        }
    }

    while (!work.empty()) {
        const std::size_t id = work.front();
        work.pop_front();
        const PairEdge e = set.edges()[id];

        auto push = [&](std::optional<std::size_t> changed) {
            if (changed) work.push_back(*changed);
        };

        push(set.offer(e.p.swapped(), e.q.swapped(), e.softness,
                       DerivedBy{'a', id, id, e.p, e.q, e.q, e.soft() ? 1 : 0}));

        // e as either parent of the composition rule, sharing node s.
        std::vector<PairNode> shared{e.p};
        if (e.q != e.p) shared.push_back(e.q);
        for (PairNode s : shared) {
            const PairNode o = other_end(e, s);
            for (int id2 : set.incident(s)) {
                const PairEdge e2 = set.edges()[static_cast<std::size_t>(id2)];
                const PairNode w = other_end(e2, s);
                const bool soft = e.soft() || e2.soft();
                // {o, s} + {s, w} -> {o, w̄}
                push(set.offer(o, w.swapped(), soft ? Softness::Soft : Softness::Hard,
                               DerivedBy{'b', id, static_cast<std::size_t>(id2), o, s, w,
                                         soft ? (e.soft() ? 1 : 2) : 0}));
                // {w, s} + {s, o} -> {w, ō}
                push(set.offer(w, o.swapped(), soft ? Softness::Soft : Softness::Hard,
                               DerivedBy{'b', static_cast<std::size_t>(id2), id, w, s, o,
                                         soft ? (e2.soft() ? 1 : 2) : 0}));
            }
        }
    }
    return std::move(set.edges());
}

std::optional<std::size_t> PairGraph::find(PairNode p, PairNode q) const
{
    PairIndex idx(domain_size);
    int id = edge_at[static_cast<std::size_t>(idx(p) * idx.size() + idx(q))];
    if (id < 0) return std::nullopt;
    return static_cast<std::size_t>(id);
}

std::vector<std::vector<int>> PairGraph::adjacency() const
{
    PairIndex idx(domain_size);
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(idx.size()));
    for (const auto& e : edges) {
        adj[static_cast<std::size_t>(idx(e.p))].push_back(idx(e.q));
        if (e.p != e.q) adj[static_cast<std::size_t>(idx(e.q))].push_back(idx(e.p));
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    return adj;
}

std::size_t PairGraph::soft_count() const
{
    return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [](const PairEdge& e) { return e.soft(); }));
}

std::size_t PairGraph::hard_count() const { return edges.size() - soft_count(); }

PairGraph make_graph(int domain_size, std::vector<PairEdge> edges, std::vector<BinaryView> pool)
{
    PairGraph g;
    g.domain_size = domain_size;
    PairIndex idx(domain_size);
    g.edge_at.assign(static_cast<std::size_t>(idx.size() * idx.size()), -1);
    for (auto& e : edges) {
        if (e.q < e.p) std::swap(e.p, e.q);
        if (e.p.first == e.p.second || e.q.first == e.q.second) throw InputError("pair node with equal labels");
    }
    g.edges = std::move(edges);
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const auto& e = g.edges[i];
        g.edge_at[static_cast<std::size_t>(idx(e.p) * idx.size() + idx(e.q))] = static_cast<int>(i);
        g.edge_at[static_cast<std::size_t>(idx(e.q) * idx.size() + idx(e.p))] = static_cast<int>(i);
    }
    g.pool = std::move(pool);
    return g;
}

PairGraph build_pair_graph(const Language& lang, const PoolConfig& config)
{
    BinaryPool pool = enumerate_binary_pool(lang, config);
    auto edges = close_edges(detect_edges(pool.views, lang.domain_size), lang.domain_size);
    PairGraph g = make_graph(lang.domain_size, std::move(edges), std::move(pool.views));
    g.truncated = pool.truncated;
    return g;
}

MSplit compute_m(const PairGraph& graph)
{
    PairIndex idx(graph.domain_size);
    MSplit split;
    split.in_m.assign(static_cast<std::size_t>(idx.size()), true);
    for (int i = 0; i < idx.size(); ++i) {
        PairNode p = idx.node(i);
        if (graph.has_self_loop(p)) {
            split.in_m[static_cast<std::size_t>(i)] = false;
            split.m_bar.push_back(p);
        } else {
            split.m.push_back(p);
        }
    }
    return split;
}

namespace {

// Adds unary terms on both arguments so that, for row pair (a1, b1) and
// column pair (a2, b2), the off-diagonal entries f(a1, b2) and f(b1, a2)
// coincide and both diagonal entries exceed them. Unary terms cancel in
// the fence inequality, so the fence and its softness are unchanged.
BinaryView normalize_fence(const BinaryView& f, PairNode row, PairNode col)
{
    const auto [a1, b1] = row;
    const auto [a2, b2] = col;
    const Cost& alpha = f.table.at(a1, a2);
    const Cost& alpha2 = f.table.at(b1, b2);
    const Rational g1 = f.table.at(a1, b2).value();
    const Rational g2 = f.table.at(b1, a2).value();

    // Offsets on x = a1 (s1), x = b1 (s2), y = a2 (t1), y = b2 (t2).
    Rational s1 = 0, s2 = 0, t1 = 0, t2 = 0;
    if (alpha.is_finite() && alpha2.is_finite()) {
        Rational c = (alpha.value() + alpha2.value() - g1 - g2) / 2;
        s1 = c - alpha.value() + g2;
        t1 = g1 + s1 - g2;
    } else if (alpha.is_infinite() && alpha2.is_finite()) {
        Rational level = g1 + g2 - alpha2.value() + 1;
        t2 = level - g1;
        s2 = level - g2;
    } else if (alpha.is_finite() && alpha2.is_infinite()) {
        Rational level = g1 + g2 - alpha.value() + 1;
        s1 = level - g1;
        t1 = level - g2;
    } else {
        t1 = g1 - g2;
    }

    const int n = f.table.domain_size;
    auto unary = [n](Label x, const Rational& vx, Label y, const Rational& vy) {
        std::vector<Rational> u(static_cast<std::size_t>(n), Rational(0));
        u[static_cast<std::size_t>(x)] = vx;
        u[static_cast<std::size_t>(y)] = vy;
        Rational lo = *std::min_element(u.begin(), u.end());
        std::vector<Cost> out;
        for (auto& v : u) out.emplace_back(Rational(v - lo));
        return out;
    };
    BinaryView g = add_unary(f, 0, unary(a1, s1, b1, s2));
    return add_unary(g, 1, unary(a2, t1, b2, t2));
}

class Realizer {
public:
    explicit Realizer(const PairGraph& g) : g_(g) {}

    BinaryView realize(std::size_t id, PairNode row, bool want_soft)
    {
        auto key = std::make_tuple(id, row, want_soft);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const PairEdge& e = g_.edges.at(id);
        if (row != e.p && row != e.q) throw std::logic_error("realize: row is not an endpoint");
        const PairNode col = row == e.p ? e.q : e.p;
        if (want_soft && !e.soft_origin) throw std::logic_error("realize: soft witness requested for hard edge");
        const EdgeOrigin& origin = want_soft ? *e.soft_origin : e.origin;

        BinaryView out = std::visit([&](const auto& o) { return from(o, row, col, want_soft); }, origin);
        auto s = fence(out.table, row.first, row.second, col.first, col.second);
        if (!s || (want_soft && *s != Softness::Soft))
            throw std::logic_error("realize: assembled view does not witness edge " + to_string(row) + " -- " +
                                   to_string(col));
        memo_.emplace(key, out);
        return out;
    }

private:
    BinaryView from(const DetectedBy& d, PairNode row, PairNode col, bool)
    {
        const BinaryView& v = g_.pool.at(d.view);
        const PairNode r{d.quad[0], d.quad[1]};
        const PairNode c{d.quad[2], d.quad[3]};
        if ((row == r && col == c) || (row == r.swapped() && col == c.swapped())) return v;
        return transpose(v);
    }

    BinaryView from(const DerivedBy& d, PairNode row, PairNode col, bool want_soft)
    {
        if (d.rule == 'a') {
            // Mirror: the parent's witness at (row̄, col̄) is the same inequality.
            return realize(d.parent1, row.swapped(), want_soft);
        }
        const bool soft1 = want_soft && d.soft_parent == 1;
        const bool soft2 = want_soft && d.soft_parent == 2;
        BinaryView f = normalize_fence(realize(d.parent1, d.p, soft1), d.p, d.q);
        BinaryView h = normalize_fence(realize(d.parent2, d.q, soft2), d.q, d.r);
        BinaryView chained = min_chain(f, h, {d.q.first, d.q.second});
        const PairNode target = d.r.swapped();
        if (row == d.p && col == target) return chained;
        return transpose(chained);
    }

    const PairGraph& g_;
    std::map<std::tuple<std::size_t, PairNode, bool>, BinaryView> memo_;
};

}  // namespace

BinaryView realize_edge(const PairGraph& graph, std::size_t edge, PairNode row, bool want_soft)
{
    Realizer r(graph);
    return r.realize(edge, row, want_soft);
}

std::optional<SelfLoopWitness> find_soft_self_loop(const PairGraph& graph)
{
    PairIndex idx(graph.domain_size);
    // Direct detections from views whose pins did not leak come first.
    for (int i = 0; i < idx.size(); ++i) {
        PairNode p = idx.node(i);
        auto id = graph.find(p, p);
        if (!id) continue;
        const auto& e = graph.edges[*id];
        if (!e.soft()) continue;
        if (const auto* d = std::get_if<DetectedBy>(&*e.soft_origin)) {
            const auto& view = graph.pool.at(d->view);
            if (view.penalty_leaked) continue;
            return SelfLoopWitness{p, view, {p.first, p.second, p.first, p.second}, false};
        }
    }
    for (int i = 0; i < idx.size(); ++i) {
        PairNode p = idx.node(i);
        auto id = graph.find(p, p);
        if (!id || !graph.edges[*id].soft()) continue;
        BinaryView view = realize_edge(graph, *id, p, true);
        bool derived = std::holds_alternative<DerivedBy>(*graph.edges[*id].soft_origin);
        return SelfLoopWitness{p, std::move(view), {p.first, p.second, p.first, p.second}, derived};
    }
    return std::nullopt;
}

const char* to_string(GraphProperty p)
{
    switch (p) {
    case GraphProperty::Mirror: return "mirror";
    case GraphProperty::NoCrossEdge: return "no-cross-edge";
    case GraphProperty::Bipartite: return "bipartite";
    case GraphProperty::MirrorParity: return "mirror-parity";
    case GraphProperty::NoSoftAtLoop: return "no-soft-at-loop";
    }
    return "?";
}

namespace {

std::vector<PairNode> tree_path(const std::vector<int>& parent, int from, const PairIndex& idx)
{
    std::vector<PairNode> path;
    for (int v = from; v >= 0; v = parent[static_cast<std::size_t>(v)]) path.push_back(idx.node(v));
    return path;
}

}  // namespace

std::vector<PropertyFailure> check_graph_properties(const PairGraph& graph)
{
    std::vector<PropertyFailure> failures;
    PairIndex idx(graph.domain_size);
    const MSplit split = compute_m(graph);
    auto in_m = [&](PairNode p) { return split.in_m[static_cast<std::size_t>(idx(p))]; };

    for (const auto& e : graph.edges) {
        auto m = graph.find(e.p.swapped(), e.q.swapped());
        if (!m || graph.edges[*m].softness != e.softness)
            failures.push_back({GraphProperty::Mirror,
                                "edge " + to_string(e.p) + " -- " + to_string(e.q) +
                                    (m ? " has a mirror of different softness" : " has no mirror"),
                                {e.p, e.q}});
        if (e.p != e.q && in_m(e.p) != in_m(e.q))
            failures.push_back({GraphProperty::NoCrossEdge,
                                "edge " + to_string(e.p) + " -- " + to_string(e.q) + " joins M and its complement",
                                {e.p, e.q}});
        if (e.soft() && (!in_m(e.p) || !in_m(e.q)))
            failures.push_back({GraphProperty::NoSoftAtLoop,
                                "soft edge " + to_string(e.p) + " -- " + to_string(e.q) +
                                    " touches a node with a self-loop",
                                {e.p, e.q}});
    }

    // Two-colour (M, E[M]) by BFS from the smallest node of each component.
    const auto adj = graph.adjacency();
    std::vector<int> color(static_cast<std::size_t>(idx.size()), -1);
    std::vector<int> parent(static_cast<std::size_t>(idx.size()), -1);
    std::vector<int> component(static_cast<std::size_t>(idx.size()), -1);
    int components = 0;
    for (int s = 0; s < idx.size(); ++s) {
        if (!split.in_m[static_cast<std::size_t>(s)] || color[static_cast<std::size_t>(s)] >= 0) continue;
        std::deque<int> queue{s};
        color[static_cast<std::size_t>(s)] = 0;
        component[static_cast<std::size_t>(s)] = components;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v : adj[static_cast<std::size_t>(u)]) {
                if (!split.in_m[static_cast<std::size_t>(v)]) continue;
                if (color[static_cast<std::size_t>(v)] < 0) {
                    color[static_cast<std::size_t>(v)] = 1 - color[static_cast<std::size_t>(u)];
                    parent[static_cast<std::size_t>(v)] = u;
                    component[static_cast<std::size_t>(v)] = components;
                    queue.push_back(v);
                } else if (color[static_cast<std::size_t>(v)] == color[static_cast<std::size_t>(u)] && u <= v) {
                    auto pu = tree_path(parent, u, idx);
                    auto pv = tree_path(parent, v, idx);
                    std::reverse(pu.begin(), pu.end());
                    pu.insert(pu.end(), pv.begin(), pv.end());
                    failures.push_back({GraphProperty::Bipartite,
                                        "odd cycle through edge " + to_string(idx.node(u)) + " -- " +
                                            to_string(idx.node(v)),
                                        pu});
                }
            }
        }
        ++components;
    }
    for (int i = 0; i < idx.size(); ++i) {
        const int j = idx.mirror(i);
        if (i > j || !split.in_m[static_cast<std::size_t>(i)]) continue;
        if (component[static_cast<std::size_t>(i)] == component[static_cast<std::size_t>(j)] &&
            color[static_cast<std::size_t>(i)] == color[static_cast<std::size_t>(j)]) {
            auto pi = tree_path(parent, i, idx);
            auto pj = tree_path(parent, j, idx);
            std::reverse(pi.begin(), pi.end());
            pi.insert(pi.end(), pj.begin(), pj.end());
            failures.push_back({GraphProperty::MirrorParity,
                                "even path between " + to_string(idx.node(i)) + " and " + to_string(idx.node(j)),
                                pi});
        }
    }
    return failures;
}

std::string to_dot(const PairGraph& graph)
{
    PairIndex idx(graph.domain_size);
    std::ostringstream os;
    os << "graph pairs {\n";
    for (int i = 0; i < idx.size(); ++i) {
        PairNode p = idx.node(i);
        os << "  \"" << to_string(p) << "\"";
        if (graph.has_self_loop(p)) os << " [style=filled, fillcolor=lightgray]";
        os << ";\n";
    }
    std::vector<const PairEdge*> sorted;
    for (const auto& e : graph.edges) sorted.push_back(&e);
    std::sort(sorted.begin(), sorted.end(),
              [](const PairEdge* a, const PairEdge* b) { return std::tie(a->p, a->q) < std::tie(b->p, b->q); });
    for (const auto* e : sorted) {
        os << "  \"" << to_string(e->p) << "\" -- \"" << to_string(e->q) << "\"";
        os << (e->soft() ? " [style=solid]" : " [style=dashed]") << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace vcsp
