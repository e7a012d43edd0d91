#pragma once

#include "vcsp/express.hpp"

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace vcsp {

/// An ordered pair of distinct labels.
struct PairNode {
    Label first = 0;
    Label second = 0;

    PairNode swapped() const { return {second, first}; }
    auto operator<=>(const PairNode&) const = default;
};

std::string to_string(PairNode p);

/// Dense numbering of the |D|(|D|-1) pair nodes, lexicographic.
class PairIndex {
public:
    explicit PairIndex(int domain_size) : n_(domain_size) {}

    int size() const { return n_ * (n_ - 1); }
    int domain_size() const { return n_; }
    int operator()(PairNode p) const { return p.first * (n_ - 1) + (p.second < p.first ? p.second : p.second - 1); }
    PairNode node(int i) const
    {
        Label a = i / (n_ - 1);
        Label r = i % (n_ - 1);
        return {a, r < a ? r : r + 1};
    }
    int mirror(int i) const { return (*this)(node(i).swapped()); }

private:
    int n_;
};

enum class Softness { Hard, Soft };

/// Edge found directly: pool view `view` satisfies the strict fence
/// inequality with row pair (quad[0], quad[1]) and column pair
/// (quad[2], quad[3]).
struct DetectedBy {
    std::size_t view = 0;
    std::array<Label, 4> quad{};
};

/// Edge obtained by closure. Rule 'a' mirrors parent1; rule 'b' combines
/// {p, q} = parent1 and {q, r} = parent2 into {p, r̄}.
struct DerivedBy {
    char rule = 'a';
    std::size_t parent1 = 0;
    std::size_t parent2 = 0;
    PairNode p, q, r;
    /// Which parent (1 or 2) was soft when this derivation made the edge
    /// soft; 0 for a hard derivation.
    int soft_parent = 0;
};

using EdgeOrigin = std::variant<DetectedBy, DerivedBy>;

/// Unordered edge, stored with p <= q. Self-loops have p == q.
struct PairEdge {
    PairNode p, q;
    Softness softness = Softness::Hard;
    /// How the edge first entered the set.
    EdgeOrigin origin;
    /// How it first became soft (set iff softness == Soft). Parents of a soft
    /// origin became soft, or were created, strictly earlier.
    std::optional<EdgeOrigin> soft_origin;

    bool soft() const { return softness == Softness::Soft; }
    bool self_loop() const { return p == q; }
};

/// Emits every strict fence found in the pool. Duplicate edges are merged,
/// soft winning over hard.
std::vector<PairEdge> detect_edges(const std::vector<BinaryView>& pool, int domain_size);

/// Smallest superset closed under the mirror rule and the composition rule.
/// Edge indices in DerivedBy refer to positions in the returned vector.
std::vector<PairEdge> close_edges(std::vector<PairEdge> edges, int domain_size);

struct PairGraph {
    int domain_size = 0;
    std::vector<PairEdge> edges;
    std::vector<BinaryView> pool;
    bool truncated = false;
    /// Edge id (or -1) for every ordered pair of node indices.
    std::vector<int> edge_at;

    /// Edge id for {p, q}, if present.
    std::optional<std::size_t> find(PairNode p, PairNode q) const;
    bool has_self_loop(PairNode p) const { return find(p, p).has_value(); }
    /// Neighbours of every pair node (self-loops included), by PairIndex.
    std::vector<std::vector<int>> adjacency() const;

    std::size_t soft_count() const;
    std::size_t hard_count() const;
};

/// Builds the graph from an edge list without closing it (fixtures, tests).
PairGraph make_graph(int domain_size, std::vector<PairEdge> edges, std::vector<BinaryView> pool = {});

/// Pool, detection and closure in one step.
PairGraph build_pair_graph(const Language& lang, const PoolConfig& config = {});

struct MSplit {
    std::vector<PairNode> m;        // nodes without a self-loop
    std::vector<PairNode> m_bar;    // nodes with one
    std::vector<bool> in_m;         // by PairIndex
};

MSplit compute_m(const PairGraph& graph);

/// A soft self-loop at `node` together with a binary member of the
/// expressive power that witnesses it at (a, b, a, b).
struct SelfLoopWitness {
    PairNode node;
    BinaryView view;
    std::array<Label, 4> quad{};
    /// True when the loop came from closure and `view` was assembled from
    /// its ancestors.
    bool derived = false;
};

std::optional<SelfLoopWitness> find_soft_self_loop(const PairGraph& graph);

/// A binary function witnessing edge id with `row` as its row pair and the
/// other endpoint as column pair, assembled from detected ancestors. Soft
/// edges yield soft witnesses when `want_soft` is set.
BinaryView realize_edge(const PairGraph& graph, std::size_t edge, PairNode row, bool want_soft);

/// Checks the strict fence inequality for view f at (a, b, a', b'); returns
/// the softness when it holds.
std::optional<Softness> fence(const CostFunction& f, Label a, Label b, Label a2, Label b2);

enum class GraphProperty {
    Mirror,          // {p, q} present iff {p̄, q̄} present, same softness
    NoCrossEdge,     // no edge between M and M̄
    Bipartite,       // (M, E[M]) has no odd cycle
    MirrorParity,    // no even path from p to p̄ inside M
    NoSoftAtLoop,    // no soft edge touches M̄
};

const char* to_string(GraphProperty p);

struct PropertyFailure {
    GraphProperty property;
    std::string message;
    std::vector<PairNode> path;
};

/// Verifies the structural properties a closed graph without soft
/// self-loops must have. Each failure carries a concrete edge, cycle or path.
std::vector<PropertyFailure> check_graph_properties(const PairGraph& graph);

/// Deterministic DOT rendering.
std::string to_dot(const PairGraph& graph);

}  // namespace vcsp
