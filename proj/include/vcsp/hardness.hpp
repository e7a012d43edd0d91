#pragma once

#include "vcsp/solver.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vcsp {

enum class WitnessKind { BothFinite, OneInfinite };

const char* to_string(WitnessKind k);

/// A soft self-loop at (a, b) normalized into one of the two gadget forms.
///
/// BothFinite: h(a,a) = h(b,b) > h(a,b) = h(b,a), all finite.
/// OneInfinite: h(a,a) = h(a,b) = h(b,a) = K and h(b,b) = ∞; K is 0 for the
/// canonical gadget and otherwise whatever the unary corrections left.
struct HardnessWitness {
    PairNode pair_node;  // (a, b); for OneInfinite, b is the label with h(b,b) = ∞
    BinaryView view;
    WitnessKind kind = WitnessKind::BothFinite;
    CostFunction normalized;
    /// How h was obtained from the view, e.g. "sym" or "unary a=1/2".
    std::string normalization;

    Label a() const { return pair_node.first; }
    Label b() const { return pair_node.second; }
};

/// Throws InputError unless the view is a soft fence at (a, b, a, b).
HardnessWitness normalize_witness(const BinaryView& view, Label a, Label b);

/// Simple undirected graph on vertices 0..vertex_count-1.
struct SourceGraph {
    int vertex_count = 0;
    std::vector<std::pair<int, int>> edges;

    /// Throws InputError on self-loops, duplicates or out-of-range vertices.
    void check() const;
};

/// "u v" per line, 0-based; blank lines and '#' comments ignored. The
/// vertex count is one more than the largest index mentioned.
SourceGraph parse_edge_list(std::string_view text);

/// decoded = (offset - optimum) / scale.
struct AffineDecoder {
    std::string quantity;  // "max-cut" or "max-independent-set"
    Rational offset = 0;
    Rational scale = 1;

    Rational decode(const Rational& optimum) const { return (offset - optimum) / scale; }
};

struct Reduction {
    VcspInstance instance;
    AffineDecoder decoder;
    /// Functions the instance refers to (h, plus the restriction unary).
    std::vector<std::shared_ptr<const CostFunction>> functions;
};

Reduction reduce_maxcut(const SourceGraph& src, const HardnessWitness& w);
Reduction reduce_mis(const SourceGraph& src, const HardnessWitness& w);

/// Exact oracles for the source problems (vertex_count <= 24).
int max_cut(const SourceGraph& g);
int max_independent_set(const SourceGraph& g);

struct ReductionCheck {
    bool ok = false;
    Rational expected;  // from the combinatorial oracle
    Rational decoded;   // decoder applied to the brute-force optimum
    Cost optimum;
};

/// Brute-forces both sides and compares exactly. Requires <= 16 vertices.
ReductionCheck verify_reduction(const SourceGraph& src, const Reduction& reduction);

}  // namespace vcsp
