#pragma once

#include "vcsp/dichotomy.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vcsp {

enum class SolveMethod { BruteForce, MinCut };

const char* to_string(SolveMethod m);

struct SolveStats {
    std::uint64_t evaluations = 0;   // brute force: full assignments reached
    std::size_t flow_solves = 0;     // min-cut: max-flow runs (incl. tie-break)
    std::size_t duality_checked = 0; // runs whose flow value matched the cut capacity
    std::size_t network_nodes = 0;
    std::size_t network_arcs = 0;
};

struct SolveResult {
    Assignment assignment;
    Cost cost;
    SolveMethod method = SolveMethod::BruteForce;
    bool infeasible = false;
    SolveStats stats;
};

struct BruteForceConfig {
    std::uint64_t budget = std::uint64_t{1} << 24;
    int threads = 1;
};

/// Exhaustive minimum with the lexicographically smallest optimal
/// assignment. Throws BudgetError when |D|^|V| exceeds the budget.
SolveResult brute_force(const VcspInstance& instance, const BruteForceConfig& config = {});

struct FlowArc {
    int from = 0;
    int to = 0;
    Cost capacity;
};

struct FlowNetwork {
    int node_count = 0;
    int source = 0;
    int sink = 1;
    std::vector<FlowArc> arcs;

    int add_node() { return node_count++; }
    void add_arc(int from, int to, Cost capacity) { arcs.push_back({from, to, std::move(capacity)}); }
};

struct FlowResult {
    Cost value;
    /// Nodes reachable from the source in the final residual graph.
    std::vector<bool> source_side;
    /// Total capacity of arcs leaving source_side.
    Cost cut_capacity;
};

/// Exact Edmonds-Karp over rationals; arcs are scanned in insertion order.
/// An infinite-capacity augmenting path yields value = infinity.
FlowResult max_flow(const FlowNetwork& network);

/// The min-cut solver refused the instance.
class MinCutRefusal : public std::runtime_error {
public:
    MinCutRefusal(const std::string& what, std::optional<std::array<Label, 4>> quad = std::nullopt)
        : std::runtime_error(what), quad(quad)
    {
    }
    /// For a non-submodular term: labels (x, x', y, y') with x < x' and
    /// y < y' in the order and θ(x,y) + θ(x',y') > θ(x,y') + θ(x',y).
    std::optional<std::array<Label, 4>> quad;
};

/// First submodularity violation of a binary table under `order`
/// (smallest first), in the form MinCutRefusal::quad.
std::optional<std::array<Label, 4>> submodular_violation(const CostFunction& f, const std::vector<Label>& order);

/// Chain-encoded min-cut for unary and binary terms submodular under
/// `order`. Refuses terms of arity >= 3 and binary terms with infinite
/// entries. The result matches brute_force bit-for-bit, tie-break included.
SolveResult solve_mincut(const VcspInstance& instance, const std::vector<Label>& order);

/// Brute force hit its budget and no polynomial route applied.
class IntractableAtScale : public BudgetError {
public:
    using BudgetError::BudgetError;
};

/// Min-cut when the classification is TRACTABLE with an order and every
/// term has arity <= 2; brute force otherwise.
SolveResult solve(const VcspInstance& instance, const Classification& classification,
                  const BruteForceConfig& config = {});

}  // namespace vcsp
