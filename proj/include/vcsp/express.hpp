#pragma once

#include "vcsp/model.hpp"

#include <array>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace vcsp {

// Derivation records. Each node describes how a cost function is obtained
// from members of the language by adding terms and minimising over
// auxiliary nodes, so every expressed function can be re-built as an
// explicit instance (see expand_derivation).

struct Derivation;
using DerivationPtr = std::shared_ptr<const Derivation>;

struct SourceStep {
    std::string function;
};

/// min over all coordinates not in `keep`; output coordinates follow `keep`.
struct ProjectStep {
    DerivationPtr input;
    std::vector<int> keep;
};

/// min_a { u(a) + f(.., a, ..) } with u(value) = 0 and u = penalty elsewhere.
struct PinStep {
    DerivationPtr input;
    int coord = 0;
    Label value = 0;
    Rational penalty;
};

/// g(x, y) = f(x, y) + f(y, x)
struct SymmetrizeStep {
    DerivationPtr input;
};

/// h(x, z) = min_y { f(x, y) + u(y) + g(y, z) }, u = 0 on {mid_a, mid_b}, penalty elsewhere.
struct ChainStep {
    DerivationPtr left;
    DerivationPtr right;
    Label mid_a = 0;
    Label mid_b = 0;
    Rational penalty;
};

/// f + u applied to coordinate `coord`.
struct UnaryStep {
    DerivationPtr input;
    int coord = 0;
    std::vector<Cost> unary;
};

struct Derivation {
    std::variant<SourceStep, ProjectStep, PinStep, SymmetrizeStep, ChainStep, UnaryStep> step;
};

/// Compact human-readable form, e.g. "sym(pin(f,2=0))".
std::string to_string(const Derivation& d);

/// Arity of the function a derivation produces.
int derivation_arity(const Derivation& d, const Language& lang);

/// A member of the expressive power of a language together with its
/// derivation.
struct ExpressedFunction {
    CostFunction table;
    DerivationPtr derivation;
    /// A pin hit a coordinate value with no finite completion, so the
    /// penalty leaked into the table. Still a genuine member, but not the
    /// restriction it was meant to be.
    bool penalty_leaked = false;
    /// Every entry of a chain reached the penalty.
    bool degenerate = false;

    int arity() const { return table.arity; }
};

/// Binary members are what edge detection consumes.
using BinaryView = ExpressedFunction;

/// Lifts a language function into an expressed function with a source step.
ExpressedFunction source(const CostFunction& f);

BinaryView symmetrize(const ExpressedFunction& f);
BinaryView project_min(const ExpressedFunction& f, std::array<int, 2> keep);
/// General form: keep any non-empty ordered subset of coordinates.
ExpressedFunction project_min(const ExpressedFunction& f, std::span<const int> keep);
ExpressedFunction pin_coordinate(const ExpressedFunction& f, int coord, Label value);
BinaryView min_chain(const BinaryView& f, const BinaryView& g, std::array<Label, 2> mid_pair);
ExpressedFunction add_unary(const ExpressedFunction& f, int coord, std::vector<Cost> unary);
BinaryView transpose(const BinaryView& f);

struct PoolConfig {
    int chain_depth = 1;
    std::size_t max_views = 4096;
};

struct PoolStats {
    std::size_t candidates = 0;
    std::size_t pinned_candidates = 0;
    std::size_t projected_candidates = 0;
    std::size_t symmetrized_candidates = 0;
    std::size_t chain_candidates = 0;
    std::size_t duplicates = 0;
};

struct BinaryPool {
    std::vector<BinaryView> views;
    bool truncated = false;
    PoolStats stats;
};

/// Finite under-approximation of the binary part of the expressive power.
/// Deduplicated by exact table equality; the first derivation in
/// enumeration order is kept, and enumeration order is deterministic.
BinaryPool enumerate_binary_pool(const Language& lang, const PoolConfig& config = {});

/// An explicit instance realising a derivation: the expressed function
/// equals the minimum of the instance over every node not in `outputs`.
struct Gadget {
    VcspInstance instance;
    std::vector<int> outputs;
};

Gadget expand_derivation(const Derivation& d, const Language& lang);

}  // namespace vcsp
