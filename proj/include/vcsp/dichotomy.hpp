#pragma once

#include "vcsp/pairgraph.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace vcsp {

/// ±1 signs on pair nodes, 0 where unassigned (outside M).
class SignAssignment {
public:
    SignAssignment() = default;
    explicit SignAssignment(int domain_size)
        : domain_size_(domain_size), sigma_(static_cast<std::size_t>(PairIndex(domain_size).size()), 0)
    {
    }

    int domain_size() const { return domain_size_; }
    int operator()(PairNode p) const { return sigma_[static_cast<std::size_t>(PairIndex(domain_size_)(p))]; }
    bool assigned(PairNode p) const { return (*this)(p) != 0; }
    void set(PairNode p, int sign) { sigma_[static_cast<std::size_t>(PairIndex(domain_size_)(p))] = static_cast<std::int8_t>(sign); }

    friend bool operator==(const SignAssignment&, const SignAssignment&) = default;

private:
    int domain_size_ = 0;
    std::vector<std::int8_t> sigma_;
};

/// Propagation contradiction: an odd cycle inside M, or p and p̄ forced to
/// the same sign.
struct ColoringConflict {
    enum class Kind { OddCycle, MirrorSameSign } kind;
    std::vector<PairNode> witness;
};

/// Signs on M: each component of (M, E[M]) is seeded at its
/// lexicographically smallest node (opposite to the mirror if that is
/// already signed, +1 otherwise) and propagated by BFS parity.
std::variant<SignAssignment, ColoringConflict> two_color(const PairGraph& graph);

/// A pair of binary operations on D, stored as |D| x |D| tables.
struct OperationPair {
    int domain_size = 0;
    std::vector<Label> meet_table;
    std::vector<Label> join_table;

    Label meet(Label a, Label b) const { return meet_table[static_cast<std::size_t>(a * domain_size + b)]; }
    Label join(Label a, Label b) const { return join_table[static_cast<std::size_t>(a * domain_size + b)]; }

    bool conservative() const;
    bool idempotent() const;
    bool commutative_on(PairNode p) const { return meet(p.first, p.second) == meet(p.second, p.first) &&
                                                    join(p.first, p.second) == join(p.second, p.first); }

    /// ⟨min, max⟩ under the total order listing labels from smallest up.
    static OperationPair from_order(const std::vector<Label>& order);
    /// Commutative conservative pair from one bit per unordered pair a < b:
    /// bit clear means a ⊓ b = a.
    static OperationPair from_orientation(int domain_size, const std::vector<bool>& bits);

    friend bool operator==(const OperationPair&, const OperationPair&) = default;
};

/// Meet/join from signs: on M, {a ⊓ b, a ⊔ b} = {a, b} with σ(a ⊓ b, a ⊔ b) = +1;
/// projections on M̄. Throws InputError if σ is not antisymmetric on M.
OperationPair build_meet_join(const SignAssignment& sigma, const std::vector<bool>& in_m, int domain_size);

enum class VerifyMode { Full, Delta2 };

const char* to_string(VerifyMode m);

struct Violation {
    std::string function;
    std::vector<Label> x, y;
};

/// Checks f(x ⊓ y) + f(x ⊔ y) <= f(x) + f(y) for x, y in dom f. Delta2 mode
/// restricts to pairs differing in at most two coordinates and also checks
/// every view in `pool`. Unary functions are skipped: any conservative pair
/// satisfies them with equality.
std::optional<Violation> verify_multimorphism(const OperationPair& pair, const Language& lang, VerifyMode mode,
                                              const std::vector<BinaryView>& pool = {});

std::optional<Violation> verify_function(const OperationPair& pair, const CostFunction& f, VerifyMode mode);

struct StpCertificate {
    OperationPair pair;
    SignAssignment sigma;
    std::vector<std::string> verified_against;
    VerifyMode mode_used = VerifyMode::Full;
};

struct SearchConfig {
    int max_domain = 8;
    std::uint64_t max_candidates = std::uint64_t{1} << 22;
};

struct SearchStats {
    std::uint64_t space = 0;       // 2^(unordered pairs)
    std::uint64_t candidates = 0;  // after edge constraints
    std::uint64_t verified = 0;    // full verifications run
    std::uint64_t cache_hits = 0;  // rejected by a cached violation
    bool edge_conflict = false;    // edge constraints alone are unsatisfiable
};

/// Exhaustive search over commutative conservative pairs, pruned by the
/// graph's edges (every edge forces opposite signs on its endpoints).
/// Returns the first verified pair in enumeration order. Throws BudgetError
/// above the configured domain size or candidate count.
std::optional<StpCertificate> search_stp(const Language& lang, const PairGraph& graph, const SearchConfig& config = {},
                                         SearchStats* stats = nullptr);

/// A total order (smallest label first) under which ⟨min, max⟩ is a
/// multimorphism: the certificate's tournament when transitive, otherwise
/// the lexicographically first valid permutation (|D| <= 8).
std::optional<std::vector<Label>> find_submodular_order(const Language& lang, const StpCertificate& cert);

enum class Verdict { Tractable, NpHard, GeneralConjecturedTractable, GeneralUnknown };
enum class HardnessReason { None, SoftSelfLoop, NoStp };
enum class SigmaRoute { Skipped, Verified, Failed, Conflict };

const char* to_string(Verdict v);
const char* to_string(HardnessReason r);
const char* to_string(SigmaRoute r);

struct ClassifierConfig {
    PoolConfig pool;
    SearchConfig search;
};

struct ClassifyStats {
    SearchStats search;
    SigmaRoute sigma_route = SigmaRoute::Skipped;
    std::size_t pool_views = 0;
    bool pool_truncated = false;
};

struct Classification {
    Verdict verdict = Verdict::GeneralUnknown;
    LanguageMode mode = LanguageMode::FiniteValued;
    std::optional<StpCertificate> certificate;
    std::optional<std::vector<Label>> order;
    std::optional<SelfLoopWitness> witness;
    HardnessReason reason = HardnessReason::None;
    std::shared_ptr<const PairGraph> graph;
    ClassifyStats stats;
};

Classification classify(const Language& lang, const ClassifierConfig& config = {});

}  // namespace vcsp
