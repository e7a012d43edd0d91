#pragma once

#include "vcsp/cost.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vcsp {

using Label = int;
using Assignment = std::vector<Label>;

inline constexpr int kMaxDomainSize = 16;
inline constexpr int kMaxArity = 4;

/// Number of tuples in D^arity.
std::size_t tuple_count(int domain_size, int arity);

/// Row-major decode of a table index into a tuple (first coordinate most
/// significant).
void decode_tuple(std::size_t index, int domain_size, std::span<Label> out);

/// Dense cost table over D^arity, row-major.
///
/// Construction does not validate; call check() (or validate_language) on
/// anything that came from outside.
struct CostFunction {
    std::string name;
    int arity = 0;
    int domain_size = 0;
    std::vector<Cost> table;

    CostFunction() = default;
    CostFunction(std::string name, int arity, int domain_size, std::vector<Cost> table)
        : name(std::move(name)), arity(arity), domain_size(domain_size), table(std::move(table))
    {
    }

    /// All-zero table of the right size.
    static CostFunction zeros(std::string name, int arity, int domain_size);

    std::size_t index(std::span<const Label> tuple) const;
    const Cost& operator()(std::span<const Label> tuple) const { return table[index(tuple)]; }
    Cost& operator()(std::span<const Label> tuple) { return table[index(tuple)]; }

    const Cost& at(Label x) const { return table[static_cast<std::size_t>(x)]; }
    const Cost& at(Label x, Label y) const
    {
        return table[static_cast<std::size_t>(x) * domain_size + y];
    }
    Cost& at(Label x, Label y) { return table[static_cast<std::size_t>(x) * domain_size + y]; }

    bool in_domain(std::span<const Label> tuple) const { return (*this)(tuple).is_finite(); }
    bool finite_valued() const;

    /// Sum / maximum of the finite entries (0 when there are none).
    Rational finite_sum() const;
    Rational finite_max() const;

    /// Throws InputError on size mismatch, negative entries or limits.
    void check() const;
};

enum class LanguageMode { FiniteValued, GeneralValued };

const char* to_string(LanguageMode mode);

/// A finite set of cost functions over a shared domain. Every finite-valued
/// unary function is implicitly a member; listed unary functions never
/// affect classification.
struct Language {
    int domain_size = 0;
    std::vector<CostFunction> functions;

    LanguageMode mode() const;
    const CostFunction* find(std::string_view name) const;

    /// Functions of arity >= 2; these alone drive classification.
    std::vector<const CostFunction*> non_unary() const;

    void check() const;
};

struct Term {
    std::shared_ptr<const CostFunction> function;
    std::vector<int> scope;
};

struct UnaryTerm {
    int node = 0;
    std::vector<Cost> table;
};

struct VcspInstance {
    int domain_size = 0;
    int node_count = 0;
    std::vector<Term> terms;
    std::vector<UnaryTerm> unary_terms;

    void add_term(std::shared_ptr<const CostFunction> f, std::vector<int> scope);
    void add_term(const CostFunction& f, std::vector<int> scope);
    void add_unary(int node, std::vector<Cost> table);

    /// Throws InputError if a scope is out of range or mismatches arity.
    void check() const;
};

/// Sum of all terms at x, with infinity absorbing. Throws InputError for a
/// wrong-length assignment or an out-of-range label.
Cost evaluate(const VcspInstance& instance, std::span<const Label> x);

struct Diagnostic {
    std::string function;
    std::string kind;  // "size-mismatch", "negative-cost", "domain-mismatch", "limit", ...
    std::string message;
};

struct DomainSummary {
    std::string function;
    std::size_t finite_entries = 0;
    std::size_t total_entries = 0;
};

struct LanguageReport {
    std::vector<Diagnostic> diagnostics;
    LanguageMode mode = LanguageMode::FiniteValued;
    std::vector<DomainSummary> domains;

    bool ok() const { return diagnostics.empty(); }
};

LanguageReport validate_language(const Language& lang);

/// Adds delta to every finite entry. Throws InputError if an entry would
/// become negative.
CostFunction shift_costs(const CostFunction& f, const Rational& delta);

/// u_d(d) = 0, u_d(x) = c elsewhere. Requires c > 0.
CostFunction fixed_value_unary(Label d, const Rational& c, int domain_size);

}  // namespace vcsp
