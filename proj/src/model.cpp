#include "vcsp/model.hpp"

#include <algorithm>

namespace vcsp {

std::size_t tuple_count(int domain_size, int arity)
{
    std::size_t n = 1;
    for (int i = 0; i < arity; ++i) n *= static_cast<std::size_t>(domain_size);
    return n;
}

void decode_tuple(std::size_t index, int domain_size, std::span<Label> out)
{
    for (std::size_t k = out.size(); k-- > 0;) {
        out[k] = static_cast<Label>(index % domain_size);
        index /= domain_size;
    }
}

CostFunction CostFunction::zeros(std::string name, int arity, int domain_size)
{
    return CostFunction(std::move(name), arity, domain_size,
                        std::vector<Cost>(tuple_count(domain_size, arity), Cost(0)));
}

std::size_t CostFunction::index(std::span<const Label> tuple) const
{
    std::size_t idx = 0;
    for (Label x : tuple) idx = idx * domain_size + static_cast<std::size_t>(x);
    return idx;
}

bool CostFunction::finite_valued() const
{
    return std::all_of(table.begin(), table.end(), [](const Cost& c) { return c.is_finite(); });
}

Rational CostFunction::finite_sum() const
{
    Rational s = 0;
    for (const Cost& c : table)
        if (c.is_finite()) s += c.value();
    return s;
}

Rational CostFunction::finite_max() const
{
    Rational m = 0;
    for (const Cost& c : table)
        if (c.is_finite() && c.value() > m) m = c.value();
    return m;
}

void CostFunction::check() const
{
    if (domain_size < 2 || domain_size > kMaxDomainSize)
        throw InputError("function '" + name + "': domain size " + std::to_string(domain_size) +
                         " outside [2, " + std::to_string(kMaxDomainSize) + "]");
    if (arity < 1 || arity > kMaxArity)
        throw InputError("function '" + name + "': arity " + std::to_string(arity) + " outside [1, " +
                         std::to_string(kMaxArity) + "]");
    if (table.size() != tuple_count(domain_size, arity))
        throw InputError("function '" + name + "': table has " + std::to_string(table.size()) +
                         " entries, expected " + std::to_string(tuple_count(domain_size, arity)));
    for (std::size_t i = 0; i < table.size(); ++i)
        if (table[i] < Cost(0))
            throw InputError("function '" + name + "': negative cost at entry " + std::to_string(i));
}

const char* to_string(LanguageMode mode)
{
    return mode == LanguageMode::FiniteValued ? "finite_valued" : "general_valued";
}

LanguageMode Language::mode() const
{
    for (const auto& f : functions)
        if (!f.finite_valued()) return LanguageMode::GeneralValued;
    return LanguageMode::FiniteValued;
}

const CostFunction* Language::find(std::string_view name) const
{
    for (const auto& f : functions)
        if (f.name == name) return &f;
    return nullptr;
}

std::vector<const CostFunction*> Language::non_unary() const
{
    std::vector<const CostFunction*> out;
    for (const auto& f : functions)
        if (f.arity >= 2) out.push_back(&f);
    return out;
}

void Language::check() const
{
    auto report = validate_language(*this);
    if (!report.ok()) {
        const auto& d = report.diagnostics.front();
        throw InputError(d.message);
    }
}

void VcspInstance::add_term(std::shared_ptr<const CostFunction> f, std::vector<int> scope)
{
    terms.push_back(Term{std::move(f), std::move(scope)});
}

void VcspInstance::add_term(const CostFunction& f, std::vector<int> scope)
{
    add_term(std::make_shared<const CostFunction>(f), std::move(scope));
}

void VcspInstance::add_unary(int node, std::vector<Cost> table)
{
    unary_terms.push_back(UnaryTerm{node, std::move(table)});
}

void VcspInstance::check() const
{
    if (node_count < 0) throw InputError("negative node count");
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const auto& term = terms[t];
        if (!term.function) throw InputError("term " + std::to_string(t) + " has no function");
        if (term.function->domain_size != domain_size)
            throw InputError("term " + std::to_string(t) + ": function '" + term.function->name +
                             "' has a different domain size");
        if (static_cast<int>(term.scope.size()) != term.function->arity)
            throw InputError("term " + std::to_string(t) + ": scope length " + std::to_string(term.scope.size()) +
                             " does not match arity of '" + term.function->name + "'");
        for (int v : term.scope)
            if (v < 0 || v >= node_count)
                throw InputError("term " + std::to_string(t) + ": node " + std::to_string(v) + " out of range");
    }
    for (const auto& u : unary_terms) {
        if (u.node < 0 || u.node >= node_count)
            throw InputError("unary term on node " + std::to_string(u.node) + " out of range");
        if (static_cast<int>(u.table.size()) != domain_size)
            throw InputError("unary term on node " + std::to_string(u.node) + " has wrong table size");
    }
}

Cost evaluate(const VcspInstance& instance, std::span<const Label> x)
{
    if (static_cast<int>(x.size()) != instance.node_count)
        throw InputError("assignment has " + std::to_string(x.size()) + " labels, expected " +
                         std::to_string(instance.node_count));
    for (Label l : x)
        if (l < 0 || l >= instance.domain_size) throw InputError("label " + std::to_string(l) + " out of range");

    Cost total;
    Label buf[kMaxArity];
    for (const auto& term : instance.terms) {
        const auto& f = *term.function;
        for (std::size_t k = 0; k < term.scope.size(); ++k) buf[k] = x[term.scope[k]];
        total += f(std::span<const Label>(buf, term.scope.size()));
        if (total.is_infinite()) return total;
    }
    for (const auto& u : instance.unary_terms) {
        total += u.table[x[u.node]];
        if (total.is_infinite()) return total;
    }
    return total;
}

LanguageReport validate_language(const Language& lang)
{
    LanguageReport report;
    report.mode = lang.mode();
    if (lang.domain_size < 2 || lang.domain_size > kMaxDomainSize)
        report.diagnostics.push_back({"", "limit",
                                      "domain size " + std::to_string(lang.domain_size) + " outside [2, " +
                                          std::to_string(kMaxDomainSize) + "]"});
    for (std::size_t i = 0; i < lang.functions.size(); ++i) {
        const auto& f = lang.functions[i];
        for (std::size_t j = 0; j < i; ++j)
            if (lang.functions[j].name == f.name)
                report.diagnostics.push_back({f.name, "duplicate-name", "duplicate function name '" + f.name + "'"});
        if (f.domain_size != lang.domain_size)
            report.diagnostics.push_back({f.name, "domain-mismatch",
                                          "function '" + f.name + "' has domain size " +
                                              std::to_string(f.domain_size) + ", language has " +
                                              std::to_string(lang.domain_size)});
        if (f.arity < 1 || f.arity > kMaxArity) {
            report.diagnostics.push_back({f.name, "limit",
                                          "function '" + f.name + "': arity " + std::to_string(f.arity) +
                                              " outside [1, " + std::to_string(kMaxArity) + "]"});
            continue;
        }
        std::size_t expected = tuple_count(lang.domain_size, f.arity);
        if (f.table.size() != expected)
            report.diagnostics.push_back({f.name, "size-mismatch",
                                          "function '" + f.name + "': table has " + std::to_string(f.table.size()) +
                                              " entries, expected " + std::to_string(expected)});
        DomainSummary dom{f.name, 0, f.table.size()};
        for (std::size_t k = 0; k < f.table.size(); ++k) {
            if (f.table[k].is_finite()) {
                ++dom.finite_entries;
                if (f.table[k].value() < 0)
                    report.diagnostics.push_back({f.name, "negative-cost",
                                                  "function '" + f.name + "': negative cost " +
                                                      f.table[k].to_string() + " at entry " + std::to_string(k)});
            }
        }
        report.domains.push_back(dom);
    }
    return report;
}

CostFunction shift_costs(const CostFunction& f, const Rational& delta)
{
    CostFunction g = f;
    for (std::size_t i = 0; i < g.table.size(); ++i) {
        g.table[i] = f.table[i].shifted(delta);
        if (g.table[i] < Cost(0))
            throw InputError("shift by " + to_string(delta) + " makes entry " + std::to_string(i) + " of '" +
                             f.name + "' negative");
    }
    return g;
}

CostFunction fixed_value_unary(Label d, const Rational& c, int domain_size)
{
    if (c <= 0) throw InputError("fixed-value cost must be positive, got " + to_string(c));
    if (d < 0 || d >= domain_size) throw InputError("label " + std::to_string(d) + " out of range");
    CostFunction u("u" + std::to_string(d), 1, domain_size, std::vector<Cost>(domain_size, Cost(c)));
    u.table[d] = Cost(0);
    return u;
}

}  // namespace vcsp
