#include "vcsp/express.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace vcsp {

namespace {

DerivationPtr make(auto step) { return std::make_shared<const Derivation>(Derivation{std::move(step)}); }

std::string table_key(const CostFunction& f)
{
    std::string key;
    for (const auto& c : f.table) {
        key += c.to_string();
        key += ',';
    }
    return key;
}

ExpressedFunction wrap(CostFunction table, DerivationPtr d, bool leaked = false, bool degenerate = false)
{
    table.name = to_string(*d);
    return ExpressedFunction{std::move(table), std::move(d), leaked, degenerate};
}

void require_binary(const ExpressedFunction& f, const char* op)
{
    if (f.arity() != 2)
        throw InputError(std::string(op) + ": expected a binary function, got arity " + std::to_string(f.arity()));
}

// Unordered label pairs {a2, b2} (a2 < b2) that appear as the column pair
// (or row pair) of some strict fence in f, as a bitmask over a2 * n + b2.
// A view with no strict fence is modular on its effective domain and
// chains into nothing new.
std::vector<bool> fence_pairs(const CostFunction& f, bool columns)
{
    const int n = f.domain_size;
    std::vector<bool> out(static_cast<std::size_t>(n * n), false);
    for (Label a = 0; a < n; ++a)
        for (Label b = 0; b < n; ++b) {
            if (a == b) continue;
            for (Label a2 = 0; a2 < n; ++a2)
                for (Label b2 = 0; b2 < n; ++b2) {
                    if (a2 == b2) continue;
                    const Cost& off1 = f.at(a, b2);
                    const Cost& off2 = f.at(b, a2);
                    if (off1.is_infinite() || off2.is_infinite()) continue;
                    if (f.at(a, a2) + f.at(b, b2) > off1 + off2) {
                        Label lo = columns ? std::min(a2, b2) : std::min(a, b);
                        Label hi = columns ? std::max(a2, b2) : std::max(a, b);
                        out[static_cast<std::size_t>(lo * n + hi)] = true;
                    }
                }
        }
    return out;
}

}  // namespace

std::string to_string(const Derivation& d)
{
    std::ostringstream os;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, SourceStep>) {
                os << s.function;
            } else if constexpr (std::is_same_v<T, ProjectStep>) {
                os << "proj(" << to_string(*s.input) << ",";
                for (std::size_t i = 0; i < s.keep.size(); ++i) os << (i ? " " : "") << s.keep[i];
                os << ")";
            } else if constexpr (std::is_same_v<T, PinStep>) {
                os << "pin(" << to_string(*s.input) << "," << s.coord << "=" << s.value << ")";
            } else if constexpr (std::is_same_v<T, SymmetrizeStep>) {
                os << "sym(" << to_string(*s.input) << ")";
            } else if constexpr (std::is_same_v<T, ChainStep>) {
                os << "chain(" << to_string(*s.left) << "," << to_string(*s.right) << ";" << s.mid_a << "|"
                   << s.mid_b << ")";
            } else {
                os << "unary(" << to_string(*s.input) << "," << s.coord << ":";
                for (std::size_t i = 0; i < s.unary.size(); ++i) os << (i ? " " : "") << s.unary[i];
                os << ")";
            }
        },
        d.step);
    return os.str();
}

int derivation_arity(const Derivation& d, const Language& lang)
{
    return std::visit(
        [&](const auto& s) -> int {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, SourceStep>) {
                const auto* f = lang.find(s.function);
                if (!f) throw InputError("derivation references unknown function '" + s.function + "'");
                return f->arity;
            } else if constexpr (std::is_same_v<T, ProjectStep>) {
                return static_cast<int>(s.keep.size());
            } else if constexpr (std::is_same_v<T, PinStep>) {
                return derivation_arity(*s.input, lang) - 1;
            } else if constexpr (std::is_same_v<T, UnaryStep>) {
                return derivation_arity(*s.input, lang);
            } else {
                return 2;
            }
        },
        d.step);
}

ExpressedFunction source(const CostFunction& f)
{
    ExpressedFunction e{f, make(SourceStep{f.name}), false, false};
    return e;
}

BinaryView symmetrize(const ExpressedFunction& f)
{
    require_binary(f, "symmetrize");
    const int n = f.table.domain_size;
    CostFunction g = CostFunction::zeros("", 2, n);
    for (Label x = 0; x < n; ++x)
        for (Label y = 0; y < n; ++y) g.at(x, y) = f.table.at(x, y) + f.table.at(y, x);
    return wrap(std::move(g), make(SymmetrizeStep{f.derivation}), f.penalty_leaked, f.degenerate);
}

ExpressedFunction project_min(const ExpressedFunction& f, std::span<const int> keep)
{
    const int m = f.arity();
    const int n = f.table.domain_size;
    if (keep.empty() || static_cast<int>(keep.size()) > m)
        throw InputError("project_min: invalid number of kept coordinates");
    std::vector<bool> seen(static_cast<std::size_t>(m), false);
    for (int k : keep) {
        if (k < 0 || k >= m || seen[static_cast<std::size_t>(k)])
            throw InputError("project_min: invalid or repeated coordinate " + std::to_string(k));
        seen[static_cast<std::size_t>(k)] = true;
    }
    const int out_arity = static_cast<int>(keep.size());
    CostFunction g("", out_arity, n, std::vector<Cost>(tuple_count(n, out_arity), Cost::infinity()));
    std::vector<Label> tuple(static_cast<std::size_t>(m));
    std::vector<Label> out(keep.size());
    for (std::size_t i = 0; i < f.table.table.size(); ++i) {
        decode_tuple(i, n, tuple);
        for (std::size_t k = 0; k < keep.size(); ++k) out[k] = tuple[static_cast<std::size_t>(keep[k])];
        Cost& slot = g(out);
        if (f.table.table[i] < slot) slot = f.table.table[i];
    }
    return wrap(std::move(g), make(ProjectStep{f.derivation, std::vector<int>(keep.begin(), keep.end())}),
                f.penalty_leaked, f.degenerate);
}

BinaryView project_min(const ExpressedFunction& f, std::array<int, 2> keep)
{
    if (f.arity() < 2) throw InputError("project_min: arity must be at least 2");
    return project_min(f, std::span<const int>(keep));
}

BinaryView transpose(const BinaryView& f)
{
    require_binary(f, "transpose");
    return project_min(f, std::array<int, 2>{1, 0});
}

ExpressedFunction pin_coordinate(const ExpressedFunction& f, int coord, Label value)
{
    const int m = f.arity();
    const int n = f.table.domain_size;
    if (m < 1 || coord < 0 || coord >= m) throw InputError("pin_coordinate: coordinate out of range");
    if (value < 0 || value >= n) throw InputError("pin_coordinate: label out of range");
    const Rational penalty = 1 + f.table.finite_sum();
    const Cost pen(penalty);

    CostFunction g("", m - 1, n, std::vector<Cost>(tuple_count(n, m - 1), Cost::infinity()));
    std::vector<bool> pinned_infinite(g.table.size(), false);
    std::vector<Label> tuple(static_cast<std::size_t>(m));
    std::vector<Label> rest(static_cast<std::size_t>(m - 1));
    for (std::size_t i = 0; i < f.table.table.size(); ++i) {
        decode_tuple(i, n, tuple);
        for (int k = 0, r = 0; k < m; ++k)
            if (k != coord) rest[static_cast<std::size_t>(r++)] = tuple[static_cast<std::size_t>(k)];
        std::size_t j = g.index(rest);
        const Label a = tuple[static_cast<std::size_t>(coord)];
        Cost candidate = a == value ? f.table.table[i] : f.table.table[i] + pen;
        if (a == value && f.table.table[i].is_infinite()) pinned_infinite[j] = true;
        if (candidate < g.table[j]) g.table[j] = candidate;
    }
    bool leaked = false;
    for (std::size_t j = 0; j < g.table.size(); ++j)
        if (pinned_infinite[j] && g.table[j].is_finite()) leaked = true;
    return wrap(std::move(g), make(PinStep{f.derivation, coord, value, penalty}), f.penalty_leaked || leaked,
                f.degenerate);
}

BinaryView min_chain(const BinaryView& f, const BinaryView& g, std::array<Label, 2> mid_pair)
{
    require_binary(f, "min_chain");
    require_binary(g, "min_chain");
    const int n = f.table.domain_size;
    if (g.table.domain_size != n) throw InputError("min_chain: domain sizes differ");
    const auto [a2, b2] = mid_pair;
    if (a2 < 0 || a2 >= n || b2 < 0 || b2 >= n || a2 == b2) throw InputError("min_chain: invalid middle pair");
    const Rational penalty = 1 + f.table.finite_max() + g.table.finite_max();
    const Cost pen(penalty);

    CostFunction h = CostFunction::zeros("", 2, n);
    bool degenerate = true;
    for (Label x = 0; x < n; ++x)
        for (Label z = 0; z < n; ++z) {
            Cost best = Cost::infinity();
            for (Label y = 0; y < n; ++y) {
                Cost c = f.table.at(x, y) + g.table.at(y, z);
                if (y != a2 && y != b2) c += pen;
                if (c < best) best = std::move(c);
            }
            if (best < pen) degenerate = false;
            h.at(x, z) = std::move(best);
        }
    return wrap(std::move(h), make(ChainStep{f.derivation, g.derivation, a2, b2, penalty}),
                f.penalty_leaked || g.penalty_leaked, f.degenerate || g.degenerate || degenerate);
}

ExpressedFunction add_unary(const ExpressedFunction& f, int coord, std::vector<Cost> unary)
{
    const int m = f.arity();
    const int n = f.table.domain_size;
    if (coord < 0 || coord >= m) throw InputError("add_unary: coordinate out of range");
    if (static_cast<int>(unary.size()) != n) throw InputError("add_unary: unary table has wrong size");
    CostFunction g = f.table;
    std::vector<Label> tuple(static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < g.table.size(); ++i) {
        decode_tuple(i, n, tuple);
        g.table[i] += unary[static_cast<std::size_t>(tuple[static_cast<std::size_t>(coord)])];
    }
    return wrap(std::move(g), make(UnaryStep{f.derivation, coord, std::move(unary)}), f.penalty_leaked,
                f.degenerate);
}

BinaryPool enumerate_binary_pool(const Language& lang, const PoolConfig& config)
{
    BinaryPool pool;
    std::unordered_set<std::string> seen;
    const int n = lang.domain_size;

    auto offer = [&](BinaryView v) {
        ++pool.stats.candidates;
        if (pool.views.size() >= config.max_views) {
            pool.truncated = true;
            return;
        }
        if (!seen.insert(table_key(v.table)).second) {
            ++pool.stats.duplicates;
            return;
        }
        pool.views.push_back(std::move(v));
    };

    for (const CostFunction* fp : lang.non_unary()) {
        ExpressedFunction f = source(*fp);
        const int m = fp->arity;
        if (m == 2) {
            offer(f);
            ++pool.stats.projected_candidates;
            offer(transpose(f));
            continue;
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                if (i == j) continue;
                ++pool.stats.projected_candidates;
                offer(project_min(f, std::array<int, 2>{i, j}));
            }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                if (i == j) continue;
                std::vector<int> others;
                for (int k = 0; k < m; ++k)
                    if (k != i && k != j) others.push_back(k);
                std::vector<Label> values(others.size());
                const std::size_t combos = tuple_count(n, static_cast<int>(others.size()));
                for (std::size_t c = 0; c < combos; ++c) {
                    decode_tuple(c, n, values);
                    ExpressedFunction g = f;
                    // Pin from the highest coordinate down so lower indices stay valid.
                    for (std::size_t k = others.size(); k-- > 0;) g = pin_coordinate(g, others[k], values[k]);
                    ++pool.stats.pinned_candidates;
                    offer(i < j ? g : transpose(g));
                }
            }
    }

    const std::size_t base = pool.views.size();
    for (std::size_t k = 0; k < base; ++k) {
        ++pool.stats.symmetrized_candidates;
        offer(symmetrize(pool.views[k]));
    }

    for (int depth = 0; depth < config.chain_depth && !pool.truncated; ++depth) {
        const std::size_t current = pool.views.size();
        std::vector<std::size_t> fenced;
        std::vector<std::vector<bool>> cols(current), rows(current);
        for (std::size_t k = 0; k < current; ++k) {
            cols[k] = fence_pairs(pool.views[k].table, true);
            if (std::find(cols[k].begin(), cols[k].end(), true) == cols[k].end()) continue;
            rows[k] = fence_pairs(pool.views[k].table, false);
            fenced.push_back(k);
        }
        for (std::size_t fi : fenced) {
            for (std::size_t gi : fenced) {
                for (Label a2 = 0; a2 < n; ++a2)
                    for (Label b2 = a2 + 1; b2 < n; ++b2) {
                        const auto key = static_cast<std::size_t>(a2 * n + b2);
                        if (!cols[fi][key] || !rows[gi][key]) continue;
                        ++pool.stats.chain_candidates;
                        offer(min_chain(pool.views[fi], pool.views[gi], {a2, b2}));
                        if (pool.truncated) return pool;
                    }
            }
        }
    }
    return pool;
}

namespace {

class GadgetBuilder {
public:
    GadgetBuilder(const Language& lang, VcspInstance& instance) : lang_(lang), inst_(instance) {}

    int fresh() { return inst_.node_count++; }

    void build(const Derivation& d, const std::vector<int>& out)
    {
        std::visit([&](const auto& s) { emit(s, out); }, d.step);
    }

private:
    void emit(const SourceStep& s, const std::vector<int>& out)
    {
        const auto* f = lang_.find(s.function);
        if (!f) throw InputError("derivation references unknown function '" + s.function + "'");
        inst_.add_term(*f, out);
    }

    void emit(const ProjectStep& s, const std::vector<int>& out)
    {
        const int m = derivation_arity(*s.input, lang_);
        std::vector<int> in(static_cast<std::size_t>(m), -1);
        for (std::size_t k = 0; k < s.keep.size(); ++k) in[static_cast<std::size_t>(s.keep[k])] = out[k];
        for (int& v : in)
            if (v < 0) v = fresh();
        build(*s.input, in);
    }

    void emit(const PinStep& s, const std::vector<int>& out)
    {
        std::vector<int> in = out;
        const int aux = fresh();
        in.insert(in.begin() + s.coord, aux);
        std::vector<Cost> u(static_cast<std::size_t>(lang_.domain_size), Cost(s.penalty));
        u[static_cast<std::size_t>(s.value)] = Cost(0);
        inst_.add_unary(aux, std::move(u));
        build(*s.input, in);
    }

    void emit(const SymmetrizeStep& s, const std::vector<int>& out)
    {
        build(*s.input, {out[0], out[1]});
        build(*s.input, {out[1], out[0]});
    }

    void emit(const ChainStep& s, const std::vector<int>& out)
    {
        const int mid = fresh();
        std::vector<Cost> u(static_cast<std::size_t>(lang_.domain_size), Cost(s.penalty));
        u[static_cast<std::size_t>(s.mid_a)] = Cost(0);
        u[static_cast<std::size_t>(s.mid_b)] = Cost(0);
        inst_.add_unary(mid, std::move(u));
        build(*s.left, {out[0], mid});
        build(*s.right, {mid, out[1]});
    }

    void emit(const UnaryStep& s, const std::vector<int>& out)
    {
        inst_.add_unary(out[static_cast<std::size_t>(s.coord)], s.unary);
        build(*s.input, out);
    }

    const Language& lang_;
    VcspInstance& inst_;
};

}  // namespace

Gadget expand_derivation(const Derivation& d, const Language& lang)
{
    Gadget g;
    g.instance.domain_size = lang.domain_size;
    const int k = derivation_arity(d, lang);
    GadgetBuilder builder(lang, g.instance);
    for (int i = 0; i < k; ++i) g.outputs.push_back(builder.fresh());
    builder.build(d, g.outputs);
    return g;
}

}  // namespace vcsp
