#include "vcsp/solver.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <limits>
#include <thread>

namespace vcsp {

const char* to_string(SolveMethod m) { return m == SolveMethod::MinCut ? "min_cut" : "brute_force"; }

// ---------------------------------------------------------------------------
// Brute force

namespace {

struct CompiledTerm {
    std::vector<int> scope;
    std::size_t offset = 0;  // into the value array
};

// Exact 64-bit arithmetic on costs scaled by a common denominator.
struct SmallTraits {
    using Value = std::int64_t;
    static constexpr Value kInf = std::numeric_limits<std::int64_t>::max();
    static Value zero() { return 0; }
    static Value add(Value a, Value b) { return (a == kInf || b == kInf) ? kInf : a + b; }
    static bool less(const Value& a, const Value& b) { return a < b; }
};

struct ExactTraits {
    using Value = Cost;
    static Value zero() { return Cost(0); }
    static Value add(const Value& a, const Value& b) { return a + b; }
    static bool less(const Value& a, const Value& b) { return a < b; }
};

struct Compiled {
    int n = 0;
    int d = 0;
    std::vector<std::vector<CompiledTerm>> at_depth;  // terms completed at each node
    std::vector<Cost> exact;
    std::vector<std::int64_t> small;
    bool use_small = false;
};

Compiled compile(const VcspInstance& inst)
{
    Compiled c;
    c.n = inst.node_count;
    c.d = inst.domain_size;
    c.at_depth.resize(static_cast<std::size_t>(c.n));
    auto push = [&](std::vector<int> scope, const std::vector<Cost>& table) {
        const int depth = *std::max_element(scope.begin(), scope.end());
        c.at_depth[static_cast<std::size_t>(depth)].push_back({std::move(scope), c.exact.size()});
        c.exact.insert(c.exact.end(), table.begin(), table.end());
    };
    for (const auto& t : inst.terms)
        if (!t.scope.empty()) push(t.scope, t.function->table);
    for (const auto& u : inst.unary_terms) push({u.node}, u.table);

    mpz_class lcm = 1;
    for (const auto& v : c.exact)
        if (v.is_finite()) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), v.value().get_den_mpz_t());
    const std::size_t terms = inst.terms.size() + inst.unary_terms.size() + 1;
    const mpz_class limit = mpz_class(std::numeric_limits<std::int64_t>::max() / 4) / static_cast<unsigned long>(terms);
    c.use_small = true;
    c.small.reserve(c.exact.size());
    for (const auto& v : c.exact) {
        if (v.is_infinite()) {
            c.small.push_back(SmallTraits::kInf);
            continue;
        }
        mpz_class scaled = v.value().get_num() * (lcm / v.value().get_den());
        if (abs(scaled) > limit) {
            c.use_small = false;
            break;
        }
        c.small.push_back(scaled.get_si());
    }
    return c;
}

template <class Traits>
class BruteSearch {
public:
    using Value = typename Traits::Value;

    BruteSearch(const Compiled& c, const std::vector<Value>& values) : c_(c), values_(values), x_(static_cast<std::size_t>(c.n)) {}

    /// Lexicographically first minimum among assignments starting with prefix.
    void run(const std::vector<Label>& prefix)
    {
        prefix_ = &prefix;
        dfs(0, Traits::zero());
    }

    bool found = false;
    Value best{};
    Assignment best_x;
    std::uint64_t leaves = 0;

private:
    void dfs(int depth, const Value& partial)
    {
        if (depth == c_.n) {
            ++leaves;
            if (!found || Traits::less(partial, best)) {
                found = true;
                best = partial;
                best_x = x_;
            }
            return;
        }
        const bool fixed = depth < static_cast<int>(prefix_->size());
        const Label lo = fixed ? (*prefix_)[static_cast<std::size_t>(depth)] : 0;
        const Label hi = fixed ? lo + 1 : c_.d;
        for (Label l = lo; l < hi; ++l) {
            x_[static_cast<std::size_t>(depth)] = l;
            Value v = partial;
            for (const auto& t : c_.at_depth[static_cast<std::size_t>(depth)]) {
                std::size_t idx = 0;
                for (int node : t.scope) idx = idx * static_cast<std::size_t>(c_.d) + static_cast<std::size_t>(x_[static_cast<std::size_t>(node)]);
                v = Traits::add(v, values_[t.offset + idx]);
            }
            // Costs are non-negative and later leaves are lexicographically
            // larger, so an equal partial can never win.
            if (found && !Traits::less(v, best)) continue;
            dfs(depth + 1, v);
        }
    }

    const Compiled& c_;
    const std::vector<Value>& values_;
    const std::vector<Label>* prefix_ = nullptr;
    Assignment x_;
};

template <class Traits>
std::pair<Assignment, std::uint64_t> brute_search(const Compiled& c, const std::vector<typename Traits::Value>& values,
                                                  int threads)
{
    // Split on a prefix so that blocks outnumber workers; blocks are in
    // lexicographic order and ties resolve to the earliest block.
    int prefix_len = 0;
    std::size_t blocks = 1;
    if (threads > 1)
        while (prefix_len < c.n && blocks < static_cast<std::size_t>(threads) * 4) {
            ++prefix_len;
            blocks *= static_cast<std::size_t>(c.d);
        }

    std::vector<BruteSearch<Traits>> results;
    results.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) results.emplace_back(c, values);

    auto run_block = [&](std::size_t b) {
        std::vector<Label> prefix(static_cast<std::size_t>(prefix_len));
        std::size_t rest = b;
        for (int i = prefix_len - 1; i >= 0; --i) {
            prefix[static_cast<std::size_t>(i)] = static_cast<Label>(rest % static_cast<std::size_t>(c.d));
            rest /= static_cast<std::size_t>(c.d);
        }
        results[b].run(prefix);
    };

    if (blocks == 1) {
        run_block(0);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const int workers = std::min<int>(threads, static_cast<int>(blocks));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t b; (b = next.fetch_add(1)) < blocks;) run_block(b);
            });
        for (auto& t : pool) t.join();
    }

    std::size_t winner = 0;
    std::uint64_t leaves = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        leaves += results[b].leaves;
        if (b > 0 && Traits::less(results[b].best, results[winner].best)) winner = b;
    }
    return {results[winner].best_x, leaves};
}

}  // namespace

SolveResult brute_force(const VcspInstance& instance, const BruteForceConfig& config)
{
    instance.check();
    std::uint64_t space = 1;
    for (int i = 0; i < instance.node_count; ++i) {
        if (space > config.budget / static_cast<std::uint64_t>(instance.domain_size))
            throw BudgetError("brute force needs " + std::to_string(instance.domain_size) + "^" +
                              std::to_string(instance.node_count) + " evaluations, above the budget of " +
                              std::to_string(config.budget));
        space *= static_cast<std::uint64_t>(instance.domain_size);
    }

    SolveResult r;
    r.method = SolveMethod::BruteForce;
    if (instance.node_count > 0) {
        const Compiled c = compile(instance);
        auto [x, leaves] = c.use_small ? brute_search<SmallTraits>(c, c.small, config.threads)
                                       : brute_search<ExactTraits>(c, c.exact, config.threads);
        r.assignment = std::move(x);
        r.stats.evaluations = leaves;
    }
    r.cost = evaluate(instance, r.assignment);
    r.infeasible = r.cost.is_infinite();
    return r;
}

// ---------------------------------------------------------------------------
// Max flow

FlowResult max_flow(const FlowNetwork& net)
{
    const auto n = static_cast<std::size_t>(net.node_count);
    // Residual edge 2i is arc i forward, 2i+1 its reverse.
    std::vector<std::vector<std::size_t>> out(n);
    for (std::size_t i = 0; i < net.arcs.size(); ++i) {
        out[static_cast<std::size_t>(net.arcs[i].from)].push_back(2 * i);
        out[static_cast<std::size_t>(net.arcs[i].to)].push_back(2 * i + 1);
    }
    std::vector<Rational> flow(net.arcs.size(), 0);

    auto head = [&](std::size_t e) {
        const auto& a = net.arcs[e / 2];
        return static_cast<std::size_t>(e % 2 == 0 ? a.to : a.from);
    };
    auto residual = [&](std::size_t e) -> Cost {
        const std::size_t i = e / 2;
        if (e % 2 == 0) return net.arcs[i].capacity.shifted(-flow[i]);
        return Cost(flow[i]);
    };
    auto positive = [](const Cost& c) { return c.is_infinite() || sgn(c.value()) > 0; };

    auto reach = [&](std::vector<std::size_t>& via) {
        std::vector<bool> seen(n, false);
        via.assign(n, std::numeric_limits<std::size_t>::max());
        std::deque<std::size_t> queue{static_cast<std::size_t>(net.source)};
        seen[static_cast<std::size_t>(net.source)] = true;
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            for (std::size_t e : out[u]) {
                const std::size_t v = head(e);
                if (seen[v] || !positive(residual(e))) continue;
                seen[v] = true;
                via[v] = e;
                queue.push_back(v);
            }
        }
        return seen;
    };

    FlowResult result;
    Rational total = 0;
    std::vector<std::size_t> via;
    const auto sink = static_cast<std::size_t>(net.sink);
    for (;;) {
        auto seen = reach(via);
        if (!seen[sink]) {
            result.source_side = std::move(seen);
            break;
        }
        Cost bottleneck = Cost::infinity();
        for (std::size_t v = sink; v != static_cast<std::size_t>(net.source); v = head(via[v] ^ 1))
            bottleneck = std::min(bottleneck, residual(via[v]));
        if (bottleneck.is_infinite()) {
            result.value = Cost::infinity();
            result.cut_capacity = Cost::infinity();
            result.source_side = std::move(seen);
            return result;
        }
        const Rational& b = bottleneck.value();
        for (std::size_t v = sink; v != static_cast<std::size_t>(net.source); v = head(via[v] ^ 1)) {
            const std::size_t e = via[v];
            if (e % 2 == 0) flow[e / 2] += b;
            else flow[e / 2] -= b;
        }
        total += b;
    }

    result.value = Cost(total);
    Cost cut(0);
    for (const auto& a : net.arcs)
        if (result.source_side[static_cast<std::size_t>(a.from)] && !result.source_side[static_cast<std::size_t>(a.to)])
            cut += a.capacity;
    result.cut_capacity = cut;
    return result;
}

// ---------------------------------------------------------------------------
// Min-cut solver

std::optional<std::array<Label, 4>> submodular_violation(const CostFunction& f, const std::vector<Label>& order)
{
    const int k = static_cast<int>(order.size());
    auto th = [&](int t, int u) { return f.at(order[static_cast<std::size_t>(t)], order[static_cast<std::size_t>(u)]); };
    for (int t = 0; t < k; ++t)
        for (int t2 = t + 1; t2 < k; ++t2)
            for (int u = 0; u < k; ++u)
                for (int u2 = u + 1; u2 < k; ++u2)
                    if (th(t, u) + th(t2, u2) > th(t, u2) + th(t2, u))
                        return std::array<Label, 4>{order[static_cast<std::size_t>(t)], order[static_cast<std::size_t>(t2)],
                                                    order[static_cast<std::size_t>(u)], order[static_cast<std::size_t>(u2)]};
    return std::nullopt;
}

namespace {

struct Interaction {
    int x, i, y, j;
    Rational w;
};

// The instance in rank space: per-node unary energies (may be negative)
// plus pairwise arcs; energy = sum of unaries + cut interactions + constant.
struct ChainProblem {
    int n = 0;
    int k = 0;
    std::vector<Label> order;
    std::vector<std::vector<Cost>> unary;  // [node][rank]
    std::vector<Interaction> pairs;
    Rational constant = 0;
};

struct ChainSolution {
    Cost energy;
    Assignment x;  // in labels
};

ChainSolution solve_chain(const ChainProblem& p, const std::vector<int>& pins, SolveStats& stats)
{
    FlowNetwork net;
    net.source = net.add_node();
    net.sink = net.add_node();
    std::vector<std::vector<int>> v(static_cast<std::size_t>(p.n));
    for (int x = 0; x < p.n; ++x) {
        v[static_cast<std::size_t>(x)].push_back(net.source);
        for (int j = 1; j < p.k; ++j) v[static_cast<std::size_t>(x)].push_back(net.add_node());
        v[static_cast<std::size_t>(x)].push_back(net.sink);
    }

    Rational constant = p.constant;
    for (int x = 0; x < p.n; ++x) {
        std::vector<Cost> u = p.unary[static_cast<std::size_t>(x)];
        if (pins[static_cast<std::size_t>(x)] >= 0)
            for (int t = 0; t < p.k; ++t)
                if (t != pins[static_cast<std::size_t>(x)]) u[static_cast<std::size_t>(t)] = Cost::infinity();
        const Cost m = *std::min_element(u.begin(), u.end());
        if (m.is_infinite()) return {Cost::infinity(), Assignment(static_cast<std::size_t>(p.n), 0)};
        constant += m.value();
        const auto& chain = v[static_cast<std::size_t>(x)];
        for (int t = 0; t < p.k; ++t)
            net.add_arc(chain[static_cast<std::size_t>(t)], chain[static_cast<std::size_t>(t + 1)],
                        u[static_cast<std::size_t>(t)].shifted(-m.value()));
        for (int j = 1; j + 1 < p.k; ++j)
            net.add_arc(chain[static_cast<std::size_t>(j + 1)], chain[static_cast<std::size_t>(j)], Cost::infinity());
    }
    for (const auto& e : p.pairs)
        net.add_arc(v[static_cast<std::size_t>(e.x)][static_cast<std::size_t>(e.i)],
                    v[static_cast<std::size_t>(e.y)][static_cast<std::size_t>(e.j)], Cost(e.w));

    const FlowResult flow = max_flow(net);
    ++stats.flow_solves;
    stats.network_nodes = static_cast<std::size_t>(net.node_count);
    stats.network_arcs = net.arcs.size();
    if (flow.value != flow.cut_capacity) throw std::logic_error("max-flow value differs from the cut capacity");
    ++stats.duality_checked;
    if (flow.value.is_infinite()) return {Cost::infinity(), Assignment(static_cast<std::size_t>(p.n), 0)};

    ChainSolution s{Cost(flow.value.value() + constant), Assignment(static_cast<std::size_t>(p.n))};
    for (int x = 0; x < p.n; ++x) {
        const auto& chain = v[static_cast<std::size_t>(x)];
        int count = 0;
        while (count + 1 < p.k && flow.source_side[static_cast<std::size_t>(chain[static_cast<std::size_t>(count + 1)])]) ++count;
        for (int j = count + 1; j < p.k; ++j)
            if (flow.source_side[static_cast<std::size_t>(chain[static_cast<std::size_t>(j)])])
                throw std::logic_error("cut is not a staircase on node " + std::to_string(x));
        s.x[static_cast<std::size_t>(x)] = p.order[static_cast<std::size_t>(count)];
    }
    return s;
}

}  // namespace

SolveResult solve_mincut(const VcspInstance& instance, const std::vector<Label>& order)
{
    instance.check();
    const int k = instance.domain_size;
    if (static_cast<int>(order.size()) != k) throw InputError("order must list every label once");
    std::vector<int> rank(static_cast<std::size_t>(k), -1);
    for (int t = 0; t < k; ++t) {
        const Label l = order[static_cast<std::size_t>(t)];
        if (l < 0 || l >= k || rank[static_cast<std::size_t>(l)] >= 0) throw InputError("order must list every label once");
        rank[static_cast<std::size_t>(l)] = t;
    }

    ChainProblem p;
    p.n = instance.node_count;
    p.k = k;
    p.order = order;
    p.unary.assign(static_cast<std::size_t>(p.n), std::vector<Cost>(static_cast<std::size_t>(k), Cost(0)));
    auto unary_at = [&](int x, int t) -> Cost& { return p.unary[static_cast<std::size_t>(x)][static_cast<std::size_t>(t)]; };

    for (const auto& u : instance.unary_terms)
        for (Label l = 0; l < k; ++l) unary_at(u.node, rank[static_cast<std::size_t>(l)]) += u.table[static_cast<std::size_t>(l)];

    for (const auto& term : instance.terms) {
        const CostFunction& f = *term.function;
        if (f.arity == 0) {
            if (f.table[0].is_infinite()) unary_at(0, 0) = Cost::infinity();
            else p.constant += f.table[0].value();
            continue;
        }
        if (f.arity == 1) {
            for (Label l = 0; l < k; ++l) unary_at(term.scope[0], rank[static_cast<std::size_t>(l)]) += f.at(l);
            continue;
        }
        if (f.arity > 2) throw MinCutRefusal("term '" + f.name + "' has arity " + std::to_string(f.arity));
        if (!f.finite_valued()) throw MinCutRefusal("binary term '" + f.name + "' has infinite entries");
        const int x = term.scope[0], y = term.scope[1];
        auto th = [&](int t, int u) { return f.at(order[static_cast<std::size_t>(t)], order[static_cast<std::size_t>(u)]).value(); };
        if (x == y) {
            for (int t = 0; t < k; ++t) unary_at(x, t) += Cost(th(t, t));
            continue;
        }
        if (auto quad = submodular_violation(f, order))
            throw MinCutRefusal("term '" + f.name + "' is not submodular under the order", quad);

        const Rational base = th(0, 0);
        p.constant += base;
        for (int t = 0; t < k; ++t) {
            unary_at(x, t) += Cost(Rational(th(t, 0) - base));
            unary_at(y, t) += Cost(Rational(th(0, t) - base));
        }
        for (int i = 1; i < k; ++i)
            for (int j = 1; j < k; ++j) {
                const Rational c = th(i, j) - th(i - 1, j) - th(i, j - 1) + th(i - 1, j - 1);
                if (sgn(c) == 0) continue;
                // c z_xi z_yj = c z_xi - c z_xi (1 - z_yj), with -c >= 0.
                p.pairs.push_back({x, i, y, j, Rational(-c)});
                for (int t = i; t < k; ++t) unary_at(x, t) += Cost(c);
            }
    }

    SolveResult r;
    r.method = SolveMethod::MinCut;
    std::vector<int> pins(static_cast<std::size_t>(p.n), -1);
    ChainSolution best = solve_chain(p, pins, r.stats);

    // The residual cut gives the optimum that is smallest in the order on
    // every node; that is lexicographically first only for the identity order.
    bool identity = true;
    for (int t = 0; t < k; ++t) identity = identity && order[static_cast<std::size_t>(t)] == t;
    if (best.energy.is_finite() && !identity) {
        for (int x = 0; x < p.n; ++x) {
            for (Label l = 0; l < best.x[static_cast<std::size_t>(x)]; ++l) {
                pins[static_cast<std::size_t>(x)] = rank[static_cast<std::size_t>(l)];
                ChainSolution s = solve_chain(p, pins, r.stats);
                if (s.energy == best.energy) {
                    best = std::move(s);
                    break;
                }
            }
            pins[static_cast<std::size_t>(x)] = rank[static_cast<std::size_t>(best.x[static_cast<std::size_t>(x)])];
        }
    }

    r.assignment = std::move(best.x);
    r.cost = evaluate(instance, r.assignment);
    r.infeasible = r.cost.is_infinite();
    if (r.cost != best.energy) throw std::logic_error("min-cut energy disagrees with the evaluated cost");
    return r;
}

SolveResult solve(const VcspInstance& instance, const Classification& classification, const BruteForceConfig& config)
{
    const bool pairwise = std::all_of(instance.terms.begin(), instance.terms.end(),
                                      [](const Term& t) { return t.function->arity <= 2; });
    if (classification.verdict == Verdict::Tractable && classification.order && pairwise) {
        try {
            return solve_mincut(instance, *classification.order);
        } catch (const MinCutRefusal&) {
            // Instance terms outside the classified language; fall through.
        }
    }
    try {
        return brute_force(instance, config);
    } catch (const BudgetError& e) {
        throw IntractableAtScale(std::string(e.what()) + "; language classified " + to_string(classification.verdict) +
                                 " and no polynomial route applies");
    }
}

}  // namespace vcsp
