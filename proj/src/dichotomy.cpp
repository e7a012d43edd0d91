#include "vcsp/dichotomy.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

namespace vcsp {

// ---------------------------------------------------------------------------
// Sign assignment

namespace {

std::vector<PairNode> bfs_path(const std::vector<int>& parent, int v, const PairIndex& idx)
{
    std::vector<PairNode> path;
    for (; v >= 0; v = parent[static_cast<std::size_t>(v)]) path.push_back(idx.node(v));
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace

std::variant<SignAssignment, ColoringConflict> two_color(const PairGraph& graph)
{
    const PairIndex idx(graph.domain_size);
    const MSplit split = compute_m(graph);
    const auto adj = graph.adjacency();
    SignAssignment sigma(graph.domain_size);
    std::vector<int> parent(static_cast<std::size_t>(idx.size()), -1);
    std::vector<int> root_of(static_cast<std::size_t>(idx.size()), -1);

    for (int s = 0; s < idx.size(); ++s) {
        const PairNode rep = idx.node(s);
        if (!split.in_m[static_cast<std::size_t>(s)] || sigma.assigned(rep)) continue;
        const PairNode mirror = rep.swapped();
        sigma.set(rep, sigma.assigned(mirror) ? -sigma(mirror) : +1);
        root_of[static_cast<std::size_t>(s)] = s;
        std::deque<int> queue{s};
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            const PairNode pu = idx.node(u);
            for (int v : adj[static_cast<std::size_t>(u)]) {
                if (!split.in_m[static_cast<std::size_t>(v)]) continue;
                const PairNode pv = idx.node(v);
                if (!sigma.assigned(pv)) {
                    sigma.set(pv, -sigma(pu));
                    parent[static_cast<std::size_t>(v)] = u;
                    root_of[static_cast<std::size_t>(v)] = s;
                    queue.push_back(v);
                } else if (sigma(pv) == sigma(pu)) {
                    auto cycle = bfs_path(parent, u, idx);
                    auto back = bfs_path(parent, v, idx);
                    std::reverse(back.begin(), back.end());
                    cycle.insert(cycle.end(), back.begin(), back.end());
                    return ColoringConflict{ColoringConflict::Kind::OddCycle, std::move(cycle)};
                }
            }
        }
    }

    for (int i = 0; i < idx.size(); ++i) {
        if (!split.in_m[static_cast<std::size_t>(i)]) continue;
        const PairNode p = idx.node(i);
        if (sigma(p) == -sigma(p.swapped())) continue;
        std::vector<PairNode> witness = bfs_path(parent, i, idx);
        const int j = idx.mirror(i);
        if (root_of[static_cast<std::size_t>(i)] == root_of[static_cast<std::size_t>(j)]) {
            auto back = bfs_path(parent, j, idx);
            std::reverse(back.begin(), back.end());
            witness.insert(witness.end(), back.begin(), back.end());
        } else {
            witness.push_back(p.swapped());
        }
        return ColoringConflict{ColoringConflict::Kind::MirrorSameSign, std::move(witness)};
    }
    return sigma;
}

// ---------------------------------------------------------------------------
// Operation pairs

bool OperationPair::conservative() const
{
    for (Label a = 0; a < domain_size; ++a)
        for (Label b = 0; b < domain_size; ++b) {
            Label m = meet(a, b), j = join(a, b);
            if (!((m == a && j == b) || (m == b && j == a))) return false;
        }
    return true;
}

bool OperationPair::idempotent() const
{
    for (Label a = 0; a < domain_size; ++a)
        if (meet(a, a) != a || join(a, a) != a) return false;
    return true;
}

OperationPair OperationPair::from_order(const std::vector<Label>& order)
{
    const int n = static_cast<int>(order.size());
    std::vector<int> rank(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
    OperationPair pair{n, std::vector<Label>(static_cast<std::size_t>(n * n)), std::vector<Label>(static_cast<std::size_t>(n * n))};
    for (Label a = 0; a < n; ++a)
        for (Label b = 0; b < n; ++b) {
            const bool a_low = rank[static_cast<std::size_t>(a)] <= rank[static_cast<std::size_t>(b)];
            pair.meet_table[static_cast<std::size_t>(a * n + b)] = a_low ? a : b;
            pair.join_table[static_cast<std::size_t>(a * n + b)] = a_low ? b : a;
        }
    return pair;
}

OperationPair OperationPair::from_orientation(int domain_size, const std::vector<bool>& bits)
{
    const int n = domain_size;
    OperationPair pair{n, std::vector<Label>(static_cast<std::size_t>(n * n)), std::vector<Label>(static_cast<std::size_t>(n * n))};
    std::size_t k = 0;
    for (Label a = 0; a < n; ++a) {
        pair.meet_table[static_cast<std::size_t>(a * n + a)] = a;
        pair.join_table[static_cast<std::size_t>(a * n + a)] = a;
        for (Label b = a + 1; b < n; ++b, ++k) {
            const Label lo = bits[k] ? b : a;
            const Label hi = bits[k] ? a : b;
            pair.meet_table[static_cast<std::size_t>(a * n + b)] = lo;
            pair.meet_table[static_cast<std::size_t>(b * n + a)] = lo;
            pair.join_table[static_cast<std::size_t>(a * n + b)] = hi;
            pair.join_table[static_cast<std::size_t>(b * n + a)] = hi;
        }
    }
    return pair;
}

OperationPair build_meet_join(const SignAssignment& sigma, const std::vector<bool>& in_m, int domain_size)
{
    const int n = domain_size;
    const PairIndex idx(n);
    OperationPair pair{n, std::vector<Label>(static_cast<std::size_t>(n * n)), std::vector<Label>(static_cast<std::size_t>(n * n))};
    for (Label a = 0; a < n; ++a)
        for (Label b = 0; b < n; ++b) {
            const auto cell = static_cast<std::size_t>(a * n + b);
            if (a == b || !in_m[static_cast<std::size_t>(idx({a, b}))]) {
                pair.meet_table[cell] = a;
                pair.join_table[cell] = b;
                continue;
            }
            const int s = sigma({a, b});
            if (s == 0 || sigma({b, a}) != -s)
                throw InputError("sign assignment is not antisymmetric at " + to_string(PairNode{a, b}));
            pair.meet_table[cell] = s > 0 ? a : b;
            pair.join_table[cell] = s > 0 ? b : a;
        }
    return pair;
}

const char* to_string(VerifyMode m) { return m == VerifyMode::Full ? "full" : "delta2"; }

// ---------------------------------------------------------------------------
// Multimorphism verification

namespace {

// Table view with an exact 64-bit fast path when every finite entry is a
// small integer; falls back to rational arithmetic otherwise.
class CostTable {
public:
    explicit CostTable(const CostFunction& f) : f_(f)
    {
        const Rational limit = Rational(std::numeric_limits<std::int64_t>::max() / 8);
        small_.reserve(f.table.size());
        for (const auto& c : f.table) {
            if (c.is_infinite()) {
                small_.push_back(kInf);
                continue;
            }
            const Rational& v = c.value();
            if (v.get_den() != 1 || abs(v) > limit) {
                integral_ = false;
                return;
            }
            small_.push_back(v.get_num().get_si());
        }
    }

    bool finite(std::size_t i) const { return f_.table[i].is_finite(); }

    // lhs > rhs, i.e. f(m) + f(j) > f(x) + f(y), with x, y finite.
    bool violates(std::size_t m, std::size_t j, std::size_t x, std::size_t y) const
    {
        if (integral_) {
            if (small_[m] == kInf || small_[j] == kInf) return true;
            return small_[m] + small_[j] > small_[x] + small_[y];
        }
        return f_.table[m] + f_.table[j] > f_.table[x] + f_.table[y];
    }

private:
    static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
    const CostFunction& f_;
    std::vector<std::int64_t> small_;
    bool integral_ = true;
};

}  // namespace

std::optional<Violation> verify_function(const OperationPair& pair, const CostFunction& f, VerifyMode mode)
{
    if (f.arity < 2) return std::nullopt;
    const int n = f.domain_size;
    const int m = f.arity;
    const CostTable table(f);

    std::vector<std::size_t> dom;
    std::vector<std::vector<Label>> tuples;
    for (std::size_t i = 0; i < f.table.size(); ++i) {
        if (!table.finite(i)) continue;
        dom.push_back(i);
        std::vector<Label> t(static_cast<std::size_t>(m));
        decode_tuple(i, n, t);
        tuples.push_back(std::move(t));
    }

    for (std::size_t xi = 0; xi < dom.size(); ++xi) {
        const auto& x = tuples[xi];
        for (std::size_t yi = 0; yi < dom.size(); ++yi) {
            if (xi == yi) continue;
            const auto& y = tuples[yi];
            std::size_t meet = 0, join = 0;
            int delta = 0;
            for (int k = 0; k < m; ++k) {
                const Label a = x[static_cast<std::size_t>(k)];
                const Label b = y[static_cast<std::size_t>(k)];
                delta += a != b;
                meet = meet * n + static_cast<std::size_t>(pair.meet(a, b));
                join = join * n + static_cast<std::size_t>(pair.join(a, b));
            }
            if (mode == VerifyMode::Delta2 && delta > 2) continue;
            if (table.violates(meet, join, dom[xi], dom[yi])) return Violation{f.name, x, y};
        }
    }
    return std::nullopt;
}

std::optional<Violation> verify_multimorphism(const OperationPair& pair, const Language& lang, VerifyMode mode,
                                              const std::vector<BinaryView>& pool)
{
    for (const CostFunction* f : lang.non_unary())
        if (auto v = verify_function(pair, *f, mode)) return v;
    if (mode == VerifyMode::Delta2)
        for (const auto& view : pool)
            if (auto v = verify_function(pair, view.table, mode)) return v;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Exhaustive search

namespace {

// Union-find over orientation bits with XOR parity to the parent.
class ParityUnionFind {
public:
    explicit ParityUnionFind(std::size_t n) : parent_(n), parity_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::pair<std::size_t, int> find(std::size_t x)
    {
        int par = 0;
        std::size_t r = x;
        while (parent_[r] != r) {
            par ^= parity_[r];
            r = parent_[r];
        }
        // Path compression, recomputing parities along the way.
        int acc = par;
        while (parent_[x] != x) {
            const std::size_t next = parent_[x];
            const int old = parity_[x];
            parent_[x] = r;
            parity_[x] = acc;
            acc ^= old;
            x = next;
        }
        return {r, par};
    }

    /// Requires bit(x) ^ bit(y) == parity; false on contradiction.
    bool unite(std::size_t x, std::size_t y, int parity)
    {
        auto [rx, px] = find(x);
        auto [ry, py] = find(y);
        if (rx == ry) return (px ^ py) == parity;
        if (ry < rx) std::swap(rx, ry);
        parent_[ry] = rx;
        parity_[ry] = px ^ py ^ parity;
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<int> parity_;
};

struct CachedViolation {
    const CostFunction* f;
    std::vector<Label> x, y;
};

bool still_violates(const OperationPair& pair, const CachedViolation& v)
{
    const CostFunction& f = *v.f;
    std::vector<Label> meet(v.x.size()), join(v.x.size());
    for (std::size_t k = 0; k < v.x.size(); ++k) {
        meet[k] = pair.meet(v.x[k], v.y[k]);
        join[k] = pair.join(v.x[k], v.y[k]);
    }
    return f(meet) + f(join) > f(v.x) + f(v.y);
}

SignAssignment sigma_of(const OperationPair& pair, const std::vector<bool>& in_m)
{
    const PairIndex idx(pair.domain_size);
    SignAssignment sigma(pair.domain_size);
    for (int i = 0; i < idx.size(); ++i) {
        if (!in_m[static_cast<std::size_t>(i)]) continue;
        const PairNode p = idx.node(i);
        sigma.set(p, pair.meet(p.first, p.second) == p.first ? +1 : -1);
    }
    return sigma;
}

// Searches conservative pairs that are commutative on M (one orientation
// bit per unordered pair in M) and projections on M̄.
std::optional<StpCertificate> search_on(const Language& lang, const PairGraph& graph, const std::vector<bool>& in_m,
                                        const SearchConfig& config, SearchStats& stats)
{
    const int n = lang.domain_size;
    if (n > config.max_domain)
        throw BudgetError("domain size " + std::to_string(n) + " exceeds the search limit " +
                          std::to_string(config.max_domain));
    const PairIndex idx(n);

    std::vector<int> pair_id(static_cast<std::size_t>(n * n), -1);
    std::size_t pairs = 0;
    for (Label a = 0; a < n; ++a)
        for (Label b = a + 1; b < n; ++b, ++pairs) {
            pair_id[static_cast<std::size_t>(a * n + b)] = static_cast<int>(pairs);
            pair_id[static_cast<std::size_t>(b * n + a)] = static_cast<int>(pairs);
        }
    stats.space = pairs >= 63 ? std::numeric_limits<std::uint64_t>::max() : (std::uint64_t{1} << pairs);

    auto bit_of = [&](PairNode p) { return static_cast<std::size_t>(pair_id[static_cast<std::size_t>(p.first * n + p.second)]); };
    auto flip_of = [](PairNode p) { return p.first > p.second ? 1 : 0; };
    auto member = [&](PairNode p) { return in_m[static_cast<std::size_t>(idx(p))]; };

    // σ(p) = +1 iff bit(p) ^ flip(p) == 0, and every edge forces opposite signs.
    ParityUnionFind uf(pairs);
    for (const auto& e : graph.edges) {
        if (!member(e.p) || !member(e.q)) continue;
        if (!uf.unite(bit_of(e.p), bit_of(e.q), 1 ^ flip_of(e.p) ^ flip_of(e.q))) {
            stats.edge_conflict = true;
            return std::nullopt;
        }
    }

    std::vector<std::size_t> free_bits;
    std::vector<bool> in_m_pair(pairs, false);
    for (Label a = 0; a < n; ++a)
        for (Label b = a + 1; b < n; ++b) {
            const std::size_t k = bit_of({a, b});
            in_m_pair[k] = member({a, b});
            if (in_m_pair[k] && uf.find(k).first == k) free_bits.push_back(k);
        }
    if (free_bits.size() >= 63 || (std::uint64_t{1} << free_bits.size()) > config.max_candidates)
        throw BudgetError("orientation search needs 2^" + std::to_string(free_bits.size()) +
                          " candidates, above the configured limit");
    const std::uint64_t total = std::uint64_t{1} << free_bits.size();

    std::vector<std::string> names;
    for (const CostFunction* f : lang.non_unary()) names.push_back(f->name);

    std::vector<CachedViolation> cache;
    constexpr std::size_t kCacheLimit = 32;
    std::vector<int> root_value(pairs, 0);
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        ++stats.candidates;
        for (std::size_t j = 0; j < free_bits.size(); ++j) root_value[free_bits[j]] = static_cast<int>((mask >> j) & 1);
        std::vector<bool> bits(pairs, false);
        for (std::size_t k = 0; k < pairs; ++k) {
            if (!in_m_pair[k]) continue;
            auto [root, parity] = uf.find(k);
            bits[k] = (root_value[root] ^ parity) != 0;
        }
        OperationPair pair = OperationPair::from_orientation(n, bits);
        // Unordered pairs outside M are projections.
        for (Label a = 0; a < n; ++a)
            for (Label b = 0; b < n; ++b)
                if (a != b && !member({a, b})) {
                    pair.meet_table[static_cast<std::size_t>(a * n + b)] = a;
                    pair.join_table[static_cast<std::size_t>(a * n + b)] = b;
                }

        if (std::any_of(cache.begin(), cache.end(), [&](const CachedViolation& v) { return still_violates(pair, v); })) {
            ++stats.cache_hits;
            continue;
        }
        ++stats.verified;
        std::optional<Violation> violation;
        const CostFunction* culprit = nullptr;
        for (const CostFunction* f : lang.non_unary()) {
            violation = verify_function(pair, *f, VerifyMode::Full);
            if (violation) {
                culprit = f;
                break;
            }
        }
        if (!violation) return StpCertificate{pair, sigma_of(pair, in_m), names, VerifyMode::Full};
        if (cache.size() < kCacheLimit) cache.push_back({culprit, violation->x, violation->y});
    }
    return std::nullopt;
}

}  // namespace

std::optional<StpCertificate> search_stp(const Language& lang, const PairGraph& graph, const SearchConfig& config,
                                         SearchStats* stats)
{
    SearchStats local;
    const std::vector<bool> all(static_cast<std::size_t>(PairIndex(lang.domain_size).size()), true);
    auto result = search_on(lang, graph, all, config, stats ? *stats : local);
    return result;
}

std::optional<std::vector<Label>> find_submodular_order(const Language& lang, const StpCertificate& cert)
{
    const int n = cert.pair.domain_size;
    std::vector<Label> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::vector<int> wins(static_cast<std::size_t>(n), 0);
    for (Label a = 0; a < n; ++a)
        for (Label b = 0; b < n; ++b)
            if (a != b && cert.pair.meet(a, b) == a) ++wins[static_cast<std::size_t>(a)];
    std::vector<Label> by_wins = order;
    std::stable_sort(by_wins.begin(), by_wins.end(),
                     [&](Label a, Label b) { return wins[static_cast<std::size_t>(a)] > wins[static_cast<std::size_t>(b)]; });
    if (OperationPair::from_order(by_wins) == cert.pair &&
        !verify_multimorphism(cert.pair, lang, VerifyMode::Full))
        return by_wins;

    if (n > 8) return std::nullopt;
    do {
        if (!verify_multimorphism(OperationPair::from_order(order), lang, VerifyMode::Full)) return order;
    } while (std::next_permutation(order.begin(), order.end()));
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Classification

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::Tractable: return "TRACTABLE";
    case Verdict::NpHard: return "NP_HARD";
    case Verdict::GeneralConjecturedTractable: return "GENERAL_CONJECTURED_TRACTABLE";
    case Verdict::GeneralUnknown: return "GENERAL_UNKNOWN";
    }
    return "?";
}

const char* to_string(HardnessReason r)
{
    switch (r) {
    case HardnessReason::None: return "none";
    case HardnessReason::SoftSelfLoop: return "soft-self-loop";
    case HardnessReason::NoStp: return "no-stp";
    }
    return "?";
}

const char* to_string(SigmaRoute r)
{
    switch (r) {
    case SigmaRoute::Skipped: return "skipped";
    case SigmaRoute::Verified: return "verified";
    case SigmaRoute::Failed: return "failed";
    case SigmaRoute::Conflict: return "conflict";
    }
    return "?";
}

namespace {

// The sign-built pair, verified in full mode against the language and the
// pool. Empty when colouring conflicts or verification fails.
std::optional<StpCertificate> sigma_route(const Language& lang, const PairGraph& graph, SigmaRoute& route)
{
    auto colored = two_color(graph);
    if (std::holds_alternative<ColoringConflict>(colored)) {
        route = SigmaRoute::Conflict;
        return std::nullopt;
    }
    const auto& sigma = std::get<SignAssignment>(colored);
    const MSplit split = compute_m(graph);
    OperationPair pair = build_meet_join(sigma, split.in_m, lang.domain_size);
    bool ok = !verify_multimorphism(pair, lang, VerifyMode::Full);
    for (std::size_t i = 0; ok && i < graph.pool.size(); ++i)
        ok = !verify_function(pair, graph.pool[i].table, VerifyMode::Full);
    if (!ok) {
        route = SigmaRoute::Failed;
        return std::nullopt;
    }
    route = SigmaRoute::Verified;
    std::vector<std::string> names;
    for (const CostFunction* f : lang.non_unary()) names.push_back(f->name);
    return StpCertificate{std::move(pair), sigma, std::move(names), VerifyMode::Full};
}

}  // namespace

Classification classify(const Language& lang, const ClassifierConfig& config)
{
    lang.check();
    Classification out;
    out.mode = lang.mode();
    auto graph = std::make_shared<PairGraph>(build_pair_graph(lang, config.pool));
    out.graph = graph;
    out.stats.pool_views = graph->pool.size();
    out.stats.pool_truncated = graph->truncated;
    out.witness = find_soft_self_loop(*graph);

    if (out.mode == LanguageMode::FiniteValued) {
        std::optional<StpCertificate> cert;
        if (!out.witness) cert = sigma_route(lang, *graph, out.stats.sigma_route);
        if (!cert) cert = search_stp(lang, *graph, config.search, &out.stats.search);
        if (cert && out.witness)
            throw std::logic_error("a verified STP coexists with a soft self-loop witness");
        if (cert) {
            out.verdict = Verdict::Tractable;
            out.order = find_submodular_order(lang, *cert);
            out.certificate = std::move(cert);
        } else {
            out.verdict = Verdict::NpHard;
            out.reason = out.witness ? HardnessReason::SoftSelfLoop : HardnessReason::NoStp;
        }
        return out;
    }

    if (out.witness) {
        out.verdict = Verdict::NpHard;
        out.reason = HardnessReason::SoftSelfLoop;
        return out;
    }
    std::optional<StpCertificate> cert = sigma_route(lang, *graph, out.stats.sigma_route);
    if (!cert) {
        const MSplit split = compute_m(*graph);
        cert = search_on(lang, *graph, split.in_m, config.search, out.stats.search);
    }
    if (cert) {
        out.verdict = Verdict::GeneralConjecturedTractable;
        out.certificate = std::move(cert);
    } else {
        out.verdict = Verdict::GeneralUnknown;
    }
    return out;
}

}  // namespace vcsp
