#include "vcsp/io.hpp"

#include <algorithm>
#include <sstream>

namespace vcsp {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw InputError(where + ": " + what); }

Json parse_json(std::string_view text)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("malformed JSON at byte ") + std::to_string(e.byte) + ": " + e.what());
    }
}

const Json& field(const Json& obj, const char* key, const std::string& where)
{
    if (!obj.is_object()) fail(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing \"") + key + "\"");
    return *it;
}

long integer(const Json& j, const std::string& where, long lo, long hi)
{
    if (!j.is_number_integer()) fail(where, "expected an integer");
    const auto v = j.get<long long>();
    if (v < lo || v > hi) fail(where, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<long>(v);
}

Cost cost_from_json(const Json& j, const std::string& where)
{
    if (j.is_number_integer()) {
        if (j.is_number_unsigned()) return Cost(Rational(std::to_string(j.get<unsigned long long>())));
        return Cost(Rational(std::to_string(j.get<long long>())));
    }
    if (j.is_string()) {
        try {
            return Cost::parse(j.get<std::string>());
        } catch (const InputError& e) {
            fail(where, e.what());
        }
    }
    if (j.is_number()) fail(where, "non-integer costs must be written as \"p/q\"");
    fail(where, "expected an integer, \"p/q\" or \"inf\"");
}

Json cost_to_json(const Cost& c) { return c.to_string(); }

std::vector<Cost> table_from_json(const Json& j, const std::string& where)
{
    if (!j.is_array()) fail(where, "expected an array");
    std::vector<Cost> table;
    table.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) table.push_back(cost_from_json(j[i], where + "[" + std::to_string(i) + "]"));
    return table;
}

// Table entries as integers where possible, keeping the files diff-friendly.
Json table_to_json(const std::vector<Cost>& table)
{
    Json out = Json::array();
    for (const auto& c : table) {
        if (c.is_finite() && c.value().get_den() == 1 && c.value().get_num().fits_slong_p())
            out.push_back(c.value().get_num().get_si());
        else
            out.push_back(c.to_string());
    }
    return out;
}

CostFunction function_from_json(const Json& j, int domain, const std::string& where)
{
    CostFunction f;
    const Json& name = field(j, "name", where);
    if (!name.is_string() || name.get<std::string>().empty()) fail(where + ".name", "expected a non-empty string");
    f.name = name.get<std::string>();
    f.arity = static_cast<int>(integer(field(j, "arity", where), where + ".arity", 1, kMaxArity));
    f.domain_size = domain;
    f.table = table_from_json(field(j, "table", where), where + ".table");
    const std::size_t want = tuple_count(domain, f.arity);
    if (f.table.size() != want)
        fail(where + ".table", "has " + std::to_string(f.table.size()) + " entries, expected " + std::to_string(want));
    for (std::size_t i = 0; i < f.table.size(); ++i)
        if (f.table[i].is_finite() && sgn(f.table[i].value()) < 0)
            fail(where + ".table[" + std::to_string(i) + "]", "negative cost");
    return f;
}

Json function_to_json(const CostFunction& f)
{
    return Json{{"name", f.name}, {"arity", f.arity}, {"table", table_to_json(f.table)}};
}

}  // namespace

Language parse_language(std::string_view text)
{
    const Json j = parse_json(text);
    Language lang;
    lang.domain_size = static_cast<int>(integer(field(j, "domain", "language"), "domain", 2, kMaxDomainSize));
    const Json& fns = field(j, "functions", "language");
    if (!fns.is_array()) fail("functions", "expected an array");
    for (std::size_t i = 0; i < fns.size(); ++i) {
        const std::string where = "functions[" + std::to_string(i) + "]";
        CostFunction f = function_from_json(fns[i], lang.domain_size, where);
        if (lang.find(f.name)) fail(where + ".name", "duplicate function name \"" + f.name + "\"");
        lang.functions.push_back(std::move(f));
    }
    lang.check();
    return lang;
}

Json language_to_json(const Language& lang)
{
    Json fns = Json::array();
    for (const auto& f : lang.functions) fns.push_back(function_to_json(f));
    return Json{{"domain", lang.domain_size}, {"functions", fns}};
}

InstanceFile parse_instance(std::string_view text, const Language* lang)
{
    const Json j = parse_json(text);
    InstanceFile out;
    auto& inst = out.instance;
    inst.node_count = static_cast<int>(integer(field(j, "nodes", "instance"), "nodes", 0, 1 << 20));

    if (j.contains("domain")) {
        inst.domain_size = static_cast<int>(integer(j["domain"], "domain", 2, kMaxDomainSize));
        if (lang && lang->domain_size != inst.domain_size)
            fail("domain", "instance domain " + std::to_string(inst.domain_size) + " differs from the language domain " +
                               std::to_string(lang->domain_size));
    } else if (lang) {
        inst.domain_size = lang->domain_size;
    } else {
        fail("instance", "missing \"domain\" and no language given");
    }
    if (j.contains("functions")) {
        const Json& fns = j["functions"];
        if (!fns.is_array()) fail("functions", "expected an array");
        for (std::size_t i = 0; i < fns.size(); ++i)
            out.embedded.push_back(std::make_shared<const CostFunction>(
                function_from_json(fns[i], inst.domain_size, "functions[" + std::to_string(i) + "]")));
    }

    std::vector<std::shared_ptr<const CostFunction>> from_lang;
    auto resolve = [&](const std::string& name, const std::string& where) -> std::shared_ptr<const CostFunction> {
        for (const auto& f : out.embedded)
            if (f->name == name) return f;
        for (const auto& f : from_lang)
            if (f->name == name) return f;
        if (lang)
            if (const CostFunction* f = lang->find(name)) {
                from_lang.push_back(std::make_shared<const CostFunction>(*f));
                return from_lang.back();
            }
        fail(where, "unknown function \"" + name + "\"");
    };

    const Json& terms = field(j, "terms", "instance");
    if (!terms.is_array()) fail("terms", "expected an array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string where = "terms[" + std::to_string(i) + "]";
        const Json& fn = field(terms[i], "function", where);
        if (!fn.is_string()) fail(where + ".function", "expected a string");
        auto f = resolve(fn.get<std::string>(), where + ".function");
        const Json& scope = field(terms[i], "scope", where);
        if (!scope.is_array()) fail(where + ".scope", "expected an array");
        std::vector<int> s;
        for (std::size_t k = 0; k < scope.size(); ++k)
            s.push_back(static_cast<int>(integer(scope[k], where + ".scope[" + std::to_string(k) + "]", 0, inst.node_count - 1)));
        if (static_cast<int>(s.size()) != f->arity)
            fail(where + ".scope", "has " + std::to_string(s.size()) + " nodes but \"" + f->name + "\" has arity " +
                                       std::to_string(f->arity));
        inst.add_term(f, std::move(s));
    }
    if (j.contains("unary_terms")) {
        const Json& us = j["unary_terms"];
        if (!us.is_array()) fail("unary_terms", "expected an array");
        for (std::size_t i = 0; i < us.size(); ++i) {
            const std::string where = "unary_terms[" + std::to_string(i) + "]";
            const int node = static_cast<int>(integer(field(us[i], "node", where), where + ".node", 0, inst.node_count - 1));
            auto table = table_from_json(field(us[i], "table", where), where + ".table");
            if (static_cast<int>(table.size()) != inst.domain_size) fail(where + ".table", "needs one entry per label");
            for (std::size_t k = 0; k < table.size(); ++k)
                if (table[k].is_finite() && sgn(table[k].value()) < 0)
                    fail(where + ".table[" + std::to_string(k) + "]", "negative cost");
            inst.add_unary(node, std::move(table));
        }
    }
    inst.check();
    return out;
}

Json instance_to_json(const VcspInstance& inst, const std::vector<std::shared_ptr<const CostFunction>>& embed)
{
    Json j{{"nodes", inst.node_count}, {"domain", inst.domain_size}};
    if (!embed.empty()) {
        Json fns = Json::array();
        for (const auto& f : embed) fns.push_back(function_to_json(*f));
        j["functions"] = fns;
    }
    Json terms = Json::array();
    for (const auto& t : inst.terms) terms.push_back(Json{{"function", t.function->name}, {"scope", t.scope}});
    j["terms"] = terms;
    if (!inst.unary_terms.empty()) {
        Json us = Json::array();
        for (const auto& u : inst.unary_terms) us.push_back(Json{{"node", u.node}, {"table", table_to_json(u.table)}});
        j["unary_terms"] = us;
    }
    return j;
}

SourceGraph parse_graph(std::string_view text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos || text[first] != '{') return parse_edge_list(text);
    const Json j = parse_json(text);
    SourceGraph g;
    g.vertex_count = static_cast<int>(integer(field(j, "vertices", "graph"), "vertices", 0, 1 << 20));
    const Json& edges = field(j, "edges", "graph");
    if (!edges.is_array()) fail("edges", "expected an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string where = "edges[" + std::to_string(i) + "]";
        if (!edges[i].is_array() || edges[i].size() != 2) fail(where, "expected [u, v]");
        g.edges.emplace_back(static_cast<int>(integer(edges[i][0], where + "[0]", 0, g.vertex_count - 1)),
                             static_cast<int>(integer(edges[i][1], where + "[1]", 0, g.vertex_count - 1)));
    }
    g.check();
    return g;
}

Json decoder_to_json(const AffineDecoder& d)
{
    return Json{{"quantity", d.quantity},
                {"offset", to_string(d.offset)},
                {"scale", to_string(d.scale)},
                {"formula", "(" + to_string(d.offset) + " - opt) / " + to_string(d.scale)}};
}

AffineDecoder decoder_from_json(const Json& j)
{
    AffineDecoder d;
    d.quantity = field(j, "quantity", "decoder").get<std::string>();
    d.offset = parse_rational(field(j, "offset", "decoder").get<std::string>());
    d.scale = parse_rational(field(j, "scale", "decoder").get<std::string>());
    return d;
}

// ---------------------------------------------------------------------------
// Reports

ReportDocument make_report(const Language& lang, const Classification& c)
{
    ReportDocument r;
    r.verdict = to_string(c.verdict);
    r.mode = to_string(c.mode);
    r.reason = to_string(c.reason);
    r.domain = lang.domain_size;

    if (c.certificate) {
        const auto& cert = *c.certificate;
        CertificateDoc doc;
        const PairIndex idx(lang.domain_size);
        for (int i = 0; i < idx.size(); ++i) {
            const PairNode p = idx.node(i);
            if (cert.sigma.assigned(p)) doc.sigma.emplace_back(to_string(p), cert.sigma(p));
        }
        for (Label a = 0; a < cert.pair.domain_size; ++a) {
            doc.meet.emplace_back();
            doc.join.emplace_back();
            for (Label b = 0; b < cert.pair.domain_size; ++b) {
                doc.meet.back().push_back(cert.pair.meet(a, b));
                doc.join.back().push_back(cert.pair.join(a, b));
            }
        }
        doc.order = c.order;
        doc.verified_against = cert.verified_against;
        doc.mode = to_string(cert.mode_used);
        r.certificate = std::move(doc);
    }
    if (c.witness) {
        const auto& w = *c.witness;
        WitnessDoc doc;
        doc.node = to_string(w.node);
        doc.quad.assign(w.quad.begin(), w.quad.end());
        doc.derivation = w.view.derivation ? to_string(*w.view.derivation) : "";
        doc.derived = w.derived;
        doc.leaked = w.view.penalty_leaked;
        doc.table = w.view.table.table;
        r.witness = std::move(doc);
    }
    if (c.graph) {
        const auto& g = *c.graph;
        r.graph.nodes = static_cast<std::size_t>(PairIndex(g.domain_size).size());
        r.graph.edges = g.edges.size();
        r.graph.soft = g.soft_count();
        r.graph.hard = g.hard_count();
        r.graph.self_loops = static_cast<std::size_t>(
            std::count_if(g.edges.begin(), g.edges.end(), [](const PairEdge& e) { return e.self_loop(); }));
        r.graph.m_size = compute_m(g).m.size();
        r.graph.pool_views = g.pool.size();
        r.graph.pool_truncated = g.truncated;
    }
    r.search = {to_string(c.stats.sigma_route), c.stats.search.space, c.stats.search.candidates,
                c.stats.search.verified, c.stats.search.cache_hits, c.stats.search.edge_conflict};

    std::vector<std::string> unary;
    for (const auto& f : lang.functions)
        if (f.arity == 1) unary.push_back(f.name);
    if (!unary.empty()) {
        std::string names;
        for (const auto& n : unary) names += (names.empty() ? "" : ", ") + n;
        r.notes.push_back("unary functions (" + names + ") are accepted for instances but never affect classification");
    }
    if (c.verdict == Verdict::NpHard && !c.witness)
        r.notes.push_back("no STP exists; hardness follows from the dichotomy and no gadget witness was found in the pool");
    if (c.verdict == Verdict::Tractable && !c.order)
        r.notes.push_back("no submodular total order found; solving falls back to brute force");
    if (c.verdict == Verdict::GeneralConjecturedTractable)
        r.notes.push_back("STP on M with projections elsewhere verified; tractability of general-valued languages is not decided here");
    if (c.graph && c.graph->truncated)
        r.notes.push_back("binary pool truncated; graph edges are an under-approximation");
    return r;
}

Json report_to_json(const ReportDocument& r)
{
    Json j{{"verdict", r.verdict}, {"mode", r.mode}, {"reason", r.reason}, {"domain", r.domain}};
    if (r.certificate) {
        const auto& c = *r.certificate;
        Json sigma = Json::object();
        for (const auto& [node, s] : c.sigma) sigma[node] = s;
        Json cert{{"sigma", sigma}, {"meet", c.meet}, {"join", c.join}, {"verified_against", c.verified_against}, {"mode", c.mode}};
        cert["order"] = c.order ? Json(*c.order) : Json(nullptr);
        j["certificate"] = cert;
    } else {
        j["certificate"] = nullptr;
    }
    if (r.witness) {
        const auto& w = *r.witness;
        Json table = Json::array();
        for (const auto& c : w.table) table.push_back(cost_to_json(c));
        j["witness"] = Json{{"node", w.node}, {"quad", w.quad}, {"derivation", w.derivation},
                            {"derived", w.derived}, {"leaked", w.leaked}, {"table", table}};
    } else {
        j["witness"] = nullptr;
    }
    j["graph"] = Json{{"nodes", r.graph.nodes},         {"edges", r.graph.edges},
                      {"soft", r.graph.soft},           {"hard", r.graph.hard},
                      {"self_loops", r.graph.self_loops}, {"m_size", r.graph.m_size},
                      {"pool_views", r.graph.pool_views}, {"pool_truncated", r.graph.pool_truncated}};
    j["search"] = Json{{"sigma_route", r.search.sigma_route}, {"space", r.search.space},
                       {"candidates", r.search.candidates}, {"verified", r.search.verified},
                       {"cache_hits", r.search.cache_hits}, {"edge_conflict", r.search.edge_conflict}};
    j["notes"] = r.notes;
    if (r.classify_us) j["timings"] = Json{{"classify_us", *r.classify_us}};
    return j;
}

ReportDocument report_from_json(const Json& j)
{
    try {
        ReportDocument r;
        r.verdict = j.at("verdict").get<std::string>();
        r.mode = j.at("mode").get<std::string>();
        r.reason = j.at("reason").get<std::string>();
        r.domain = j.at("domain").get<int>();
        if (!j.at("certificate").is_null()) {
            const Json& c = j["certificate"];
            CertificateDoc doc;
            // Keys come back sorted; restore pair-index order.
            for (auto it = c.at("sigma").begin(); it != c.at("sigma").end(); ++it) doc.sigma.emplace_back(it.key(), it.value().get<int>());
            auto key = [](const std::string& s) {
                const auto bar = s.find('|');
                return std::pair{std::stoi(s.substr(0, bar)), std::stoi(s.substr(bar + 1))};
            };
            std::sort(doc.sigma.begin(), doc.sigma.end(), [&](const auto& x, const auto& y) { return key(x.first) < key(y.first); });
            doc.meet = c.at("meet").get<std::vector<std::vector<Label>>>();
            doc.join = c.at("join").get<std::vector<std::vector<Label>>>();
            if (!c.at("order").is_null()) doc.order = c["order"].get<std::vector<Label>>();
            doc.verified_against = c.at("verified_against").get<std::vector<std::string>>();
            doc.mode = c.at("mode").get<std::string>();
            r.certificate = std::move(doc);
        }
        if (!j.at("witness").is_null()) {
            const Json& w = j["witness"];
            WitnessDoc doc;
            doc.node = w.at("node").get<std::string>();
            doc.quad = w.at("quad").get<std::vector<Label>>();
            doc.derivation = w.at("derivation").get<std::string>();
            doc.derived = w.at("derived").get<bool>();
            doc.leaked = w.at("leaked").get<bool>();
            doc.table = table_from_json(w.at("table"), "witness.table");
            r.witness = std::move(doc);
        }
        const Json& g = j.at("graph");
        r.graph = {g.at("nodes").get<std::size_t>(),      g.at("edges").get<std::size_t>(),
                   g.at("soft").get<std::size_t>(),       g.at("hard").get<std::size_t>(),
                   g.at("self_loops").get<std::size_t>(), g.at("m_size").get<std::size_t>(),
                   g.at("pool_views").get<std::size_t>(), g.at("pool_truncated").get<bool>()};
        const Json& s = j.at("search");
        r.search = {s.at("sigma_route").get<std::string>(), s.at("space").get<std::uint64_t>(),
                    s.at("candidates").get<std::uint64_t>(), s.at("verified").get<std::uint64_t>(),
                    s.at("cache_hits").get<std::uint64_t>(), s.at("edge_conflict").get<bool>()};
        r.notes = j.at("notes").get<std::vector<std::string>>();
        if (j.contains("timings")) r.classify_us = j["timings"].at("classify_us").get<std::int64_t>();
        return r;
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed report: ") + e.what());
    }
}

std::string render_text(const ReportDocument& r)
{
    std::ostringstream out;
    out << "verdict: " << r.verdict << "\n";
    out << "mode: " << r.mode << "\n";
    if (r.reason != "none") out << "reason: " << r.reason << "\n";
    if (r.certificate) {
        const auto& c = *r.certificate;
        if (c.order) {
            out << "order: ";
            for (std::size_t i = 0; i < c.order->size(); ++i) out << (i ? "<" : "") << (*c.order)[i];
            out << "\n";
        }
        out << "sigma:";
        for (const auto& [node, s] : c.sigma) out << " " << node << "=" << (s > 0 ? "+" : "-");
        out << "\n";
        for (const char* which : {"meet", "join"}) {
            const auto& t = std::string(which) == "meet" ? c.meet : c.join;
            out << which << ":\n";
            for (const auto& row : t) {
                out << " ";
                for (Label l : row) out << " " << l;
                out << "\n";
            }
        }
        out << "verified against:";
        for (const auto& n : c.verified_against) out << " " << n;
        out << " (" << c.mode << ")\n";
    }
    if (r.witness) {
        const auto& w = *r.witness;
        out << "witness: soft self-loop at " << w.node << " via " << w.derivation << (w.derived ? " (assembled from closure)" : "")
            << "\n";
        out << "  quad:";
        for (Label l : w.quad) out << " " << l;
        out << "\n  view:";
        const auto d = static_cast<std::size_t>(r.domain);
        for (std::size_t i = 0; i < w.table.size(); ++i) out << (i % d == 0 ? "\n   " : "") << " " << w.table[i];
        out << "\n";
    }
    out << "graph: " << r.graph.nodes << " nodes, " << r.graph.edges << " edges (" << r.graph.soft << " soft, " << r.graph.hard
        << " hard, " << r.graph.self_loops << " self-loops), |M| = " << r.graph.m_size << ", pool " << r.graph.pool_views
        << " views" << (r.graph.pool_truncated ? " (truncated)" : "") << "\n";
    out << "search: sigma route " << r.search.sigma_route;
    if (r.search.edge_conflict)
        out << ", edge constraints unsatisfiable";
    else if (r.search.space == 0)
        out << ", exhaustive search not run";
    else
        out << ", space " << r.search.space << ", candidates " << r.search.candidates << ", verified " << r.search.verified
            << ", cache hits " << r.search.cache_hits;
    out << "\n";
    for (const auto& n : r.notes) out << "note: " << n << "\n";
    if (r.classify_us) out << "time: " << *r.classify_us / 1000.0 << " ms\n";
    return out.str();
}

Verdict parse_verdict(std::string_view s)
{
    for (Verdict v : {Verdict::Tractable, Verdict::NpHard, Verdict::GeneralConjecturedTractable, Verdict::GeneralUnknown})
        if (s == to_string(v)) return v;
    throw InputError("unknown verdict \"" + std::string(s) + "\"");
}

Classification classification_from_report(const ReportDocument& r)
{
    Classification c;
    c.verdict = parse_verdict(r.verdict);
    if (r.certificate) c.order = r.certificate->order;
    return c;
}

std::uint64_t content_hash(std::string_view data)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace vcsp
