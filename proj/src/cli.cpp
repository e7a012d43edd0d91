#include "vcsp/cli.hpp"

#include "vcsp/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace vcsp {

namespace {

struct Options {
    std::string language;
    std::string second;  // instance or graph file
    std::string out_file;
    std::string kind = "auto";
    bool json = false;
    bool no_timings = false;
    bool no_cache = false;
    bool summary = false;
    bool verify = false;
    int pool_depth = 1;
    std::size_t pool_limit = 4096;
    int stp_max_domain = 8;
    std::uint64_t stp_max_candidates = std::uint64_t{1} << 22;
    std::uint64_t brute_force_cap = std::uint64_t{1} << 24;
    int threads = 1;

    ClassifierConfig classifier() const
    {
        ClassifierConfig c;
        c.pool.chain_depth = pool_depth;
        c.pool.max_views = pool_limit;
        c.search.max_domain = stp_max_domain;
        c.search.max_candidates = stp_max_candidates;
        return c;
    }
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& data)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << data)) throw InputError("cannot write " + path);
}

Language load_language(const std::string& path, std::string* raw = nullptr)
{
    std::string text = read_file(path);
    try {
        Language lang = parse_language(text);
        if (raw) *raw = std::move(text);
        return lang;
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

int exit_for(Verdict v)
{
    switch (v) {
    case Verdict::Tractable: return kExitTractable;
    case Verdict::NpHard: return kExitNpHard;
    default: return kExitGeneral;
    }
}

std::string config_key(const std::string& raw, const Options& o)
{
    std::ostringstream key;
    key << std::hex << std::setw(16) << std::setfill('0') << content_hash(raw) << "-d" << std::dec << o.pool_depth << "-l"
        << o.pool_limit << "-s" << o.stp_max_domain << "-c" << o.stp_max_candidates;
    return key.str();
}

ReportDocument timed_report(const Language& lang, const Options& o)
{
    const auto start = std::chrono::steady_clock::now();
    const Classification c = classify(lang, o.classifier());
    ReportDocument r = make_report(lang, c);
    if (!o.no_timings)
        r.classify_us = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start).count();
    return r;
}

int cmd_classify(const Options& o, std::ostream& out)
{
    const Language lang = load_language(o.language);
    const ReportDocument r = timed_report(lang, o);
    if (o.json) out << report_to_json(r).dump(2) << "\n";
    else out << render_text(r);
    return exit_for(parse_verdict(r.verdict));
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err)
{
    std::string raw;
    const Language lang = load_language(o.language, &raw);
    InstanceFile file;
    try {
        file = parse_instance(read_file(o.second), &lang);
    } catch (const InputError& e) {
        throw InputError(o.second + ": " + std::string(e.what()));
    }

    const std::string cache_path = o.language + ".classification.json";
    const std::string key = config_key(raw, o);
    std::optional<ReportDocument> report;
    if (!o.no_cache) {
        try {
            const Json cached = Json::parse(read_file(cache_path));
            if (cached.at("key").get<std::string>() == key) report = report_from_json(cached.at("report"));
        } catch (const std::exception&) {
            // Missing or stale cache: recompute.
        }
    }
    if (!report) {
        report = timed_report(lang, o);
        if (!o.no_cache) {
            try {
                ReportDocument stored = *report;
                stored.classify_us.reset();
                write_file(cache_path, Json{{"key", key}, {"report", report_to_json(stored)}}.dump(2) + "\n");
            } catch (const InputError& e) {
                err << "warning: " << e.what() << "\n";
            }
        }
    }

    const Classification c = classification_from_report(*report);
    const SolveResult r = solve(file.instance, c, BruteForceConfig{o.brute_force_cap, o.threads});
    const std::string note = "min-cut covers unary and binary terms only; anything else is solved by brute force";
    if (o.json) {
        Json j{{"verdict", report->verdict},
               {"method", to_string(r.method)},
               {"cost", r.cost.to_string()},
               {"assignment", r.assignment},
               {"infeasible", r.infeasible},
               {"stats", {{"evaluations", r.stats.evaluations}, {"flow_solves", r.stats.flow_solves}}},
               {"note", note}};
        out << j.dump(2) << "\n";
    } else {
        out << "verdict: " << report->verdict << "\n";
        out << "method: " << to_string(r.method) << "\n";
        out << "cost: " << r.cost << "\n";
        out << "assignment:";
        for (Label l : r.assignment) out << " " << l;
        out << "\n";
        if (r.infeasible) out << "infeasible: every assignment has infinite cost\n";
        out << "note: " << note << "\n";
    }
    return r.infeasible ? kExitInfeasible : kExitTractable;
}

int cmd_graph(const Options& o, std::ostream& out)
{
    const Language lang = load_language(o.language);
    const PairGraph g = build_pair_graph(lang, o.classifier().pool);
    std::string text;
    if (o.summary) {
        std::size_t loops = 0;
        for (const auto& e : g.edges) loops += e.self_loop();
        std::ostringstream s;
        s << "nodes: " << PairIndex(g.domain_size).size() << "\n"
          << "edges: " << g.edges.size() << "\n"
          << "soft: " << g.soft_count() << "\n"
          << "hard: " << g.hard_count() << "\n"
          << "self-loops: " << loops << "\n"
          << "M: " << compute_m(g).m.size() << "\n"
          << "pool: " << g.pool.size() << (g.truncated ? " (truncated)" : "") << "\n";
        text = s.str();
    } else {
        text = to_dot(g);
    }
    if (o.out_file.empty()) out << text;
    else write_file(o.out_file, text);
    return kExitTractable;
}

// Every soft self-loop of the graph, witnessed and normalized, in node order
// with the classifier's own witness first.
std::optional<HardnessWitness> pick_witness(const Classification& c, const std::string& kind)
{
    auto wanted = [&](const HardnessWitness& w) {
        return kind == "auto" || (kind == "maxcut" && w.kind == WitnessKind::BothFinite) ||
               (kind == "mis" && w.kind == WitnessKind::OneInfinite);
    };
    if (c.witness) {
        HardnessWitness w = normalize_witness(c.witness->view, c.witness->node.first, c.witness->node.second);
        if (wanted(w)) return w;
    }
    const PairGraph& g = *c.graph;
    const PairIndex idx(g.domain_size);
    for (int i = 0; i < idx.size(); ++i) {
        const PairNode p = idx.node(i);
        const auto id = g.find(p, p);
        if (!id || !g.edges[*id].soft()) continue;
        HardnessWitness w = normalize_witness(realize_edge(g, *id, p, true), p.first, p.second);
        if (wanted(w)) return w;
    }
    return std::nullopt;
}

int cmd_reduce(const Options& o, std::ostream& out, std::ostream& err)
{
    if (o.kind != "auto" && o.kind != "maxcut" && o.kind != "mis") throw InputError("--kind must be auto, maxcut or mis");
    const Language lang = load_language(o.language);
    SourceGraph src;
    try {
        src = parse_graph(read_file(o.second));
    } catch (const InputError& e) {
        throw InputError(o.second + ": " + std::string(e.what()));
    }
    const Classification c = classify(lang, o.classifier());
    std::optional<HardnessWitness> w;
    if (c.graph) w = pick_witness(c, o.kind);
    if (!w) {
        err << "no " << (o.kind == "auto" ? "" : o.kind + " ") << "witness: language is " << to_string(c.verdict);
        if (c.verdict == Verdict::NpHard && !c.witness)
            err << " but no soft self-loop was found in the pool, so no gadget can be emitted";
        else if (c.witness)
            err << " and no soft self-loop of the requested kind exists";
        err << "\n";
        return kExitNoWitness;
    }

    const Reduction red = w->kind == WitnessKind::BothFinite ? reduce_maxcut(src, *w) : reduce_mis(src, *w);
    Json decoder = decoder_to_json(red.decoder);
    decoder["witness"] = Json{{"node", to_string(w->pair_node)},
                              {"kind", to_string(w->kind)},
                              {"derivation", w->view.derivation ? to_string(*w->view.derivation) : ""},
                              {"normalization", w->normalization}};
    const Json instance = instance_to_json(red.instance, red.functions);
    if (o.out_file.empty()) {
        out << Json{{"instance", instance}, {"decoder", decoder}}.dump(2) << "\n";
    } else {
        write_file(o.out_file, instance.dump(2) + "\n");
        write_file(o.out_file + ".decoder.json", decoder.dump(2) + "\n");
        out << "wrote " << o.out_file << " and " << o.out_file << ".decoder.json\n";
    }

    if (o.verify) {
        if (src.vertex_count > 16) {
            err << "verify: skipped, more than 16 vertices\n";
        } else {
            const ReductionCheck check = verify_reduction(src, red);
            err << "verify: " << (check.ok ? "ok" : "MISMATCH") << ", " << red.decoder.quantity << " "
                << to_string(check.expected) << ", decoded " << to_string(check.decoded) << " from optimum " << check.optimum
                << "\n";
            if (!check.ok) return kExitError;
        }
    }
    return kExitTractable;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Classify, solve and reduce conservative valued constraint languages"};
    app.require_subcommand(1);

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--pool-depth", o.pool_depth, "Chain depth of the binary pool")->envname("VCSP_POOL_DEPTH")->check(CLI::Range(0, 4));
        sub->add_option("--pool-limit", o.pool_limit, "Maximum number of pooled binary views")->envname("VCSP_POOL_LIMIT");
        sub->add_option("--stp-max-domain", o.stp_max_domain, "Largest domain for the exhaustive STP search")
            ->envname("VCSP_STP_MAX_DOMAIN");
        sub->add_option("--stp-max-candidates", o.stp_max_candidates, "Candidate limit of the STP search")
            ->envname("VCSP_STP_MAX_CANDIDATES");
    };

    auto* classify_cmd = app.add_subcommand("classify", "Decide tractable or NP-hard");
    classify_cmd->add_option("language", o.language, "Language file")->required();
    classify_cmd->add_flag("--json", o.json, "JSON report");
    classify_cmd->add_flag("--no-timings", o.no_timings, "Omit timings");
    add_config(classify_cmd);

    auto* solve_cmd = app.add_subcommand("solve", "Classify, then solve an instance");
    solve_cmd->add_option("language", o.language, "Language file")->required();
    solve_cmd->add_option("instance", o.second, "Instance file")->required();
    solve_cmd->add_flag("--json", o.json, "JSON output");
    solve_cmd->add_flag("--no-cache", o.no_cache, "Do not read or write the classification cache");
    solve_cmd->add_flag("--no-timings", o.no_timings, "Omit timings");
    solve_cmd->add_option("--brute-force-cap", o.brute_force_cap, "Evaluation budget for brute force")
        ->envname("VCSP_BRUTE_FORCE_CAP");
    solve_cmd->add_option("--threads", o.threads, "Worker threads for brute force")->envname("VCSP_THREADS")->check(CLI::Range(1, 256));
    add_config(solve_cmd);

    auto* graph_cmd = app.add_subcommand("graph", "Print the closed pair graph as DOT");
    graph_cmd->add_option("language", o.language, "Language file")->required();
    graph_cmd->add_flag("--summary", o.summary, "Counts only");
    graph_cmd->add_option("--out", o.out_file, "Write to a file instead of stdout");
    add_config(graph_cmd);

    auto* reduce_cmd = app.add_subcommand("reduce", "Emit an NP-hardness reduction from a graph");
    reduce_cmd->add_option("language", o.language, "Language file")->required();
    reduce_cmd->add_option("graph", o.second, "Graph file (edge list or JSON)")->required();
    reduce_cmd->add_option("--kind", o.kind, "auto, maxcut or mis");
    reduce_cmd->add_option("--out", o.out_file, "Instance file; the decoder goes to <out>.decoder.json");
    reduce_cmd->add_flag("--verify", o.verify, "Check the decoder against brute force (<= 16 vertices)");
    add_config(reduce_cmd);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (classify_cmd->parsed()) return cmd_classify(o, out);
        if (solve_cmd->parsed()) return cmd_solve(o, out, err);
        if (graph_cmd->parsed()) return cmd_graph(o, out);
        return cmd_reduce(o, out, err);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const BudgetError& e) {
        err << "budget exceeded: " << e.what() << "\n";
    }
    return kExitError;
}

}  // namespace vcsp
