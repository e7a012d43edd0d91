#pragma once

#include "vcsp/hardness.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vcsp {

using Json = nlohmann::json;

// File formats. Costs are integers, "p/q" strings or "inf". Every parse
// error names the first offending location, e.g. "functions[1].table[4]".

Language parse_language(std::string_view text);
Json language_to_json(const Language& lang);

/// An instance file. Terms name functions; names resolve first against
/// functions embedded in the file, then against `lang`.
struct InstanceFile {
    VcspInstance instance;
    std::vector<std::shared_ptr<const CostFunction>> embedded;
};

InstanceFile parse_instance(std::string_view text, const Language* lang);
Json instance_to_json(const VcspInstance& instance, const std::vector<std::shared_ptr<const CostFunction>>& embed = {});

/// JSON {"vertices": n, "edges": [[u, v], ...]} or an edge list.
SourceGraph parse_graph(std::string_view text);

Json decoder_to_json(const AffineDecoder& d);
AffineDecoder decoder_from_json(const Json& j);

struct CertificateDoc {
    std::vector<std::pair<std::string, int>> sigma;  // "a|b" -> ±1, nodes of M
    std::vector<std::vector<Label>> meet, join;
    std::optional<std::vector<Label>> order;
    std::vector<std::string> verified_against;
    std::string mode;

    friend bool operator==(const CertificateDoc&, const CertificateDoc&) = default;
};

struct WitnessDoc {
    std::string node;
    std::vector<Label> quad;
    std::string derivation;
    bool derived = false;
    bool leaked = false;
    std::vector<Cost> table;  // the witnessing binary view, row-major

    friend bool operator==(const WitnessDoc&, const WitnessDoc&) = default;
};

struct GraphSummary {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t soft = 0;
    std::size_t hard = 0;
    std::size_t self_loops = 0;
    std::size_t m_size = 0;
    std::size_t pool_views = 0;
    bool pool_truncated = false;

    friend bool operator==(const GraphSummary&, const GraphSummary&) = default;
};

struct SearchDoc {
    std::string sigma_route;
    std::uint64_t space = 0;
    std::uint64_t candidates = 0;
    std::uint64_t verified = 0;
    std::uint64_t cache_hits = 0;
    bool edge_conflict = false;

    friend bool operator==(const SearchDoc&, const SearchDoc&) = default;
};

struct ReportDocument {
    std::string verdict;
    std::string mode;
    std::string reason;
    int domain = 0;
    std::optional<CertificateDoc> certificate;
    std::optional<WitnessDoc> witness;
    GraphSummary graph;
    SearchDoc search;
    std::vector<std::string> notes;
    std::optional<std::int64_t> classify_us;

    friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

ReportDocument make_report(const Language& lang, const Classification& c);
Json report_to_json(const ReportDocument& r);
ReportDocument report_from_json(const Json& j);
std::string render_text(const ReportDocument& r);

/// Enough of a classification to dispatch solve(): verdict and order.
Classification classification_from_report(const ReportDocument& r);

Verdict parse_verdict(std::string_view s);

/// 64-bit FNV-1a, used to key the classification cache.
std::uint64_t content_hash(std::string_view data);

}  // namespace vcsp
