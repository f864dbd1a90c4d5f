#include "migmine/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "migmine/errors.hpp"
#include "migmine/strutil.hpp"

namespace migmine {

MigrationGraph build_graph(std::span<const MigrationRecord> records,
                           std::optional<PmtKind> pmt_filter) {
    MigrationGraph graph;
    std::set<std::string> nodes;
    for (const MigrationRecord& record : records) {
        if (pmt_filter && record.pmt != *pmt_filter)
            continue;
        nodes.insert(record.source);
        nodes.insert(record.target);
        ++graph.edges[{record.source, record.target}];
        ++graph.out_degree[record.source];
        ++graph.in_degree[record.target];
    }
    graph.nodes.assign(nodes.begin(), nodes.end());
    return graph;
}

TargetDistribution target_distribution(const MigrationGraph& graph, const std::string& source) {
    TargetDistribution dist;
    dist.source = source;
    long total = 0;
    for (const auto& [edge, weight] : graph.edges) {
        if (edge.first == source)
            total += weight;
    }
    if (total == 0)
        throw NoOutgoingEdges(source + " is never a migration source");
    for (const auto& [edge, weight] : graph.edges) {
        if (edge.first == source)
            dist.probabilities[edge.second] =
                static_cast<double>(weight) / static_cast<double>(total);
    }
    return dist;
}

double entropy(const MigrationGraph& graph, const std::string& source) {
    const TargetDistribution dist = target_distribution(graph, source);
    double h = 0.0;
    for (const auto& [target, p] : dist.probabilities) {
        if (p > 0.0)
            h -= p * std::log2(p);
    }
    return h < 0.0 ? 0.0 : h; // -0.0 from the single-target case
}

double flow(const MigrationGraph& graph, const std::string& library) {
    const auto in_it = graph.in_degree.find(library);
    const auto out_it = graph.out_degree.find(library);
    const double in = in_it == graph.in_degree.end() ? 0.0 : static_cast<double>(in_it->second);
    const double out = out_it == graph.out_degree.end() ? 0.0 : static_cast<double>(out_it->second);
    if (in + out == 0.0)
        throw IsolatedNode(library + " has zero total degree");
    return std::fabs(in - out) / (in + out);
}

namespace {

std::string bucket_label(std::int64_t timestamp, TrendBucket bucket) {
    const YearMonth ym = year_month_utc(timestamp);
    char buf[16];
    if (bucket == TrendBucket::year)
        std::snprintf(buf, sizeof(buf), "%04d", ym.year);
    else
        std::snprintf(buf, sizeof(buf), "%04d-%02d", ym.year, ym.month);
    return buf;
}

std::vector<std::string> bucket_range(const YearMonth& lo, const YearMonth& hi, TrendBucket bucket) {
    std::vector<std::string> out;
    char buf[16];
    if (bucket == TrendBucket::year) {
        for (int y = lo.year; y <= hi.year; ++y) {
            std::snprintf(buf, sizeof(buf), "%04d", y);
            out.emplace_back(buf);
        }
        return out;
    }
    int y = lo.year, m = lo.month;
    while (y < hi.year || (y == hi.year && m <= hi.month)) {
        std::snprintf(buf, sizeof(buf), "%04d-%02d", y, m);
        out.emplace_back(buf);
        if (++m > 12) {
            m = 1;
            ++y;
        }
    }
    return out;
}

} // namespace

std::vector<TrendPoint> trend(std::span<const MigrationRecord> records, TrendBucket bucket,
                              bool group_by_pmt) {
    std::vector<TrendPoint> out;
    if (records.empty())
        return out;

    // Distinct migration commits per bucket (and PMT when grouped).
    std::map<std::pair<std::string, int>, std::set<std::pair<std::string, std::string>>> commits;
    std::int64_t min_ts = records.front().timestamp, max_ts = records.front().timestamp;
    for (const MigrationRecord& record : records) {
        min_ts = std::min(min_ts, record.timestamp);
        max_ts = std::max(max_ts, record.timestamp);
        const int group = group_by_pmt ? static_cast<int>(record.pmt) : -1;
        commits[{bucket_label(record.timestamp, bucket), group}].insert(
            {record.project, record.commit_id});
    }

    const std::vector<std::string> buckets =
        bucket_range(year_month_utc(min_ts), year_month_utc(max_ts), bucket);
    for (const std::string& label : buckets) {
        if (!group_by_pmt) {
            const auto it = commits.find({label, -1});
            out.push_back({label, std::nullopt, it == commits.end() ? 0 : static_cast<long>(it->second.size())});
            continue;
        }
        for (PmtKind pmt : kAllPmts) {
            const auto it = commits.find({label, static_cast<int>(pmt)});
            out.push_back({label, pmt, it == commits.end() ? 0 : static_cast<long>(it->second.size())});
        }
    }
    return out;
}

SummaryStats summary_stats(const MigrationGraph& graph) {
    SummaryStats stats;
    std::map<std::string, long> distinct_targets;
    for (const auto& [edge, weight] : graph.edges)
        ++distinct_targets[edge.first];
    if (!distinct_targets.empty()) {
        long one_to_one = 0;
        for (const auto& [source, targets] : distinct_targets) {
            if (targets == 1)
                ++one_to_one;
        }
        stats.one_to_one_share =
            static_cast<double>(one_to_one) / static_cast<double>(distinct_targets.size());
    }

    std::set<std::pair<std::string, std::string>> unordered_pairs;
    long unidirectional = 0;
    for (const auto& [edge, weight] : graph.edges) {
        auto key = edge.first < edge.second ? edge : std::make_pair(edge.second, edge.first);
        if (!unordered_pairs.insert(key).second)
            continue;
        const bool forward = graph.edges.contains({key.first, key.second});
        const bool backward = graph.edges.contains({key.second, key.first});
        if (forward != backward)
            ++unidirectional;
    }
    if (!unordered_pairs.empty())
        stats.unidirectional_share =
            static_cast<double>(unidirectional) / static_cast<double>(unordered_pairs.size());
    return stats;
}

std::map<std::string, long> domain_distribution(std::span<const MigrationRecord> records,
                                                const std::map<std::string, std::string>& labels,
                                                long merge_below) {
    std::map<std::string, long> counts;
    for (const MigrationRecord& record : records) {
        const auto it = labels.find(record.source);
        ++counts[it == labels.end() ? "unlabeled" : it->second];
    }
    if (merge_below <= 0)
        return counts;
    std::map<std::string, long> merged;
    for (const auto& [domain, count] : counts) {
        if (count < merge_below && domain != "unlabeled")
            merged["Other"] += count;
        else
            merged[domain] += count;
    }
    return merged;
}

std::map<std::string, std::string> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read labels file: " + path);
    std::map<std::string, std::string> labels;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        const std::string_view t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const size_t comma = t.find(',');
        if (comma == std::string_view::npos)
            continue;
        const std::string library = to_lower(trim(t.substr(0, comma)));
        const std::string domain(trim(t.substr(comma + 1)));
        if (first && library == "library" && domain == "domain") {
            first = false;
            continue; // header row
        }
        first = false;
        if (!library.empty() && !domain.empty())
            labels[library] = domain;
    }
    return labels;
}

std::vector<std::string> default_rationale_keywords() {
    return {"because", "for", "so that", "deprecate", "better", "can", "help"};
}

std::vector<std::string> load_keywords(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read keywords file: " + path);
    std::vector<std::string> keywords;
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view t = trim(line);
        if (!t.empty() && t.front() != '#')
            keywords.push_back(to_lower(t));
    }
    return keywords;
}

std::vector<RationaleMatch> rationale_candidates(std::span<const MigrationRecord> records,
                                                 std::span<const std::string> keywords) {
    std::vector<RationaleMatch> out;
    if (keywords.empty())
        return out;
    for (const MigrationRecord& record : records) {
        const std::string lower = to_lower(record.message);
        const std::vector<std::string> token_list = tokenize_message(record.message);
        const std::unordered_set<std::string> tokens(token_list.begin(), token_list.end());
        std::vector<std::string> matched;
        for (const std::string& keyword : keywords) {
            bool hit = false;
            if (keyword.find(' ') != std::string::npos) {
                hit = lower.find(keyword) != std::string::npos;
            } else if (keyword == "deprecate") {
                // The stem also covers deprecated/deprecating/deprecation.
                hit = std::any_of(tokens.begin(), tokens.end(), [](const std::string& token) {
                    return token.starts_with("deprecat");
                });
            } else {
                hit = tokens.contains(keyword);
            }
            if (hit)
                matched.push_back(keyword);
        }
        if (!matched.empty())
            out.push_back({&record, std::move(matched)});
    }
    return out;
}

SankeyExport build_sankey(const MigrationGraph& graph,
                          const std::optional<std::string>& domain_filter,
                          const std::map<std::string, std::string>& labels) {
    SankeyExport sankey;
    std::vector<std::pair<std::pair<std::string, std::string>, long>> kept;
    for (const auto& [edge, weight] : graph.edges) {
        if (domain_filter) {
            const auto it = labels.find(edge.first);
            if (it == labels.end() || it->second != *domain_filter)
                continue;
        }
        kept.push_back({edge, weight});
    }

    std::set<std::string> names;
    for (const auto& [edge, weight] : kept) {
        names.insert(edge.first);
        names.insert(edge.second);
    }
    std::map<std::string, int> index;
    for (const std::string& name : names) {
        index[name] = static_cast<int>(sankey.nodes.size());
        sankey.nodes.push_back({static_cast<int>(sankey.nodes.size()), name});
    }
    for (const auto& [edge, weight] : kept)
        sankey.links.push_back({index[edge.first], index[edge.second], weight});
    std::sort(sankey.links.begin(), sankey.links.end(), [](const auto& a, const auto& b) {
        return std::tie(a.source_index, a.target_index) < std::tie(b.source_index, b.target_index);
    });
    return sankey;
}

std::string sankey_json(const SankeyExport& sankey) {
    nlohmann::ordered_json doc;
    doc["nodes"] = nlohmann::ordered_json::array();
    for (const auto& node : sankey.nodes) {
        nlohmann::ordered_json j;
        j["id"] = node.id;
        j["name"] = node.name;
        doc["nodes"].push_back(j);
    }
    doc["links"] = nlohmann::ordered_json::array();
    for (const auto& link : sankey.links) {
        nlohmann::ordered_json j;
        j["source_index"] = link.source_index;
        j["target_index"] = link.target_index;
        j["value"] = link.value;
        doc["links"].push_back(j);
    }
    return doc.dump(2) + "\n";
}

} // namespace migmine
