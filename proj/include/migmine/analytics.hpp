#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "migmine/dataset.hpp"

namespace migmine {

// Weighted directed graph over libraries: edge weight is the number of
// migration records for that (source, target).
struct MigrationGraph {
    std::vector<std::string> nodes; // lexicographic
    std::map<std::pair<std::string, std::string>, long> edges;
    std::map<std::string, long> in_degree;  // times adopted
    std::map<std::string, long> out_degree; // times abandoned

    bool empty() const { return nodes.empty(); }
};

// Empirical distribution over the migration targets of one source library.
struct TargetDistribution {
    std::string source;
    std::map<std::string, double> probabilities; // target -> p, sums to 1
};

MigrationGraph build_graph(std::span<const MigrationRecord> records,
                           std::optional<PmtKind> pmt_filter = std::nullopt);

// Throws NoOutgoingEdges when source has no outgoing edge.
TargetDistribution target_distribution(const MigrationGraph& graph, const std::string& source);

// Shannon entropy (base 2) of the target distribution. 0 means every
// migration from this library chose the same target.
double entropy(const MigrationGraph& graph, const std::string& source);

// |deg-(l) - deg+(l)| / (deg-(l) + deg+(l)); 1 means always adopted or
// always abandoned. Throws IsolatedNode on zero total degree.
double flow(const MigrationGraph& graph, const std::string& library);

enum class TrendBucket { year, month };

struct TrendPoint {
    std::string bucket; // "2019" or "2019-03"
    std::optional<PmtKind> pmt;
    long commits = 0; // distinct (project, commit_id)
};

// Migration-commit counts per time bucket; empty buckets between the first
// and last bucket are emitted as zero.
std::vector<TrendPoint> trend(std::span<const MigrationRecord> records, TrendBucket bucket,
                              bool group_by_pmt);

struct SummaryStats {
    double one_to_one_share = 0.0;      // sources with exactly one distinct target
    double unidirectional_share = 0.0;  // unordered pairs with only one direction
};

SummaryStats summary_stats(const MigrationGraph& graph);

// Counts records by the domain of the source library; unlabeled libraries
// bucket under "unlabeled". Domains with fewer than merge_below records are
// merged into "Other" (0 disables merging; "unlabeled" is never merged).
std::map<std::string, long> domain_distribution(std::span<const MigrationRecord> records,
                                                const std::map<std::string, std::string>& labels,
                                                long merge_below = 0);

std::map<std::string, std::string> load_labels(const std::string& path);

// The rationale keyword list used to surface records whose messages explain
// the migration.
std::vector<std::string> default_rationale_keywords();
std::vector<std::string> load_keywords(const std::string& path);

struct RationaleMatch {
    const MigrationRecord* record;
    std::vector<std::string> matched; // keywords in list order
};

// Returns records whose message contains any keyword: whole-word match for
// single words ("deprecate" also matches its inflections), substring match
// for phrases.
std::vector<RationaleMatch> rationale_candidates(std::span<const MigrationRecord> records,
                                                 std::span<const std::string> keywords);

struct SankeyExport {
    struct Node {
        int id;
        std::string name;
    };
    struct Link {
        int source_index;
        int target_index;
        long value;
    };
    std::vector<Node> nodes;  // lexicographic by name
    std::vector<Link> links;  // sorted by (source_index, target_index)
};

// Sankey data over the migration graph, optionally restricted to edges whose
// source library carries the given domain label.
SankeyExport build_sankey(const MigrationGraph& graph,
                          const std::optional<std::string>& domain_filter = std::nullopt,
                          const std::map<std::string, std::string>& labels = {});

std::string sankey_json(const SankeyExport& sankey);

} // namespace migmine
