// migmine: mines C/C++ library migrations from Git repositories.
//
// Subcommands:
//   scan    parse manifests across a corpus and emit candidate migrations
//   mine    build the confirmed migration dataset (records/rules/stats)
//   stats   compute analytics over a mined dataset (entropy, flow, ...)
//   export  emit Sankey diagram data for the migration graph
//
// Exit codes: 0 success, 1 usage/config error, 2 data error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "migmine/analytics.hpp"
#include "migmine/dataset.hpp"
#include "migmine/errors.hpp"
#include "migmine/strutil.hpp"

namespace fs = std::filesystem;
using namespace migmine;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << content;
}

struct CommonOpts {
    MinerConfig config;
    std::vector<std::string> pmt_names;

    // Returns false (usage error) when a PMT name is unknown.
    bool resolve_pmts() {
        if (pmt_names.empty())
            return true;
        std::set<PmtKind> kinds;
        for (const std::string& name : pmt_names) {
            const auto kind = pmt_from_string(to_lower(name));
            if (!kind) {
                std::cerr << "unknown PMT: " << name << "\n";
                return false;
            }
            kinds.insert(*kind);
        }
        config.pmt_filter = std::move(kinds);
        return true;
    }

    bool config_paths_readable() const {
        for (const auto& path : {config.exclusions_path, config.aliases_path,
                                 config.keywords_path, config.labels_path}) {
            if (path && !std::ifstream(*path)) {
                std::cerr << "cannot read " << *path << "\n";
                return false;
            }
        }
        return true;
    }
};

void add_common_options(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--corpus", opts.config.corpus_dir, "Directory of git repositories")
        ->required();
    cmd->add_option("--out", opts.config.output_dir, "Output directory")->required();
    cmd->add_option("--pmt", opts.pmt_names, "Restrict to these PMTs (repeatable)");
    cmd->add_option("--bulk-threshold", opts.config.bulk_threshold,
                    "Skip candidate generation for commits changing more libraries than this")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--workers", opts.config.workers, "Parallel repository scanners")
        ->envname("MIGMINE_WORKERS")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--exclusions", opts.config.exclusions_path, "Exclusion list file");
    cmd->add_option("--aliases", opts.config.aliases_path, "PMT alias table file");
    cmd->add_option("--keywords", opts.config.keywords_path, "Rationale keyword file");
    cmd->add_option("--labels", opts.config.labels_path, "Library domain labels csv");
}

int cmd_scan(CommonOpts& opts) {
    if (!opts.resolve_pmts() || !opts.config_paths_readable())
        return kExitUsage;
    const ExclusionList exclusions = opts.config.exclusions_path
                                         ? ExclusionList::load(*opts.config.exclusions_path)
                                         : ExclusionList::defaults();

    const CorpusScan scan = scan_corpus(opts.config);
    for (const std::string& diag : scan.diagnostics)
        std::cerr << diag << "\n";

    long per_pmt[kPmtCount] = {};
    std::string out;
    for (const CommitDelta& delta : diff_dependencies(scan.changes)) {
        for (const CandidateMigration& c :
             candidate_migrations(delta, exclusions, opts.config.bulk_threshold)) {
            nlohmann::ordered_json j;
            j["project"] = c.commit.project;
            j["commit_id"] = c.commit.commit_id;
            j["timestamp"] = c.commit.timestamp;
            j["pmt"] = std::string(to_string(c.pmt));
            j["source"] = c.source.canonical;
            j["target"] = c.target.canonical;
            out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
            ++per_pmt[static_cast<int>(c.pmt)];
        }
    }
    write_file(fs::path(opts.config.output_dir) / "candidates.jsonl", out);
    for (PmtKind pmt : kAllPmts)
        std::cout << to_string(pmt) << ": " << per_pmt[static_cast<int>(pmt)] << "\n";
    return kExitOk;
}

int cmd_mine(CommonOpts& opts) {
    if (!opts.resolve_pmts() || !opts.config_paths_readable())
        return kExitUsage;
    const Dataset dataset = build_dataset(opts.config);
    for (const std::string& diag : dataset.diagnostics)
        std::cerr << diag << "\n";
    const fs::path out_dir(opts.config.output_dir);
    write_file(out_dir / "records.jsonl", records_jsonl(dataset));
    write_file(out_dir / "rules.jsonl", rules_jsonl(dataset));
    write_file(out_dir / "pmt_migrations.jsonl", pmt_migrations_jsonl(dataset));
    write_file(out_dir / "stats.csv", stats_csv(dataset));
    std::cout << "records: " << dataset.records.size() << "\nrules: " << dataset.rules.size()
              << "\npmt_migrations: " << dataset.pmt_migrations.size() << "\n";
    if (!dataset.unconfirmed_pmt_migrations.empty())
        std::cout << "unconfirmed_pmt_migrations: " << dataset.unconfirmed_pmt_migrations.size()
                  << "\n";
    return kExitOk;
}

struct StatsOpts {
    std::string dataset_dir;
    std::string metric;
    std::string out_path; // empty -> stdout
    std::string bucket = "year";
    bool group_by_pmt = false;
    long merge_below = 0;
    std::string pmt_name;
    std::optional<std::string> labels_path;
    std::optional<std::string> keywords_path;
};

int cmd_stats(const StatsOpts& opts) {
    static const std::set<std::string> kMetrics = {"entropy", "flow",    "trend",
                                                   "domains", "summary", "rationales"};
    if (!kMetrics.contains(opts.metric)) {
        std::cerr << "unknown metric: " << opts.metric << "\n";
        return kExitUsage;
    }
    std::optional<PmtKind> pmt_filter;
    if (!opts.pmt_name.empty()) {
        pmt_filter = pmt_from_string(to_lower(opts.pmt_name));
        if (!pmt_filter) {
            std::cerr << "unknown PMT: " << opts.pmt_name << "\n";
            return kExitUsage;
        }
    }

    std::vector<MigrationRecord> records;
    try {
        records = read_records_jsonl((fs::path(opts.dataset_dir) / "records.jsonl").string());
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitData;
    }

    char buf[64];
    std::string out;
    if (opts.metric == "entropy" || opts.metric == "flow") {
        const MigrationGraph graph = build_graph(records, pmt_filter);
        std::vector<std::pair<double, std::string>> rows;
        for (const std::string& node : graph.nodes) {
            if (opts.metric == "entropy") {
                if (!graph.out_degree.contains(node))
                    continue;
                rows.emplace_back(entropy(graph, node), node);
            } else {
                rows.emplace_back(flow(graph, node), node);
            }
        }
        std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first)
                return a.first > b.first;
            return a.second < b.second;
        });
        out = "library," + opts.metric + "\n";
        for (const auto& [value, name] : rows) {
            std::snprintf(buf, sizeof(buf), "%.4f", value);
            out += csv_escape(name) + "," + buf + "\n";
        }
    } else if (opts.metric == "summary") {
        const SummaryStats stats = summary_stats(build_graph(records, pmt_filter));
        out = "metric,value\n";
        std::snprintf(buf, sizeof(buf), "%.4f", stats.one_to_one_share);
        out += std::string("one_to_one_share,") + buf + "\n";
        std::snprintf(buf, sizeof(buf), "%.4f", stats.unidirectional_share);
        out += std::string("unidirectional_share,") + buf + "\n";
    } else if (opts.metric == "trend") {
        const TrendBucket bucket = opts.bucket == "month" ? TrendBucket::month : TrendBucket::year;
        if (opts.bucket != "month" && opts.bucket != "year") {
            std::cerr << "unknown bucket: " << opts.bucket << "\n";
            return kExitUsage;
        }
        out = opts.group_by_pmt ? "bucket,pmt,commits\n" : "bucket,commits\n";
        for (const TrendPoint& point : trend(records, bucket, opts.group_by_pmt)) {
            out += point.bucket;
            if (point.pmt)
                out += "," + std::string(to_string(*point.pmt));
            out += "," + std::to_string(point.commits) + "\n";
        }
    } else if (opts.metric == "domains") {
        std::map<std::string, std::string> labels;
        if (opts.labels_path) {
            try {
                labels = load_labels(*opts.labels_path);
            } catch (const std::exception& e) {
                std::cerr << e.what() << "\n";
                return kExitUsage;
            }
        }
        const auto counts = domain_distribution(records, labels, opts.merge_below);
        std::vector<std::pair<long, std::string>> rows;
        for (const auto& [domain, count] : counts)
            rows.emplace_back(count, domain);
        std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first)
                return a.first > b.first;
            return a.second < b.second;
        });
        out = "domain,migrations\n";
        for (const auto& [count, domain] : rows)
            out += csv_escape(domain) + "," + std::to_string(count) + "\n";
    } else { // rationales
        std::vector<std::string> keywords = default_rationale_keywords();
        if (opts.keywords_path) {
            try {
                keywords = load_keywords(*opts.keywords_path);
            } catch (const std::exception& e) {
                std::cerr << e.what() << "\n";
                return kExitUsage;
            }
        }
        out = "project,commit_id,timestamp,matched_keywords,message\n";
        for (const RationaleMatch& match : rationale_candidates(records, keywords)) {
            std::string joined;
            for (const std::string& k : match.matched)
                joined += (joined.empty() ? "" : ";") + k;
            out += csv_escape(match.record->project) + "," + match.record->commit_id + "," +
                   iso8601_utc(match.record->timestamp) + "," + csv_escape(joined) + "," +
                   csv_escape(match.record->message) + "\n";
        }
    }

    if (opts.out_path.empty())
        std::cout << out;
    else
        write_file(opts.out_path, out);
    return kExitOk;
}

struct ExportOpts {
    std::string dataset_dir;
    std::string out_path;
    std::optional<std::string> domain;
    std::optional<std::string> labels_path;
    std::string pmt_name;
};

int cmd_export_sankey(const ExportOpts& opts) {
    if (opts.domain && !opts.labels_path) {
        std::cerr << "--domain requires --labels\n";
        return kExitUsage;
    }
    std::optional<PmtKind> pmt_filter;
    if (!opts.pmt_name.empty()) {
        pmt_filter = pmt_from_string(to_lower(opts.pmt_name));
        if (!pmt_filter) {
            std::cerr << "unknown PMT: " << opts.pmt_name << "\n";
            return kExitUsage;
        }
    }
    std::map<std::string, std::string> labels;
    if (opts.labels_path) {
        try {
            labels = load_labels(*opts.labels_path);
        } catch (const std::exception& e) {
            std::cerr << e.what() << "\n";
            return kExitUsage;
        }
    }
    std::vector<MigrationRecord> records;
    try {
        records = read_records_jsonl((fs::path(opts.dataset_dir) / "records.jsonl").string());
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitData;
    }
    const SankeyExport sankey = build_sankey(build_graph(records, pmt_filter), opts.domain, labels);
    write_file(opts.out_path, sankey_json(sankey));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"C/C++ library migration miner"};
    app.require_subcommand(1);

    CommonOpts scan_opts;
    CLI::App* scan = app.add_subcommand("scan", "Emit candidate migrations as JSONL");
    add_common_options(scan, scan_opts);

    CommonOpts mine_opts;
    CLI::App* mine = app.add_subcommand("mine", "Build the migration dataset");
    add_common_options(mine, mine_opts);

    StatsOpts stats_opts;
    CLI::App* stats = app.add_subcommand("stats", "Report analytics over a mined dataset");
    stats->add_option("--dataset", stats_opts.dataset_dir, "Directory produced by mine")->required();
    stats->add_option("--metric", stats_opts.metric,
                      "entropy | flow | trend | domains | summary | rationales")
        ->required();
    stats->add_option("--out", stats_opts.out_path, "Output csv (default stdout)");
    stats->add_option("--bucket", stats_opts.bucket, "trend bucket: year | month");
    stats->add_flag("--group-by-pmt", stats_opts.group_by_pmt, "Split trend per PMT");
    stats->add_option("--merge-below", stats_opts.merge_below,
                      "Merge domains with fewer migrations into Other");
    stats->add_option("--pmt", stats_opts.pmt_name, "Restrict the graph to one PMT");
    stats->add_option("--labels", stats_opts.labels_path, "Library domain labels csv");
    stats->add_option("--keywords", stats_opts.keywords_path, "Rationale keyword file");

    ExportOpts export_opts;
    CLI::App* exp = app.add_subcommand("export", "Write sankey.json for the migration graph");
    exp->add_option("--dataset", export_opts.dataset_dir, "Directory produced by mine")->required();
    exp->add_option("--out", export_opts.out_path, "Output json file")->required();
    exp->add_option("--domain", export_opts.domain, "Restrict to sources in this domain");
    exp->add_option("--labels", export_opts.labels_path, "Library domain labels csv");
    exp->add_option("--pmt", export_opts.pmt_name, "Restrict the graph to one PMT");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (scan->parsed())
            return cmd_scan(scan_opts);
        if (mine->parsed())
            return cmd_mine(mine_opts);
        if (stats->parsed())
            return cmd_stats(stats_opts);
        return cmd_export_sankey(export_opts);
    } catch (const EmptyCorpus& e) {
        std::cerr << e.what() << "\n";
        return kExitData;
    } catch (const RepoUnreadable& e) {
        std::cerr << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}
