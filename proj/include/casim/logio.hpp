#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "casim/cascade.hpp"
#include "casim/engagement.hpp"
#include "casim/metrics.hpp"

namespace casim {

// Shortest round-trip decimal form (to_chars), so emitted files re-parse to
// the exact same doubles.
std::string format_double(double v);

// --- network files --------------------------------------------------------
// Header:  #network kind=<Tree|TreeContracted|KNN> D= d= k= kprime= alpha= seed=
// Line:    id<TAB>topic,topic,...<TAB>followee,followee,...
void write_network(const Network& net, std::ostream& os);
Network read_network(std::istream& is);
void write_network_file(const Network& net, const std::string& path);
Network read_network_file(const std::string& path);

// --- simulation logs ------------------------------------------------------
// Publication line: epoch pub tweet_id root_author topic quality hop parent_publisher|-
// Impression line:  epoch viewer publisher tweet_id      (tab-separated)
// Both carry a "#params ..." header echoing the simulation parameters.
std::string params_header(const SimParams& params, NetworkKind kind, const std::string& arm);
void write_publication_log(const SimLog& log, const std::string& header, std::ostream& os);
void write_impression_log(const SimLog& log, const std::string& header, std::ostream& os);

// Rebuilds tweets, parent indices and hop bookkeeping; throws
// malformed_log_error with the offending line on any inconsistency.
SimLog read_publication_log(std::istream& is);
void read_impressions_into(SimLog& log, std::istream& is);

SimLog read_run_files(const std::string& publications_path,
                      const std::string* impressions_path);

// --- engagement logs ------------------------------------------------------
// Line: day<TAB>user<TAB>tweet_id<TAB>kind
void write_engagement_log(const std::vector<EngagementRecord>& records, std::ostream& os);
std::vector<EngagementRecord> read_engagement_log(std::istream& is);
std::vector<EngagementRecord> read_engagement_file(const std::string& path);

// --- CSV emitters ---------------------------------------------------------
// Every CSV starts with an optional "#config <json>" echo line.
void write_metrics_csv(const MetricsReport& report, const std::string& config_echo,
                       std::ostream& os);
void write_bucket_csv(const std::vector<BucketRow>& rows, const std::string& config_echo,
                      std::ostream& os);
void write_distance_csv(const DistanceTable& table, const std::string& config_echo,
                        std::ostream& os);
void write_hop_csv(const HopTable& table, const std::string& config_echo, std::ostream& os);
void write_consistency_csv(const ConsistencySummary& summary, const std::string& config_echo,
                           std::ostream& os);

}  // namespace casim
