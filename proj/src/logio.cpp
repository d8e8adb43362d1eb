#include "casim/logio.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "casim/error.hpp"

namespace casim {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, std::size_t line_no, const char* what) {
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw malformed_log_error(std::string("cannot parse ") + what + " from '" +
                                  std::string(s) + "'",
                              line_no);
  }
  return value;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw invalid_parameter_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw invalid_parameter_error("cannot open for reading: " + path);
  return is;
}

// key=value tokens of a '#'-prefixed header line
std::map<std::string, std::string> header_fields(std::string_view line) {
  std::map<std::string, std::string> fields;
  for (std::string_view tok : split(line, ' ')) {
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos) continue;
    fields.emplace(std::string(tok.substr(0, eq)), std::string(tok.substr(eq + 1)));
  }
  return fields;
}

}  // namespace

// ---------------------------------------------------------------------------
// Network files
// ---------------------------------------------------------------------------

void write_network(const Network& net, std::ostream& os) {
  const GraphParams& p = net.params;
  os << "#network kind=" << to_string(net.kind) << " D=" << p.D << " d=" << p.d << " k=" << p.k
     << " kprime=" << p.kprime << " alpha=" << format_double(p.alpha) << " seed=" << p.seed
     << "\n";
  for (const UserNode& node : net.nodes) {
    os << node.id << '\t';
    for (std::size_t i = 0; i < node.interests.topics.size(); ++i) {
      if (i) os << ',';
      os << node.interests.topics[i];
    }
    os << '\t';
    for (std::size_t i = 0; i < node.followees.size(); ++i) {
      if (i) os << ',';
      os << node.followees[i];
    }
    os << '\n';
  }
}

Network read_network(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line) || line.rfind("#network", 0) != 0) {
    throw malformed_log_error("missing '#network' header", 1);
  }
  ++line_no;
  const auto fields = header_fields(line);
  auto field = [&](const char* name) -> const std::string& {
    const auto it = fields.find(name);
    if (it == fields.end()) {
      throw malformed_log_error(std::string("header missing field ") + name, 1);
    }
    return it->second;
  };

  Network net;
  net.kind = network_kind_from_string(field("kind"));
  net.params.kind = net.kind;
  net.params.D = parse_number<std::uint32_t>(field("D"), 1, "D");
  net.params.d = parse_number<std::uint32_t>(field("d"), 1, "d");
  net.params.k = parse_number<std::uint32_t>(field("k"), 1, "k");
  net.params.kprime = parse_number<std::uint32_t>(field("kprime"), 1, "kprime");
  net.params.alpha = parse_number<double>(field("alpha"), 1, "alpha");
  net.params.seed = parse_number<std::uint64_t>(field("seed"), 1, "seed");

  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 3) throw malformed_log_error("expected 3 tab-separated columns", line_no);
    UserNode node;
    node.id = parse_number<UserId>(cols[0], line_no, "node id");
    if (node.id != net.nodes.size()) {
      throw malformed_log_error("node ids must be sequential from 0", line_no);
    }
    for (std::string_view t : split(cols[1], ',')) {
      if (t.empty()) continue;
      node.interests.topics.push_back(parse_number<TopicId>(t, line_no, "topic id"));
    }
    if (!cols[2].empty()) {
      for (std::string_view f : split(cols[2], ',')) {
        node.followees.push_back(parse_number<UserId>(f, line_no, "followee id"));
      }
    }
    net.nodes.push_back(std::move(node));
  }
  net.params.N = static_cast<std::uint32_t>(net.nodes.size());
  if (net.kind != NetworkKind::KNN) net.root_id = 0;
  if (const auto problem = check_network(net)) {
    throw malformed_log_error("invalid network file: " + *problem);
  }
  return net;
}

void write_network_file(const Network& net, const std::string& path) {
  auto os = open_out(path);
  write_network(net, os);
}

Network read_network_file(const std::string& path) {
  auto is = open_in(path);
  return read_network(is);
}

// ---------------------------------------------------------------------------
// Simulation logs
// ---------------------------------------------------------------------------

std::string params_header(const SimParams& params, NetworkKind kind, const std::string& arm) {
  std::ostringstream os;
  os << "#params kind=" << to_string(kind) << " dist=" << to_string(params.dist)
     << " lambda=" << format_double(params.lambda) << " selection=" << to_string(params.selection)
     << " delta=" << format_double(params.delta)
     << " p=" << (params.p ? format_double(*params.p) : "-") << " epochs=" << params.epochs
     << " view_probability=" << format_double(params.view_probability) << " seed=" << params.seed
     << " arm=" << arm;
  return os.str();
}

void write_publication_log(const SimLog& log, const std::string& header, std::ostream& os) {
  os << header << "\n";
  for (const Publication& pub : log.publications) {
    const Tweet& t = log.tweets[pub.tweet];
    os << pub.epoch << '\t' << pub.publisher << '\t' << t.id << '\t' << t.root_author << '\t'
       << t.topic << '\t' << format_double(t.quality) << '\t' << pub.hop << '\t';
    if (pub.parent < 0) {
      os << '-';
    } else {
      os << log.publications[pub.parent].publisher;
    }
    os << '\n';
  }
}

void write_impression_log(const SimLog& log, const std::string& header, std::ostream& os) {
  os << header << "\n";
  for (const Impression& imp : log.impressions) {
    const Publication& pub = log.publications[imp.publication];
    os << imp.epoch << '\t' << imp.viewer << '\t' << pub.publisher << '\t'
       << log.tweets[pub.tweet].id << '\n';
  }
}

namespace {

// (publisher, epoch) -> publication index; one publication per user per epoch.
using PubIndex = std::map<std::pair<UserId, std::int32_t>, std::uint64_t>;

PubIndex index_publications(const SimLog& log) {
  PubIndex idx;
  for (std::uint64_t i = 0; i < log.publications.size(); ++i) {
    const Publication& pub = log.publications[i];
    idx.emplace(std::make_pair(pub.publisher, pub.epoch), i);
  }
  return idx;
}

}  // namespace

SimLog read_publication_log(std::istream& is) {
  SimLog log;
  std::unordered_map<std::uint64_t, std::uint32_t> tweet_index;  // file tweet id -> index
  PubIndex pub_index;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 8) throw malformed_log_error("expected 8 tab-separated columns", line_no);

    const auto epoch = parse_number<std::int32_t>(cols[0], line_no, "epoch");
    const auto publisher = parse_number<UserId>(cols[1], line_no, "publisher");
    const auto tweet_id = parse_number<std::uint64_t>(cols[2], line_no, "tweet id");
    const auto root_author = parse_number<UserId>(cols[3], line_no, "root author");
    const auto topic = parse_number<TopicId>(cols[4], line_no, "topic");
    const auto quality = parse_number<double>(cols[5], line_no, "quality");
    const auto hop = parse_number<std::uint32_t>(cols[6], line_no, "hop");

    auto [tw_it, tw_new] = tweet_index.emplace(tweet_id, log.tweets.size());
    if (tw_new) {
      log.tweets.push_back(
          Tweet{tweet_id, root_author, topic, quality, epoch - static_cast<std::int32_t>(hop)});
    } else {
      const Tweet& t = log.tweets[tw_it->second];
      if (t.root_author != root_author || t.topic != topic || t.quality != quality) {
        throw malformed_log_error("tweet fields disagree with an earlier record", line_no);
      }
    }

    Publication pub;
    pub.publisher = publisher;
    pub.tweet = tw_it->second;
    pub.epoch = epoch;
    if (cols[7] == "-") {
      if (hop != 0 || publisher != root_author) {
        throw malformed_log_error("original publication must have hop 0 and its own author",
                                  line_no);
      }
      pub.parent = -1;
      pub.hop = 0;
    } else {
      const auto parent_publisher = parse_number<UserId>(cols[7], line_no, "parent publisher");
      const auto it = pub_index.find({parent_publisher, epoch - 1});
      if (it == pub_index.end()) {
        throw malformed_log_error("dangling parent reference: no publication by user " +
                                      std::to_string(parent_publisher) + " at epoch " +
                                      std::to_string(epoch - 1),
                                  line_no);
      }
      const Publication& parent = log.publications[it->second];
      if (parent.tweet != pub.tweet) {
        throw malformed_log_error("parent publication carries a different tweet", line_no);
      }
      if (hop != parent.hop + 1) {
        throw malformed_log_error("hop must be parent hop + 1", line_no);
      }
      pub.parent = static_cast<std::int64_t>(it->second);
      pub.hop = hop;
    }
    const auto [pi_it, pi_new] =
        pub_index.emplace(std::make_pair(publisher, epoch), log.publications.size());
    (void)pi_it;
    if (!pi_new) {
      throw malformed_log_error("duplicate publication for user " + std::to_string(publisher) +
                                    " at epoch " + std::to_string(epoch),
                                line_no);
    }
    log.publications.push_back(pub);
  }
  return log;
}

void read_impressions_into(SimLog& log, std::istream& is) {
  const PubIndex pub_index = index_publications(log);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 4) throw malformed_log_error("expected 4 tab-separated columns", line_no);
    const auto epoch = parse_number<std::int32_t>(cols[0], line_no, "epoch");
    const auto viewer = parse_number<UserId>(cols[1], line_no, "viewer");
    const auto publisher = parse_number<UserId>(cols[2], line_no, "publisher");
    const auto tweet_id = parse_number<std::uint64_t>(cols[3], line_no, "tweet id");

    const auto it = pub_index.find({publisher, epoch - 1});
    if (it == pub_index.end()) {
      throw malformed_log_error("impression references a missing publication", line_no);
    }
    if (log.tweets[log.publications[it->second].tweet].id != tweet_id) {
      throw malformed_log_error("impression tweet id disagrees with the publication", line_no);
    }
    log.impressions.push_back(Impression{viewer, it->second, epoch});
  }
}

SimLog read_run_files(const std::string& publications_path,
                      const std::string* impressions_path) {
  auto pub_is = open_in(publications_path);
  SimLog log = read_publication_log(pub_is);
  if (impressions_path) {
    auto imp_is = open_in(*impressions_path);
    read_impressions_into(log, imp_is);
  }
  return log;
}

// ---------------------------------------------------------------------------
// Engagement logs
// ---------------------------------------------------------------------------

void write_engagement_log(const std::vector<EngagementRecord>& records, std::ostream& os) {
  for (const EngagementRecord& rec : records) {
    os << rec.day << '\t' << rec.user << '\t' << rec.tweet_id << '\t' << to_string(rec.kind)
       << '\n';
  }
}

std::vector<EngagementRecord> read_engagement_log(std::istream& is) {
  std::vector<EngagementRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 4) throw malformed_log_error("expected 4 tab-separated columns", line_no);
    EngagementRecord rec;
    rec.day = parse_number<std::int32_t>(cols[0], line_no, "day");
    if (rec.day < 0) throw malformed_log_error("day must be >= 0", line_no);
    rec.user = parse_number<UserId>(cols[1], line_no, "user");
    rec.tweet_id = parse_number<std::uint64_t>(cols[2], line_no, "tweet id");
    try {
      rec.kind = engagement_kind_from_string(std::string(cols[3]));
    } catch (const invalid_parameter_error& e) {
      throw malformed_log_error(e.what(), line_no);
    }
    out.push_back(rec);
  }
  return out;
}

std::vector<EngagementRecord> read_engagement_file(const std::string& path) {
  auto is = open_in(path);
  return read_engagement_log(is);
}

// ---------------------------------------------------------------------------
// CSV emitters
// ---------------------------------------------------------------------------

namespace {

void emit_config_echo(const std::string& config_echo, std::ostream& os) {
  if (!config_echo.empty()) os << "#config " << config_echo << "\n";
}

void emit_metrics_row(const MetricsRow& row, std::ostream& os) {
  os << row.viewers << ',' << row.impressions << ',' << format_double(row.precision) << ','
     << format_double(row.quality_mean) << ',' << format_double(row.tlu_sum) << ','
     << format_double(row.tlu_mean) << '\n';
}

}  // namespace

void write_metrics_csv(const MetricsReport& report, const std::string& config_echo,
                       std::ostream& os) {
  emit_config_echo(config_echo, os);
  os << "epoch,viewers,impressions,precision,quality_mean,tlu_sum,tlu_mean\n";
  for (const MetricsRow& row : report.per_epoch) {
    os << row.epoch << ',';
    emit_metrics_row(row, os);
  }
  os << "aggregate,";
  emit_metrics_row(report.aggregate, os);
}

void write_bucket_csv(const std::vector<BucketRow>& rows, const std::string& config_echo,
                      std::ostream& os) {
  emit_config_echo(config_echo, os);
  os << "bucket,cascade_count,tweet_instances,impressions,share_frequency,share_impressions,"
        "growth_ratio\n";
  for (const BucketRow& row : rows) {
    os << row.bucket << ',' << row.cascade_count << ',' << row.tweet_instances << ','
       << row.impressions << ',' << format_double(row.share_frequency) << ','
       << format_double(row.share_impressions) << ',' << format_double(row.growth_ratio) << '\n';
  }
}

void write_distance_csv(const DistanceTable& table, const std::string& config_echo,
                        std::ostream& os) {
  emit_config_echo(config_echo, os);
  os << "distance,impressions,share\n";
  for (const auto& [dist, count] : table.by_distance) {
    os << dist << ',' << count << ','
       << format_double(static_cast<double>(count) / table.total) << '\n';
  }
  if (table.unreachable > 0) {
    os << "inf," << table.unreachable << ','
       << format_double(static_cast<double>(table.unreachable) / table.total) << '\n';
  }
}

void write_hop_csv(const HopTable& table, const std::string& config_echo, std::ostream& os) {
  emit_config_echo(config_echo, os);
  os << "hop,impressions,share\n";
  for (const auto& [hop, count] : table.by_hop) {
    os << hop << ',' << count << ',' << format_double(static_cast<double>(count) / table.total)
       << '\n';
  }
}

void write_consistency_csv(const ConsistencySummary& summary, const std::string& config_echo,
                           std::ostream& os) {
  emit_config_echo(config_echo, os);
  os << "classification,users,share\n";
  const auto total = summary.users();
  auto share = [&](std::uint64_t n) {
    return total == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(total);
  };
  os << "SmallLiker," << summary.small_likers << ',' << format_double(share(summary.small_likers))
     << '\n';
  os << "BigLiker," << summary.big_likers << ',' << format_double(share(summary.big_likers))
     << '\n';
  os << "Indifferent," << summary.indifferent << ','
     << format_double(share(summary.indifferent)) << '\n';
}

}  // namespace casim
