#include "patsim/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include "patsim/csv.hpp"
#include "patsim/error.hpp"

namespace patsim::features {

namespace {

struct Covariates {
  double pub_date;
  double lag;
  double log_citations;
  int same_org;
  int sender_org;
  int receiver_org;
  ipc::JaccardProfile jaccard;
  bool missing_assignee;
};

Covariates covariates(const PatentRecord& sender, const PatentRecord& receiver, std::size_t sender_citations) {
  Covariates c{};
  c.pub_date = static_cast<double>(sender.grant_date - kCovariateEpoch);
  c.lag = static_cast<double>(sender.grant_date - receiver.grant_date);
  c.log_citations = std::log(static_cast<double>(std::max<std::size_t>(sender_citations, 1)));
  c.sender_org = sender.assignee_kind == AssigneeKind::Organization;
  c.receiver_org = receiver.assignee_kind == AssigneeKind::Organization;
  c.missing_assignee =
      sender.assignee_kind == AssigneeKind::Unknown || receiver.assignee_kind == AssigneeKind::Unknown;
  c.same_org = c.sender_org && c.receiver_org && sender.assignee_id == receiver.assignee_id;
  c.jaccard = ipc::jaccard_profile(sender, receiver);
  return c;
}

std::string format_flag(int v) { return v ? "1" : "0"; }

}  // namespace

int FeatureRow::sender_year() const {
  return year_of(kCovariateEpoch + static_cast<Days>(std::lround(pub_date)));
}

FeatureTable build_features(const CorpusStore& corpus, std::span<const embed::ScoredEdge> scored,
                            const FeatureOptions& options, std::size_t missing_embedding) {
  FeatureTable table;
  table.drops.missing_embedding = missing_embedding;
  table.rows.reserve(scored.size());
  const auto degrees = out_degrees(corpus);

  for (const embed::ScoredEdge& s : scored) {
    const PatentRecord* sender = corpus.find(s.edge.sender_id);
    const PatentRecord* receiver = corpus.find(s.edge.receiver_id);
    if (!sender || !receiver) {
      ++table.drops.unresolved_endpoint;
      continue;
    }
    const auto deg = degrees.find(sender->patent_id);
    const Covariates c = covariates(*sender, *receiver, deg == degrees.end() ? 1 : deg->second);
    if (c.lag < 0 && !options.keep_negative_lags) {
      ++table.drops.negative_lag;
      continue;
    }
    FeatureRow row;
    row.sender_id = s.edge.sender_id;
    row.receiver_id = s.edge.receiver_id;
    row.similarity = s.similarity;
    row.pub_date = c.pub_date;
    row.temporal_diff_days = c.lag;
    row.log_sender_citations = c.log_citations;
    row.is_same_org = c.same_org;
    row.is_sender_org = c.sender_org;
    row.is_receiver_org = c.receiver_org;
    row.jaccard = c.jaccard;
    if (!row.jaccard.defined) ++table.drops.undefined_jaccard;
    if (c.missing_assignee) ++table.drops.missing_assignee;
    table.rows.push_back(std::move(row));
  }
  return table;
}

FeatureTable build_features(const CorpusStore& corpus, const embed::ScoreResult& scored,
                            const FeatureOptions& options) {
  return build_features(corpus, scored.scored, options, scored.report.missing_row + scored.report.zero_norm);
}

std::vector<LagYear> yearly_lag_stats(const FeatureTable& table) {
  std::map<int, std::pair<double, std::size_t>> groups;
  for (const FeatureRow& row : table.rows) {
    auto& [sum, n] = groups[row.sender_year()];
    sum += row.temporal_diff_days;
    ++n;
  }
  std::vector<LagYear> out;
  out.reserve(groups.size());
  for (const auto& [year, acc] : groups)
    out.push_back({year, acc.first / static_cast<double>(acc.second), acc.second});
  return out;
}

std::vector<embed::ScoredEdge> synthesize_scores(const CorpusStore& corpus, const SynthProfile& profile,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5CA1AB1E0DDBA11ULL);
  std::normal_distribution<double> noise(0.0, profile.noise_sd);
  const auto degrees = out_degrees(corpus);

  std::vector<embed::ScoredEdge> out;
  out.reserve(corpus.edges().size());
  for (const CitationEdge& e : corpus.edges()) {
    const PatentRecord* sender = corpus.find(e.sender_id);
    const PatentRecord* receiver = corpus.find(e.receiver_id);
    if (!sender || !receiver) continue;
    const Covariates c = covariates(*sender, *receiver, degrees.at(e.sender_id));
    double y = profile.intercept + profile.pub_date(c.pub_date) + profile.temporal_lag(c.lag) +
               profile.log_citations(c.log_citations) + profile.same_org * c.same_org +
               profile.sender_org * c.sender_org + profile.receiver_org * c.receiver_org;
    if (c.jaccard.defined)
      for (std::size_t k = 0; k < 5; ++k) y += profile.jaccard[k] * c.jaccard.values[k];
    y += noise(rng);
    out.push_back({e, std::clamp(y, -100.0, 100.0)});
  }
  return out;
}

void write_features_csv(std::ostream& out, const FeatureTable& table) {
  out << kFeatureHeader << '\n';
  std::vector<std::string> f(14);
  for (const FeatureRow& r : table.rows) {
    f[0] = r.sender_id;
    f[1] = r.receiver_id;
    f[2] = csv::format_double(r.similarity);
    f[3] = csv::format_double(r.pub_date);
    f[4] = csv::format_double(r.temporal_diff_days);
    f[5] = csv::format_double(r.log_sender_citations);
    f[6] = format_flag(r.is_same_org);
    f[7] = format_flag(r.is_sender_org);
    f[8] = format_flag(r.is_receiver_org);
    for (std::size_t k = 0; k < 5; ++k) f[9 + k] = r.jaccard.defined ? csv::format_double(r.jaccard.values[k]) : "NA";
    csv::write_row(out, f);
  }
}

FeatureTable read_features_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read features file " + path.string());
  csv::Reader reader(in);
  std::vector<std::string> f;
  std::string header;
  if (reader.next(f)) {
    for (std::size_t i = 0; i < f.size(); ++i) header += (i ? "," : "") + f[i];
  }
  if (header != kFeatureHeader) throw ValidationError(path.string() + ": malformed features header");

  FeatureTable table;
  while (reader.next(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    const std::string where = path.filename().string() + " row " + std::to_string(reader.record_number() - 1);
    if (f.size() != 14) throw ValidationError(where + ": wrong field count");
    FeatureRow r;
    r.sender_id = f[0];
    r.receiver_id = f[1];
    r.similarity = csv::parse_double(f[2], where + " similarity");
    r.pub_date = csv::parse_double(f[3], where + " pub_date");
    r.temporal_diff_days = csv::parse_double(f[4], where + " temporal_diff_days");
    r.log_sender_citations = csv::parse_double(f[5], where + " log_sender_citations");
    r.is_same_org = static_cast<int>(csv::parse_int(f[6], where + " is_same_org"));
    r.is_sender_org = static_cast<int>(csv::parse_int(f[7], where + " is_sender_org"));
    r.is_receiver_org = static_cast<int>(csv::parse_int(f[8], where + " is_receiver_org"));
    const bool na = f[9] == "NA";
    r.jaccard.defined = !na;
    for (std::size_t k = 0; k < 5; ++k) {
      if ((f[9 + k] == "NA") != na) throw ValidationError(where + ": Jaccard columns must be all NA or all numeric");
      r.jaccard.values[k] = na ? 0.0 : csv::parse_double(f[9 + k], where + " jaccard");
    }
    if (!r.jaccard.defined) ++table.drops.undefined_jaccard;
    table.rows.push_back(std::move(r));
  }
  return table;
}

}  // namespace patsim::features
