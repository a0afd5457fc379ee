#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "patsim/corpus.hpp"
#include "patsim/embedding_store.hpp"
#include "patsim/ipc.hpp"
#include "patsim/synth.hpp"

namespace patsim::features {

/// One citation's response and the covariates of Models 0-3.
struct FeatureRow {
  std::string sender_id;
  std::string receiver_id;
  double similarity = 0.0;
  double pub_date = 0.0;            // sender grant date, days since 1976-01-01
  double temporal_diff_days = 0.0;  // sender grant date - receiver grant date
  double log_sender_citations = 0.0;
  int is_same_org = 0;
  int is_sender_org = 0;
  int is_receiver_org = 0;
  ipc::JaccardProfile jaccard;

  int sender_year() const;
};

/// Dropped rows plus notes on rows that were kept with a caveat.
/// rows + dropped_total() equals the number of edges handed to the scorer.
struct DropReport {
  std::size_t missing_embedding = 0;
  std::size_t unresolved_endpoint = 0;
  std::size_t negative_lag = 0;
  // kept rows
  std::size_t undefined_jaccard = 0;
  std::size_t missing_assignee = 0;

  std::size_t dropped_total() const { return missing_embedding + unresolved_endpoint + negative_lag; }
};

struct FeatureTable {
  std::vector<FeatureRow> rows;
  DropReport drops;
};

struct FeatureOptions {
  bool keep_negative_lags = false;
};

/// `missing_embedding` is the number of edges the scorer skipped.
FeatureTable build_features(const CorpusStore& corpus, std::span<const embed::ScoredEdge> scored,
                            const FeatureOptions& options = {}, std::size_t missing_embedding = 0);

FeatureTable build_features(const CorpusStore& corpus, const embed::ScoreResult& scored,
                            const FeatureOptions& options = {});

struct LagYear {
  int year = 0;
  double mean_lag_days = 0.0;
  std::size_t count = 0;
};

std::vector<LagYear> yearly_lag_stats(const FeatureTable& table);

/// Similarity responses drawn from `profile` for every corpus edge, in
/// corpus edge order, clamped to [-100, 100]. Covariates are computed the
/// same way build_features computes them; undefined Jaccard counts as 0.
std::vector<embed::ScoredEdge> synthesize_scores(const CorpusStore& corpus, const SynthProfile& profile,
                                                 std::uint64_t seed);

inline constexpr const char* kFeatureHeader =
    "sender_id,receiver_id,similarity,pub_date,temporal_diff_days,log_sender_citations,"
    "is_same_org,is_sender_org,is_receiver_org,j_section,j_class,j_subclass,j_maingroup,j_subgroup";

/// Undefined Jaccard values are written as `NA`.
void write_features_csv(std::ostream& out, const FeatureTable& table);
FeatureTable read_features_csv(const std::filesystem::path& path);

}  // namespace patsim::features
