#include "patsim/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "io_util.hpp"
#include "patsim/corpus.hpp"
#include "patsim/csv.hpp"
#include "patsim/digest.hpp"
#include "patsim/embedding_store.hpp"
#include "patsim/error.hpp"
#include "patsim/features.hpp"
#include "patsim/gam/model.hpp"
#include "patsim/gam/report.hpp"
#include "patsim/synth.hpp"

namespace patsim::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::Synth: return "synth";
    case Stage::Ingest: return "ingest";
    case Stage::Score: return "score";
    case Stage::Features: return "features";
    case Stage::Fit: return "fit";
    case Stage::Report: return "report";
    case Stage::Figs: return "figs";
  }
  return "?";
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError("config " + std::string(key) + ": expected true or false, got '" + std::string(v) + "'");
}

template <typename T>
T parse_unsigned(std::string_view key, std::string_view v) {
  const long long x = csv::parse_int(v, key);
  if (x < 0) throw ValidationError("config " + std::string(key) + " must be non-negative");
  return static_cast<T>(x);
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view raw) {
  const std::string v = trim(raw);
  const std::string k(key);
  if (k == "workdir") workdir = v;
  else if (k == "patents") patents = fs::path(v);
  else if (k == "citations") citations = fs::path(v);
  else if (k == "psim") psim = fs::path(v);
  else if (k == "strict") strict = parse_bool(k, v);
  else if (k == "keep_negative_lags") keep_negative_lags = parse_bool(k, v);
  else if (k == "utility_only") utility_only = parse_bool(k, v);
  else if (k == "run_date") {
    if (!parse_iso_date(v)) throw ValidationError("config run_date: expected YYYY-MM-DD");
    run_date = v;
  } else if (k == "gam_basis_size") gam_basis_size = static_cast<int>(csv::parse_int(v, k));
  else if (k == "gam_degree") gam_degree = static_cast<int>(csv::parse_int(v, k));
  else if (k == "gam_penalty_order") gam_penalty_order = static_cast<int>(csv::parse_int(v, k));
  else if (k == "gam_log_lambda_min") gam_log_lambda_min = csv::parse_double(v, k);
  else if (k == "gam_log_lambda_max") gam_log_lambda_max = csv::parse_double(v, k);
  else if (k == "fit_workers") fit_workers = parse_unsigned<unsigned>(k, v);
  else if (k == "seed") seed = parse_unsigned<std::uint64_t>(k, v);
  else if (k == "synth_patents") synth_patents = parse_unsigned<std::size_t>(k, v);
  else if (k == "synth_edges") synth_edges = parse_unsigned<std::size_t>(k, v);
  else if (k == "synth_dim") synth_dim = parse_unsigned<std::uint32_t>(k, v);
  else if (k == "synth_profile") {
    if (v != "standard" && v != "null") throw ValidationError("config synth_profile: expected standard or null");
    synth_profile = v;
  } else if (k == "response") {
    if (v != "embeddings" && v != "profile") throw ValidationError("config response: expected embeddings or profile");
    response = v;
  } else if (k == "score_chunk_size") score_chunk_size = parse_unsigned<std::size_t>(k, v);
  else if (k == "score_workers") score_workers = parse_unsigned<unsigned>(k, v);
  else if (k == "model_level") model_level = static_cast<int>(csv::parse_int(v, k));
  else throw ValidationError("unknown config key '" + k + "'");
}

PipelineConfig PipelineConfig::from_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path.string());
  PipelineConfig config;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path.string() + ":" + std::to_string(number) + ": expected key = value");
    try {
      config.set(trim(std::string_view(t).substr(0, eq)), std::string_view(t).substr(eq + 1));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return config;
}

WorkdirLock::WorkdirLock(const fs::path& workdir) : path_(workdir / ".lock") {
  fs::create_directories(workdir);
  std::FILE* f = std::fopen(path_.c_str(), "wx");
  if (f == nullptr)
    throw ValidationError("workdir " + workdir.string() + " is in use (remove " + path_.string() + " if stale)");
  std::fclose(f);
}

WorkdirLock::~WorkdirLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

namespace {

const std::vector<std::string> kStageOrder = {"synth",       "ingest",      "score",       "features",
                                              "fit.model0",  "fit.model1",  "fit.model2",  "fit.model3",
                                              "report",      "figs"};

const std::vector<std::string> kSmoothFeatures = {"pub_date", "temporal_diff_days", "log_sender_citations"};

// Entries that consume an entry's outputs, directly or not.
std::vector<std::string> downstream_of(const std::string& key) {
  if (key == "synth") return {"ingest", "score", "features", "fit.model0", "fit.model1", "fit.model2", "fit.model3",
                              "report", "figs"};
  if (key == "ingest") return {"score", "features", "fit.model0", "fit.model1", "fit.model2", "fit.model3", "report",
                               "figs"};
  if (key == "score") return {"features", "fit.model0", "fit.model1", "fit.model2", "fit.model3", "report", "figs"};
  if (key == "features") return {"fit.model0", "fit.model1", "fit.model2", "fit.model3", "report", "figs"};
  if (key.starts_with("fit.")) return {"report", "figs"};
  return {};
}

class Workspace {
 public:
  explicit Workspace(fs::path root) : root_(std::move(root)) {
    const fs::path m = root_ / "manifest.json";
    if (fs::exists(m)) {
      try {
        manifest_ = json::parse(detail::read_file(m));
      } catch (const json::exception& e) {
        throw ValidationError("corrupt manifest " + m.string() + ": " + e.what());
      }
    }
    if (!manifest_.is_object()) manifest_ = json::object();
    const fs::path t = root_ / "timings.json";
    if (fs::exists(t)) {
      try {
        timings_ = json::parse(detail::read_file(t));
      } catch (const json::exception&) {
        timings_ = json::object();
      }
    }
    if (!timings_.is_object()) timings_ = json::object();
  }

  const fs::path& root() const { return root_; }
  fs::path path(const std::string& rel) const { return root_ / rel; }

  const json* entry(const std::string& key) const {
    auto it = manifest_.find(key);
    return it == manifest_.end() ? nullptr : &*it;
  }

  /// Checks that `key` ran and that its outputs are unchanged on disk.
  const json& require(const std::string& key, const std::string& run_hint) const {
    const json* e = entry(key);
    if (e == nullptr) throw MissingArtifactError("run `" + run_hint + "` first");
    for (const auto& [rel, digest] : e->at("outputs").items()) {
      const fs::path p = path(rel);
      if (!fs::exists(p))
        throw MissingArtifactError(rel + " is missing; run `" + run_hint + "` first");
      if (sha256_file(p) != digest.get<std::string>())
        throw MissingArtifactError(rel + " changed since `" + run_hint + "` ran; rerun `" + run_hint + "`");
    }
    return *e;
  }

  std::string output(const std::string& rel, std::string_view content) {
    detail::write_file_atomic(path(rel), content);
    outputs_[rel] = sha256_hex(content);
    artifacts_.push_back(rel);
    return rel;
  }

  void record_output_file(const std::string& rel) {
    outputs_[rel] = sha256_file(path(rel));
    artifacts_.push_back(rel);
  }

  void input(const std::string& label, const fs::path& p) {
    if (!fs::exists(p)) throw MissingArtifactError("input " + p.string() + " does not exist");
    inputs_[label] = sha256_file(p);
  }

  void commit(const std::string& key, json config, json report, double seconds) {
    json e = json::object();
    e["config"] = std::move(config);
    e["inputs"] = inputs_;
    e["outputs"] = outputs_;
    e["report"] = std::move(report);

    const json* old = entry(key);
    const bool changed = old == nullptr || old->at("outputs") != e["outputs"];
    manifest_[key] = std::move(e);
    if (changed)
      for (const std::string& d : downstream_of(key)) manifest_.erase(d);

    json ordered = json::object();
    for (const std::string& k : kStageOrder)
      if (manifest_.contains(k)) ordered[k] = manifest_[k];
    manifest_ = std::move(ordered);
    detail::write_file_atomic(path("manifest.json"), manifest_.dump(2) + "\n");

    timings_[key] = seconds;
    json t = json::object();
    for (const std::string& k : kStageOrder)
      if (timings_.contains(k)) t[k] = timings_[k];
    detail::write_file_atomic(path("timings.json"), t.dump(2) + "\n");
  }

  std::vector<std::string> artifacts() const { return artifacts_; }

 private:
  fs::path root_;
  json manifest_;
  json timings_;
  json inputs_ = json::object();
  json outputs_ = json::object();
  std::vector<std::string> artifacts_;
};

std::string to_text(const auto& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

Days run_date_of(const PipelineConfig& config) {
  return config.run_date ? *parse_iso_date(*config.run_date) : today_utc();
}

// Corpus re-read from the ingest stage's canonical output.
CorpusStore load_corpus(const Workspace& ws) {
  IngestOptions options;
  options.strict = true;
  options.run_date = days_from_civil(9999, 12, 31);
  PatentIngestResult patents = ingest_patents(ws.path("corpus/patents.csv"), options);
  const std::vector<CitationEdge> edges = read_citation_rows(ws.path("corpus/citations.csv"));
  CitationIngestResult attached = attach_citations(edges, patents.corpus);
  if (attached.report.attached != edges.size())
    throw ValidationError("corpus/citations.csv does not match corpus/patents.csv; rerun `ingest`");
  return std::move(attached.corpus);
}

// Workdir files are keyed relative to the workdir, external files by
// absolute path.
std::string input_label(const Workspace& ws, const fs::path& p) {
  const fs::path abs = fs::absolute(p).lexically_normal();
  const fs::path rel = abs.lexically_relative(fs::absolute(ws.root()).lexically_normal());
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return abs.generic_string();
}

gam::SmoothDefaults smooth_defaults(const PipelineConfig& c) {
  return {c.gam_basis_size, c.gam_degree, c.gam_penalty_order};
}

json rejects_summary(std::span<const Reject> rejects) {
  std::map<std::string, std::size_t> by_reason;
  for (const Reject& r : rejects) {
    std::string reason = r.reason;
    if (reason.starts_with("invalid ipc code")) reason = "invalid ipc code";
    ++by_reason[reason];
  }
  json j = json::object();
  for (const auto& [reason, count] : by_reason) j[reason] = count;
  return j;
}

void run_synth(Workspace& ws, const PipelineConfig& c, json& config, json& report) {
  config = {{"seed", c.seed},
            {"synth_patents", c.synth_patents},
            {"synth_edges", c.synth_edges},
            {"synth_dim", c.synth_dim},
            {"synth_profile", c.synth_profile}};
  if (c.synth_dim == 0) throw ValidationError("synth_dim must be positive");
  const SynthProfile profile = c.synth_profile == "null" ? SynthProfile::null_effects() : SynthProfile::standard();
  const SynthCorpus synth = synth_corpus(c.seed, c.synth_patents, c.synth_edges, profile);

  ws.output("synth/patents.csv", to_text([&](std::ostream& o) { write_patents_csv(o, synth.corpus); }));
  ws.output("synth/citations.csv", to_text([&](std::ostream& o) { write_citations_csv(o, synth.corpus); }));
  ws.output("synth/ground_truth.json", ground_truth_json(synth));

  std::vector<std::string> ids;
  for (const PatentRecord& p : synth.corpus.patents()) ids.push_back(p.patent_id);
  fs::create_directories(ws.path("synth"));
  embed::write_matrix(ws.path("synth/embeddings.psim"), embed::mock_embeddings(c.seed, ids, c.synth_dim));
  ws.record_output_file("synth/embeddings.psim");
  ws.record_output_file("synth/embeddings.ids");

  report = {{"patents", synth.corpus.patents().size()}, {"edges", synth.corpus.edges().size()}};
}

void run_ingest(Workspace& ws, const PipelineConfig& c, json& config, json& report) {
  fs::path patents_path, citations_path;
  if (c.patents && c.citations) {
    patents_path = *c.patents;
    citations_path = *c.citations;
  } else if (c.patents || c.citations) {
    throw ValidationError("set both patents and citations, or neither to use the synth stage output");
  } else {
    ws.require("synth", "synth");
    patents_path = ws.path("synth/patents.csv");
    citations_path = ws.path("synth/citations.csv");
  }
  config = {{"patents", c.patents ? c.patents->string() : "synth/patents.csv"},
            {"citations", c.citations ? c.citations->string() : "synth/citations.csv"},
            {"strict", c.strict},
            {"utility_only", c.utility_only},
            {"run_date", c.run_date.value_or("")}};
  ws.input(input_label(ws, patents_path), patents_path);
  ws.input(input_label(ws, citations_path), citations_path);

  IngestOptions options;
  options.strict = c.strict;
  options.run_date = run_date_of(c);
  PatentIngestResult patents = ingest_patents(patents_path, options);
  const std::vector<CitationEdge> rows = read_citation_rows(citations_path);
  CitationIngestResult cites = attach_citations(rows, patents.corpus);
  if (c.strict && !cites.report.rejects.empty()) {
    const Reject& r = cites.report.rejects.front();
    throw ValidationError("citations.csv row " + std::to_string(r.row_number) + ": " + r.reason);
  }
  FilterReport filter;
  const CorpusStore corpus = c.utility_only ? filter_utility(cites.corpus, &filter) : cites.corpus;

  ws.output("corpus/patents.csv", to_text([&](std::ostream& o) { write_patents_csv(o, corpus); }));
  ws.output("corpus/citations.csv", to_text([&](std::ostream& o) { write_citations_csv(o, corpus); }));
  ws.output("corpus/rejects_patents.csv",
            to_text([&](std::ostream& o) { write_rejects_csv(o, patents.report.rejects); }));
  ws.output("corpus/rejects_citations.csv",
            to_text([&](std::ostream& o) { write_rejects_csv(o, cites.report.rejects); }));

  report = {{"patent_rows", patents.report.rows_read},
            {"patents_accepted", patents.report.accepted},
            {"patent_rejects", rejects_summary(patents.report.rejects)},
            {"citation_rows", cites.report.raw},
            {"citations_attached", cites.report.attached},
            {"self_citations", cites.report.self_citations},
            {"dangling", cites.report.dangling},
            {"duplicates", cites.report.duplicates},
            {"non_utility_patents_removed", filter.patents_removed},
            {"non_utility_edges_removed", filter.edges_removed},
            {"patents", corpus.patents().size()},
            {"edges", corpus.edges().size()}};
}

void run_score(Workspace& ws, const PipelineConfig& c, json& config, json& report) {
  ws.require("ingest", "ingest");
  ws.input("corpus/patents.csv", ws.path("corpus/patents.csv"));
  ws.input("corpus/citations.csv", ws.path("corpus/citations.csv"));
  const CorpusStore corpus = load_corpus(ws);
  config = {{"response", c.response}};

  std::vector<embed::ScoredEdge> scored;
  if (c.response == "profile") {
    ws.require("synth", "synth");
    ws.input("synth/ground_truth.json", ws.path("synth/ground_truth.json"));
    const GroundTruth truth = read_ground_truth(ws.path("synth/ground_truth.json"));
    scored = features::synthesize_scores(corpus, truth.profile, truth.seed);
    report = {{"input_edges", corpus.edges().size()}, {"scored", scored.size()}, {"missing_row", 0},
              {"zero_norm", 0}};
  } else {
    fs::path psim_path;
    if (c.psim) {
      psim_path = *c.psim;
    } else {
      ws.require("synth", "synth");
      psim_path = ws.path("synth/embeddings.psim");
    }
    config["psim"] = c.psim ? c.psim->string() : "synth/embeddings.psim";
    config["score_chunk_size"] = c.score_chunk_size;
    ws.input(input_label(ws, psim_path), psim_path);
    ws.input(input_label(ws, embed::ids_path_for(psim_path)), embed::ids_path_for(psim_path));
    if (c.score_chunk_size == 0) throw ValidationError("score_chunk_size must be positive");

    const embed::EmbeddingMatrix matrix = embed::read_matrix(psim_path);
    embed::ScoreResult result =
        embed::score_edges(matrix, corpus.edges(), {c.score_chunk_size, std::max(1u, c.score_workers)});
    scored = std::move(result.scored);
    report = {{"input_edges", result.report.input_edges},
              {"scored", result.report.scored},
              {"missing_row", result.report.missing_row},
              {"zero_norm", result.report.zero_norm}};
  }

  ws.output("score/scores.csv", to_text([&](std::ostream& o) { embed::write_scores_csv(o, scored); }));
  const std::vector<embed::YearStats> yearly = embed::yearly_similarity_stats(scored, corpus);
  ws.output("score/yearly_similarity.csv", to_text([&](std::ostream& o) {
              o << "year,mean,count,stddev\n";
              for (const embed::YearStats& y : yearly)
                csv::write_row(o, {std::to_string(y.year), csv::format_double(y.mean), std::to_string(y.count),
                                   csv::format_double(y.stddev)});
            }));
}

void run_features(Workspace& ws, const PipelineConfig& c, json& config, json& report) {
  ws.require("ingest", "ingest");
  const json& score = ws.require("score", "score");
  for (const char* rel : {"corpus/patents.csv", "corpus/citations.csv", "score/scores.csv"})
    ws.input(rel, ws.path(rel));
  config = {{"keep_negative_lags", c.keep_negative_lags}};

  const CorpusStore corpus = load_corpus(ws);
  const std::vector<embed::ScoredEdge> scored = embed::read_scores_csv(ws.path("score/scores.csv"));
  const std::size_t missing =
      score.at("report").at("missing_row").get<std::size_t>() + score.at("report").at("zero_norm").get<std::size_t>();
  const features::FeatureTable table = features::build_features(corpus, scored, {c.keep_negative_lags}, missing);

  ws.output("features/features.csv", to_text([&](std::ostream& o) { features::write_features_csv(o, table); }));
  const std::vector<features::LagYear> lags = features::yearly_lag_stats(table);
  ws.output("features/yearly_lag.csv", to_text([&](std::ostream& o) {
              o << "year,mean_lag_days,count\n";
              for (const features::LagYear& y : lags)
                csv::write_row(o, {std::to_string(y.year), csv::format_double(y.mean_lag_days),
                                   std::to_string(y.count)});
            }));
  report = {{"rows", table.rows.size()},
            {"dropped_missing_embedding", table.drops.missing_embedding},
            {"dropped_unresolved_endpoint", table.drops.unresolved_endpoint},
            {"dropped_negative_lag", table.drops.negative_lag},
            {"kept_undefined_jaccard", table.drops.undefined_jaccard},
            {"kept_missing_assignee", table.drops.missing_assignee}};
}

void run_fit(Workspace& ws, const PipelineConfig& c, json& config, json& report) {
  if (c.model_level < 0 || c.model_level > 3) throw ValidationError("--model must be 0, 1, 2 or 3");
  if (!ws.entry("features") || !fs::exists(ws.path("features/features.csv")))
    throw MissingArtifactError("run `features` first");
  ws.require("features", "features");
  ws.input("features/features.csv", ws.path("features/features.csv"));
  config = {{"model_level", c.model_level},
            {"gam_basis_size", c.gam_basis_size},
            {"gam_degree", c.gam_degree},
            {"gam_penalty_order", c.gam_penalty_order},
            {"gam_log_lambda_min", c.gam_log_lambda_min},
            {"gam_log_lambda_max", c.gam_log_lambda_max}};
  if (!(c.gam_log_lambda_min < c.gam_log_lambda_max)) throw ValidationError("gam_log_lambda_min must be < max");

  const features::FeatureTable table = features::read_features_csv(ws.path("features/features.csv"));
  const gam::ModelSpec spec = gam::model_catalog(c.model_level, smooth_defaults(c));
  gam::FitOptions options;
  options.search.log_lambda_min = c.gam_log_lambda_min;
  options.search.log_lambda_max = c.gam_log_lambda_max;
  options.workers = std::max(1u, c.fit_workers);
  options.keep_fitted = false;
  const gam::ModelFit fit = gam::fit_model(spec, table, options);
  const gam::FitSummary summary = gam::summarize(fit);

  const std::string stem = "fit/model" + std::to_string(c.model_level);
  ws.output(stem + ".json", gam::to_json(summary));
  for (const gam::SmoothFit& s : fit.smooths) {
    const gam::PartialEffect pe = gam::partial_effect(fit, s.term.feature);
    ws.output(stem + "_" + s.term.feature + ".csv",
              to_text([&](std::ostream& o) { gam::write_partial_effect_csv(o, pe); }));
  }
  report = {{"n", fit.n},
            {"dropped_rows", fit.dropped_rows},
            {"edf", fit.edf_total},
            {"converged", fit.converged},
            {"lambda_cycles", fit.lambda_cycles}};
}

void run_report(Workspace& ws, const PipelineConfig&, json& config, json& report) {
  std::vector<gam::FitSummary> fits;
  json missing = json::array();
  for (int k = 0; k <= 3; ++k) {
    const std::string key = "fit.model" + std::to_string(k);
    if (!ws.entry(key)) {
      missing.push_back(k);
      continue;
    }
    ws.require(key, "fit --model " + std::to_string(k));
    const std::string rel = "fit/model" + std::to_string(k) + ".json";
    ws.input(rel, ws.path(rel));
    fits.push_back(gam::summary_from_json(detail::read_file(ws.path(rel))));
  }
  if (fits.empty()) throw MissingArtifactError("run `fit` first");
  config = json::object();
  ws.output("report/table2.csv", to_text([&](std::ostream& o) { gam::write_comparison_csv(o, fits); }));
  ws.output("report/table2.md", to_text([&](std::ostream& o) { gam::write_comparison_markdown(o, fits); }));
  report = {{"models", fits.size()}, {"models_missing", missing}};
}

}  // namespace

StageResult run_stage(Stage stage, const PipelineConfig& config) {
  WorkdirLock lock(config.workdir);
  Workspace ws(config.workdir);
  const auto start = std::chrono::steady_clock::now();

  std::string key(stage_name(stage));
  json stage_config = json::object();
  json report = json::object();
  StageResult result;
  switch (stage) {
    case Stage::Synth: run_synth(ws, config, stage_config, report); break;
    case Stage::Ingest: run_ingest(ws, config, stage_config, report); break;
    case Stage::Score: run_score(ws, config, stage_config, report); break;
    case Stage::Features: run_features(ws, config, stage_config, report); break;
    case Stage::Fit:
      run_fit(ws, config, stage_config, report);
      key = "fit.model" + std::to_string(config.model_level);
      break;
    case Stage::Report: run_report(ws, config, stage_config, report); break;
    case Stage::Figs: {
      for (const char* upstream : {"ingest", "score", "features", "fit.model0", "fit.model1", "fit.model2",
                                   "fit.model3"})
        if (ws.entry(upstream)) ws.require(upstream, upstream);
      StageResult figs = emit_figures(config.workdir);
      for (const std::string& rel : figs.artifacts) ws.record_output_file(rel);
      result.notices = std::move(figs.notices);
      report = {{"notices", result.notices}};
      break;
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ws.commit(key, std::move(stage_config), std::move(report), seconds);
  result.artifacts = ws.artifacts();
  return result;
}

std::vector<std::string> verify_manifest(const fs::path& workdir) {
  const fs::path m = workdir / "manifest.json";
  if (!fs::exists(m)) throw MissingArtifactError("no manifest in " + workdir.string());
  const json manifest = json::parse(detail::read_file(m));
  std::vector<std::string> bad;
  for (const auto& [key, entry] : manifest.items()) {
    for (const char* section : {"inputs", "outputs"}) {
      for (const auto& [label, digest] : entry.at(section).items()) {
        const fs::path p = fs::path(label).is_absolute() ? fs::path(label) : workdir / label;
        if (!fs::exists(p) || sha256_file(p) != digest.get<std::string>()) bad.push_back(key + ": " + label);
      }
    }
  }
  return bad;
}

}  // namespace patsim::pipeline
