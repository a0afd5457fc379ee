#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "io_util.hpp"
#include "patsim/corpus.hpp"
#include "patsim/csv.hpp"
#include "patsim/error.hpp"
#include "patsim/ipc.hpp"
#include "patsim/pipeline.hpp"
#include "patsim/svg.hpp"

namespace patsim::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kHistogramBins = 40;
const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ValidationError("missing column " + std::string(name));
  }
  std::vector<double> numbers(std::string_view name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(csv::parse_double(r.at(c), name));
    return out;
  }
};

Table read_table(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("cannot read " + path.string());
  csv::Reader reader(in);
  Table t;
  reader.next(t.header);
  std::vector<std::string> row;
  while (reader.next(row))
    if (!(row.size() == 1 && row[0].empty())) t.rows.push_back(row);
  return t;
}

struct Histogram {
  std::vector<double> lower, upper;
  std::vector<std::size_t> count;
};

Histogram histogram(const std::vector<double>& values) {
  Histogram h;
  if (values.empty()) return h;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / kHistogramBins;
  h.count.assign(kHistogramBins, 0);
  for (std::size_t b = 0; b < kHistogramBins; ++b) {
    h.lower.push_back(lo + width * static_cast<double>(b));
    h.upper.push_back(b + 1 == kHistogramBins ? hi : lo + width * static_cast<double>(b + 1));
  }
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    ++h.count[std::min(b, kHistogramBins - 1)];
  }
  return h;
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream out;
  out << "bin_lower,bin_upper,count\n";
  for (std::size_t b = 0; b < h.count.size(); ++b)
    csv::write_row(out, {csv::format_double(h.lower[b]), csv::format_double(h.upper[b]), std::to_string(h.count[b])});
  return out.str();
}

svg::Series histogram_series(const Histogram& h, std::string label) {
  svg::Series s;
  s.label = std::move(label);
  for (std::size_t b = 0; b < h.count.size(); ++b) {
    s.x.push_back(0.5 * (h.lower[b] + h.upper[b]));
    s.y.push_back(static_cast<double>(h.count[b]));
  }
  return s;
}

class Bundle {
 public:
  Bundle(const fs::path& workdir, StageResult& result) : workdir_(workdir), result_(result) {}

  void write(const std::string& rel, std::string_view content) {
    detail::write_file_atomic(workdir_ / rel, content);
    result_.artifacts.push_back(rel);
  }

 private:
  const fs::path& workdir_;
  StageResult& result_;
};

void fig1(const fs::path& workdir, Bundle& out) {
  IngestOptions options;
  options.strict = true;
  options.run_date = days_from_civil(9999, 12, 31);
  PatentIngestResult patents = ingest_patents(workdir / "corpus/patents.csv", options);
  const CitationIngestResult cites =
      attach_citations(read_citation_rows(workdir / "corpus/citations.csv"), patents.corpus);

  std::ostringstream table;
  table << "year,level,within,outside,excluded\n";
  std::vector<svg::Panel> panels;
  for (ipc::Level level : {ipc::Level::Class, ipc::Level::Subclass}) {
    const auto rows = ipc::within_level_citation_counts(cites.corpus, level);
    svg::Panel panel;
    panel.title = level == ipc::Level::Class ? "Same class" : "Same sub-class";
    panel.x_label = "sender grant year";
    panel.y_label = "citations";
    svg::Series within{"within", {}, {}, kPalette[0], false};
    svg::Series outside{"outside", {}, {}, kPalette[1], true};
    for (const ipc::WithinLevelRow& r : rows) {
      csv::write_row(table, {std::to_string(r.year), std::string(ipc::level_name(level)), std::to_string(r.within),
                             std::to_string(r.outside), std::to_string(r.excluded)});
      within.x.push_back(r.year);
      within.y.push_back(static_cast<double>(r.within));
      outside.x.push_back(r.year);
      outside.y.push_back(static_cast<double>(r.outside));
    }
    panel.series = {std::move(within), std::move(outside)};
    panels.push_back(std::move(panel));
  }
  out.write("figs/fig1_ipc_within.csv", table.str());
  out.write("figs/fig1_ipc_within.svg", svg::render("IPC citations comparison", panels));
}

void distribution_and_trend(Bundle& out, const std::string& stem, const std::string& title,
                            const std::vector<double>& values, const std::string& value_label, const Table& yearly,
                            const std::string& mean_column) {
  const Histogram h = histogram(values);
  out.write(stem + "_hist.csv", histogram_csv(h));

  svg::Panel dist;
  dist.title = "Distribution";
  dist.kind = svg::PanelKind::Bar;
  dist.x_label = value_label;
  dist.y_label = "citations";
  if (!h.count.empty()) dist.series.push_back(histogram_series(h, ""));

  svg::Panel trend;
  trend.title = "Average per year";
  trend.x_label = "sender grant year";
  trend.y_label = value_label;
  if (!yearly.rows.empty()) trend.series.push_back({"", yearly.numbers("year"), yearly.numbers(mean_column)});
  out.write(stem + ".svg", svg::render(title, {dist, trend}));
}

void fig2(const fs::path& workdir, Bundle& out) {
  const Table scores = read_table(workdir / "score/scores.csv");
  const Table yearly = read_table(workdir / "score/yearly_similarity.csv");
  out.write("figs/fig2_similarity_yearly.csv", detail::read_file(workdir / "score/yearly_similarity.csv"));
  distribution_and_trend(out, "figs/fig2_similarity", "Citation similarity", scores.numbers("similarity"),
                         "similarity (x100)", yearly, "mean");
}

void fig3(const fs::path& workdir, Bundle& out) {
  const Table features = read_table(workdir / "features/features.csv");
  const Table yearly = read_table(workdir / "features/yearly_lag.csv");
  out.write("figs/fig3_lag_yearly.csv", detail::read_file(workdir / "features/yearly_lag.csv"));
  distribution_and_trend(out, "figs/fig3_lag", "Temporal lag", features.numbers("temporal_diff_days"), "lag (days)",
                         yearly, "mean_lag_days");
}

bool fig4(const fs::path& workdir, Bundle& out, const std::function<bool(const std::string&)>& done) {
  const std::vector<std::string> smooths = {"pub_date", "temporal_diff_days", "log_sender_citations"};
  std::ostringstream table;
  table << "model,term,grid,f_hat,se_lower,se_upper\n";
  std::vector<svg::Panel> panels;
  bool any = false;
  for (const std::string& term : smooths) {
    svg::Panel panel;
    panel.title = "s(" + term + ")";
    panel.x_label = term;
    panel.y_label = "partial effect";
    for (int k = 0; k <= 3; ++k) {
      const fs::path p = workdir / ("fit/model" + std::to_string(k) + "_" + term + ".csv");
      if (!done("fit.model" + std::to_string(k)) || !fs::exists(p)) continue;
      any = true;
      const Table t = read_table(p);
      for (const auto& r : t.rows) {
        std::vector<std::string> row{std::to_string(k), term};
        row.insert(row.end(), r.begin(), r.end());
        csv::write_row(table, row);
      }
      panel.series.push_back({"Model " + std::to_string(k), t.numbers("grid"), t.numbers("f_hat"),
                              kPalette[k], false});
    }
    if (!panel.series.empty()) panels.push_back(std::move(panel));
  }
  if (!any) return false;
  out.write("figs/fig4_splines.csv", table.str());
  out.write("figs/fig4_splines.svg", svg::render("Models splines", panels, 3));
  return true;
}

}  // namespace

StageResult emit_figures(const fs::path& workdir) {
  StageResult result;
  Bundle out(workdir, result);
  // Without a manifest, file presence alone decides.
  std::optional<nlohmann::json> manifest;
  if (fs::exists(workdir / "manifest.json"))
    manifest = nlohmann::json::parse(detail::read_file(workdir / "manifest.json"));
  const std::function<bool(const std::string&)> done = [&](const std::string& stage) {
    return !manifest || manifest->contains(stage);
  };
  auto have = [&](const char* stage, std::initializer_list<const char*> rels) {
    return done(stage) &&
           std::all_of(rels.begin(), rels.end(), [&](const char* r) { return fs::exists(workdir / r); });
  };

  if (have("ingest", {"corpus/patents.csv", "corpus/citations.csv"}))
    fig1(workdir, out);
  else
    result.notices.push_back("fig1 skipped: run `ingest` first");

  if (have("score", {"score/scores.csv", "score/yearly_similarity.csv"}))
    fig2(workdir, out);
  else
    result.notices.push_back("fig2 skipped: run `score` first");

  if (have("features", {"features/features.csv", "features/yearly_lag.csv"}))
    fig3(workdir, out);
  else
    result.notices.push_back("fig3 skipped: run `features` first");

  if (!fig4(workdir, out, done)) result.notices.push_back("fig4 skipped: run `fit` first");
  return result;
}

}  // namespace patsim::pipeline
