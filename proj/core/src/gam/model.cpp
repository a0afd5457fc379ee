#include "patsim/gam/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <thread>

#include "patsim/error.hpp"

namespace patsim::gam {

void ModelSpec::validate() const {
  std::set<std::string, std::less<>> seen;
  for (const std::string& name : linear_terms) {
    if (name.empty()) throw ValidationError("model spec: empty term name");
    if (!seen.insert(name).second) throw ValidationError("model spec: duplicated term " + name);
  }
  for (const SmoothTerm& term : smooth_terms) {
    if (term.feature.empty()) throw ValidationError("model spec: empty smooth feature");
    if (!seen.insert(term.feature).second)
      throw ValidationError("model spec: " + term.feature + " appears more than once");
    if (term.degree < 0 || term.basis_size <= term.degree + 1)
      throw ValidationError("model spec: s(" + term.feature + ") needs basis size > degree + 1");
    if (term.penalty_order < 1 || term.penalty_order >= term.basis_size)
      throw ValidationError("model spec: s(" + term.feature + ") penalty order must be in [1, q)");
  }
}

ModelSpec model_catalog(int level, const SmoothDefaults& defaults) {
  if (level < 0 || level > 3) throw ValidationError("model level must be 0, 1, 2 or 3");
  auto smooth = [&](std::string feature) {
    return SmoothTerm{std::move(feature), defaults.basis_size, defaults.degree, defaults.penalty_order};
  };
  ModelSpec spec;
  spec.smooth_terms.push_back(smooth("pub_date"));
  if (level >= 1) spec.smooth_terms.push_back(smooth("temporal_diff_days"));
  if (level >= 2) {
    spec.smooth_terms.push_back(smooth("log_sender_citations"));
    spec.linear_terms = {"is_same_org", "is_sender_org", "is_receiver_org"};
  }
  if (level >= 3)
    for (const char* j : {"j_section", "j_class", "j_subclass", "j_maingroup", "j_subgroup"})
      spec.linear_terms.emplace_back(j);
  return spec;
}

namespace {

constexpr std::array<const char*, 5> kJaccardColumns = {"j_section", "j_class", "j_subclass", "j_maingroup",
                                                         "j_subgroup"};

bool uses_jaccard(const ModelSpec& spec) {
  return std::any_of(spec.linear_terms.begin(), spec.linear_terms.end(),
                     [](const std::string& t) { return t.starts_with("j_"); }) ||
         std::any_of(spec.smooth_terms.begin(), spec.smooth_terms.end(),
                     [](const SmoothTerm& t) { return t.feature.starts_with("j_"); });
}

double feature_value(const features::FeatureRow& row, std::string_view name) {
  if (name == "pub_date") return row.pub_date;
  if (name == "temporal_diff_days") return row.temporal_diff_days;
  if (name == "log_sender_citations") return row.log_sender_citations;
  if (name == "is_same_org") return row.is_same_org;
  if (name == "is_sender_org") return row.is_sender_org;
  if (name == "is_receiver_org") return row.is_receiver_org;
  for (std::size_t k = 0; k < kJaccardColumns.size(); ++k)
    if (name == kJaccardColumns[k]) return row.jaccard.values[k];
  throw ValidationError("unknown covariate " + std::string(name));
}

int catalog_level(const ModelSpec& spec) {
  if (spec.smooth_terms.empty()) return -1;
  const SmoothTerm& first = spec.smooth_terms.front();
  const SmoothDefaults defaults{first.basis_size, first.degree, first.penalty_order};
  for (int level = 0; level <= 3; ++level)
    if (model_catalog(level, defaults) == spec) return level;
  return -1;
}

// Rows are grouped into fixed segments of kSegmentBlocks blocks; segment
// accumulators merge left to right whatever the worker count.
constexpr std::size_t kSegmentBlocks = 16;

struct Layout {
  std::vector<const std::vector<double>*> linear;
  std::vector<const std::vector<double>*> smooth_x;
  std::vector<ConstrainedSmooth> smooths;
  std::vector<Eigen::Index> smooth_offset;
  Eigen::Index columns = 0;

  void fill(std::size_t begin, std::size_t count, Eigen::MatrixXd& x) const {
    x.resize(static_cast<Eigen::Index>(count), columns);
    x.col(0).setOnes();
    for (std::size_t j = 0; j < linear.size(); ++j)
      for (std::size_t i = 0; i < count; ++i)
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = (*linear[j])[begin + i];
    for (std::size_t s = 0; s < smooths.size(); ++s) {
      const std::span<const double> xs(smooth_x[s]->data() + begin, count);
      smooths[s].design_rows(xs, x.middleCols(smooth_offset[s], smooths[s].columns()));
    }
  }
};

const std::vector<double>& column(const Dataset& data, const std::string& name) {
  auto it = data.columns.find(name);
  if (it == data.columns.end()) throw ValidationError("dataset has no column " + name);
  if (it->second.size() != data.size())
    throw ValidationError("column " + name + " has " + std::to_string(it->second.size()) + " rows, expected " +
                          std::to_string(data.size()));
  return it->second;
}

QrAccumulator accumulate_segment(const Layout& layout, const Dataset& data, std::size_t begin, std::size_t end,
                                 std::size_t block_rows) {
  QrAccumulator acc(layout.columns);
  Eigen::MatrixXd x;
  for (std::size_t b = begin; b < end; b += block_rows) {
    const std::size_t count = std::min(block_rows, end - b);
    layout.fill(b, count, x);
    const Eigen::Map<const Eigen::VectorXd> y(data.response.data() + b, static_cast<Eigen::Index>(count));
    acc.add_rows(x, y);
  }
  return acc;
}

}  // namespace

const SmoothFit* ModelFit::find_smooth(std::string_view feature) const {
  for (const SmoothFit& s : smooths)
    if (s.term.feature == feature) return &s;
  return nullptr;
}

Dataset dataset_from_features(const features::FeatureTable& table, const ModelSpec& spec) {
  const bool need_jaccard = uses_jaccard(spec);
  std::vector<std::string> names = spec.linear_terms;
  for (const SmoothTerm& t : spec.smooth_terms) names.push_back(t.feature);

  Dataset data;
  for (const std::string& name : names) data.columns[name];
  for (const features::FeatureRow& row : table.rows) {
    if (need_jaccard && !row.jaccard.defined) {
      ++data.dropped_rows;
      continue;
    }
    data.response.push_back(row.similarity);
    for (const std::string& name : names) data.columns[name].push_back(feature_value(row, name));
  }
  return data;
}

ModelFit fit_model(const ModelSpec& spec, const Dataset& data, const FitOptions& options) {
  spec.validate();
  const std::size_t n = data.size();
  if (n == 0) throw ValidationError("no rows to fit");
  if (options.block_rows == 0) throw ValidationError("block_rows must be positive");
  for (double y : data.response)
    if (!std::isfinite(y)) throw ValidationError("response contains a non-finite value");

  ModelFit fit;
  fit.spec = spec;
  fit.model_level = catalog_level(spec);
  fit.n = n;
  fit.dropped_rows = data.dropped_rows;

  Layout layout;
  fit.column_names.push_back("(Intercept)");
  layout.columns = 1;
  for (const std::string& name : spec.linear_terms) {
    layout.linear.push_back(&column(data, name));
    fit.column_names.push_back(name);
    ++layout.columns;
  }
  for (const SmoothTerm& term : spec.smooth_terms) {
    const std::vector<double>& x = column(data, term.feature);
    layout.smooth_x.push_back(&x);
    layout.smooths.push_back(make_smooth(x, term));
    layout.smooth_offset.push_back(layout.columns);
    for (int k = 1; k <= layout.smooths.back().columns(); ++k)
      fit.column_names.push_back("s(" + term.feature + ")." + std::to_string(k));
    layout.columns += layout.smooths.back().columns();
  }
  if (static_cast<std::size_t>(layout.columns) >= n)
    throw ValidationError("model has " + std::to_string(layout.columns) + " coefficients but only " +
                          std::to_string(n) + " rows");

  const std::size_t segment_rows = options.block_rows * kSegmentBlocks;
  const std::size_t segments = (n + segment_rows - 1) / segment_rows;
  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, segments);
  QrAccumulator total(layout.columns);
  for (std::size_t wave = 0; wave < segments; wave += workers) {
    const std::size_t width = std::min(workers, segments - wave);
    std::vector<QrAccumulator> partial(width, QrAccumulator(layout.columns));
    auto run = [&](std::size_t w) {
      const std::size_t begin = (wave + w) * segment_rows;
      partial[w] = accumulate_segment(layout, data, begin, std::min(n, begin + segment_rows), options.block_rows);
    };
    if (width == 1) {
      run(0);
    } else {
      std::vector<std::jthread> threads;
      for (std::size_t w = 0; w < width; ++w) threads.emplace_back(run, w);
    }
    for (const QrAccumulator& p : partial) total.merge(p);
  }
  const LeastSquaresSystem system = total.finish(fit.column_names);

  // Each penalty is rescaled to the Frobenius norm of its X^T X block so the
  // lambda range means the same thing whatever n and the covariate scales are.
  std::vector<PenaltyBlock> penalties;
  for (std::size_t s = 0; s < layout.smooths.size(); ++s) {
    const Eigen::Index off = layout.smooth_offset[s];
    const Eigen::Index w = layout.smooths[s].columns();
    const Eigen::MatrixXd rb = system.r.middleCols(off, w);
    const Eigen::MatrixXd& root = layout.smooths[s].penalty_root();
    const double xtx = (rb.transpose() * rb).norm();
    const double pen = (root.transpose() * root).norm();
    const double scale = pen > 0.0 && xtx > 0.0 ? xtx / pen : 1.0;
    penalties.push_back({off, std::sqrt(scale) * root});
  }

  std::vector<double> lambda;
  if (!options.fixed_lambda.empty()) {
    if (options.fixed_lambda.size() != penalties.size())
      throw ValidationError("fixed_lambda needs one value per smooth term");
    lambda = options.fixed_lambda;
  } else {
    const LambdaSearchResult search = optimize_lambda(system, penalties, options.search);
    lambda = search.lambda;
    fit.converged = search.converged;
    fit.lambda_cycles = search.cycles;
  }

  const PenalizedSolution sol = fit_penalized_ls(system, penalties, lambda);
  fit.beta = sol.beta;
  fit.edf_columns = sol.edf_columns;
  fit.edf_total = sol.hat_trace;
  fit.rss = sol.rss;
  fit.tss = system.tss;

  const double dn = static_cast<double>(n);
  if (!(dn - fit.edf_total > 0.0)) throw ValidationError("no residual degrees of freedom");
  fit.sigma2_hat = fit.rss / (dn - fit.edf_total);
  fit.cov_beta = sol.r_penalized_inv * sol.r_penalized_inv.transpose() * fit.sigma2_hat;
  fit.aic = dn * std::log(fit.rss / dn) + dn * std::log(2.0 * std::numbers::pi) + dn + 2.0 * (fit.edf_total + 1.0);
  fit.gcv = gcv_score(fit.rss, fit.edf_total, n);
  fit.dev_explained = fit.tss > 0.0 ? 1.0 - fit.rss / fit.tss : 0.0;

  for (std::size_t s = 0; s < layout.smooths.size(); ++s) {
    const Eigen::Index off = layout.smooth_offset[s];
    const std::vector<double>& x = *layout.smooth_x[s];
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    SmoothFit sf{spec.smooth_terms[s], layout.smooths[s], off, lambda[s],
                 fit.edf_columns.segment(off, layout.smooths[s].columns()).sum(), *lo, *hi};
    fit.smooths.push_back(std::move(sf));
  }

  if (options.keep_fitted) {
    fit.fitted.resize(n);
    Eigen::MatrixXd x;
    for (std::size_t b = 0; b < n; b += options.block_rows) {
      const std::size_t count = std::min(options.block_rows, n - b);
      layout.fill(b, count, x);
      Eigen::Map<Eigen::VectorXd>(fit.fitted.data() + b, static_cast<Eigen::Index>(count)) = x * fit.beta;
    }
  }
  return fit;
}

ModelFit fit_model(const ModelSpec& spec, const features::FeatureTable& table, const FitOptions& options) {
  return fit_model(spec, dataset_from_features(table, spec), options);
}

PartialEffect partial_effect(const ModelFit& fit, std::string_view term, std::size_t grid_size) {
  const SmoothFit* s = fit.find_smooth(term);
  if (s == nullptr) throw ValidationError("no smooth term s(" + std::string(term) + ") in this fit");
  if (grid_size < 2) throw ValidationError("partial effect grid needs at least 2 points");

  const Eigen::Index w = s->smooth.columns();
  const Eigen::VectorXd beta = fit.beta.segment(s->offset, w);
  const Eigen::MatrixXd cov = fit.cov_beta.block(s->offset, s->offset, w, w);

  PartialEffect pe;
  pe.term = std::string(term);
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(grid_size - 1);
    const double g = i + 1 == grid_size ? s->x_max : s->x_min + t * (s->x_max - s->x_min);
    const Eigen::RowVectorXd row = s->smooth.design_row(g);
    pe.grid.push_back(g);
    pe.f_hat.push_back(row.dot(beta));
    pe.se.push_back(std::sqrt(std::max(0.0, (row * cov * row.transpose())(0, 0))));
  }
  return pe;
}

}  // namespace patsim::gam
