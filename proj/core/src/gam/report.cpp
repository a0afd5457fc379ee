#include "patsim/gam/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <nlohmann/json.hpp>

#include "patsim/csv.hpp"
#include "patsim/error.hpp"

namespace patsim::gam {

double normal_p_value(double estimate, double se) {
  if (!(se > 0.0)) return estimate == 0.0 ? 1.0 : 0.0;
  return std::erfc(std::abs(estimate / se) / std::sqrt(2.0));
}

std::string significance_stars(double p_value) {
  if (p_value < 0.001) return "***";
  if (p_value < 0.01) return "**";
  if (p_value < 0.05) return "*";
  if (p_value < 0.1) return ".";
  return "";
}

FitSummary summarize(const ModelFit& fit) {
  FitSummary s;
  s.model_level = fit.model_level;
  s.n = fit.n;
  s.dropped_rows = fit.dropped_rows;
  s.converged = fit.converged;
  s.aic = fit.aic;
  s.gcv = fit.gcv;
  s.dev_explained = fit.dev_explained;
  const Eigen::VectorXd se = fit.standard_errors();
  const std::size_t parametric = 1 + fit.spec.linear_terms.size();
  for (std::size_t j = 0; j < parametric; ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    CoefficientRow row{fit.column_names[j], fit.beta(k), se(k), normal_p_value(fit.beta(k), se(k)), {}};
    row.stars = significance_stars(row.p_value);
    s.coefficients.push_back(std::move(row));
  }
  for (const SmoothFit& sf : fit.smooths) s.smooths.push_back({"s(" + sf.term.feature + ")", sf.lambda, sf.edf});
  return s;
}

std::string to_json(const FitSummary& summary) {
  nlohmann::ordered_json j;
  j["model_level"] = summary.model_level;
  j["n"] = summary.n;
  j["dropped_rows"] = summary.dropped_rows;
  j["converged"] = summary.converged;
  j["coefficients"] = nlohmann::ordered_json::array();
  for (const CoefficientRow& c : summary.coefficients)
    j["coefficients"].push_back(
        {{"name", c.name}, {"estimate", c.estimate}, {"se", c.se}, {"p_value", c.p_value}, {"stars", c.stars}});
  j["smooths"] = nlohmann::ordered_json::array();
  for (const SmoothRow& s : summary.smooths)
    j["smooths"].push_back({{"name", s.name}, {"lambda", s.lambda}, {"edf", s.edf}});
  j["aic"] = summary.aic;
  j["gcv"] = summary.gcv;
  j["dev_explained"] = summary.dev_explained;
  return j.dump(2) + "\n";
}

FitSummary summary_from_json(const std::string& text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    FitSummary s;
    s.model_level = j.at("model_level").get<int>();
    s.n = j.at("n").get<std::size_t>();
    s.dropped_rows = j.value("dropped_rows", std::size_t{0});
    s.converged = j.value("converged", true);
    for (const auto& c : j.at("coefficients")) {
      CoefficientRow row{c.at("name").get<std::string>(), c.at("estimate").get<double>(), c.at("se").get<double>(),
                         0.0, {}};
      row.p_value = c.contains("p_value") ? c.at("p_value").get<double>() : normal_p_value(row.estimate, row.se);
      row.stars = c.contains("stars") ? c.at("stars").get<std::string>() : significance_stars(row.p_value);
      s.coefficients.push_back(std::move(row));
    }
    for (const auto& m : j.at("smooths"))
      s.smooths.push_back({m.at("name").get<std::string>(), m.at("lambda").get<double>(), m.at("edf").get<double>()});
    s.aic = j.at("aic").get<double>();
    s.gcv = j.at("gcv").get<double>();
    s.dev_explained = j.at("dev_explained").get<double>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("fit report: ") + e.what());
  }
}

void write_partial_effect_csv(std::ostream& out, const PartialEffect& effect) {
  out << "grid,f_hat,se_lower,se_upper\n";
  for (std::size_t i = 0; i < effect.grid.size(); ++i)
    csv::write_row(out, {csv::format_double(effect.grid[i]), csv::format_double(effect.f_hat[i]),
                         csv::format_double(effect.f_hat[i] - 2.0 * effect.se[i]),
                         csv::format_double(effect.f_hat[i] + 2.0 * effect.se[i])});
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string model_label(const FitSummary& s, std::size_t index) {
  return "Model " + std::to_string(s.model_level >= 0 ? s.model_level : static_cast<int>(index));
}

struct Grid {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Grid comparison_grid(std::span<const FitSummary> fits) {
  Grid g;
  g.header.push_back("term");
  for (std::size_t i = 0; i < fits.size(); ++i) g.header.push_back(model_label(fits[i], i));

  std::vector<std::string> terms;
  std::vector<std::string> smooths;
  for (const FitSummary& f : fits) {
    for (const CoefficientRow& c : f.coefficients)
      if (std::find(terms.begin(), terms.end(), c.name) == terms.end()) terms.push_back(c.name);
    for (const SmoothRow& s : f.smooths)
      if (std::find(smooths.begin(), smooths.end(), s.name) == smooths.end()) smooths.push_back(s.name);
  }

  for (const std::string& t : terms) {
    std::vector<std::string> row{t};
    for (const FitSummary& f : fits) {
      auto it = std::find_if(f.coefficients.begin(), f.coefficients.end(),
                             [&](const CoefficientRow& c) { return c.name == t; });
      row.push_back(it == f.coefficients.end()
                        ? ""
                        : fixed(it->estimate, 3) + " (" + fixed(it->se, 3) + ")" +
                              (it->stars.empty() ? "" : " " + it->stars));
    }
    g.rows.push_back(std::move(row));
  }
  for (const std::string& name : smooths) {
    std::vector<std::string> row{name + " edf"};
    for (const FitSummary& f : fits) {
      auto it = std::find_if(f.smooths.begin(), f.smooths.end(), [&](const SmoothRow& s) { return s.name == name; });
      row.push_back(it == f.smooths.end() ? "" : fixed(it->edf, 2));
    }
    g.rows.push_back(std::move(row));
  }
  std::vector<std::string> n{"n"}, aic{"AIC"}, gcv{"GCV"}, dev{"Deviance explained"};
  for (const FitSummary& f : fits) {
    n.push_back(std::to_string(f.n));
    aic.push_back(fixed(f.aic, 1));
    gcv.push_back(fixed(f.gcv, 3));
    dev.push_back(fixed(100.0 * f.dev_explained, 2) + "%");
  }
  for (auto* r : {&n, &aic, &gcv, &dev}) g.rows.push_back(std::move(*r));
  return g;
}

}  // namespace

void write_comparison_csv(std::ostream& out, std::span<const FitSummary> fits) {
  const Grid g = comparison_grid(fits);
  csv::write_row(out, g.header);
  for (const auto& row : g.rows) csv::write_row(out, row);
}

void write_comparison_markdown(std::ostream& out, std::span<const FitSummary> fits) {
  const Grid g = comparison_grid(fits);
  auto line = [&](const std::vector<std::string>& cells) {
    out << '|';
    for (const std::string& c : cells) out << ' ' << c << " |";
    out << '\n';
  };
  line(g.header);
  out << '|';
  for (std::size_t i = 0; i < g.header.size(); ++i) out << (i == 0 ? " --- |" : " ---: |");
  out << '\n';
  for (const auto& row : g.rows) line(row);
}

}  // namespace patsim::gam
