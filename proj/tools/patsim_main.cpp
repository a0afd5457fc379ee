#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "patsim/error.hpp"
#include "patsim/pipeline.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInternal = 1;

}  // namespace

int main(int argc, char** argv) {
  using patsim::pipeline::Stage;

  CLI::App app{"Patent citation similarity pipeline"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::optional<std::string> workdir;
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  bool strict = false;
  bool keep_negative_lags = false;
  int model = -1;

  app.add_option("--workdir", workdir, "Directory holding every stage's artifacts");
  app.add_option("--config", config_path, "Flat key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Seed for synth and profile scoring");
  app.add_flag("--strict", strict, "Abort ingestion on the first invalid row");
  app.add_flag("--keep-negative-lags", keep_negative_lags, "Keep citations to later-granted patents");

  struct Command {
    const char* name;
    Stage stage;
    const char* help;
  };
  const Command commands[] = {
      {"synth", Stage::Synth, "Generate a synthetic corpus with mock embeddings"},
      {"ingest", Stage::Ingest, "Validate patents and citations into the corpus store"},
      {"score", Stage::Score, "Score every citation by embedding similarity"},
      {"features", Stage::Features, "Build the model covariates for every scored citation"},
      {"fit", Stage::Fit, "Fit one GAM of the model catalog"},
      {"report", Stage::Report, "Compare the fitted models side by side"},
      {"figs", Stage::Figs, "Emit figure tables and SVG plots"},
  };
  std::optional<Stage> chosen;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->callback([&chosen, stage = c.stage] { chosen = stage; });
    if (c.stage == Stage::Fit)
      sub->add_option("--model", model, "Model level")->required()->check(CLI::Range(0, 3));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    patsim::pipeline::PipelineConfig config;
    if (config_path) config = patsim::pipeline::PipelineConfig::from_file(*config_path);
    if (workdir) config.workdir = *workdir;
    if (seed) config.seed = *seed;
    if (strict) config.strict = true;
    if (keep_negative_lags) config.keep_negative_lags = true;
    if (model >= 0) config.model_level = model;

    const patsim::pipeline::StageResult result = patsim::pipeline::run_stage(*chosen, config);
    for (const std::string& notice : result.notices) std::cerr << "notice: " << notice << '\n';
    for (const std::string& artifact : result.artifacts) std::cout << (config.workdir / artifact).string() << '\n';
    return EXIT_SUCCESS;
  } catch (const patsim::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
