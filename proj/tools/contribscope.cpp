#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "contribscope/app.hpp"

int main(int argc, char** argv) {
  contribscope::RunConfig cfg;
  CLI::App app{"contribscope: contribution-statement classification and scientometric analyses"};
  app.set_version_flag("--version", contribscope::kToolVersion);

  std::string cmd_help = "subcommand: ";
  for (const auto& c : contribscope::subcommands()) cmd_help += c + " ";
  std::string manifest;
  app.add_option("command", cfg.command, cmd_help);
  app.add_option("--replay", manifest, "re-run the configuration recorded in a run manifest");
  std::string an_help = "analysis for 'analyze': ";
  for (const auto& a : contribscope::analyses()) an_help += a + " ";
  app.add_option("analysis", cfg.analysis, an_help);

  app.add_option("--input", cfg.input, "primary input file");
  app.add_option("--metadata", cfg.metadata, "BibTeX metadata (ingest)");
  app.add_option("--papers", cfg.papers, "ingested corpus JSONL (stats, analyze)");
  app.add_option("--model", cfg.model, "model file (predict, eval)");
  app.add_option("--split", cfg.split, "split manifest (train uses train ids, eval uses test ids)");
  app.add_option("--predictions", cfg.predictions, "external predictions JSONL (eval)");
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app.add_flag("--randomize", cfg.randomize, "draw a fresh seed (recorded in the manifest)");
  app.add_option("--venues", cfg.venues, "canonical venue allowlist for ingest")->delimiter(',');
  app.add_option("--threshold", cfg.threshold, "decision threshold")->capture_default_str();
  app.add_option("--epochs", cfg.epochs, "training epochs")->capture_default_str();
  app.add_option("--learning-rate", cfg.learning_rate, "training step size")->capture_default_str();
  app.add_option("--l2", cfg.l2, "L2 regularization strength")->capture_default_str();
  app.add_option("--dim", cfg.dim, "feature hash dimension")->capture_default_str();
  app.add_flag("--positive-weighting", cfg.positive_weighting, "weight positives by negatives/positives");
  app.add_flag("--random", cfg.random_baseline, "predict with the uniform random baseline");
  app.add_flag("--exact-match", cfg.exact_match, "also report exact-match ratio (eval)");
  app.add_option("--window", cfg.window, "rolling window in years (analyze trends)")->capture_default_str();
  app.add_option("--resamples", cfg.resamples, "bootstrap resamples (agree)")->capture_default_str();
  app.add_option("--level", cfg.level, "confidence level (agree)")->capture_default_str();
  app.add_option("--reference", cfg.reference, "reference venue (analyze converge)")->capture_default_str();
  app.add_option("--venue", cfg.venue, "venue filter (analyze citations)");
  app.add_option("--year", cfg.year, "year filter (analyze citations)");
  app.add_flag("!--no-maturity", cfg.maturity, "disable the five-year citation maturity filter");
  app.add_option("--as-of", cfg.as_of_year, "reference year for the maturity filter");
  app.add_option("--endpoint", cfg.endpoint, "remote predictor base URL (predict)");
  app.add_option("--timeout-ms", cfg.timeout_ms, "remote request timeout")->capture_default_str();
  app.add_option("--retries", cfg.retries, "remote retries")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: kind=usage code=1 message=\"" << e.what() << "\"\n";
    return 1;
  }
  if (!manifest.empty()) {
    std::ifstream in(manifest, std::ios::binary);
    try {
      cfg = contribscope::RunConfig::from_json(nlohmann::json::parse(in).at("config"));
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: kind=data code=2 message=\"cannot read manifest " << manifest << ": " << e.what() << "\"\n";
      return 2;
    }
  } else if (cfg.command.empty()) {
    std::cerr << "error: kind=usage code=1 message=\"a subcommand (or --replay) is required\"\n";
    return 1;
  }
  return contribscope::execute(cfg);
}
