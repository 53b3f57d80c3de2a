#include <cstdio>
#include <exception>
#include <string>

#include "ideabench/errors.hpp"
#include "ideabench/pipeline.hpp"
#include "ideabench/version.hpp"

#include <CLI11.hpp>

namespace {

struct Cli {
  std::string config_path;
  std::string out_dir;
  std::string seed;
  std::string provider;
};

ideabench::pipeline::RunConfig load_with_overrides(const Cli& cli) {
  ideabench::pipeline::RunConfig config = ideabench::pipeline::load_config(cli.config_path);
  // CLI flags take precedence over config file keys.
  if (!cli.out_dir.empty()) ideabench::pipeline::apply_override(config, "out", cli.out_dir);
  if (!cli.seed.empty()) ideabench::pipeline::apply_override(config, "seed", cli.seed);
  if (!cli.provider.empty()) {
    ideabench::pipeline::apply_override(config, "provider", cli.provider);
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ideabench: generate design-solution sets and evaluate them against a human "
               "baseline"};
  app.set_version_flag("--version", std::string(ideabench::kVersion));
  app.require_subcommand(1);

  Cli cli;
  app.add_option("--config", cli.config_path, "key = value run configuration")->required();
  app.add_option("--out", cli.out_dir, "output directory (overrides config)");
  app.add_option("--seed", cli.seed, "run seed (overrides config)");
  app.add_option("--provider", cli.provider, "embedding provider: stub, file, or http");

  CLI::App* prompts = app.add_subcommand("prompts", "prompt construction");
  prompts->require_subcommand(1);
  CLI::App* prompts_build =
      prompts->add_subcommand("build", "render base/zero-shot/few-shot prompts");
  CLI::App* generate = app.add_subcommand("generate", "request completions for built prompts");
  CLI::App* parse = app.add_subcommand("parse", "split completions into numbered solutions");
  CLI::App* embed = app.add_subcommand("embed", "embed human and generated solution sets");
  CLI::App* metrics = app.add_subcommand("metrics", "similarity and novelty metrics");
  CLI::App* stats = app.add_subcommand("stats", "rating agreement and ANOVA statistics");
  CLI::App* report = app.add_subcommand("report", "render tables, chart, and report.md");
  CLI::App* run_all = app.add_subcommand("run-all", "run every stage in order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    // CLI11's own exit codes collapse onto ours: usage problems are 2.
    return code == 0 ? 0 : 2;
  }

  try {
    ideabench::pipeline::RunConfig config = load_with_overrides(cli);
    if (prompts_build->parsed()) {
      ideabench::pipeline::cmd_prompts(config);
    } else if (generate->parsed()) {
      ideabench::pipeline::cmd_generate(config);
    } else if (parse->parsed()) {
      ideabench::pipeline::cmd_parse(config);
    } else if (embed->parsed()) {
      ideabench::pipeline::cmd_embed(config);
    } else if (metrics->parsed()) {
      ideabench::pipeline::cmd_metrics(config);
    } else if (stats->parsed()) {
      ideabench::pipeline::cmd_stats(config);
    } else if (report->parsed()) {
      ideabench::pipeline::cmd_report(config);
    } else if (run_all->parsed()) {
      ideabench::pipeline::cmd_run_all(config);
    }
  } catch (const ideabench::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
