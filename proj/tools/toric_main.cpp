// toric: experiments on random sparse polynomial systems. See README.md and
// docs/ for configuration examples.
#include <CLI11.hpp>

#include "toric/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"toric - mixed volumes, condition numbers, and root statistics "
               "of random sparse polynomial systems"};
  app.require_subcommand(1);

  toric::cli::RunOptions opts;
  std::uint64_t seed = 0;
  long trials = 0;
  std::string out_dir;
  int threads = 0;

  const std::vector<std::string> commands = {
      "mixed-volume", "expect-roots", "condition",  "nu-lin",     "nu-sparse",
      "check-thm1",   "check-thm3",   "check-thm5", "check-thm6", "momentum-check"};
  std::vector<CLI::App*> subs;
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config_path, "JSON run configuration")
        ->required();
    sub->add_option("--seed", seed, "override config seed");
    sub->add_option("--trials", trials, "override config trial count");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads,
                    "worker threads (results are independent of this)");
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  CLI::App* chosen = nullptr;
  for (size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) chosen = subs[i];
  if (!chosen) return toric::cli::kExitValidation;
  if (chosen->count("--seed")) opts.seed = seed;
  if (chosen->count("--trials")) opts.trials = trials;
  if (chosen->count("--out")) opts.out_dir = out_dir;
  if (chosen->count("--threads")) opts.threads = threads;
  return toric::cli::run(chosen->get_name(), opts);
}
