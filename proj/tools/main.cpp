#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "seldet/error.hpp"

namespace {

std::pair<std::string, std::string> split_setting(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) {
    throw seldet::Error(seldet::ErrorKind::ConfigInvalid, "expected key=value, got '" + kv + "'");
  }
  return {kv.substr(0, eq), kv.substr(eq + 1)};
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = seldet::cli;
  CLI::App app{"Sparse LDL^T, selected inversion and REML log-likelihood tools"};
  app.require_subcommand(1);

  cli::AnalyzeOptions analyze;
  auto* a = app.add_subcommand("analyze", "Symbolic analysis: nnz(L) and predicted FLOPs");
  a->add_option("matrix", analyze.matrix, "Matrix Market file")->required()->check(CLI::ExistingFile);
  a->add_option("--ordering", analyze.ordering, "natural | amd | file:<path>");
  a->add_option("--csv", analyze.csv, "Write a CSV row");

  cli::SelinvOptions selinv;
  auto* s = app.add_subcommand("selinv", "Factorize and compute the selected inverse");
  s->add_option("matrix", selinv.matrix, "Matrix Market file")->required()->check(CLI::ExistingFile);
  s->add_option("--ordering", selinv.ordering, "natural | amd | file:<path>");
  s->add_option("--out", selinv.out, "Write the selected inverse (Matrix Market)");
  s->add_option("--csv", selinv.csv, "Write a CSV row");
  s->add_flag("--verify", selinv.verify, "Compare against a dense inverse (n <= 500)");

  cli::RemlOptions reml;
  auto* r = app.add_subcommand("reml", "Restricted log-likelihood, gradient and PEV");
  r->add_option("dataset", reml.dataset, "Dataset file (tab-separated)")->required()->check(CLI::ExistingFile);
  r->add_option("--ordering", reml.ordering, "natural | amd | file:<path>");
  r->add_option("--sigma2", reml.sigma2, "Scale parameter");
  r->add_option("--gamma", reml.gamma, "One value per random factor")->delimiter(',');
  r->add_option("--phi", reml.phi, "One value per residual block")->delimiter(',');
  r->add_flag("--check-h-form", reml.check_h_form, "Compare with the dense H-form (n <= 500)");
  r->add_flag("--fd-check", reml.fd_check, "Compare the gradient with central differences");
  r->add_option("--csv", reml.csv, "Write quantities as CSV");

  cli::GenOptions gen;
  std::vector<std::string> settings;
  auto* g = app.add_subcommand("gen", "Generate a variety-trial dataset");
  g->add_option("--preset", gen.preset, "prob1 .. prob10");
  g->add_option("--config", gen.config, "key=value file")->check(CLI::ExistingFile);
  g->add_option("--set", settings, "key=value override (repeatable)");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--out", gen.out, "Dataset output (default: stdout)");
  g->add_option("--csv", gen.csv, "Write the design summary as CSV");

  cli::BenchOptions bench;
  auto* b = app.add_subcommand("bench", "Run the pipeline over a list of problems");
  b->add_option("problems", bench.problems, "prob1..prob10, .mtx files or dataset files");
  b->add_option("--orderings", bench.orderings, "Orderings to run")->delimiter(',');
  b->add_option("--seed", bench.seed, "Seed for generated problems");
  b->add_option("--repeat", bench.repeat, "Repetitions; the minimum time is reported");
  b->add_option("--csv,--out", bench.csv, "CSV output (default: stdout)");
  b->add_option("--fig-out", bench.fig_out, "Companion (nnz(L), time) CSV");

  cli::VerifyOptions verify;
  auto* v = app.add_subcommand("verify", "Run every oracle check on a matrix or dataset");
  v->add_option("input", verify.input, ".mtx matrix or dataset file")->required()->check(CLI::ExistingFile);
  v->add_option("--ordering", verify.ordering, "natural | amd | file:<path>");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*a) return cli::run_analyze(analyze, std::cout, std::cerr);
    if (*s) return cli::run_selinv(selinv, std::cout, std::cerr);
    if (*r) return cli::run_reml(reml, std::cout, std::cerr);
    if (*g) {
      for (const auto& kv : settings) gen.settings.push_back(split_setting(kv));
      return cli::run_gen(gen, std::cout, std::cerr);
    }
    if (*b) return cli::run_bench(bench, std::cout, std::cerr);
    if (*v) return cli::run_verify(verify, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitError;
  }
  return cli::kExitError;
}
