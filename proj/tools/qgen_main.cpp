#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qgen/pipeline.hpp"

namespace {

qgen::PipelineConfig load_config(const std::string& config_path, uint64_t* seed_override,
                                 int* workers_override, std::string* out_override) {
  qgen::PipelineConfig config = qgen::PipelineConfig::from_file(config_path);
  if (seed_override) config.seed = *seed_override;
  if (workers_override) config.workers = *workers_override;
  if (out_override) config.out_dir = *out_override;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic query generation, filtering, and evaluation pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  app.add_option("--config", config_path, "pipeline config file (JSON)")->required();
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--workers", workers, "override the worker count");
  app.add_option("--out", out, "override the output directory");

  auto* sample = app.add_subcommand("sample", "deterministically sample the corpus");
  std::string sample_out = "sample.jsonl";
  sample->add_option("--file", sample_out, "output corpus file");

  auto* generate = app.add_subcommand("generate", "run the synthetic data pipeline");

  auto* negatives = app.add_subcommand("negatives", "mine BM25 hard negatives");
  std::string neg_synthetic, neg_out = "synthetic_with_negatives.jsonl";
  negatives->add_option("--synthetic", neg_synthetic, "synthetic data file")->required();
  negatives->add_option("--file", neg_out, "output file");

  auto* stats = app.add_subcommand("stats", "print the per-stage statistics table");
  std::string stats_path;
  stats->add_option("--stats", stats_path, "stats.json from a run (default <out>/stats.json)");

  auto* index = app.add_subcommand("index", "build and persist the BM25 index");
  std::string index_out = "bm25.idx";
  index->add_option("--file", index_out, "output index file");

  auto* train = app.add_subcommand("train", "train the pointwise baseline");
  std::string train_synthetic, model_out = "model.txt", train_report = "train_report.json";
  train->add_option("--synthetic", train_synthetic, "synthetic data file")->required();
  train->add_option("--model", model_out, "output model file");
  train->add_option("--report", train_report, "training report JSON");

  auto* exp = app.add_subcommand("export", "export training data for external trainers");
  std::string export_synthetic, export_out = "train.jsonl", export_validation;
  exp->add_option("--synthetic", export_synthetic, "synthetic data file")->required();
  exp->add_option("--file", export_out, "output training file");
  exp->add_option("--validation", export_validation, "validation split file");

  auto* evaluate = app.add_subcommand("evaluate", "rank the eval pool and compute NDCG");
  std::string scorer = "bm25", run_file;
  evaluate->add_option("--scorer", scorer, "bm25 | model:<path> | oracle | random:<seed>");
  evaluate->add_option("--run", run_file, "score an existing TREC run file instead");

  auto* report = app.add_subcommand("report", "render a run report");
  std::string report_dir;
  report->add_option("--dir", report_dir, "run directory (default <out>)");

  CLI11_PARSE(app, argc, argv);

  try {
    auto config = load_config(config_path, seed ? &*seed : nullptr,
                              workers ? &*workers : nullptr, out ? &*out : nullptr);

    if (sample->parsed()) {
      auto collection = qgen::cmd_sample(config, sample_out);
      std::cout << "sampled " << collection.size() << " documents -> " << sample_out << "\n";
    } else if (generate->parsed()) {
      auto outcome = qgen::cmd_generate(config);
      std::cout << "synthetic: " << outcome.synthetic_path << "\n"
                << "audit:     " << outcome.audit_path << "\n"
                << "stats:     " << outcome.stats_path << "\n"
                << "manifest:  " << outcome.manifest_path << "\n";
      std::cout << qgen::format_stats_table(outcome.run.stages, config.label_set);
    } else if (negatives->parsed()) {
      size_t mined = qgen::cmd_negatives(config, neg_synthetic, neg_out);
      std::cout << "mined " << mined << " negatives -> " << neg_out << "\n";
    } else if (stats->parsed()) {
      if (stats_path.empty()) stats_path = config.out_dir + "/stats.json";
      std::cout << qgen::cmd_stats(stats_path);
    } else if (index->parsed()) {
      qgen::cmd_index(config, index_out);
      std::cout << "index -> " << index_out << "\n";
    } else if (train->parsed()) {
      auto train_result = qgen::cmd_train(config, train_synthetic, model_out, train_report);
      std::cout << "model -> " << model_out << " (train accuracy "
                << train_result.train_accuracy << ")\n";
    } else if (exp->parsed()) {
      qgen::cmd_export(config, export_synthetic, export_out, export_validation);
      std::cout << "training data -> " << export_out << "\n";
    } else if (evaluate->parsed()) {
      auto outcome = qgen::cmd_evaluate(config, scorer, run_file);
      std::cout << "mean NDCG@" << config.eval_k << " = " << outcome.report.mean << " ("
                << outcome.report.evaluated << " queries, " << outcome.report.zero_ideal
                << " zero-ideal)\n"
                << "report -> " << outcome.report_path << "\n";
    } else if (report->parsed()) {
      if (report_dir.empty()) report_dir = config.out_dir;
      std::cout << qgen::cmd_report(report_dir);
    }
  } catch (const qgen::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qgen::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return 3;
  } catch (const qgen::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
