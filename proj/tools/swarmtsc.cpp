// swarmtsc: dataset generation, training, evaluation and trajectory
// optimization from one entry point.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure.

#include "swarm/config.hpp"
#include "swarm/dataset_io.hpp"
#include "swarm/error.hpp"
#include "swarm/model_io.hpp"
#include "swarm/optimizer.hpp"
#include "swarm/parallel.hpp"
#include "swarm/sweep.hpp"
#include "swarm/training.hpp"
#include "swarm/voi.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace swarm;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Common {
  std::string out;
  bool force = false;
  unsigned threads = 0;
};

/// Refuses to clobber existing outputs unless --force was given.
class OutputDir {
public:
  OutputDir(const Common& c, std::string subcommand) : dir_(c.out), force_(c.force), sub_(std::move(subcommand)) {
    if (dir_.empty()) throw ConfigError(sub_ + ": --out is required");
    fs::create_directories(dir_);
    claim("run_manifest.json");
    start_ = std::chrono::steady_clock::now();
  }

  fs::path claim(const std::string& name) {
    const fs::path p = dir_ / name;
    if (fs::exists(p) && !force_) throw ConfigError(p.string() + " exists; pass --force to overwrite");
    return p;
  }

  std::ofstream open(const std::string& name) {
    std::ofstream f(claim(name));
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    return f;
  }

  const fs::path& path() const { return dir_; }

  void finish(nlohmann::json extra) {
    extra["subcommand"] = sub_;
    extra["tool_version"] = kVersion;
    extra["output_directory"] = dir_.string();
    extra["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ofstream f(dir_ / "run_manifest.json");
    f << extra.dump(2) << '\n';
  }

private:
  fs::path dir_;
  bool force_;
  std::string sub_;
  std::chrono::steady_clock::time_point start_;
};

void write_text(OutputDir& out, const std::string& name, const std::string& text) {
  auto f = out.open(name);
  f << text;
}

void check_fingerprint(const LabeledDataset& data, const ScalerStats& scaler, const std::string& what) {
  const auto it = data.manifest.find("scaler_fingerprint");
  if (it == data.manifest.end()) return;
  if (it->second != scaler.fingerprint()) {
    throw ConfigError(what + " was scaled for scaler " + it->second + " but the model uses " + scaler.fingerprint());
  }
}

void check_seed(std::uint64_t seed, std::uint64_t threshold, bool allowed) {
  if (seed <= threshold && !allowed) {
    throw ConfigError("engagement seed " + std::to_string(seed) + " is reserved for training (<= " +
                      std::to_string(threshold) + "); pass --allow-train-seeds to use it");
  }
}

std::string evaluation_row(const std::string& model, const std::string& data, const Evaluation& e) {
  std::ostringstream os;
  os.precision(8);
  os << model << ',' << data << ',' << e.count << ',' << e.accuracy << ',' << e.normalized_error_rate << ','
     << e.mean_loss << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

int cmd_generate(const Common& c, const std::string& config, int desk_scale) {
  const auto cfg = KeyValueConfig::load(config);
  auto spec = VoiSpec::from_config(cfg);
  if (desk_scale > 0) spec.desk_scale_factor = desk_scale;
  spec.threads = c.threads;
  OutputDir out(c, "generate");

  const auto ex = build_voi_experiment(spec);
  auto save = [&](const LabeledDataset& d, const std::string& stem) { save_dataset(d, out.claim(stem + ".swd")); };
  std::ostringstream summary;
  summary << "dataset,train,validation,test,total,steps\n";
  auto row = [&](const std::string& name, const DatasetSplit& s) {
    summary << name << ',' << s.train.size() << ',' << s.validation.size() << ',' << s.test.size() << ','
            << s.train.size() + s.validation.size() + s.test.size() << ',' << s.train.steps << '\n';
  };
  for (std::size_t i = 0; i < ex.parts.size(); ++i) {
    const auto label = ex.points[i].label();
    save(ex.parts[i].train, label + "_train");
    save(ex.parts[i].validation, label + "_validation");
    save(ex.parts[i].test, label + "_test");
    row(label, ex.parts[i]);
  }
  save(ex.combined.train, "combined_train");
  save(ex.combined.validation, "combined_validation");
  save(ex.combined.test, "combined_test");
  row("combined", ex.combined);
  save_scaler(ex.scaler, out.claim("scaler.json"));
  write_text(out, "summary.csv", summary.str());
  {
    auto f = out.open("diagnostics.txt");
    for (const auto& d : ex.report.diagnostics) f << d << '\n';
  }
  std::cout << summary.str();
  std::cout << "rejected engagements: " << ex.report.rejected_engagements << '\n';

  nlohmann::json m;
  m["config"] = config;
  m["seeds"] = {{"first", spec.first_seed},
                {"engagements_per_point", spec.effective_engagements()},
                {"split_seed", spec.split_seed},
                {"noise_seed", spec.noise_seed}};
  m["desk_scale_factor"] = spec.desk_scale_factor;
  m["scaler_fingerprint"] = ex.scaler.fingerprint();
  out.finish(m);
  return 0;
}

int cmd_combine(const Common& c, const std::vector<std::string>& inputs, const std::string& name) {
  if (inputs.empty()) throw ConfigError("combine: no inputs");
  OutputDir out(c, "combine");
  std::vector<LabeledDataset> parts;
  for (const auto& p : inputs) parts.push_back(load_dataset(p));
  const auto merged = combine(std::move(parts));
  save_dataset(merged, out.claim(name + ".swd"));
  std::cout << name << ": " << merged.size() << " instances, " << merged.steps << " steps\n";
  out.finish({{"inputs", inputs}, {"instances", merged.size()}});
  return 0;
}

int cmd_train(const Common& c, const std::string& train_path, const std::string& val_path,
              const std::string& scaler_path, const std::string& spec_name, TrainConfig tc) {
  const auto train_set = load_dataset(train_path);
  const auto val_set = load_dataset(val_path);
  const auto scaler = load_scaler(scaler_path);
  check_fingerprint(train_set, scaler, train_path);
  check_fingerprint(val_set, scaler, val_path);
  const auto spec = CnnSpec::named(spec_name, static_cast<int>(train_set.features));
  tc.threads = c.threads == 0 ? default_thread_count() : c.threads;
  tc.batch_slices = tc.threads;
  OutputDir out(c, "train");
  const auto model_path = out.claim("model.swm");

  const auto r = train(spec, apply_scaler(train_set, scaler), apply_scaler(val_set, scaler), tc);
  save_classifier(Classifier{r.model, scaler}, model_path);
  {
    auto f = out.open("history.csv");
    write_history_csv(f, r.history);
  }
  const auto& best = r.history.at(static_cast<std::size_t>(r.best_epoch - 1));
  std::cout << spec.describe() << "\nbest epoch " << r.best_epoch << " val_loss " << best.val_loss << " val_acc "
            << best.val_accuracy << '\n';
  out.finish({{"train", train_path},
              {"validation", val_path},
              {"scaler", scaler_path},
              {"spec", spec_name},
              {"seeds", {{"init", tc.seed}}},
              {"epochs", r.history.size()},
              {"best_epoch", r.best_epoch}});
  return 0;
}

Evaluation evaluate_file(const Classifier& clf, const std::string& data_path) {
  const auto data = load_dataset(data_path);
  check_fingerprint(data, clf.scaler, data_path);
  return evaluate(clf.model, apply_scaler(data, clf.scaler));
}

int cmd_evaluate(const Common& c, const std::string& model_path, const std::vector<std::string>& data) {
  const auto clf = load_classifier(model_path);
  OutputDir out(c, "evaluate");
  std::string csv = "model,dataset,count,accuracy,ner,mean_loss\n";
  std::string confusion = "dataset,true,Greedy,Greedy+,Auction,Auction+\n";
  for (const auto& d : data) {
    const auto e = evaluate_file(clf, d);
    csv += evaluation_row(model_path, d, e);
    for (std::size_t t = 0; t < 4; ++t) {
      confusion += d + ',' + std::string(to_string(kAllTactics[t]));
      for (std::size_t p = 0; p < 4; ++p) confusion += ',' + std::to_string(e.confusion[t][p]);
      confusion += '\n';
    }
  }
  write_text(out, "metrics.csv", csv);
  write_text(out, "confusion.csv", confusion);
  std::cout << csv;
  out.finish({{"model", model_path}, {"datasets", data}});
  return 0;
}

int cmd_cross_evaluate(const Common& c, const std::vector<std::string>& models, const std::vector<std::string>& data) {
  OutputDir out(c, "cross-evaluate");
  std::vector<Classifier> clfs;
  for (const auto& m : models) clfs.push_back(load_classifier(m));
  std::vector<Evaluation> grid(models.size() * data.size());
  parallel_for(grid.size(), c.threads, [&](std::size_t k) {
    grid[k] = evaluate_file(clfs[k / data.size()], data[k % data.size()]);
  });
  std::string csv = "model,dataset,count,accuracy,ner,mean_loss\n";
  std::ostringstream acc;
  std::ostringstream ner;
  acc.precision(6);
  ner.precision(6);
  acc << "model";
  ner << "model";
  for (const auto& d : data) {
    acc << ',' << fs::path(d).stem().string();
    ner << ',' << fs::path(d).stem().string();
  }
  acc << '\n';
  ner << '\n';
  for (std::size_t i = 0; i < models.size(); ++i) {
    acc << models[i];
    ner << models[i];
    for (std::size_t j = 0; j < data.size(); ++j) {
      const auto& e = grid[i * data.size() + j];
      csv += evaluation_row(models[i], data[j], e);
      acc << ',' << e.accuracy;
      ner << ',' << e.normalized_error_rate;
    }
    acc << '\n';
    ner << '\n';
  }
  write_text(out, "metrics.csv", csv);
  write_text(out, "accuracy_matrix.csv", acc.str());
  write_text(out, "ner_matrix.csv", ner.str());
  std::cout << acc.str();
  out.finish({{"models", models}, {"datasets", data}});
  return 0;
}

struct ProblemArgs {
  std::string problem;
  std::string model;
  bool allow_train_seeds = false;
  std::uint64_t reserved_threshold = 1200;
};

OptimizationProblem load_problem(const ProblemArgs& a, const Classifier& clf, unsigned threads) {
  auto p = OptimizationProblem::from_config(KeyValueConfig::load(a.problem));
  check_seed(p.engagement.seed, a.reserved_threshold, a.allow_train_seeds);
  p.classifier = &clf;
  p.solver.threads = threads;
  p.validate();
  return p;
}

std::vector<bool> parse_ramp(const std::string& s) {
  if (s == "off") return {false};
  if (s == "on") return {true};
  if (s == "both") return {false, true};
  throw ConfigError("--ramp must be off, on or both");
}

int cmd_optimize(const Common& c, const ProblemArgs& a, bool all_motions, const std::string& ramp) {
  const auto clf = load_classifier(a.model);
  auto problem = load_problem(a, clf, c.threads);
  OutputDir out(c, "optimize");

  std::vector<DefenderMotionPlan> plans;
  if (all_motions) {
    plans = candidate_plans(problem.engagement, parse_ramp(ramp));
  } else {
    plans.push_back(problem.plan);
  }
  const auto ranking = evaluate_initial_trajectories(problem, plans);

  std::ostringstream table;
  table.precision(8);
  table << "motion,ramp,initial_stp,optimized_stp,max_violation,iterations,termination\n";
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& plan : plans) {
    auto p = problem;
    p.plan = plan;
    const std::string stem = std::string(to_string(plan.motion)) + (plan.ramp_to_max ? "_ramp" : "");
    for (const auto& suffix : {".json", "_defenders.csv"}) out.claim(stem + suffix);
    OptimizationResult r;
    try {
      r = optimize(p);
    } catch (const NumericalError& e) {
      throw NumericalError(stem + ": " + e.what());
    }
    write_result_bundle(p, r, out.path(), stem);
    table << stem.substr(0, stem.find('_')) << ',' << (plan.ramp_to_max ? 1 : 0) << ',' << r.initial_stp << ','
          << r.optimized_stp << ',' << r.violations.max() << ',' << r.iterations << ',' << r.termination << '\n';
    std::printf("%-14s initial %7.2f  optimized %7.2f  (%d iterations, %s)\n", stem.c_str(), r.initial_stp,
                r.optimized_stp, r.iterations, r.termination.c_str());
    runs.push_back(stem);
  }
  write_text(out, "comparison.csv", table.str());
  {
    std::ostringstream rank;
    rank.precision(8);
    rank << "rank,motion,ramp,initial_stp,max_violation,path_length,Greedy,Greedy+,Auction,Auction+\n";
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      const auto& r = ranking[i];
      rank << i + 1 << ',' << to_string(r.motion) << ',' << (r.ramp_to_max ? 1 : 0) << ',' << r.stp << ','
           << r.max_violation << ',' << r.path_length;
      for (double v : r.stack.true_predictions()) rank << ',' << v;
      rank << '\n';
    }
    write_text(out, "initial_ranking.csv", rank.str());
  }
  out.finish({{"problem", a.problem}, {"model", a.model}, {"seeds", {problem.engagement.seed}}, {"runs", runs}});
  return 0;
}

int cmd_sweep(const Common& c, const ProblemArgs& a, std::vector<int> counts, const std::string& ramp,
              const std::vector<double>& thresholds, bool bundles) {
  const auto clf = load_classifier(a.model);
  auto problem = load_problem(a, clf, 1);
  OutputDir out(c, "sweep");
  for (const char* f : {"grid.csv", "plot.csv", "selection.json"}) out.claim(f);
  std::vector<MotionType> motions(kAllMotionTypes.begin(), kAllMotionTypes.end());
  const auto result = sweep(problem, counts, motions, parse_ramp(ramp), c.threads);
  write_text(out, "grid.csv", sweep_grid_csv(result));
  write_text(out, "plot.csv", sweep_plot_csv(result));
  write_text(out, "selection.json", selection_json(result, thresholds) + "\n");
  if (bundles) {
    for (const auto& cell : result.cells) {
      if (cell.ok()) write_result_bundle(cell.problem, *cell.result, out.path() / "cells", cell.label());
    }
  }
  for (const auto& cell : result.cells) {
    if (!cell.ok()) std::cerr << "cell failed: " << cell.error << '\n';
  }
  std::cout << sweep_plot_csv(result);
  for (double t : thresholds) {
    const auto m = min_defenders(result, t);
    if (m) {
      std::printf("STP >= %g: %d defenders (%s%s, %.2f)\n", t, m->num_defenders, std::string(to_string(m->motion)).c_str(),
                  m->ramp_to_max ? ", ramp" : "", m->stp);
    } else {
      std::printf("STP >= %g: not reached\n", t);
    }
  }
  out.finish({{"problem", a.problem}, {"model", a.model}, {"seeds", {problem.engagement.seed}}, {"cells", result.cells.size()}});
  return 0;
}

int cmd_saliency(const Common& c, const std::string& model_path, const std::string& data_path, std::size_t index) {
  const auto clf = load_classifier(model_path);
  const auto data = load_dataset(data_path);
  check_fingerprint(data, clf.scaler, data_path);
  if (index >= data.size()) throw ConfigError("saliency: index " + std::to_string(index) + " out of range");
  const auto& spec = clf.model.spec();
  if (data.steps < static_cast<std::size_t>(spec.window)) throw ConfigError("saliency: dataset shorter than window");
  OutputDir out(c, "saliency");
  const auto inst = data.instance(index);
  std::vector<double> x(inst.begin(), inst.begin() + static_cast<std::ptrdiff_t>(spec.window) * spec.features);
  apply_scaler_inplace(x, static_cast<std::size_t>(spec.features), clf.scaler);
  const int label = data.labels[index];
  const auto map = saliency_map(clf.model, x, label);
  const auto agents = aggregate_by_agent(map, spec.window, spec.features);
  {
    auto f = out.open("saliency.csv");
    f << "t,feature,value\n";
    for (int t = 0; t < spec.window; ++t) {
      for (int k = 0; k < spec.features; ++k) f << t << ',' << k << ',' << map[static_cast<std::size_t>(t * spec.features + k)] << '\n';
    }
  }
  {
    auto f = out.open("saliency_agents.csv");
    f << "t,agent,value\n";
    const int n = spec.features / 4;
    for (int t = 0; t < spec.window; ++t) {
      for (int a = 0; a < n; ++a) f << t << ',' << a << ',' << agents[static_cast<std::size_t>(t * n + a)] << '\n';
    }
  }
  out.finish({{"model", model_path}, {"dataset", data_path}, {"index", index}, {"label", label}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swarm tactic classification and defender trajectory optimization"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* s) {
    s->add_option("-o,--out", common.out, "Output directory")->required();
    s->add_flag("--force", common.force, "Overwrite existing outputs");
    s->add_option("--threads", common.threads, "Worker cap (0 = all cores)")->capture_default_str();
  };

  std::string config;
  int desk_scale = 0;
  auto* gen = app.add_subcommand("generate", "Generate VOI sub-datasets, their combination and the scaler");
  gen->add_option("-c,--config", config, "VOI config file")->required()->check(CLI::ExistingFile);
  gen->add_option("--desk-scale", desk_scale, "Divide engagements per point by this factor (overrides config)");
  add_common(gen);

  std::vector<std::string> inputs;
  std::string name = "combined";
  auto* comb = app.add_subcommand("combine", "Concatenate dataset files");
  comb->add_option("inputs", inputs, "Dataset files")->required()->check(CLI::ExistingFile);
  comb->add_option("--name", name, "Output stem")->capture_default_str();
  add_common(comb);

  std::string train_path, val_path, scaler_path, spec_name = "defender_motion";
  TrainConfig tc;
  auto* tr = app.add_subcommand("train", "Train a classifier");
  tr->add_option("--train", train_path, "Training split")->required()->check(CLI::ExistingFile);
  tr->add_option("--validation", val_path, "Validation split")->required()->check(CLI::ExistingFile);
  tr->add_option("--scaler", scaler_path, "Scaler JSON from generate")->required()->check(CLI::ExistingFile);
  tr->add_option("--spec", spec_name, "defender_number | defender_motion | measurement_noise")->capture_default_str();
  tr->add_option("--epochs", tc.max_epochs, "Maximum epochs")->capture_default_str();
  tr->add_option("--patience", tc.patience, "Early-stopping patience")->capture_default_str();
  tr->add_option("--batch", tc.batch_size, "Batch size")->capture_default_str();
  tr->add_option("--lr", tc.learning_rate, "Adam learning rate")->capture_default_str();
  tr->add_option("--seed", tc.seed, "Initialisation and shuffling seed")->capture_default_str();
  tr->add_flag("--verbose", tc.verbose, "Print every epoch");
  add_common(tr);

  std::string model_path;
  std::vector<std::string> data;
  auto* ev = app.add_subcommand("evaluate", "Accuracy, NER and confusion of one model");
  ev->add_option("--model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  ev->add_option("--data", data, "Test splits")->required()->check(CLI::ExistingFile);
  add_common(ev);

  std::vector<std::string> models;
  auto* xev = app.add_subcommand("cross-evaluate", "Every model against every dataset");
  xev->add_option("--models", models, "Model files")->required()->check(CLI::ExistingFile);
  xev->add_option("--data", data, "Test splits")->required()->check(CLI::ExistingFile);
  add_common(xev);

  ProblemArgs pa;
  bool all_motions = false;
  std::string ramp = "off";
  auto add_problem = [&](CLI::App* s) {
    s->add_option("-p,--problem", pa.problem, "Problem file")->required()->check(CLI::ExistingFile);
    s->add_option("--model", pa.model, "Model file")->required()->check(CLI::ExistingFile);
    s->add_flag("--allow-train-seeds", pa.allow_train_seeds, "Permit engagement seeds reserved for training");
    s->add_option("--reserved-seed-threshold", pa.reserved_threshold, "Seeds at or below are training seeds")
        ->capture_default_str();
    s->add_option("--ramp", ramp, "Ramp flags to run: off | on | both")
        ->check(CLI::IsMember({"off", "on", "both"}))
        ->capture_default_str();
  };
  auto* opt = app.add_subcommand("optimize", "Optimize defender trajectories for one engagement");
  add_problem(opt);
  opt->add_flag("--all-motions", all_motions, "Run every initial motion instead of the problem's");
  add_common(opt);

  int min_nd = 1, max_nd = 10;
  std::vector<double> thresholds = {100, 200, 300, 390, 400};
  bool bundles = false;
  auto* sw = app.add_subcommand("sweep", "Optimize across defender counts and initial motions");
  add_problem(sw);
  sw->add_option("--min-defenders", min_nd, "Smallest defender count")->capture_default_str();
  sw->add_option("--max-defenders", max_nd, "Largest defender count")->capture_default_str();
  sw->add_option("--thresholds", thresholds, "Required STP levels to report")
      ->delimiter(',')
      ->capture_default_str();
  sw->add_flag("--bundles", bundles, "Write a result bundle per cell");
  add_common(sw);

  std::size_t index = 0;
  std::string data_path;
  auto* sal = app.add_subcommand("saliency", "Input-gradient saliency of one instance");
  sal->add_option("--model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  sal->add_option("--data", data_path, "Dataset file")->required()->check(CLI::ExistingFile);
  sal->add_option("--index", index, "Instance index")->capture_default_str();
  add_common(sal);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_generate(common, config, desk_scale);
    if (*comb) return cmd_combine(common, inputs, name);
    if (*tr) return cmd_train(common, train_path, val_path, scaler_path, spec_name, tc);
    if (*ev) return cmd_evaluate(common, model_path, data);
    if (*xev) return cmd_cross_evaluate(common, models, data);
    if (*opt) return cmd_optimize(common, pa, all_motions, ramp);
    if (*sw) {
      if (min_nd < 1 || max_nd < min_nd) throw ConfigError("sweep: need 1 <= --min-defenders <= --max-defenders");
      std::vector<int> counts;
      for (int n = min_nd; n <= max_nd; ++n) counts.push_back(n);
      return cmd_sweep(common, pa, counts, ramp, thresholds, bundles);
    }
    if (*sal) return cmd_saliency(common, model_path, data_path, index);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
