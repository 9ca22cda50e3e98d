#include "scenegen/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "scenegen/io.hpp"
#include "scenegen/learning.hpp"
#include "scenegen/sampler.hpp"

namespace scenegen::cli {

namespace {

namespace fs = std::filesystem;

struct LearnArgs {
  std::string corpus;
  std::string grammar;
  std::string rules;
  std::string out;
  std::string learn_trace;
  int cd_epochs = 0;
  std::uint64_t seed = 0;
};

int cmd_learn(const LearnArgs& args) {
  const auto corpus = io::load_corpus(args.corpus);
  const Grammar grammar = io::load_grammar(args.grammar);
  const GroupingRules rules = io::load_rules(args.rules);
  learning::LearnOptions opts;
  const auto stats = learning::collect_stats(corpus, grammar, rules, opts);
  LearnedModel model = learning::fit_model(stats, grammar, rules, opts);
  model.config_fingerprint = "scenegen-learn-v1";

  if (args.cd_epochs > 0) {
    learning::CDOptions cd;
    cd.epochs = args.cd_epochs;
    cd.seed = args.seed;
    sampler::SamplerConfig chain_config;
    chain_config.cache.mode = energy::HeatmapCachePolicy::Mode::Interval;
    const auto runner = [&chain_config](const SceneLayout& start,
                                        const LearnedModel& m, int proposals,
                                        RandomStream& rng) {
      return sampler::short_chain(start, m, proposals, chain_config, rng);
    };
    const auto result =
        learning::cd_learn(corpus, model, runner, cd, chain_config.energy,
                           chain_config.cache, chain_config.planner);
    model.weights = result.weights;
    const std::string trace_path =
        args.learn_trace.empty() ? args.out + ".trace.json" : args.learn_trace;
    io::write_learning_trace(trace_path, result);
    if (result.diverged) {
      std::cerr << "learn: weight learning diverged; see " << trace_path
                << "\n";
      return 1;
    }
  }
  io::save_model(args.out, model);
  std::cout << "learned model from " << corpus.size() << " scenes -> "
            << args.out << "\n";
  return 0;
}

struct SampleArgs {
  std::string model;
  std::string type;
  int iters = 20000;
  std::uint64_t seed = 0;
  std::string out;
  std::string trace;
  int chains = 1;
  double t0 = 5.0;
  bool no_anneal = false;
  std::string cache_mode = "interval";
};

fs::path chain_path(const fs::path& base, int chain, int chains) {
  if (chains <= 1) return base;
  fs::path p = base;
  const std::string stem = p.stem().string();
  const std::string ext = p.extension().string();
  p.replace_filename(stem + "." + std::to_string(chain) + ext);
  return p;
}

int cmd_sample(const SampleArgs& args) {
  const LearnedModel model = io::load_model(args.model);
  sampler::SamplerConfig config;
  config.iterations = args.iters;
  config.seed = args.seed;
  config.t0 = args.t0;
  config.annealing = !args.no_anneal;
  if (args.cache_mode == "exact")
    config.cache.mode = energy::HeatmapCachePolicy::Mode::Exact;
  else if (args.cache_mode == "off")
    config.cache.mode = energy::HeatmapCachePolicy::Mode::Disabled;
  else if (args.cache_mode == "interval")
    config.cache.mode = energy::HeatmapCachePolicy::Mode::Interval;
  else
    throw Error("unknown cache mode '" + args.cache_mode + "'");

  std::vector<std::string> errors(static_cast<std::size_t>(args.chains));
  auto run_chain = [&](int chain) {
    try {
      sampler::SamplerConfig chain_config = config;
      chain_config.seed = args.seed + static_cast<std::uint64_t>(chain);
      const auto [scene, trace] =
          sampler::synthesize(model, args.type, chain_config);
      io::export_scene(chain_path(args.out, chain, args.chains), scene);
      if (!args.trace.empty())
        io::write_trace_csv(chain_path(args.trace, chain, args.chains), trace);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(chain)] = e.what();
    }
  };

  if (args.chains == 1) {
    run_chain(0);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(args.chains));
    for (int c = 0; c < args.chains; ++c) workers.emplace_back(run_chain, c);
    for (auto& w : workers) w.join();
  }
  for (const auto& err : errors)
    if (!err.empty()) throw Error(err);
  std::cout << "sampled " << args.chains << " scene(s) of type '" << args.type
            << "' -> " << args.out << "\n";
  return 0;
}

struct RenderArgs {
  std::string scene;
  std::string model;
  std::string seg;
  std::string afford;
  double res = 0.1;
};

int cmd_render(const RenderArgs& args) {
  const SceneLayout scene = io::load_scene(args.scene);
  const LearnedModel model = io::load_model(args.model);
  if (!args.seg.empty())
    io::write_pgm(args.seg, io::rasterize_segmentation(scene, model, args.res));
  if (!args.afford.empty())
    io::write_pgm(args.afford,
                  io::rasterize_affordance(scene, model, args.res));
  return 0;
}

struct EvalArgs {
  std::string model;
  std::string scenes;
  std::string report;
};

int cmd_eval(const EvalArgs& args) {
  const LearnedModel model = io::load_model(args.model);
  const auto scenes = io::load_corpus(args.scenes);
  const auto maps =
      affordance::estimate_maps(scenes, model.affordance_params, nullptr);

  nlohmann::json report;
  for (const auto& [category, map] : maps) {
    const auto it = model.affordances.find(category);
    if (it == model.affordances.end()) continue;
    const double tv = io::tv_distance(it->second, map);
    const double h = io::hellinger(it->second, map);
    report[category] = {{"total_variation", tv}, {"hellinger", h}};
    std::printf("%-16s tv=%.4f hellinger=%.4f\n", category.c_str(), tv, h);
  }
  if (!args.report.empty()) {
    std::ofstream out(args.report, std::ios::trunc);
    if (!out) throw Error("cannot write '" + args.report + "'");
    out << report.dump(2) << "\n";
  }
  return 0;
}

struct PlanDebugArgs {
  std::string scene;
  std::string heatmap;
  std::uint64_t seed = 0;
};

int cmd_plan_debug(const PlanDebugArgs& args) {
  const SceneLayout scene = io::load_scene(args.scene);
  planner::PlannerParams params;
  RandomStream rng(args.seed);
  const auto hm = planner::activity_heatmap(scene, params, rng);
  io::write_pgm(args.heatmap, io::heatmap_to_raster(hm));
  std::cout << "entropy=" << planner::heatmap_entropy(hm)
            << (hm.empty ? " (empty)" : "") << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Indoor scene grammar learning and layout synthesis"};
  app.require_subcommand(1);

  LearnArgs learn_args;
  auto* learn = app.add_subcommand("learn", "fit a model from a corpus");
  learn->add_option("--corpus", learn_args.corpus, "corpus dir or file")
      ->required();
  learn->add_option("--grammar", learn_args.grammar, "grammar JSON")
      ->required();
  learn->add_option("--rules", learn_args.rules, "grouping rules JSON")
      ->required();
  learn->add_option("--out", learn_args.out, "output model path")->required();
  learn->add_option("--cd-epochs", learn_args.cd_epochs,
                    "contrastive divergence epochs (0 = skip)");
  learn->add_option("--learn-trace", learn_args.learn_trace,
                    "weight-learning trace path");
  learn->add_option("--seed", learn_args.seed, "learning seed");

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample", "synthesize a scene layout");
  sample->add_option("--model", sample_args.model, "model JSON")->required();
  sample->add_option("--type", sample_args.type, "scene type")->required();
  sample->add_option("--iters", sample_args.iters, "chain iterations");
  sample->add_option("--seed", sample_args.seed, "chain seed");
  sample->add_option("--out", sample_args.out, "output scene path")
      ->required();
  sample->add_option("--trace", sample_args.trace, "trace CSV path");
  sample->add_option("--chains", sample_args.chains,
                     "independent chains (suffix .k before extension)");
  sample->add_option("--t0", sample_args.t0, "initial temperature");
  sample->add_flag("--no-anneal", sample_args.no_anneal,
                   "fixed temperature instead of annealing");
  sample->add_option("--cache", sample_args.cache_mode,
                     "heatmap cache: interval|exact|off");

  RenderArgs render_args;
  auto* render = app.add_subcommand("render", "write top-view rasters");
  render->add_option("--scene", render_args.scene, "scene JSON")->required();
  render->add_option("--model", render_args.model, "model JSON")->required();
  render->add_option("--seg", render_args.seg, "segmentation PGM path");
  render->add_option("--afford", render_args.afford, "affordance PGM path");
  render->add_option("--res", render_args.res, "meters per cell");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand(
      "eval", "affordance-map distances between model and scenes");
  eval->add_option("--model", eval_args.model, "model JSON")->required();
  eval->add_option("--scenes", eval_args.scenes, "scene dir or file")
      ->required();
  eval->add_option("--report", eval_args.report, "report JSON path");

  PlanDebugArgs plan_args;
  auto* plan = app.add_subcommand("plan-debug", "trajectory heatmap of a scene");
  plan->add_option("--scene", plan_args.scene, "scene JSON")->required();
  plan->add_option("--heatmap", plan_args.heatmap, "heatmap PGM path")
      ->required();
  plan->add_option("--seed", plan_args.seed, "planner seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (learn->parsed()) return cmd_learn(learn_args);
    if (sample->parsed()) return cmd_sample(sample_args);
    if (render->parsed()) return cmd_render(render_args);
    if (eval->parsed()) return cmd_eval(eval_args);
    if (plan->parsed()) return cmd_plan_debug(plan_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace scenegen::cli
