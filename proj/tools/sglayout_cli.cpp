#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sglayout/checkpoint.hpp"
#include "sglayout/gradcheck.hpp"
#include "sglayout/model.hpp"
#include "sglayout/parsing.hpp"
#include "sglayout/render.hpp"
#include "sglayout/stats.hpp"
#include "sglayout/synth.hpp"
#include "sglayout/trainer.hpp"

namespace {

using namespace sglayout;

// Exit codes: 0 success, 1 input/config error, 2 empty result, 3 failed
// verification.
int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

struct StatsArgs {
  std::string corpus, vocab, out;
  stats::FilterConfig cfg;
  std::string count_mode = "instances";
};

int cmd_stats(const StatsArgs& args) {
  stats::FilterConfig cfg = args.cfg;
  if (args.count_mode == "instances") {
    cfg.count_mode = stats::CountMode::instances;
  } else if (args.count_mode == "images") {
    cfg.count_mode = stats::CountMode::images;
  } else {
    std::cerr << "error: --count-mode must be instances or images\n";
    return 1;
  }
  const Vocab vocab = parse_vocab(args.vocab);
  const auto samples = parse_samples(args.corpus, vocab);
  const stats::FilterResult filtered = stats::filter_corpus(samples, cfg);
  const stats::FilterReport& rep = filtered.report;
  std::printf("kept %d of %d images (rare-category %d, rare-predicate %d, too-few %d, too-many %d, small-objects %d)\n",
              rep.kept_images, rep.input_images, rep.rejected_rare_category,
              rep.rejected_rare_predicate, rep.rejected_too_few_objects,
              rep.rejected_too_many_objects, rep.objects_dropped_small);
  if (filtered.kept.empty()) {
    std::cerr << "error: no images left after filtering\n";
    return 2;
  }
  const stats::TripletStatTable table = stats::compute_stats(filtered.kept);
  for (const std::string& w : table.warnings) std::cerr << "warning: " << w << "\n";
  stats::write_stats(table, vocab, args.out);
  std::printf("wrote %zu triplet-type entries to %s\n", table.entries.size(), args.out.c_str());
  return 0;
}

struct SynthArgs {
  std::string spec, out, vocab_out;
};

int cmd_synth(const SynthArgs& args) {
  const stats::SynthSpec spec = stats::parse_synth_spec(args.spec);
  const auto corpus = stats::synth_corpus(spec);
  write_samples(args.out, corpus, spec.vocab());
  if (!args.vocab_out.empty()) write_vocab(args.vocab_out, spec.vocab());
  std::printf("wrote %zu samples to %s\n", corpus.size(), args.out.c_str());
  return 0;
}

struct TrainArgs {
  std::string corpus, vocab, checkpoint_out, history_out;
  train::TrainConfig cfg;
  std::string scm_targets = "per-sample";
  Dims dims;
};

int cmd_train(const TrainArgs& args) {
  train::TrainConfig cfg = args.cfg;
  if (args.scm_targets == "per-sample") {
    cfg.scm_target_mode = train::ScmTargetMode::per_sample;
  } else if (args.scm_targets == "corpus-stat") {
    cfg.scm_target_mode = train::ScmTargetMode::corpus_stat;
  } else {
    std::cerr << "error: --scm-targets must be per-sample or corpus-stat\n";
    return 1;
  }
  const Vocab vocab = parse_vocab(args.vocab);
  const auto corpus = parse_samples(args.corpus, vocab);
  LayoutModel model = init_model(vocab, args.dims, cfg.seed);
  const auto history = train::train(model, corpus, cfg);
  save_checkpoint(model, vocab, args.checkpoint_out);
  if (!args.history_out.empty()) train::write_history(history, args.history_out);
  if (history.empty()) {
    std::printf("no steps taken; wrote initial checkpoint to %s\n", args.checkpoint_out.c_str());
  } else {
    const train::LossRecord& last = history.back();
    std::printf("%d steps; final l_box %.6f l_scm %.6f total %.6f; checkpoint %s\n", last.step,
                last.l_box, last.l_scm, last.total, args.checkpoint_out.c_str());
  }
  return 0;
}

struct PredictArgs {
  std::string checkpoint, graphs, out, vocab;
  std::uint64_t seed = 0;  // reserved; box regression is deterministic
};

int cmd_predict(const PredictArgs& args) {
  Checkpoint ckpt = load_checkpoint(args.checkpoint);
  if (!args.vocab.empty()) {
    const Vocab supplied = parse_vocab(args.vocab);
    if (vocab_fingerprint(supplied) != ckpt.model.vocab_hash) {
      std::cerr << "error: " << args.vocab << " does not match the checkpoint vocabulary\n";
      return 1;
    }
  }
  auto samples = parse_samples(args.graphs, ckpt.vocab, BoxPolicy::optional);
  for (LayoutSample& s : samples) s.boxes = predict_layout(ckpt.model, s.graph);
  write_samples(args.out, samples, ckpt.vocab);
  std::printf("predicted %zu layouts to %s\n", samples.size(), args.out.c_str());
  return 0;
}

struct EvalArgs {
  std::string checkpoint, corpus, out;
  std::uint64_t probe_seed = 0;
};

int cmd_eval(const EvalArgs& args) {
  Checkpoint ckpt = load_checkpoint(args.checkpoint);
  const auto corpus = parse_samples(args.corpus, ckpt.vocab);
  const stats::TripletStatTable table = stats::compute_stats(corpus);
  const train::EvalReport report =
      train::evaluate(ckpt.model, corpus, table, args.probe_seed);
  nlohmann::json doc = nlohmann::json::parse(train::eval_report_to_json(report, ckpt.vocab));
  doc["config"] = {{"checkpoint", args.checkpoint},
                   {"corpus", args.corpus},
                   {"probe_seed", args.probe_seed}};
  write_file(args.out, doc.dump(2) + "\n");
  std::printf("mean_iou %.4f scale_err %.4f dist_err %.4f probe_acc %.4f (%d samples) -> %s\n",
              report.mean_iou, report.mean_abs_scale_error, report.mean_distance_error,
              report.probe_accuracy, report.samples, args.out.c_str());
  return 0;
}

struct RenderArgs {
  std::string layout, out;
  render::RenderStyle style;
  int index = 0;
};

// Layout files carry category/predicate names inline, so rendering builds a
// throwaway vocabulary from the names it sees; colors hash the names and are
// therefore independent of that vocabulary's order.
Vocab scan_layout_vocab(const std::string& text, const std::string& origin) {
  Vocab vocab;
  std::set<std::string> cats, preds;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
      for (const auto& obj : doc.at("objects")) {
        const auto name = obj.at("category").get<std::string>();
        if (cats.insert(name).second) vocab.categories.push_back(name);
      }
      for (const auto& t : doc.at("triplets")) {
        const auto name = t.at(1).get<std::string>();
        if (preds.insert(name).second) vocab.predicates.push_back(name);
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (vocab.predicates.empty()) vocab.predicates.push_back("none");
  return vocab;
}

int cmd_render(const RenderArgs& args) {
  const std::string text = read_file(args.layout);
  const Vocab vocab = scan_layout_vocab(text, args.layout);
  const auto samples = parse_samples_text(text, vocab, BoxPolicy::required, args.layout);
  if (samples.empty()) {
    std::cerr << "error: " << args.layout << " contains no layouts\n";
    return 2;
  }
  if (args.index < 0 || args.index >= static_cast<int>(samples.size())) {
    std::cerr << "error: --index " << args.index << " out of range (file has " << samples.size()
              << " layouts)\n";
    return 1;
  }
  render::write_svg(samples[static_cast<std::size_t>(args.index)], vocab, args.style, args.out);
  std::printf("rendered layout %d of %s to %s\n", args.index, args.layout.c_str(),
              args.out.c_str());
  return 0;
}

struct GradcheckArgs {
  std::uint64_t seed = 0;
  bool corrupt = false;
};

int cmd_gradcheck(const GradcheckArgs& args) {
  ad::AnalyticHook hook;
  if (args.corrupt) {
    hook = [](std::vector<double>& g) {
      if (!g.empty()) g[0] += 0.5;
    };
  }
  auto results = ad::gradcheck_core_ops(args.seed, hook);
  auto pipeline = ad::gradcheck_pipeline(args.seed, hook);
  results.insert(results.end(), pipeline.begin(), pipeline.end());
  double worst = 0.0;
  for (const ad::CheckResult& r : results) {
    std::printf("%-36s %.3e\n", r.name.c_str(), r.max_rel_error);
    worst = std::max(worst, r.max_rel_error);
  }
  std::printf("max relative error %.3e (threshold 1e-4)\n", worst);
  if (worst >= 1e-4) {
    std::cerr << "error: gradient check failed\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scene-graph layout toolkit: corpus statistics, training, prediction, rendering"};
  app.require_subcommand(1);
  int rc = 0;

  StatsArgs stats_args;
  auto* stats_cmd = app.add_subcommand("stats", "Filter a corpus and write triplet statistics");
  stats_cmd->add_option("--corpus", stats_args.corpus, "Sample JSONL file")->required();
  stats_cmd->add_option("--vocab", stats_args.vocab, "Vocabulary JSON file")->required();
  stats_cmd->add_option("--out", stats_args.out, "Output stats JSON path")->required();
  stats_cmd->add_option("--min-object-pixels", stats_args.cfg.min_object_pixels,
                        "Minimum object side in pixels");
  stats_cmd->add_option("--min-objects", stats_args.cfg.min_objects_per_image,
                        "Minimum objects per image");
  stats_cmd->add_option("--max-objects", stats_args.cfg.max_objects_per_image,
                        "Maximum objects per image");
  stats_cmd->add_option("--min-category-count", stats_args.cfg.min_category_count,
                        "Drop images holding categories rarer than this");
  stats_cmd->add_option("--min-predicate-count", stats_args.cfg.min_predicate_count,
                        "Drop images holding predicates rarer than this");
  stats_cmd->add_option("--count-mode", stats_args.count_mode, "instances or images");
  stats_cmd->callback([&] { rc = run_guarded([&] { return cmd_stats(stats_args); }); });

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus from a spec");
  synth_cmd->add_option("--spec", synth_args.spec, "Synth spec JSON file")->required();
  synth_cmd->add_option("--out", synth_args.out, "Output sample JSONL path")->required();
  synth_cmd->add_option("--vocab-out", synth_args.vocab_out, "Also write the spec's vocabulary");
  synth_cmd->callback([&] { rc = run_guarded([&] { return cmd_synth(synth_args); }); });

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a layout model");
  train_cmd->add_option("--corpus", train_args.corpus, "Training sample JSONL file")->required();
  train_cmd->add_option("--vocab", train_args.vocab, "Vocabulary JSON file")->required();
  train_cmd->add_option("--checkpoint-out", train_args.checkpoint_out, "Checkpoint path")
      ->required();
  train_cmd->add_option("--history-out", train_args.history_out, "Loss history CSV path");
  train_cmd->add_option("--lr", train_args.cfg.lr, "Adam learning rate");
  train_cmd->add_option("--batch-size", train_args.cfg.batch_size, "Samples per step");
  train_cmd->add_option("--epochs", train_args.cfg.epochs, "Passes over the corpus");
  train_cmd->add_option("--seed", train_args.cfg.seed, "Init and shuffle seed");
  train_cmd->add_option("--lambda-box", train_args.cfg.weights.lambda_box, "Box loss weight");
  train_cmd->add_option("--lambda-scm", train_args.cfg.weights.lambda_scm,
                        "Spatial-constraint loss weight");
  train_cmd->add_option("--scm-targets", train_args.scm_targets, "per-sample or corpus-stat");
  train_cmd->add_option("--d1", train_args.dims.d1, "Category embedding width");
  train_cmd->add_option("--d2", train_args.dims.d2, "Predicate embedding width");
  train_cmd->add_option("--hidden", train_args.dims.hidden, "Hidden width");
  train_cmd->add_option("--layers", train_args.dims.layers, "Message-passing rounds");
  train_cmd->callback([&] { rc = run_guarded([&] { return cmd_train(train_args); }); });

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Predict layouts for scene graphs");
  predict_cmd->add_option("--checkpoint", predict_args.checkpoint, "Checkpoint path")->required();
  predict_cmd->add_option("--graphs", predict_args.graphs, "Scene-graph JSONL (boxes optional)")
      ->required();
  predict_cmd->add_option("--out", predict_args.out, "Output layout JSONL path")->required();
  predict_cmd->add_option("--vocab", predict_args.vocab,
                          "Cross-check this vocabulary against the checkpoint");
  predict_cmd->add_option("--seed", predict_args.seed,
                          "Reserved for noise sampling; box regression is deterministic");
  predict_cmd->callback([&] { rc = run_guarded([&] { return cmd_predict(predict_args); }); });

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a corpus");
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint path")->required();
  eval_cmd->add_option("--corpus", eval_args.corpus, "Evaluation sample JSONL file")->required();
  eval_cmd->add_option("--out", eval_args.out, "Report JSON path")->required();
  eval_cmd->add_option("--probe-seed", eval_args.probe_seed, "Relation-probe split seed");
  eval_cmd->callback([&] { rc = run_guarded([&] { return cmd_eval(eval_args); }); });

  RenderArgs render_args;
  auto* render_cmd = app.add_subcommand("render", "Render a layout to SVG");
  render_cmd->add_option("--layout", render_args.layout, "Layout JSONL file")->required();
  render_cmd->add_option("--out", render_args.out, "Output SVG path")->required();
  render_cmd->add_option("--index", render_args.index, "Which line of the layout file");
  render_cmd->add_option("--canvas-width", render_args.style.canvas_width, "Canvas width px");
  render_cmd->add_option("--canvas-height", render_args.style.canvas_height, "Canvas height px");
  render_cmd->add_option("--stroke-width", render_args.style.stroke_width, "Rect stroke width");
  render_cmd->add_option("--font-size", render_args.style.font_size, "Label font size");
  render_cmd->callback([&] { rc = run_guarded([&] { return cmd_render(render_args); }); });

  GradcheckArgs gradcheck_args;
  auto* gradcheck_cmd =
      app.add_subcommand("gradcheck", "Verify gradients against finite differences");
  gradcheck_cmd->add_option("--seed", gradcheck_args.seed, "Seed for points and weights");
  gradcheck_cmd
      ->add_flag("--corrupt-gradient", gradcheck_args.corrupt,
                 "Negative control: corrupt the analytic gradient, expect failure")
      ->group("");
  gradcheck_cmd->callback([&] { rc = run_guarded([&] { return cmd_gradcheck(gradcheck_args); }); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return rc;
}
