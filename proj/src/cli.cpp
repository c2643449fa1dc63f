#include "napood/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "napood/analysis.hpp"
#include "napood/baselines.hpp"
#include "napood/combine.hpp"
#include "napood/errors.hpp"
#include "napood/manifest.hpp"
#include "napood/metrics.hpp"
#include "napood/parallel.hpp"
#include "napood/score_csv.hpp"
#include "napood/scoring.hpp"
#include "napood/synth.hpp"
#include "napood/tensor_io.hpp"
#include "napood/text.hpp"
#include "napood/tuning.hpp"

namespace napood {
namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- synth

struct SynthArgs {
  SynthConfig cfg;
  double noise_hi_ood = 0.0;
  std::string out_dir;
};

void add_synth(CLI::App& app, std::function<void()>& action, std::ostream& out) {
  auto args = std::make_shared<SynthArgs>();
  auto* cmd = app.add_subcommand("synth", "Generate a seeded synthetic fixture");
  auto& c = args->cfg;
  cmd->add_option("--out", args->out_dir, "Output directory")->required();
  cmd->add_option("--n-id", c.n_id, "Number of ID samples")->capture_default_str();
  cmd->add_option("--n-ood", c.n_ood, "Number of OOD samples")->capture_default_str();
  cmd->add_option("--channels", c.channels, "Channels C")->capture_default_str();
  cmd->add_option("--height", c.height, "Height H")->capture_default_str();
  cmd->add_option("--width", c.width, "Width W")->capture_default_str();
  cmd->add_option("--spike-mean", c.spike_mean, "Mean ID spike magnitude")->capture_default_str();
  cmd->add_option("--spike-sd", c.spike_sd, "ID spike standard deviation")->capture_default_str();
  cmd->add_option("--noise-hi-id", c.noise_hi_id, "Upper bound of ID noise")->capture_default_str();
  auto* ood = cmd->add_option("--noise-hi-ood", args->noise_hi_ood,
                              "Upper bound of OOD noise (default: mean-matched)");
  cmd->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--classes", c.k_classes, "Number of classes K")->capture_default_str();
  cmd->add_option("--attention-tokens", c.attention_tokens,
                  "Also emit cls-attention vectors of this length (0 = off)")
      ->capture_default_str();
  cmd->callback([&action, &out, args, ood] {
    action = [&out, args, ood] {
      if (ood->count() > 0) args->cfg.noise_hi_ood = args->noise_hi_ood;
      out << generate(args->cfg, args->out_dir).string() << '\n';
    };
  });
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
  std::string manifest;
  std::string method;
  std::string combine_with;
  double w = 0.5;
  std::string w_from;
  double floor = kDefaultCombineFloor;
  std::vector<std::string> layers{std::string(kSynthActivationTag)};
  std::string attention_layer{kSynthAttentionTag};
  bool exclude_self = false;
  double epsilon = 1.0;
  std::string label = "all";
  std::string calib_manifest;
  double react_percentile = kDefaultReactPercentile;
  double ash_keep = kDefaultAshKeepPercent;
  std::string ash_variant = "scale";
  double dice_sparsity = kDefaultDiceSparsity;
  std::string dice_mask = "per-class";
  std::size_t knn_k = kDefaultKnnK;
  std::size_t bank_size = kDefaultBankSize;
  std::size_t threads = 0;
  std::string out;
};

using RecordScorer = std::function<double(const SampleRecord&)>;

RecordScorer make_base_scorer(const ScoreArgs& a, const Dataset& ds) {
  const NapConfig nap_cfg{a.epsilon};
  if (a.method == "nap") {
    auto layers = a.layers;
    return [layers, nap_cfg](const SampleRecord& r) {
      std::vector<double> per_layer;
      for (const auto& tag : layers) {
        per_layer.push_back(nap_score(ActivationTensor::from(r.activation(tag)), nap_cfg));
      }
      return per_layer.size() == 1 ? per_layer.front() : combine_multilayer(per_layer);
    };
  }
  if (a.method == "former") {
    const FormerOptions opts{a.exclude_self};
    auto tag = a.attention_layer;
    return [tag, opts](const SampleRecord& r) {
      return nap_former_score(r.activation(tag).values(), opts);
    };
  }
  if (a.method == "energy") {
    return [](const SampleRecord& r) { return energy_score(r.logits); };
  }
  if (a.method == "msp") {
    return [](const SampleRecord& r) { return msp_score(r.logits); };
  }

  // Remaining methods work on pooled features through the classifier head.
  std::optional<Dataset> calib_storage;
  const Dataset* calib = &ds;
  if (!a.calib_manifest.empty()) {
    calib_storage = load_manifest(a.calib_manifest, LoadOptions{a.threads});
    calib = &*calib_storage;
  }
  const ClassifierHead* head_ptr = ds.head ? &*ds.head : (calib->head ? &*calib->head : nullptr);
  if (head_ptr == nullptr) {
    throw DataError("method '" + a.method + "' needs a classifier head in the manifest");
  }
  auto head = std::make_shared<const ClassifierHead>(*head_ptr);
  auto feature_of = [](const SampleRecord& r) -> const std::vector<double>& {
    if (!r.feature) throw DataError("sample '" + r.sample_id + "' has no pooled feature");
    return *r.feature;
  };

  if (a.method == "ash") {
    const auto variant = a.ash_variant == "prune" ? AshVariant::Prune : AshVariant::Scale;
    const double keep = a.ash_keep;
    return [head, feature_of, keep, variant](const SampleRecord& r) {
      return ash_score(feature_of(r), *head, keep, variant);
    };
  }

  const CalibrationOptions copts{a.react_percentile, a.bank_size};
  auto stats = std::make_shared<const CalibrationStats>(calibrate(*calib, *head, copts));
  if (a.method == "react") {
    return [head, stats, feature_of](const SampleRecord& r) {
      return react_score(feature_of(r), *head, *stats);
    };
  }
  if (a.method == "dice") {
    const auto masking = a.dice_mask == "global" ? DiceMasking::Global : DiceMasking::PerClass;
    auto dice = std::make_shared<const DiceHead>(*head, *stats, a.dice_sparsity, masking);
    return [dice, feature_of](const SampleRecord& r) { return dice->score(feature_of(r)); };
  }
  const std::size_t k = a.knn_k;
  return [stats, feature_of, k](const SampleRecord& r) { return knn_score(feature_of(r), *stats, k); };
}

void run_score(const ScoreArgs& a, bool w_given, std::ostream& out) {
  if (!a.combine_with.empty()) {
    if (a.combine_with == "nap" && a.method == "nap") {
      throw ArgumentError("--combine-with nap needs a base method other than nap");
    }
    if (!w_given && a.w_from.empty()) throw ArgumentError("--combine-with needs --w or --w-from");
  }

  const Dataset ds = load_manifest(a.manifest, LoadOptions{a.threads});
  auto base = make_base_scorer(a, ds);

  std::optional<CombineConfig> combine;
  RecordScorer secondary;
  if (!a.combine_with.empty()) {
    double w = a.w;
    if (!w_given) {
      const auto ref = reference_weight(a.method, a.w_from);
      if (!ref) {
        throw ArgumentError("no reference weight for method '" + a.method + "' on '" + a.w_from + "'");
      }
      w = *ref;
    }
    combine = CombineConfig{w, a.floor};
    ScoreArgs nap_args = a;
    nap_args.method = a.combine_with;
    secondary = make_base_scorer(nap_args, ds);
  }

  std::vector<const SampleRecord*> selected;
  for (const auto& r : ds.records) {
    if (a.label == "all" || to_string(r.label) == a.label) selected.push_back(&r);
  }

  std::vector<ScoredSample> scores(selected.size());
  parallel_for(selected.size(), a.threads, [&](std::size_t i) {
    const auto& r = *selected[i];
    double s = base(r);
    if (combine) s = combine_geometric(s, secondary(r), *combine);
    scores[i] = {r.sample_id, s};
  });
  write_score_csv(a.out, scores);
  out << "wrote " << scores.size() << " scores to " << a.out << '\n';
}

void add_score(CLI::App& app, std::function<void()>& action, std::ostream& out) {
  auto a = std::make_shared<ScoreArgs>();
  auto* cmd = app.add_subcommand("score", "Score every sample of a manifest");
  cmd->add_option("--manifest", a->manifest, "Dataset manifest")->required();
  cmd->add_option("--method", a->method, "Scoring method")
      ->required()
      ->check(CLI::IsMember({"nap", "energy", "msp", "react", "ash", "dice", "knn", "former"}));
  cmd->add_option("--combine-with", a->combine_with, "Fuse with a NAP score (geometric mean)")
      ->check(CLI::IsMember({"nap", "former"}));
  auto* w_opt = cmd->add_option("--w", a->w, "Weight on the base score in [0, 1]")
                    ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--w-from", a->w_from, "Use the reference weight for a benchmark")
      ->check(CLI::IsMember({"cifar10", "cifar100", "imagenet"}))
      ->excludes(w_opt);
  cmd->add_option("--floor", a->floor, "Floor for non-positive bases")->capture_default_str();
  cmd->add_option("--layer", a->layers, "Activation layer tag(s); several multiply")
      ->capture_default_str();
  cmd->add_option("--attention-layer", a->attention_layer, "cls-attention tag for 'former'")
      ->capture_default_str();
  cmd->add_flag("--exclude-self", a->exclude_self, "Drop the cls self-attention entry");
  cmd->add_option("--epsilon", a->epsilon, "NAP epsilon")->capture_default_str()->check(
      CLI::NonNegativeNumber);
  cmd->add_option("--label", a->label, "Only score samples with this label")
      ->check(CLI::IsMember({"all", "id", "ood", "pseudo_ood"}))
      ->capture_default_str();
  cmd->add_option("--calib-manifest", a->calib_manifest,
                  "ID manifest for calibration (default: ID samples of --manifest)");
  cmd->add_option("--react-percentile", a->react_percentile)->capture_default_str()->check(
      CLI::Range(0.0, 100.0));
  cmd->add_option("--ash-keep", a->ash_keep, "ASH keep percent")->capture_default_str();
  cmd->add_option("--ash-variant", a->ash_variant)
      ->check(CLI::IsMember({"prune", "scale"}))
      ->capture_default_str();
  cmd->add_option("--dice-sparsity", a->dice_sparsity)->capture_default_str();
  cmd->add_option("--dice-mask", a->dice_mask)
      ->check(CLI::IsMember({"per-class", "global"}))
      ->capture_default_str();
  cmd->add_option("--knn-k", a->knn_k)->capture_default_str();
  cmd->add_option("--bank-size", a->bank_size)->capture_default_str();
  cmd->add_option("--threads", a->threads, "Worker threads (0 = NAP_THREADS or all cores)");
  cmd->add_option("--out", a->out, "Output CSV")->required();
  cmd->callback([&action, &out, a, w_opt] {
    action = [&out, a, w_opt] { run_score(*a, w_opt->count() > 0, out); };
  });
}

// ---------------------------------------------------------------- eval

void add_eval(CLI::App& app, std::function<void()>& action, std::ostream& out) {
  struct Args {
    std::string id, ood, out, roc_csv;
    double tpr = kDefaultTprTarget;
  };
  auto a = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("eval", "AUROC and FPR at a TPR target from score CSVs");
  cmd->add_option("--id", a->id, "ID score CSV")->required();
  cmd->add_option("--ood", a->ood, "OOD score CSV")->required();
  cmd->add_option("--tpr", a->tpr, "TPR target in (0, 1]")->capture_default_str()->check(
      CLI::Range(std::nextafter(0.0, 1.0), 1.0));
  cmd->add_option("--out", a->out, "Report JSON")->required();
  cmd->add_option("--roc-csv", a->roc_csv, "Also write ROC points as CSV");
  cmd->callback([&action, &out, a] {
    action = [&out, a] {
      ScoreSet s{read_score_csv(a->id), read_score_csv(a->ood)};
      const auto report = evaluate(s, a->tpr);
      write_file_text(a->out, report_to_json(report));
      if (!a->roc_csv.empty()) write_file_text(a->roc_csv, roc_to_csv(report.roc_points));
      out << "auroc " << format_double(report.auroc, 6) << " fpr@" << format_double(a->tpr, 6)
          << " " << format_double(report.fpr95, 6) << " (n_id " << report.n_id << ", n_ood "
          << report.n_ood << ")\n";
    };
  });
}

// ---------------------------------------------------------------- tune

void add_tune(CLI::App& app, std::function<void()>& action, std::ostream& out) {
  struct Args {
    std::string id_base, id_nap, pseudo_base, pseudo_nap, out;
    std::string method = "base";
    TuneOptions opts;
  };
  auto a = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("tune", "Pick the combination weight w on pseudo-OOD scores");
  cmd->add_option("--id-base", a->id_base, "ID base-method scores")->required();
  cmd->add_option("--id-nap", a->id_nap, "ID NAP scores")->required();
  cmd->add_option("--pseudo-base", a->pseudo_base, "Pseudo-OOD base-method scores")->required();
  cmd->add_option("--pseudo-nap", a->pseudo_nap, "Pseudo-OOD NAP scores")->required();
  cmd->add_option("--out", a->out, "Result JSON")->required();
  cmd->add_option("--method", a->method, "Base method name recorded in the output")
      ->capture_default_str();
  cmd->add_option("--iters", a->opts.iters, "Golden-section iterations")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--grid-points", a->opts.grid_points, "Initial grid size")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{3}, std::numeric_limits<std::size_t>::max()));
  cmd->add_option("--floor", a->opts.floor)->capture_default_str();
  cmd->callback([&action, &out, a] {
    action = [&out, a] {
      TuneInput in{read_score_csv(a->id_base), read_score_csv(a->id_nap),
                   read_score_csv(a->pseudo_base), read_score_csv(a->pseudo_nap)};
      const auto r = tune_w(in, a->opts);
      nlohmann::ordered_json j;
      j["method"] = a->method;
      j["w"] = r.w;
      j["auroc"] = r.auroc;
      write_file_text(a->out, j.dump(2) + "\n");
      out << "w " << format_double(r.w, 6) << " auroc " << format_double(r.auroc, 6) << '\n';
    };
  });
}

// ---------------------------------------------------------------- analyze

void add_analyze(CLI::App& app, std::function<void()>& action, std::ostream& out) {
  auto* cmd = app.add_subcommand("analyze", "Export activation and score distribution data");
  cmd->require_subcommand(1);

  struct StatsArgs {
    std::string manifest, out;
    std::string layer{kSynthActivationTag};
    double min_mean = kDefaultMinChannelMean;
    std::size_t threads = 0;
  };
  auto s = std::make_shared<StatsArgs>();
  auto* stats = cmd->add_subcommand("channel-stats", "Per-channel (mean, max) rows");
  stats->add_option("--manifest", s->manifest)->required();
  stats->add_option("--layer", s->layer)->capture_default_str();
  stats->add_option("--min-mean", s->min_mean, "Drop channels with a smaller mean")
      ->capture_default_str();
  stats->add_option("--threads", s->threads);
  stats->add_option("--out", s->out, "Output CSV")->required();
  stats->callback([&action, &out, s] {
    action = [&out, s] {
      const auto ds = load_manifest(s->manifest, LoadOptions{s->threads});
      const auto rows = channel_stats(ds, s->layer, s->min_mean, s->threads);
      write_file_text(s->out, channel_stats_csv(rows));
      out << "wrote " << rows.size() << " rows to " << s->out << '\n';
    };
  });

  struct HistArgs {
    std::string scores, out;
    std::size_t bins = 50;
    double lo = 0.0;
    double hi = 0.0;
  };
  auto h = std::make_shared<HistArgs>();
  auto* hist = cmd->add_subcommand("hist", "Equal-width histogram of a score CSV");
  hist->add_option("--scores", h->scores, "Score CSV")->required();
  hist->add_option("--bins", h->bins)->capture_default_str()->check(CLI::PositiveNumber);
  auto* lo = hist->add_option("--lo", h->lo, "Range start (default: min score)");
  auto* hi = hist->add_option("--hi", h->hi, "Range end (default: max score)");
  hist->add_option("--out", h->out, "Output CSV")->required();
  hist->callback([&action, &out, h, lo, hi] {
    action = [&out, h, lo, hi] {
      const auto scores = scores_of(read_score_csv(h->scores));
      double range_lo = h->lo;
      double range_hi = h->hi;
      if (lo->count() == 0 || hi->count() == 0) {
        if (scores.empty()) throw ArgumentError("--lo and --hi are required for an empty score file");
        const auto [mn, mx] = std::minmax_element(scores.begin(), scores.end());
        if (lo->count() == 0) range_lo = *mn;
        if (hi->count() == 0) range_hi = *mx;
      }
      const auto hg = score_histogram(scores, h->bins, range_lo, range_hi);
      write_file_text(h->out, histogram_csv(hg));
      out << "below " << hg.below << " above " << hg.above << '\n';
    };
  });
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neural-activation-prior OOD scoring and evaluation", "napood"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  std::function<void()> action;
  add_synth(app, action, out);
  add_score(app, action, out);
  add_eval(app, action, out);
  add_tune(app, action, out);
  add_analyze(app, action, out);

  std::vector<std::string> storage = args.empty() ? std::vector<std::string>{"napood"} : args;
  std::vector<char*> argv;
  argv.reserve(storage.size());
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (action) action();
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace napood
