#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "config.hpp"
#include "hygiene/error.hpp"
#include "hygiene/features.hpp"
#include "hygiene/filter.hpp"
#include "hygiene/metrics.hpp"
#include "hygiene/model.hpp"
#include "hygiene/model_selection.hpp"
#include "hygiene/signal.hpp"
#include "hygiene/synthgen.hpp"
#include "hygiene/text.hpp"
#include "hygiene/trial.hpp"

namespace hygiene::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

enum Command : unsigned {
  kSynth = 1u << 0,
  kIngest = 1u << 1,
  kFeatures = 1u << 2,
  kTrain = 1u << 3,
  kEvaluate = 1u << 4,
  kTrial = 1u << 5,
  kCompare = 1u << 6,
  kAll = 0x7f,
};

struct FlagSpec {
  const char* name;
  const char* key;
  bool is_switch;
  unsigned commands;
  const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"--input", "input", false, kAll & ~kSynth, "dataset or feature directory"},
    {"--out", "out", false, kAll, "output directory"},
    {"--seed", "seed", false, kAll & ~kIngest & ~kFeatures & ~kEvaluate, "base seed"},
    {"--k", "k", false, kTrain | kTrial | kCompare, "cross-validation folds"},
    {"--ratio", "ratio", false, kTrial, "train share of the stratified split"},
    {"--model", "model", false, kTrain | kTrial, "dt|rf|nb|lr|svm|nn"},
    {"--band", "band", false, kFeatures | kTrain | kEvaluate | kTrial | kCompare, "band-pass edges lo,hi in Hz"},
    {"--select-features", "select_features", true, kTrain | kCompare, "pick the best 3 of 10 features by CV"},
    {"--budget", "budget", false, kTrain | kTrial | kCompare, "hyperparameter search iterations"},
    {"--cv-all", "cv_all", true, kTrial, "run selection/tuning CV over every pair event"},
    {"--n-per-class", "synth.n_per_class", false, kSynth, "events per class"},
    {"--separability", "synth.separability", false, kSynth, "0 = identical classes, 1 = default signatures"},
    {"--pair", "pair", false, kTrain | kTrial, "two classes, e.g. KS,BF (trial also takes 'all')"},
    {"--attempts", "attempts", false, kTrial, "trial repetitions"},
    {"--model-path", "model_path", false, kTrain | kEvaluate, "model file to write or read"},
    {"--labels", "labels", false, kTrain | kEvaluate | kCompare | kTrial, "labels file (one class code per line)"},
    {"--values", "values", false, kTrain | kEvaluate | kCompare | kTrial, "values file (ten reals per line)"},
};

struct Invocation {
  std::string command;
  std::string config_file;
  bool show_config = false;
  std::map<std::string, std::string> flag_values;  // config key -> raw value
  std::map<std::string, bool> switches;
};

// --- output helpers --------------------------------------------------------

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::FileMissing, "cannot write " + path.string());
  out << content;
}

std::string header(const std::string& command, const PipelineConfig& cfg, const char* comment = "#") {
  std::string s = std::string(comment) + " hygiene " + command + "\n";
  s += std::string(comment) + " config:\n";
  s += config_text(cfg, std::string(comment) + "   ");
  return s;
}

ordered_json config_json(const PipelineConfig& cfg) {
  ordered_json j = ordered_json::object();
  for (const auto& [key, value] : cfg.entries()) j[key] = value;
  return j;
}

std::size_t display_width(const std::string& s) {
  std::size_t n = 0;
  for (const unsigned char c : s) n += (c & 0xC0) != 0x80 ? 1 : 0;
  return n;
}

std::string pad(const std::string& s, std::size_t width) {
  const auto w = display_width(s);
  return s + std::string(width > w ? width - w : 0, ' ');
}

std::string features_list(std::span<const int> features) {
  std::string s = "[";
  for (std::size_t i = 0; i < features.size(); ++i) s += (i ? ", " : "") + std::to_string(features[i]);
  return s + "]";
}

ordered_json confusion_json(const ConfusionMatrix& cm) {
  ordered_json rows = ordered_json::array();
  for (std::size_t t = 0; t < cm.num_classes(); ++t) {
    ordered_json row = ordered_json::array();
    for (std::size_t p = 0; p < cm.num_classes(); ++p) row.push_back(cm.at(t, p));
    rows.push_back(row);
  }
  return rows;
}

ordered_json report_json(const EvaluationReport& r) {
  return {{"accuracy", r.accuracy},
          {"recall_macro", r.recall_macro},
          {"precision_macro", r.precision_macro},
          {"misclassified", r.misclassified},
          {"total", r.confusion.total()},
          {"confusion", confusion_json(r.confusion)}};
}

// --- data loading ----------------------------------------------------------

std::vector<HygieneClass> parse_pair(const std::string& pair) {
  const auto parts = text::split(pair, ',');
  if (parts.size() != 2) throw Error(ErrorCode::InvalidConfig, "pair must name two classes, got '" + pair + "'");
  const auto a = class_from_name(parts[0]);
  const auto b = class_from_name(parts[1]);
  if (a == b) throw Error(ErrorCode::InvalidConfig, "pair must name two different classes");
  return {std::min(a, b), std::max(a, b)};
}

FeatureMatrix restrict_to(const FeatureMatrix& fm, std::span<const HygieneClass> classes) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fm.size(); ++i) {
    if (std::find(classes.begin(), classes.end(), fm.labels[i]) != classes.end()) rows.push_back(i);
  }
  return fm.subset(rows);
}

std::vector<EventRecording> load_dataset(const PipelineConfig& cfg) {
  const fs::path dir(cfg.input);
  const auto log = load_experiment_log(dir / "experiment_log.csv");
  auto recs = load_recording_set(dir / "recordings", log);
  std::stable_sort(recs.begin(), recs.end(), [](const EventRecording& a, const EventRecording& b) {
    const int la = a.label() ? class_code(*a.label()) : 99;
    const int lb = b.label() ? class_code(*b.label()) : 99;
    return la < lb;
  });
  return recs;
}

FeatureMatrix features_from_dataset(const PipelineConfig& cfg) {
  std::vector<EventRecording> labelled;
  for (const auto& rec : load_dataset(cfg)) {
    if (rec.label()) labelled.push_back(bandpass_filter(rec, cfg.band, cfg.filter_order));
  }
  if (labelled.empty()) {
    throw ParseError(ErrorCode::EmptyData, cfg.input, 0, "no logged recordings to extract features from");
  }
  return extract_feature_matrix(labelled);
}

FeatureMatrix load_features(const PipelineConfig& cfg) {
  if (!cfg.labels.empty() || !cfg.values.empty()) {
    if (cfg.labels.empty() || cfg.values.empty()) {
      throw Error(ErrorCode::InvalidConfig, "--labels and --values must be given together");
    }
    return read_feature_files(cfg.labels, cfg.values);
  }
  const fs::path dir(cfg.input);
  if (fs::exists(dir / "labels.csv") && fs::exists(dir / "values.csv")) {
    return read_feature_files(dir / "labels.csv", dir / "values.csv");
  }
  if (!fs::exists(dir)) throw ParseError(ErrorCode::FileMissing, cfg.input, 0, "input not found");
  return features_from_dataset(cfg);
}

// --- subcommands -------------------------------------------------------------

int cmd_synth(const PipelineConfig& cfg, std::ostream& out) {
  GeneratorConfig g = cfg.synth;
  g.seed = cfg.seed;
  const auto data = generate_dataset(g);
  write_dataset(data, g, cfg.out);
  out << "wrote " << data.recordings.size() << " recordings and " << data.log.size() << " log rows to " << cfg.out
      << "\n";
  return kExitOk;
}

int cmd_ingest(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  const fs::path dir(cfg.input);
  const auto log = load_experiment_log(dir / "experiment_log.csv");
  const auto recs = load_recording_set(dir / "recordings", log);
  const auto report = validate_against_log(recs, log);

  std::string txt = header("ingest", cfg);
  txt += "recordings: " + std::to_string(recs.size()) + "\n";
  txt += "log entries: " + std::to_string(log.size()) + "\n";
  txt += "matched: " + std::to_string(report.matched) + "\n";
  txt += "duration mismatches: " + std::to_string(report.mismatched) + "\n";
  txt += "missing recordings: " + std::to_string(report.missing) + "\n";
  txt += "unlogged recordings: " + std::to_string(report.unlogged.size()) + "\n";
  ordered_json findings = ordered_json::array();
  for (const auto& f : report.findings) {
    ordered_json row{{"event_id", f.event_id},
                     {"status", std::string(to_string(f.status))},
                     {"logged_duration_s", f.logged_duration_s}};
    row["recorded_duration_s"] = f.recorded_duration_s ? ordered_json(*f.recorded_duration_s) : ordered_json(nullptr);
    findings.push_back(row);
    if (f.status != MatchStatus::Matched) txt += "  " + f.event_id + ": " + std::string(to_string(f.status)) + "\n";
  }
  for (const auto& id : report.unlogged) txt += "  " + id + ": unlogged\n";
  const ordered_json j{{"command", "ingest"},
                       {"config", config_json(cfg)},
                       {"recordings", recs.size()},
                       {"matched", report.matched},
                       {"mismatched", report.mismatched},
                       {"missing", report.missing},
                       {"unlogged", report.unlogged},
                       {"findings", findings}};
  const fs::path dst(cfg.out);
  write_file(dst / "ingest.txt", txt);
  write_file(dst / "ingest.json", j.dump(2) + "\n");
  out << report.matched << " of " << log.size() << " log entries matched; report in " << dst.string() << "\n";
  if (report.mismatched + report.missing > 0) {
    for (const auto& f : report.findings) {
      if (f.status != MatchStatus::Matched) {
        err << "error: " << (dir / "experiment_log.csv").string() << ": event " << f.event_id << " "
            << to_string(f.status) << "\n";
        break;
      }
    }
    return kExitData;
  }
  return kExitOk;
}

int cmd_features(const PipelineConfig& cfg, std::ostream& out) {
  const auto fm = features_from_dataset(cfg);
  const fs::path dst(cfg.out);
  fs::create_directories(dst);
  write_feature_files(fm, dst / "labels.csv", dst / "values.csv");
  write_file(dst / "features_config.txt", header("features", cfg));
  out << "wrote " << fm.size() << " feature rows to " << (dst / "labels.csv").string() << " and "
      << (dst / "values.csv").string() << "\n";
  return kExitOk;
}

int cmd_train(const PipelineConfig& cfg, std::ostream& out) {
  auto fm = load_features(cfg);
  if (cfg.pair != "all") fm = restrict_to(fm, parse_pair(cfg.pair));
  CvOptions opts;
  opts.select_features = cfg.select_features;
  opts.inner_k = cfg.k;
  opts.tune = cfg.tune;
  opts.budget = cfg.budget;
  auto fit = fit_pipeline(cfg.spec, fm.to_matrix(), fm.label_codes(), opts, cfg.seed);
  fit.pipeline.metadata = cfg.entries();
  if (fit.tuning) {
    fit.pipeline.metadata.emplace_back("tuned.c", text::format_real(fit.tuning->c));
    fit.pipeline.metadata.emplace_back("tuned.gamma", text::format_real(fit.tuning->gamma));
  }
  const fs::path path = cfg.model_path.empty() ? fs::path(cfg.out) / "model.json" : fs::path(cfg.model_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_pipeline(fit.pipeline, path);
  out << "trained " << family_label(cfg.spec.family) << " on " << fm.size() << " rows, features "
      << features_list(fit.pipeline.features);
  if (fit.tuning) {
    out << ", C " << text::format_real(fit.tuning->c) << ", gamma " << text::format_real(fit.tuning->gamma);
  }
  out << "; model in " << path.string() << "\n";
  return kExitOk;
}

int cmd_evaluate(const PipelineConfig& cfg, std::ostream& out) {
  const auto fm_all = load_features(cfg);
  const fs::path model_path = cfg.model_path.empty() ? fs::path(cfg.out) / "model.json" : fs::path(cfg.model_path);
  const auto pipeline = load_pipeline(model_path);

  std::vector<HygieneClass> classes;
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, BinaryModel>) {
          classes = {class_from_code(c.negative), class_from_code(c.positive)};
        } else {
          for (const int code : c.classes) classes.push_back(class_from_code(code));
        }
      },
      pipeline.classifier);
  const auto fm = restrict_to(fm_all, classes);
  if (fm.size() == 0) throw Error(ErrorCode::EmptyData, "no rows of the model's classes to evaluate");
  const auto pred = pipeline.predict(fm.to_matrix());
  const auto report = evaluate(fm.label_codes(), pred);

  std::string txt = header("evaluate", cfg);
  txt += "model: " + model_path.string() + "\n";
  txt += "family: " + std::string(family_label(family_of(pipeline.classifier))) + "\n";
  txt += "features: " + features_list(pipeline.features) + "\n";
  txt += "events: " + std::to_string(report.confusion.total()) + "\n\n";
  txt += "confusion (rows true, columns predicted):\n" + confusion_text(report.confusion) + "\n";
  txt += "accuracy: " + format_percent(report.accuracy) + "\n";
  txt += "recall (macro): " + format_percent(report.recall_macro) + "\n";
  txt += "precision (macro): " + format_percent(report.precision_macro) + "\n";
  txt += "misclassified: " + std::to_string(report.misclassified) + "\n";
  ordered_json j{{"command", "evaluate"}, {"config", config_json(cfg)}, {"model", model_path.string()}};
  j["features"] = pipeline.features;
  j["report"] = report_json(report);
  const fs::path dst(cfg.out);
  write_file(dst / "evaluation.txt", txt);
  write_file(dst / "evaluation.json", j.dump(2) + "\n");
  out << "accuracy " << format_percent(report.accuracy) << " on " << report.confusion.total() << " events ("
      << report.misclassified << " misclassified); report in " << dst.string() << "\n";
  return kExitOk;
}

int cmd_trial(const PipelineConfig& cfg, std::ostream& out) {
  const auto fm = load_features(cfg);
  std::vector<std::vector<HygieneClass>> pairs;
  if (cfg.pair == "all") {
    pairs = {{HygieneClass::KitchenSink, HygieneClass::BathroomFaucet},
             {HygieneClass::BathroomFaucet, HygieneClass::ToiletFlushing},
             {HygieneClass::KitchenSink, HygieneClass::ToiletFlushing}};
  } else {
    pairs = {parse_pair(cfg.pair)};
  }
  TrialOptions opts;
  opts.attempts = cfg.attempts;
  opts.ratio = cfg.ratio;
  opts.k = cfg.k;
  opts.tune = cfg.tune;
  opts.budget = cfg.budget;
  opts.cv_all = cfg.cv_all;
  const fs::path dst(cfg.out);

  for (const auto& pair : pairs) {
    const auto sub = restrict_to(fm, pair);
    const auto report = ten_run_trial(sub.to_matrix(), sub.label_codes(), cfg.spec, cfg.seed, opts);
    const std::string stem =
        "trial_" + std::string(class_abbrev(pair[0])) + "_" + std::string(class_abbrev(pair[1]));

    write_file(dst / (stem + ".csv"), header("trial", cfg) + trial_csv(report));
    write_file(dst / (stem + ".txt"), header("trial", cfg) + trial_text(report));

    std::string trace = header("trial", cfg) + "attempt,iteration,c,gamma,loss,best_so_far\n";
    ordered_json attempts = ordered_json::array();
    for (const auto& a : report.attempts) {
      ordered_json steps = ordered_json::array();
      for (const auto& s : a.trace) {
        trace += std::to_string(a.attempt) + "," + std::to_string(s.iteration) + "," + text::format_real(s.c) + "," +
                 text::format_real(s.gamma) + "," + text::format_real(s.loss) + "," +
                 text::format_real(s.best_so_far) + "\n";
        steps.push_back({{"iteration", s.iteration},
                         {"c", s.c},
                         {"gamma", s.gamma},
                         {"loss", s.loss},
                         {"best_so_far", s.best_so_far}});
      }
      ordered_json counts = ordered_json::object();
      for (const auto& [code, n] : a.test_counts) counts[std::string(class_abbrev(class_from_code(code)))] = n;
      attempts.push_back({{"attempt", a.attempt},
                          {"features", a.features},
                          {"accuracy", a.accuracy},
                          {"test_counts", counts},
                          {"misclassified", a.misclassified},
                          {"test_size", a.test_size},
                          {"c", a.c},
                          {"gamma", a.gamma},
                          {"confusion", confusion_json(a.confusion)},
                          {"trace", steps}});
    }
    write_file(dst / (stem + "_trace.csv"), trace);
    const ordered_json j{{"command", "trial"},
                         {"config", config_json(cfg)},
                         {"pair", {class_abbrev(pair[0]), class_abbrev(pair[1])}},
                         {"overall_accuracy", report.overall_accuracy},
                         {"pooled_confusion", confusion_json(report.pooled)},
                         {"attempts", attempts}};
    write_file(dst / (stem + ".json"), j.dump(2) + "\n");
    out << class_abbrev(pair[0]) << " vs " << class_abbrev(pair[1]) << ": overall accuracy "
        << format_percent(report.overall_accuracy) << " over " << report.attempts.size() << " attempts\n";
  }
  return kExitOk;
}

int cmd_compare(const PipelineConfig& cfg, std::ostream& out) {
  const auto fm = load_features(cfg);
  const auto x = fm.to_matrix();
  const auto y = fm.label_codes();
  const auto plan = stratified_kfold(y, cfg.k, cfg.seed);

  std::string table = pad("Classifiers", 13) + pad("Accuracy", 14) + pad("Recall", 14) + "Precision\n";
  std::string folds_csv = header("compare", cfg) + "model,fold,accuracy,recall,precision\n";
  ordered_json rows = ordered_json::array();
  for (const auto family : kAllFamilies) {
    ModelSpec spec = cfg.spec;
    spec.family = family;
    CvOptions opts;
    opts.select_features = cfg.select_features;
    opts.inner_k = cfg.k;
    opts.tune = cfg.tune;
    opts.budget = cfg.budget;
    const auto reports = cross_validate(spec, x, y, plan, opts, cfg.seed);
    const auto summary = aggregate_folds(reports);
    const std::string label(family_label(family));
    table += pad(label, 13) + pad(format_mean_std(summary.accuracy), 14) + pad(format_mean_std(summary.recall), 14) +
             format_mean_std(summary.precision) + "\n";
    ordered_json folds = ordered_json::array();
    for (std::size_t f = 0; f < reports.size(); ++f) {
      folds_csv += label + "," + std::to_string(f + 1) + "," + text::format_real(reports[f].accuracy) + "," +
                   text::format_real(reports[f].recall_macro) + "," + text::format_real(reports[f].precision_macro) +
                   "\n";
      folds.push_back(report_json(reports[f]));
    }
    rows.push_back({{"model", label},
                    {"accuracy", {{"mean", summary.accuracy.mean}, {"std", summary.accuracy.std}}},
                    {"recall", {{"mean", summary.recall.mean}, {"std", summary.recall.std}}},
                    {"precision", {{"mean", summary.precision.mean}, {"std", summary.precision.std}}},
                    {"folds", folds}});
  }
  const fs::path dst(cfg.out);
  write_file(dst / "compare.txt", header("compare", cfg) + "\n" + table);
  write_file(dst / "compare_folds.csv", folds_csv);
  const ordered_json j{{"command", "compare"},
                       {"config", config_json(cfg)},
                       {"rows", fm.size()},
                       {"fold_plan", ordered_json::parse(plan.to_json())},
                       {"results", rows}};
  write_file(dst / "compare.json", j.dump(2) + "\n");
  out << table;
  return kExitOk;
}

int dispatch(const Invocation& inv, const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  if (inv.command == "synth") return cmd_synth(cfg, out);
  if (inv.command == "ingest") return cmd_ingest(cfg, out, err);
  if (inv.command == "features") return cmd_features(cfg, out);
  if (inv.command == "train") return cmd_train(cfg, out);
  if (inv.command == "evaluate") return cmd_evaluate(cfg, out);
  if (inv.command == "trial") return cmd_trial(cfg, out);
  return cmd_compare(cfg, out);
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hygiene-event vibration classification pipeline", "hygiene"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  Invocation inv;
  struct Sub {
    const char* name;
    Command bit;
    const char* help;
  };
  const Sub subs[] = {
      {"synth", kSynth, "Generate a synthetic labelled dataset"},
      {"ingest", kIngest, "Validate recordings against the experiment log"},
      {"features", kFeatures, "Filter recordings and write the labels/values files"},
      {"train", kTrain, "Train a classifier and save it"},
      {"evaluate", kEvaluate, "Score a saved model: confusion matrix and metrics"},
      {"trial", kTrial, "Repeated pairwise split/select/tune/evaluate trial"},
      {"compare", kCompare, "Cross-validate all six classifier families"},
  };
  // CLI11 needs stable storage for every option target
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, std::map<std::string, bool>> raw_switches;
  std::map<std::string, std::string> config_files;
  std::map<std::string, bool> show;

  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_files[s.name], "flat key = value config file");
    sub->add_flag("--show-config", show[s.name], "print the resolved configuration and exit");
    for (const auto& f : kFlags) {
      if ((f.commands & s.bit) == 0) continue;
      if (f.is_switch) {
        sub->add_flag(f.name, raw_switches[s.name][f.key], f.help);
      } else {
        sub->add_option(f.name, raw[s.name][f.key], f.help);
      }
    }
  }

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  inv.command = chosen->get_name();
  PipelineConfig cfg;
  try {
    const auto& cf = config_files[inv.command];
    if (!cf.empty()) apply_config_file(cfg, cf);
    for (const auto& f : kFlags) {
      auto* opt = chosen->get_option_no_throw(f.name);
      if (opt == nullptr || opt->count() == 0) continue;
      cfg.set(f.key, f.is_switch ? "true" : raw[inv.command][f.key]);
    }
  } catch (const Error& e) {
    err << "usage error: " << e.what() << "\n\n" << chosen->help();
    return kExitUsage;
  }
  if (cfg.out.empty()) cfg.out = inv.command == "synth" ? "hygiene_data" : "hygiene_out";

  if (show[inv.command]) {
    out << config_text(cfg);
    return kExitOk;
  }

  try {
    return dispatch(inv, cfg, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidConfig ? kExitUsage : kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace hygiene::cli
