#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <fstream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <system_error>

#include <CLI11.hpp>
#include <json.hpp>

#include "lepl/data.hpp"
#include "lepl/error.hpp"
#include "lepl/label_enhancement.hpp"
#include "lepl/label_graph.hpp"
#include "lepl/metrics.hpp"
#include "lepl/pipeline.hpp"
#include "lepl/pseudo_labeling.hpp"
#include "lepl/theory.hpp"
#include "lepl/trainer.hpp"

namespace lepl::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
std::string num(T v) {
  return std::to_string(v);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// One summary line: "<name> ok k=v k=v".
class Summary {
 public:
  explicit Summary(std::string name) : line_(std::move(name) + " ok") {}
  template <class T>
  Summary& add(const std::string& key, const T& value) {
    line_ += ' ' + key + '=' + value_text(value);
    return *this;
  }
  const std::string& str() const { return line_; }

 private:
  static std::string value_text(const std::string& v) { return v; }
  static std::string value_text(const char* v) { return v; }
  static std::string value_text(const fs::path& v) { return v.string(); }
  static std::string value_text(bool v) { return v ? "true" : "false"; }
  template <class T>
  static std::string value_text(const T& v) {
    return num(v);
  }
  std::string line_;
};

template <class T>
CLI::Option* opt(CLI::App* app, const std::string& name, T& var, const std::string& desc) {
  return app->add_option(name, var, desc)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)
      ->capture_default_str();
}

CLI::Option* in_file(CLI::App* app, const std::string& name, fs::path& var,
                     const std::string& desc) {
  return opt(app, name, var, desc)->required()->check(CLI::ExistingFile);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  f.flush();
  if (!f) {
    throw IoError("cannot write " + path.string());
  }
}

// Dataset file names shared by `synth` (writer) and `pipeline --data-dir`.
struct SplitFiles {
  fs::path train_features, train_labels, train_truth, val_features, val_labels, test_features,
      test_labels;
  static SplitFiles in(const fs::path& dir) {
    return {dir / "train_features.txt", dir / "train_partial.txt", dir / "train_truth.txt",
            dir / "val_features.txt",   dir / "val_labels.txt",    dir / "test_features.txt",
            dir / "test_labels.txt"};
  }
};

struct SynthFlags {
  SynthConfig cfg;
  void add(CLI::App* app) {
    opt(app, "--n-train", cfg.n_train, "training instances");
    opt(app, "--n-val", cfg.n_val, "validation instances");
    opt(app, "--n-test", cfg.n_test, "test instances");
    opt(app, "--classes", cfg.classes, "number of classes C");
    opt(app, "--dim", cfg.dim, "feature dimension d");
    opt(app, "--max-active", cfg.max_active, "largest number of true labels per instance");
    opt(app, "--noise-sigma", cfg.noise_sigma, "feature noise standard deviation");
    opt(app, "--affinity", cfg.affinity, "chance of drawing co-occurring classes together");
  }
};

struct LeFlags {
  LeConfig cfg;
  double init_bg = 0.0;
  CLI::Option* init_bg_opt = nullptr;
  void add(CLI::App* app) {
    opt(app, "--tau", cfg.tau, "contrastive temperature");
    opt(app, "--k", cfg.k, "neighbours per instance");
    opt(app, "--steps", cfg.steps, "gradient steps");
    opt(app, "--le-lr", cfg.lr, "label enhancement step size");
    init_bg_opt = opt(app, "--init-bg", init_bg, "initial value of unobserved entries (default 1/C)");
  }
  LeConfig get() const {
    LeConfig c = cfg;
    if (init_bg_opt->count() > 0) {
      c.init_bg = init_bg;
    }
    return c;
  }
};

struct TrainFlags {
  TrainConfig cfg;
  fs::path embeddings;
  void add(CLI::App* app, bool with_components) {
    opt(app, "--epochs", cfg.epochs, "training epochs");
    opt(app, "--lr", cfg.lr, "training step size");
    opt(app, "--freeze-embeddings", cfg.freeze_embeddings, "keep label embeddings fixed");
    opt(app, "--embedding-dim", cfg.embedding_dim, "width of the random label embeddings");
    opt(app, "--hidden-dim", cfg.hidden_dim, "hidden GCN width (0 = embedding dim)");
    opt(app, "--embeddings", embeddings, "label embedding file")->check(CLI::ExistingFile);
    opt(app, "--gcn", cfg.ablation.gcn, "generate classifiers with the label GCN");
    if (with_components) {
      opt(app, "--enhancement", cfg.ablation.enhancement, "run label enhancement");
      opt(app, "--prior-pseudo", cfg.ablation.prior_pseudo, "use class-prior pseudo-labels");
    }
  }
  std::optional<LabelEmbeddings> loaded_embeddings() const {
    if (embeddings.empty()) {
      return std::nullopt;
    }
    return load_embeddings(embeddings);
  }
};

// ---- subcommands -------------------------------------------------------

using Action = std::function<std::string()>;

Action add_synth(CLI::App& root) {
  auto* app = root.add_subcommand("synth", "generate a synthetic dataset");
  auto flags = std::make_shared<SynthFlags>();
  auto out_dir = std::make_shared<fs::path>();
  auto seed = std::make_shared<std::uint64_t>(0);
  flags->add(app);
  opt(app, "--seed", *seed, "random seed");
  opt(app, "--out-dir", *out_dir, "directory for the split files")->required();
  return [=] {
    SynthConfig cfg = flags->cfg;
    cfg.seed = *seed;
    const SynthDataset d = synth_generate(cfg);
    ensure_dir(*out_dir);
    const auto f = SplitFiles::in(*out_dir);
    write_features(d.train_features, f.train_features);
    write_labels(d.train_partial, f.train_labels);
    write_labels(d.train_truth, f.train_truth);
    write_features(d.val_features, f.val_features);
    write_labels(d.val_labels, f.val_labels);
    write_features(d.test_features, f.test_features);
    write_labels(d.test_labels, f.test_labels);
    return Summary("synth")
        .add("n_train", cfg.n_train)
        .add("n_val", cfg.n_val)
        .add("n_test", cfg.n_test)
        .add("classes", cfg.classes)
        .add("dim", cfg.dim)
        .add("seed", cfg.seed)
        .add("out_dir", *out_dir)
        .str();
  };
}

Action add_aggregate(CLI::App& root) {
  auto* app = root.add_subcommand("aggregate", "majority-vote annotator votes into full labels");
  auto votes = std::make_shared<fs::path>();
  auto out = std::make_shared<fs::path>();
  in_file(app, "--votes", *votes, "vote file");
  opt(app, "--out", *out, "output label file")->required();
  return [=] {
    const LabelMatrix y = majority_vote(load_votes(*votes));
    write_labels(y, *out);
    Index positives = 0;
    for (Index i = 0; i < y.n(); ++i) {
      for (Index c = 0; c < y.classes(); ++c) {
        positives += y.positive(i, c) ? 1 : 0;
      }
    }
    return Summary("aggregate")
        .add("n", y.n())
        .add("classes", y.classes())
        .add("positives", positives)
        .add("out", *out)
        .str();
  };
}

Action add_enhance(CLI::App& root) {
  auto* app = root.add_subcommand("enhance", "recover soft labels from single-positive labels");
  auto features = std::make_shared<fs::path>();
  auto labels = std::make_shared<fs::path>();
  auto out = std::make_shared<fs::path>();
  auto le = std::make_shared<LeFlags>();
  in_file(app, "--features", *features, "training features");
  in_file(app, "--labels", *labels, "partial training labels");
  opt(app, "--out", *out, "soft label output file")->required();
  le->add(app);
  return [=] {
    const FeatureMatrix x = load_features(*features);
    const LabelMatrix y = load_labels(*labels, LabelKind::partial);
    const EnhanceResult r = enhance(x, y, le->get());
    write_real_matrix(r.soft.values(), *out, kSoftLabelFormat);
    return Summary("enhance")
        .add("n", x.n())
        .add("classes", y.classes())
        .add("loss_initial", r.loss_trace.front())
        .add("loss_final", r.loss_trace.back())
        .add("warnings", r.warnings.size())
        .add("out", *out)
        .str();
  };
}

Action add_pseudo(CLI::App& root) {
  auto* app = root.add_subcommand("pseudo", "class-prior pseudo-labels from soft labels");
  auto soft = std::make_shared<fs::path>();
  auto labels = std::make_shared<fs::path>();
  auto val = std::make_shared<fs::path>();
  auto truth = std::make_shared<fs::path>();
  auto out = std::make_shared<fs::path>();
  in_file(app, "--soft", *soft, "soft label file");
  in_file(app, "--labels", *labels, "partial training labels");
  in_file(app, "--val-labels", *val, "full validation labels (class priors)");
  opt(app, "--truth", *truth, "full training labels; reports the unreliability degree")
      ->check(CLI::ExistingFile);
  opt(app, "--out", *out, "pseudo-label output file")->required();
  return [=] {
    const LabelMatrix observed = load_labels(*labels, LabelKind::partial);
    const SoftLabelMatrix d =
        SoftLabelMatrix::from_values(read_real_matrix(*soft, kSoftLabelFormat), observed.values());
    const ClassPriors priors = estimate_priors(load_labels(*val, LabelKind::full), observed.n());
    const PseudoLabelMatrix p = generate_pseudo_labels(d, priors, observed);
    write_labels(p, *out);
    Summary s("pseudo");
    s.add("n", p.n()).add("classes", p.classes());
    if (!truth->empty()) {
      const LabelMatrix t = load_labels(*truth, LabelKind::full);
      s.add("xi_pseudo", unreliability(p, t)).add("xi_single", unreliability(observed, t));
    }
    return s.add("out", *out).str();
  };
}

Action add_graph(CLI::App& root) {
  auto* app = root.add_subcommand("graph", "label co-occurrence matrix from validation labels");
  auto val = std::make_shared<fs::path>();
  auto out = std::make_shared<fs::path>();
  auto normalized = std::make_shared<fs::path>();
  in_file(app, "--val-labels", *val, "full validation labels");
  opt(app, "--out", *out, "raw co-occurrence output file")->required();
  opt(app, "--normalized-out", *normalized, "normalized co-occurrence output file");
  return [=] {
    const CoOccurrenceGraph g = cooccurrence(load_labels(*val, LabelKind::full));
    write_real_matrix(g.a, *out, kCooccurrenceFormat);
    Summary s("graph");
    s.add("classes", g.classes()).add("out", *out);
    if (!normalized->empty()) {
      write_real_matrix(normalize(g).a_hat, *normalized, kCooccurrenceFormat);
      s.add("normalized_out", *normalized);
    }
    return s.str();
  };
}

Action add_train(CLI::App& root) {
  auto* app = root.add_subcommand("train", "fit classifiers on binary targets");
  auto features = std::make_shared<fs::path>();
  auto targets = std::make_shared<fs::path>();
  auto kind = std::make_shared<std::string>("pseudo");
  auto val = std::make_shared<fs::path>();
  auto out = std::make_shared<fs::path>();
  auto seed = std::make_shared<std::uint64_t>(0);
  auto tf = std::make_shared<TrainFlags>();
  in_file(app, "--features", *features, "training features");
  in_file(app, "--targets", *targets, "training targets (label file)");
  opt(app, "--targets-kind", *kind, "kind declared by the targets file")
      ->check(CLI::IsMember({"partial", "full", "pseudo"}));
  opt(app, "--val-labels", *val, "full validation labels (label graph)")
      ->check(CLI::ExistingFile);
  opt(app, "--out", *out, "classifier output file")->required();
  opt(app, "--seed", *seed, "random seed");
  tf->add(app, false);
  return [=] {
    PipelineConfig pc;
    pc.train = tf->cfg;
    pc.seed = *seed;
    pc.embeddings = tf->loaded_embeddings();
    pc.train.validate();
    const FeatureMatrix x = load_features(*features);
    const LabelMatrix y = load_labels(*targets, parse_label_kind(*kind));
    CoOccurrenceGraph graph;
    if (pc.ablation().gcn) {
      if (val->empty()) {
        throw std::invalid_argument("--val-labels is required when --gcn is on");
      }
      graph = normalize(cooccurrence(load_labels(*val, LabelKind::full)));
    }
    std::vector<std::string> warnings;
    const Matrix w = fit_classifier(x, y, graph, pc, &warnings);
    write_real_matrix(w, *out, kClassifierFormat);
    const double loss = bce_loss(predict(w, x), y);
    return Summary("train")
        .add("n", x.n())
        .add("classes", y.classes())
        .add("gcn", pc.ablation().gcn)
        .add("loss", loss)
        .add("warnings", warnings.size())
        .add("out", *out)
        .str();
  };
}

Action add_evaluate(CLI::App& root) {
  auto* app = root.add_subcommand("evaluate", "score predictions against full labels");
  auto predictions = std::make_shared<fs::path>();
  auto classifier = std::make_shared<fs::path>();
  auto features = std::make_shared<fs::path>();
  auto labels = std::make_shared<fs::path>();
  auto report = std::make_shared<fs::path>();
  auto json = std::make_shared<fs::path>();
  auto* p = opt(app, "--predictions", *predictions, "prediction file")->check(CLI::ExistingFile);
  auto* c = opt(app, "--classifier", *classifier, "classifier file (with --features)")
                ->check(CLI::ExistingFile);
  auto* f = opt(app, "--features", *features, "features to score with --classifier")
                ->check(CLI::ExistingFile);
  p->excludes(c)->excludes(f);
  c->needs(f);
  f->needs(c);
  in_file(app, "--labels", *labels, "full ground-truth labels");
  opt(app, "--report", *report, "key = value report file");
  opt(app, "--json", *json, "JSON report file");
  return [=] {
    std::optional<PredictionMatrix> pred;
    if (!predictions->empty()) {
      pred = load_predictions(*predictions);
    } else if (!classifier->empty()) {
      pred = predict(read_real_matrix(*classifier, kClassifierFormat), load_features(*features));
    } else {
      throw std::invalid_argument("give --predictions or --classifier with --features");
    }
    const MetricsReport r = evaluate(*pred, load_labels(*labels, LabelKind::full));
    if (!report->empty()) {
      write_text(*report, to_key_value(r));
    }
    if (!json->empty()) {
      write_text(*json, to_json(r));
    }
    return Summary("evaluate")
        .add("map", r.map)
        .add("lrl", r.lrl)
        .add("coverage_error", r.coverage_error)
        .add("one_error", r.one_error)
        .add("hamming_risk", r.hamming_risk)
        .str();
  };
}

Action add_pipeline(CLI::App& root) {
  auto* app = root.add_subcommand("pipeline", "enhance, pseudo-label, train and evaluate");
  auto data_dir = std::make_shared<fs::path>();
  auto files = std::make_shared<SplitFiles>();
  auto out_dir = std::make_shared<fs::path>();
  auto seed = std::make_shared<std::uint64_t>(0);
  auto le = std::make_shared<LeFlags>();
  auto tf = std::make_shared<TrainFlags>();
  opt(app, "--data-dir", *data_dir, "directory written by `synth`")
      ->check(CLI::ExistingDirectory);
  const std::vector<std::pair<const char*, fs::path SplitFiles::*>> split_flags = {
      {"--train-features", &SplitFiles::train_features},
      {"--train-labels", &SplitFiles::train_labels},
      {"--val-features", &SplitFiles::val_features},
      {"--val-labels", &SplitFiles::val_labels},
      {"--test-features", &SplitFiles::test_features},
      {"--test-labels", &SplitFiles::test_labels}};
  for (const auto& [name, member] : split_flags) {
    opt(app, name, (*files).*member, "split file (overrides --data-dir)")
        ->check(CLI::ExistingFile);
  }
  opt(app, "--out-dir", *out_dir, "directory for predictions and reports")->required();
  opt(app, "--seed", *seed, "random seed");
  le->add(app);
  tf->add(app, true);
  return [=] {
    SplitFiles f = data_dir->empty() ? SplitFiles{} : SplitFiles::in(*data_dir);
    const std::vector<fs::path SplitFiles::*> members = {
        &SplitFiles::train_features, &SplitFiles::train_labels, &SplitFiles::val_features,
        &SplitFiles::val_labels,     &SplitFiles::test_features, &SplitFiles::test_labels};
    for (const auto m : members) {
      if (!((*files).*m).empty()) {
        f.*m = (*files).*m;
      }
      if ((f.*m).empty()) {
        throw std::invalid_argument("missing input files: give --data-dir or every split flag");
      }
    }
    const FeatureMatrix train_x = load_features(f.train_features);
    const LabelMatrix train_y = load_labels(f.train_labels, LabelKind::partial);
    const FeatureMatrix val_x = load_features(f.val_features);
    const LabelMatrix val_y = load_labels(f.val_labels, LabelKind::full);
    const FeatureMatrix test_x = load_features(f.test_features);
    const LabelMatrix test_y = load_labels(f.test_labels, LabelKind::full);
    PipelineConfig pc;
    pc.le = le->get();
    pc.train = tf->cfg;
    pc.seed = *seed;
    pc.embeddings = tf->loaded_embeddings();
    const PipelineResult r =
        run_pipeline({train_x, train_y, val_x, val_y, test_x, test_y}, pc);
    ensure_dir(*out_dir);
    write_predictions(r.test_predictions, *out_dir / "predictions.txt");
    write_report(r.report, *out_dir / "report.txt", *out_dir / "report.json");
    write_labels(r.pseudo, *out_dir / "pseudo_labels.txt");
    write_real_matrix(r.classifier, *out_dir / "classifier.txt", kClassifierFormat);
    return Summary("pipeline")
        .add("ablation", pc.ablation().label())
        .add("map", r.report.map)
        .add("lrl", r.report.lrl)
        .add("coverage_error", r.report.coverage_error)
        .add("one_error", r.report.one_error)
        .add("hamming_risk", r.report.hamming_risk)
        .add("warnings", r.warnings.size())
        .add("out_dir", *out_dir)
        .str();
  };
}

Action add_theory_n0(CLI::App* theory) {
  auto* app = theory->add_subcommand("n0", "sample complexity bound");
  auto p = std::make_shared<TheoryParams>();
  opt(app, "--xi", p->xi, "unreliability degree in [0,1)")->required();
  opt(app, "--c", p->classes, "number of classes")->required();
  opt(app, "--dh", p->natarajan_dim, "Natarajan dimension")->required();
  opt(app, "--eps", p->epsilon, "target risk in (0,1)")->required();
  opt(app, "--delta", p->delta, "failure probability in (0,1)")->required();
  return [=] {
    const double n0 = sample_complexity(*p);
    return Summary("theory n0").add("n0", n0).add("theta", p->theta()).str();
  };
}

Action add_theory_compare(CLI::App* theory, std::ostream& out) {
  auto* app = theory->add_subcommand("compare", "pseudo-label vs single-label held-out risk");
  auto synth = std::make_shared<SynthFlags>();
  auto le = std::make_shared<LeFlags>();
  auto tf = std::make_shared<TrainFlags>();
  auto seeds = std::make_shared<Index>(10);
  auto first = std::make_shared<std::uint64_t>(0);
  auto out_dir = std::make_shared<fs::path>();
  synth->add(app);
  le->add(app);
  tf->add(app, false);
  opt(app, "--seeds", *seeds, "number of seeds")->check(CLI::PositiveNumber);
  opt(app, "--first-seed", *first, "first seed; seeds run consecutively");
  opt(app, "--out-dir", *out_dir, "directory for compare.json and compare.txt");
  return [=, &out] {
    PipelineConfig pc;
    pc.le = le->get();
    pc.train = tf->cfg;
    pc.embeddings = tf->loaded_embeddings();
    std::vector<std::uint64_t> list;
    for (Index s = 0; s < *seeds; ++s) {
      list.push_back(*first + static_cast<std::uint64_t>(s));
    }
    const RiskComparison cmp = compare_risks(synth->cfg, pc, list);

    std::string table = "seed risk_pseudo risk_single xi_pseudo xi_single pseudo_wins\n";
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    j["seeds"] = cmp.seeds();
    j["wins_pseudo"] = cmp.wins_pseudo();
    j["mean_risk_pseudo"] = cmp.mean_risk_pseudo();
    j["mean_risk_single"] = cmp.mean_risk_single();
    j["outcomes"] = nlohmann::ordered_json::array();
    for (const auto& o : cmp.outcomes) {
      table += num(o.seed) + ' ' + num(o.risk_pseudo) + ' ' + num(o.risk_single) + ' ' +
               num(o.xi_pseudo) + ' ' + num(o.xi_single) + ' ' +
               (o.pseudo_wins() ? "1" : "0") + '\n';
      j["outcomes"].push_back({{"seed", o.seed},
                               {"risk_pseudo", o.risk_pseudo},
                               {"risk_single", o.risk_single},
                               {"xi_pseudo", o.xi_pseudo},
                               {"xi_single", o.xi_single}});
    }
    out << table;
    if (!out_dir->empty()) {
      ensure_dir(*out_dir);
      write_text(*out_dir / "compare.txt", table);
      write_text(*out_dir / "compare.json", j.dump(2) + "\n");
    }
    return Summary("theory compare")
        .add("seeds", cmp.seeds())
        .add("wins_pseudo", cmp.wins_pseudo())
        .add("mean_risk_pseudo", cmp.mean_risk_pseudo())
        .add("mean_risk_single", cmp.mean_risk_single())
        .str();
  };
}

// Moves `--config <file>` out of the argument list and splices its entries in
// right after the subcommand words, so later (user) flags win under TakeLast.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::vector<std::string> injected;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) {
        throw std::invalid_argument("--config needs a file name");
      }
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    for (const auto& [key, value] : read_config(path)) {
      injected.push_back("--" + key + "=" + value);
    }
  }
  std::size_t head = rest.empty() || rest[0].rfind("-", 0) == 0 ? 0 : 1;
  if (head == 1 && rest[0] == "theory" && rest.size() > 1 && rest[1].rfind("-", 0) != 0) {
    head = 2;
  }
  std::vector<std::string> out(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(head));
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin() + static_cast<std::ptrdiff_t>(head), rest.end());
  return out;
}

}  // namespace

std::map<std::string, std::string> read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file " + path.string());
  }
  std::map<std::string, std::string> entries;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    std::string key = eq == std::string::npos ? std::string() : trim(line.substr(0, eq));
    if (key.empty()) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(number) +
                                  ": expected `key = value`");
    }
    for (char& ch : key) {
      if (ch == '_') {
        ch = '-';
      }
    }
    entries[key] = trim(line.substr(eq + 1));
  }
  return entries;
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App root("weakly supervised multi-label toolkit", "lepl");
  root.require_subcommand(1);
  root.set_help_all_flag("--help-all", "help for every subcommand");
  std::vector<std::pair<CLI::App*, Action>> actions;
  const auto track = [&](Action a, const std::string& name) {
    actions.emplace_back(root.get_subcommand(name), std::move(a));
  };
  track(add_synth(root), "synth");
  track(add_aggregate(root), "aggregate");
  track(add_enhance(root), "enhance");
  track(add_pseudo(root), "pseudo");
  track(add_graph(root), "graph");
  track(add_train(root), "train");
  track(add_evaluate(root), "evaluate");
  track(add_pipeline(root), "pipeline");
  auto* theory = root.add_subcommand("theory", "learnability calculations");
  theory->require_subcommand(1);
  actions.emplace_back(nullptr, add_theory_n0(theory));
  actions.back().first = theory->get_subcommand("n0");
  actions.emplace_back(nullptr, add_theory_compare(theory, out));
  actions.back().first = theory->get_subcommand("compare");
  for (auto& [app, action] : actions) {
    app->add_option("--config", "flat key = value file; command-line flags take precedence");
  }

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    root.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      root.exit(e, out, err);
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    for (auto& [app, action] : actions) {
      if (app->parsed()) {
        out << action() << '\n';
        return kOk;
      }
    }
    err << "error: no subcommand\n";
    return kUsageError;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kFormatError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace lepl::cli
