#include "dsel/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "dsel/classifier.hpp"
#include "dsel/dataset.hpp"
#include "dsel/evaluation.hpp"
#include "dsel/repo_corpus.hpp"
#include "dsel/synthetic.hpp"

namespace dsel {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string repo, corpus, workdir;
  std::string family = "bow";
  int k = 1;
  bool allow_large_k = false;
  bool lowercase = false;
  double ratio = 0.8;
  int neg_ratio = 1;
  std::uint64_t seed = 1;
  std::size_t top_n = 1;
  std::string metric_mode = "micro";
  std::string curve_mode = "threshold";
  std::size_t folds = 5;
  std::size_t max_collections = 0;
  std::string pairing = "conjoined";
  bool case_insensitive = false;

  // train
  bool no_cv = false;
  double c = 1.0;
  double eta0 = 0.1;
  double decay = 1.0;
  int max_epochs = 200;
  double tolerance = 1e-6;
  bool full_batch = false;

  // compare
  std::vector<std::string> families;
  std::vector<int> ks = {1, 2, 3};

  // link
  std::string model;
  std::string name;
  std::string sentence;
  std::string sentence_file;
  bool tagged = false;
  std::string lexicon;

  // synth
  std::size_t names = 50;
  std::size_t mentions = 10;
  std::string out_dir;
};

std::string path_in(const std::string& dir, const char* file) { return (fs::path(dir) / file).string(); }

CasePolicy case_policy(const Options& o) {
  return o.case_insensitive ? CasePolicy::insensitive : CasePolicy::sensitive;
}

// Loading is the I/O stage of every command: any failure there exits 1.
Repository load_repo_or_fail(const std::string& path) {
  if (path.empty()) fail(ErrorKind::usage, "--repo is required");
  try {
    return load_repository(path);
  } catch (const Error& e) {
    fail(ErrorKind::io, std::string("cannot load repository: ") + e.what());
  }
}

Corpus load_corpus_or_fail(const std::string& path) {
  if (path.empty()) fail(ErrorKind::usage, "--corpus is required");
  try {
    return load_corpus(path);
  } catch (const Error& e) {
    fail(ErrorKind::io, std::string("cannot load corpus: ") + e.what());
  }
}

BuildOptions build_options(const Options& o) {
  if (!(o.ratio > 0.0 && o.ratio < 1.0)) fail(ErrorKind::usage, "--ratio must lie strictly between 0 and 1");
  if (o.neg_ratio < 0) fail(ErrorKind::usage, "--neg-ratio must be >= 0");
  BuildOptions b;
  b.ratio = o.ratio;
  b.negatives_per_positive = o.neg_ratio;
  b.seed = o.seed;
  b.pairing = parse_pairing(o.pairing);
  b.max_collections = o.max_collections;
  b.case_policy = case_policy(o);
  return b;
}

FeatureConfig feature_config(const Options& o) {
  auto config = make_feature_config(parse_family(o.family), o.k, o.allow_large_k);
  config.lowercase = o.lowercase;
  return config;
}

Hyperparams fixed_params(const Options& o) {
  Hyperparams h;
  h.c = o.c;
  h.eta0 = o.eta0;
  h.decay = o.decay;
  h.max_epochs = o.max_epochs;
  h.tolerance = o.tolerance;
  h.seed = o.seed;
  h.full_batch = o.full_batch;
  validate(h);
  return h;
}

std::vector<Hyperparams> grid_for(const Options& o) {
  auto grid = default_grid(o.seed);
  for (auto& h : grid) {
    h.max_epochs = o.max_epochs;
    h.tolerance = o.tolerance;
    h.full_batch = o.full_batch;
  }
  return grid;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create directory '" + dir + "': " + ec.message());
}

int cmd_align(const Options& o, std::ostream& out) {
  const auto repo = load_repo_or_fail(o.repo);
  const auto corpus = load_corpus_or_fail(o.corpus);
  const auto table = align(repo, corpus, case_policy(o));
  ensure_dir(o.workdir);
  std::string cache = "mid\tpage_id\tsentence_idx\tstart\tend\n";
  for (const auto& e : repo.entities())
    for (const auto& m : table.of(e.mid))
      cache += e.mid + "\t" + m.sentence->page_id + "\t" + std::to_string(m.sentence->sentence_idx) + "\t" +
               std::to_string(m.start) + "\t" + std::to_string(m.end) + "\n";
  write_file(path_in(o.workdir, "alignment.tsv"), cache);
  out << table.summary.to_string() << "\n";
  return 0;
}

int cmd_build(const Options& o, std::ostream& out) {
  const auto config = feature_config(o);
  const auto options = build_options(o);
  const auto repo = load_repo_or_fail(o.repo);
  const auto corpus = load_corpus_or_fail(o.corpus);
  const auto dataset = build_dataset(repo, corpus, config, options);
  export_dataset(dataset, o.workdir);
  const auto& s = dataset.stats;
  out << "collections=" << s.collections << " positives=" << s.positives << " negatives=" << s.negatives
      << " test_groups=" << s.test_groups << " vocab=" << dataset.vocab.size() << "\n";
  return 0;
}

int cmd_train(const Options& o, std::ostream& out) {
  const auto dataset = import_dataset(o.workdir);
  const auto examples = training_examples(dataset);
  Hyperparams params;
  if (o.no_cv) {
    params = fixed_params(o);
  } else {
    const auto grid = grid_for(o);
    const auto cv = cross_validate(examples, grid, dataset.vocab.size(), o.folds, o.seed);
    write_file(path_in(o.workdir, "cv_table.csv"), format_cv_table(cv));
    params = cv.best;
  }
  auto result = train(examples, params, dataset.vocab.size());
  result.model.config = dataset.config;
  result.model.pairing = dataset.options.pairing;
  result.model.vocab_hash = dataset.vocab.hash();
  const auto model_path = o.model.empty() ? path_in(o.workdir, "model.txt") : o.model;
  save_model(result.model, model_path);
  write_file(path_in(o.workdir, "train_log.csv"), format_train_log(result.log));
  out << "c=" << format_double(params.c) << " eta0=" << format_double(params.eta0)
      << " epochs=" << result.log.objective.size() - 1
      << " objective=" << format_double(result.log.objective.back()) << " model=" << model_path << "\n";
  return 0;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const auto mode = parse_metric_mode(o.metric_mode);
  if (o.top_n < 1) fail(ErrorKind::usage, "--top-n must be >= 1");
  if (o.curve_mode != "threshold" && o.curve_mode != "n")
    fail(ErrorKind::usage, "--curve-mode must be threshold or n");
  const auto dataset = import_dataset(o.workdir);
  const auto model = load_model(o.model.empty() ? path_in(o.workdir, "model.txt") : o.model);
  const auto predictions = score_groups(model, dataset);
  auto report = metrics(top_n(predictions, o.top_n), mode);
  if (o.curve_mode == "threshold") {
    report.curve = pr_curve(predictions, default_thresholds(predictions));
  } else {
    std::size_t max_n = 1;
    for (const auto& p : predictions) max_n = std::max(max_n, p.ranked.size());
    report.curve = pr_curve_by_n(predictions, max_n);
  }
  write_file(path_in(o.workdir, "report.json"), format_report_json(report));
  write_file(path_in(o.workdir, "pr_curve.csv"), format_curve_csv(report.curve));
  out << "mode=" << metric_mode_name(mode) << " top_n=" << o.top_n << " groups=" << predictions.size()
      << " precision=" << format_double(report.precision) << " recall=" << format_double(report.recall)
      << " f1=" << format_double(report.f1) << "\n";
  return 0;
}

int cmd_compare(const Options& o, std::ostream& out) {
  CompareOptions co;
  co.build = build_options(o);
  co.configs.clear();
  std::vector<FeatureFamily> families;
  if (o.families.empty())
    families.assign(std::begin(all_families), std::end(all_families));
  else
    for (const auto& f : o.families) families.push_back(parse_family(f));
  for (auto family : families)
    for (int k : o.ks) {
      auto config = make_feature_config(family, k, o.allow_large_k);
      config.lowercase = o.lowercase;
      co.configs.push_back(config);
    }
  co.cross_validate = !o.no_cv;
  co.grid = grid_for(o);
  co.fixed = fixed_params(o);
  co.folds = o.folds;
  co.top_n = o.top_n;
  const auto repo = load_repo_or_fail(o.repo);
  const auto corpus = load_corpus_or_fail(o.corpus);
  const auto rows = compare_features(repo, corpus, co);
  ensure_dir(o.workdir);
  const auto table = format_comparison_csv(rows);
  write_file(path_in(o.workdir, "comparison.csv"), table);
  for (const auto& r : rows) {
    const auto file = "pr_" + family_cli_name(r.config.family) + "_k" + std::to_string(r.config.k) + ".csv";
    write_file((fs::path(o.workdir) / file).string(), format_curve_csv(r.report.curve));
  }
  out << table;
  return 0;
}

int cmd_link(const Options& o, std::ostream& out) {
  if (o.name.empty()) fail(ErrorKind::usage, "--name is required");
  std::string text = o.sentence;
  if (!o.sentence_file.empty()) text = read_file(o.sentence_file);
  if (split_ws(text).empty()) fail(ErrorKind::usage, "empty sentence (use --sentence or --sentence-file)");

  const auto repo = load_repo_or_fail(o.repo);
  const auto candidates = repo.mids_named(o.name);
  if (candidates.empty())
    fail(ErrorKind::domain, "unknown name (NIL handling out of scope): '" + o.name + "'");

  const auto model = load_model(o.model.empty() ? path_in(o.workdir, "model.txt") : o.model);
  const auto vocab = Vocabulary::parse(read_file(path_in(o.workdir, vocab_file)));
  check_compatible(model, vocab);

  TaggedSentence sentence;
  if (o.tagged) {
    for (const auto& tok : split_ws(text)) {
      const auto slash = tok.rfind('/');
      if (slash == std::string::npos || slash == 0 || slash + 1 == tok.size())
        fail(ErrorKind::usage, "pre-tagged tokens must look like word/TAG, got '" + tok + "'");
      sentence.tokens.push_back(TaggedToken{tok.substr(0, slash), tok.substr(slash + 1)});
    }
  } else {
    Lexicon lexicon = default_lexicon();
    if (!o.lexicon.empty()) {
      std::istringstream in(read_file(o.lexicon));
      std::string word, tag;
      while (in >> word >> tag) {
        for (auto& ch : word) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        lexicon[word] = tag;
      }
    }
    sentence = naive_tag(text, lexicon);
  }
  const auto mentions = find_mentions(sentence, o.name, case_policy(o));
  if (mentions.empty()) fail(ErrorKind::data, "name '" + o.name + "' does not occur in the sentence");

  const auto items = extract_items(sentence, mentions.front(), model.config);
  std::vector<RankedCandidate> ranked;
  for (const auto& mid : candidates) {
    const auto sample = make_sample(items, mid, 0, vocab, model.pairing);
    const auto ids = sample.features();
    const double m = margin(model, ids);
    ranked.push_back(RankedCandidate{mid, sigmoid(m), m});
  }
  rank_candidates(ranked);
  for (std::size_t i = 0; i < ranked.size(); ++i)
    out << (i + 1) << "\t" << ranked[i].mid << "\t" << format_double(ranked[i].score) << "\n";
  return 0;
}

int cmd_synth(const Options& o, std::ostream& out) {
  if (o.out_dir.empty()) fail(ErrorKind::usage, "--out is required");
  SyntheticSpec spec;
  spec.names = o.names;
  spec.mentions_per_entity = o.mentions;
  spec.seed = o.seed;
  const auto data = o.name == "jordan" ? jordan_training_fixture(o.seed) : make_synthetic(spec);
  ensure_dir(o.out_dir);
  write_file(path_in(o.out_dir, "repo.jsonl"), serialize_repository(data.repo));
  write_file(path_in(o.out_dir, "corpus.jsonl"), serialize_corpus(data.corpus));
  out << "entities=" << data.repo.entities().size() << " pages=" << data.corpus.size() << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  if (const char* env = std::getenv(workdir_env); env && *env) o.workdir = env;
  if (o.workdir.empty()) o.workdir = "dsel_work";

  CLI::App app{"dsel: distantly supervised entity linking toolkit"};
  app.set_version_flag("--version", std::string("dsel ") + version);
  app.require_subcommand(1);

  auto add_io = [&](CLI::App* cmd) {
    cmd->add_option("--repo", o.repo, "Repository file (JSON lines: mid, name, pages)");
    cmd->add_option("--corpus", o.corpus, "Corpus file (JSON lines: page_id, sentences)");
  };
  auto add_workdir = [&](CLI::App* cmd) {
    cmd->add_option("--workdir", o.workdir, std::string("Artifact directory (default: $") + workdir_env + " or ./dsel_work)");
  };
  auto add_build = [&](CLI::App* cmd) {
    cmd->add_option("--ratio", o.ratio, "Train fraction per entity")->capture_default_str();
    cmd->add_option("--neg-ratio", o.neg_ratio, "Negatives per positive")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    cmd->add_option("--max-collections", o.max_collections, "Cap on collections (0 = no cap)")->capture_default_str();
    cmd->add_option("--pairing", o.pairing, "MID feature pairing: conjoined|plain")->capture_default_str();
    cmd->add_flag("--case-insensitive", o.case_insensitive, "Match names ignoring ASCII case");
    cmd->add_flag("--lowercase", o.lowercase, "Lowercase words in feature items");
    cmd->add_flag("--allow-large-k", o.allow_large_k, "Permit window sizes above 3");
  };
  auto add_train = [&](CLI::App* cmd) {
    cmd->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str();
    cmd->add_flag("--no-cv", o.no_cv, "Skip cross-validation and use --c/--eta0");
    cmd->add_option("--c", o.c, "Inverse regularization strength (with --no-cv)")->capture_default_str();
    cmd->add_option("--eta0", o.eta0, "Initial learning rate (with --no-cv)")->capture_default_str();
    cmd->add_option("--decay", o.decay, "Learning-rate decay per epoch")->capture_default_str();
    cmd->add_option("--max-epochs", o.max_epochs, "Epoch limit")->capture_default_str();
    cmd->add_option("--tolerance", o.tolerance, "Relative objective decrease for convergence")->capture_default_str();
    cmd->add_flag("--full-batch", o.full_batch, "Full-batch gradient descent instead of SGD");
  };

  auto* align_cmd = app.add_subcommand("align", "Align entities to their pages and report coverage");
  add_io(align_cmd);
  add_workdir(align_cmd);
  align_cmd->add_flag("--case-insensitive", o.case_insensitive, "Match names ignoring ASCII case");

  auto* build_cmd = app.add_subcommand("build", "Build and export the weakly labeled dataset");
  add_io(build_cmd);
  add_workdir(build_cmd);
  build_cmd->add_option("--family", o.family, "Feature family: bow|ws|bow+pos|ws+pos")->capture_default_str();
  build_cmd->add_option("--k", o.k, "Open-class window size (1, 2 or 3)")->capture_default_str();
  add_build(build_cmd);

  auto* train_cmd = app.add_subcommand("train", "Cross-validate and train the classifier");
  add_workdir(train_cmd);
  train_cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--model", o.model, "Model output path (default: <workdir>/model.txt)");
  add_train(train_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "Score held-out groups and report precision/recall/F1");
  add_workdir(eval_cmd);
  eval_cmd->add_option("--model", o.model, "Model path (default: <workdir>/model.txt)");
  eval_cmd->add_option("--top-n", o.top_n, "Candidates kept per group")->capture_default_str();
  eval_cmd->add_option("--metric-mode", o.metric_mode, "micro|literal")->capture_default_str();
  eval_cmd->add_option("--curve-mode", o.curve_mode, "PR curve sweep: threshold|n")->capture_default_str();

  auto* compare_cmd = app.add_subcommand("compare", "Compare feature families over one shared split");
  add_io(compare_cmd);
  add_workdir(compare_cmd);
  compare_cmd->add_option("--families", o.families, "Subset of bow,ws,bow+pos,ws+pos")->delimiter(',');
  compare_cmd->add_option("--ks", o.ks, "Window sizes")->delimiter(',')->capture_default_str();
  compare_cmd->add_option("--top-n", o.top_n, "Candidates kept per group")->capture_default_str();
  add_build(compare_cmd);
  add_train(compare_cmd);

  auto* link_cmd = app.add_subcommand("link", "Rank the candidate entities for a mention in new text");
  link_cmd->add_option("--repo", o.repo, "Repository file");
  add_workdir(link_cmd);
  link_cmd->add_option("--model", o.model, "Model path (default: <workdir>/model.txt)");
  link_cmd->add_option("--name", o.name, "Surface name of the mention");
  link_cmd->add_option("--sentence", o.sentence, "Sentence text");
  link_cmd->add_option("--sentence-file", o.sentence_file, "File holding the sentence");
  link_cmd->add_flag("--tagged", o.tagged, "Sentence is pre-tagged as word/TAG tokens");
  link_cmd->add_option("--lexicon", o.lexicon, "Extra word<TAB>tag lexicon for the naive tagger");
  link_cmd->add_flag("--case-insensitive", o.case_insensitive, "Match the name ignoring ASCII case");

  auto* synth_cmd = app.add_subcommand("synth", "Write a generated repository and corpus");
  synth_cmd->add_option("--out", o.out_dir, "Output directory");
  synth_cmd->add_option("--names", o.names, "Ambiguous names")->capture_default_str();
  synth_cmd->add_option("--mentions", o.mentions, "Mentions per entity")->capture_default_str();
  synth_cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--fixture", o.name, "Named fixture instead of the generator: jordan");

  std::vector<std::string> argv_storage{"dsel"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_code(ErrorKind::usage);
  }

  try {
    if (align_cmd->parsed()) return cmd_align(o, out);
    if (build_cmd->parsed()) return cmd_build(o, out);
    if (train_cmd->parsed()) return cmd_train(o, out);
    if (eval_cmd->parsed()) return cmd_eval(o, out);
    if (compare_cmd->parsed()) return cmd_compare(o, out);
    if (link_cmd->parsed()) return cmd_link(o, out);
    if (synth_cmd->parsed()) return cmd_synth(o, out);
  } catch (const Error& e) {
    err << "dsel: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "dsel: " << e.what() << "\n";
    return exit_code(ErrorKind::data);
  }
  return exit_code(ErrorKind::usage);
}

}  // namespace dsel
