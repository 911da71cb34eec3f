// Command-line surface over the hashing library: dataset generation and
// extraction, hashing to code databases, Hamming KNN queries, repeated-run
// evaluation and parameter sweeps, plus the invariance self-checks.

#include "fta/eval.hpp"
#include "fta/features.hpp"
#include "fta/io.hpp"
#include "fta/parallel.hpp"
#include "fta/synthetic.hpp"
#include "fta/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

std::uint32_t parse_u32(const std::string& text, const std::string& what) {
  try {
    std::size_t consumed = 0;
    const unsigned long v = std::stoul(text, &consumed);
    if (consumed != text.size() || v > 0xffffffffull) throw std::exception();
    return static_cast<std::uint32_t>(v);
  } catch (...) {
    throw std::invalid_argument(what + ": '" + text +
                                "' is not a non-negative integer");
  }
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    std::size_t consumed = 0;
    const double v = std::stod(text, &consumed);
    if (consumed != text.size()) throw std::exception();
    return v;
  } catch (...) {
    throw std::invalid_argument(what + ": '" + text + "' is not a number");
  }
}

std::optional<fta::Real> parse_theta(const std::string& text) {
  if (text == "auto") return std::nullopt;
  return parse_real(text, "--theta");
}

/// Sequences selected by --split ("all" keeps everything).
std::vector<std::size_t> select_indices(const fta::Dataset& data,
                                        const std::string& split) {
  if (split == "all") {
    std::vector<std::size_t> all(data.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  return data.indices_of(fta::split_from_string(split));
}

void print_line(const json& j) { std::cout << j.dump() << "\n"; }

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 0;
  std::uint32_t d = 16;
  std::uint32_t postures = 2;
  std::string orders = "0,1;1,0";
  std::string fpp = "6";
  double noise = 0.0;
  std::uint32_t train_per_class = 4;
  std::uint32_t test_per_class = 4;
  std::uint32_t pad_max = 0;
};

void run_synth(const SynthArgs& args) {
  fta::SynthDatasetSpec spec;
  spec.seed = args.seed;
  spec.d = static_cast<fta::Index>(args.d);
  spec.num_postures = args.postures;
  for (const std::string& order : split_list(args.orders, ';')) {
    std::vector<std::uint32_t> ids;
    for (const std::string& id : split_list(order, ',')) {
      ids.push_back(parse_u32(id, "--orders"));
    }
    spec.class_orders.push_back(std::move(ids));
  }
  spec.fpp_choices.clear();
  for (const std::string& fpp : split_list(args.fpp, ',')) {
    spec.fpp_choices.push_back(parse_u32(fpp, "--fpp"));
  }
  spec.noise_sigma = args.noise;
  spec.train_per_class = args.train_per_class;
  spec.test_per_class = args.test_per_class;
  spec.pad_max = static_cast<fta::Index>(args.pad_max);

  const fta::Dataset data = fta::make_synthetic_dataset(spec);
  fta::save_dataset_cache(data, args.out, "none");
  print_line(json{{"command", "synth"},
                  {"out", args.out},
                  {"sequences", data.size()},
                  {"classes", data.class_names.size()}});
}

// ---- extract ----------------------------------------------------------------

struct ExtractArgs {
  std::string manifest;
  std::string out;
  std::string feature;  // empty = manifest's choice
  bool standardize = false;
};

void run_extract(const ExtractArgs& args) {
  fta::Dataset data = fta::load_dataset(args.manifest, args.feature);
  std::string feature = args.feature;
  if (feature.empty()) {
    feature = fta::load_manifest(args.manifest).feature;
  }
  if (args.standardize) {
    // Fit on the train split when one is tagged; otherwise on everything.
    const fta::Dataset train = fta::subset(data, fta::Split::train);
    const fta::Standardizer st =
        fta::fit_standardizer(train.sequences.empty() ? data : train);
    data = fta::apply_standardizer(st, data);
  }
  fta::save_dataset_cache(data, args.out, feature);
  print_line(json{{"command", "extract"},
                  {"out", args.out},
                  {"feature", feature},
                  {"sequences", data.size()},
                  {"dimension", data.dim()},
                  {"standardized", args.standardize}});
}

// ---- hash ----------------------------------------------------------------

struct HashArgs {
  std::string data;
  std::string out_codes;
  std::string out_spec;
  std::string mode = "peak";
  std::uint32_t m = 500;
  std::uint32_t k = 2;
  std::uint32_t p = 1000;
  std::string theta = "auto";
  double sigma = 1.0;
  std::uint32_t knn = 1;
  std::uint64_t seed = 0;
  std::string split = "all";
  std::uint32_t threads = 0;
};

void run_hash(const HashArgs& args) {
  const fta::Dataset data = fta::load_dataset_cache(args.data);
  const std::vector<std::size_t> picked = select_indices(data, args.split);
  if (picked.empty()) {
    throw std::invalid_argument("hash: no sequences in split '" + args.split +
                                "'");
  }
  std::vector<std::int32_t> labels;
  for (std::size_t idx : picked) {
    if (!data.sequences[idx].label) {
      throw std::invalid_argument(
          "hash: sequence " + std::to_string(idx) +
          " is unlabeled; a code database needs labels");
    }
    labels.push_back(*data.sequences[idx].label);
  }

  const fta::RunSeeds seeds = fta::run_seeds(args.seed, 0);
  const fta::ProjectionBank bank =
      fta::make_bank(seeds.bank, args.m, data.dim(), args.sigma);
  const fta::Mode mode = fta::mode_from_string(args.mode);

  std::optional<fta::Real> theta = parse_theta(args.theta);
  if (!theta) {
    std::vector<fta::VideoSequence> train;
    std::vector<std::int32_t> train_labels;
    for (std::size_t idx : data.indices_of(fta::Split::train)) {
      if (!data.sequences[idx].label) continue;
      train.push_back(data.sequences[idx]);
      train_labels.push_back(*data.sequences[idx].label);
    }
    fta::ExperimentConfig cfg;
    cfg.mode = mode;
    cfg.m = args.m;
    cfg.k = args.k;
    cfg.p = args.p;
    cfg.sigma = args.sigma;
    cfg.knn_K = args.knn;
    theta = fta::select_theta(bank, train, train_labels, cfg, seeds);
  }

  const fta::HashSpec spec = fta::make_hash_spec(
      bank, args.k, args.p, *theta, mode, seeds.selection);
  std::vector<fta::FtaCode> codes(picked.size());
  fta::parallel_for(picked.size(), args.threads, [&](std::size_t i) {
    codes[i] = fta::hash(spec, data.sequences[picked[i]]);
  });
  const fta::CodeDatabase db = fta::make_code_database(
      spec, std::move(codes), std::move(labels), data.class_names);
  fta::save_code_db(db, args.out_codes);
  fta::save_hash_spec(spec, args.out_spec);
  print_line(json{{"command", "hash"},
                  {"out_codes", args.out_codes},
                  {"out_spec", args.out_spec},
                  {"sequences", picked.size()},
                  {"theta", *theta},
                  {"fingerprint", fta::to_hex(db.fingerprint)}});
}

// ---- query ----------------------------------------------------------------

struct QueryArgs {
  std::string codes;
  std::string spec;
  std::string data;
  std::string split = "all";
  std::uint32_t knn = 1;
  std::uint32_t threads = 0;
};

void run_query(const QueryArgs& args) {
  const fta::CodeDatabase db = fta::load_code_db(args.codes);
  const fta::HashSpec spec = fta::load_hash_spec(args.spec);
  const std::uint64_t fingerprint = fta::spec_fingerprint(spec);
  if (fingerprint != db.fingerprint) {
    throw std::invalid_argument(
        "query: hash spec " + fta::to_hex(fingerprint) +
        " does not match the code database " + fta::to_hex(db.fingerprint));
  }
  const fta::Dataset data = fta::load_dataset_cache(args.data);
  const std::vector<std::size_t> picked = select_indices(data, args.split);
  if (picked.empty()) {
    throw std::invalid_argument("query: no sequences in split '" +
                                args.split + "'");
  }

  struct Answer {
    std::int32_t predicted = 0;
    std::uint32_t distance = 0;
  };
  std::vector<Answer> answers(picked.size());
  fta::parallel_for(picked.size(), args.threads, [&](std::size_t i) {
    const fta::FtaCode code = fta::hash(spec, data.sequences[picked[i]]);
    answers[i].predicted = fta::knn_classify(db, code, args.knn);
    answers[i].distance = fta::nearest(db, code, 1).front().distance;
  });

  std::size_t labeled = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < picked.size(); ++i) {
    const fta::VideoSequence& v = data.sequences[picked[i]];
    json line{{"index", picked[i]},
              {"source", v.source_id},
              {"predicted", answers[i].predicted},
              {"distance", answers[i].distance}};
    if (!db.class_names.empty()) {
      line["predicted_name"] =
          db.class_names[static_cast<std::size_t>(answers[i].predicted)];
    }
    if (v.label) {
      line["label"] = *v.label;
      ++labeled;
      correct += *v.label == answers[i].predicted;
    }
    print_line(line);
  }
  if (labeled > 0) {
    print_line(json{{"accuracy", static_cast<double>(correct) /
                                     static_cast<double>(labeled)},
                    {"count", labeled}});
  }
}

// ---- eval / sweep ------------------------------------------------------

struct EvalArgs {
  std::string data;
  std::string out = "report.json";
  std::string mode = "peak";
  std::uint32_t m = 500;
  std::uint32_t k = 2;
  std::uint32_t p = 1000;
  std::string theta = "auto";
  double sigma = 1.0;
  std::uint32_t runs = 50;
  std::uint32_t knn = 1;
  std::uint64_t seed = 0;
  std::uint32_t threads = 0;
  // sweep only:
  std::string axis;
  std::string values;
  std::string report_dir;
};

fta::ExperimentConfig config_from(const EvalArgs& args,
                                  const std::string& feature) {
  fta::ExperimentConfig cfg;
  cfg.mode = fta::mode_from_string(args.mode);
  cfg.m = args.m;
  cfg.k = args.k;
  cfg.p = args.p;
  cfg.theta = parse_theta(args.theta);
  cfg.sigma = args.sigma;
  cfg.runs = args.runs;
  cfg.knn_K = args.knn;
  cfg.master_seed = args.seed;
  cfg.threads = args.threads;
  cfg.feature = feature;
  return cfg;
}

void run_eval(const EvalArgs& args) {
  std::string feature;
  const fta::Dataset data = fta::load_dataset_cache(args.data, &feature);
  const fta::EvalReport report =
      fta::run_experiment(data, config_from(args, feature));
  fta::save_report(report, args.out);
  print_line(json{{"command", "eval"},
                  {"out", args.out},
                  {"mean", report.mean},
                  {"std", report.std_dev},
                  {"chosen_theta", report.chosen_theta},
                  {"runs", report.config.runs}});
}

void run_sweep(const EvalArgs& args) {
  std::string feature;
  const fta::Dataset data = fta::load_dataset_cache(args.data, &feature);
  const fta::SweepAxis axis = fta::sweep_axis_from_string(args.axis);
  std::vector<fta::Real> values;
  for (const std::string& v : split_list(args.values, ',')) {
    values.push_back(parse_real(v, "--values"));
  }
  const std::vector<fta::EvalReport> reports =
      fta::sweep(data, config_from(args, feature), axis, values);
  fta::save_sweep_csv(reports, axis, values, args.out);
  if (!args.report_dir.empty()) {
    std::filesystem::create_directories(args.report_dir);
  }
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (!args.report_dir.empty()) {
      char value_tag[64];
      std::snprintf(value_tag, sizeof(value_tag), "%g", values[i]);
      fta::save_report(reports[i],
                       std::filesystem::path(args.report_dir) /
                           ("sweep_" + fta::to_string(axis) + "_" +
                            std::string(value_tag) + ".json"));
    }
    print_line(json{{"axis", fta::to_string(axis)},
                    {"value", values[i]},
                    {"mean", reports[i].mean},
                    {"std", reports[i].std_dev}});
  }
  print_line(json{{"command", "sweep"}, {"out", args.out}});
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
  std::uint64_t seed = 0;
  std::uint32_t cases = 200;
  bool bench = false;
};

int run_verify(const VerifyArgs& args) {
  bool all_passed = true;
  for (const fta::CheckResult& r : fta::run_all_checks(args.seed, args.cases)) {
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": "
              << r.detail << "\n";
    all_passed = all_passed && r.passed;
  }
  if (args.bench) {
    for (char axis : {'n', 'm', 'p'}) {
      const fta::LinearityResult r =
          fta::check_hash_linearity(axis, args.seed);
      std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << "linearity-" << axis
                << ": time ratio at 16x = " << r.ratio
                << " (1.0 is perfectly linear)\n";
      all_passed = all_passed && r.passed;
    }
  }
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"first-take-all temporal order hashing toolkit"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic labeled dataset");
  synth_cmd->add_option("--out", synth.out, "output dataset cache path")
      ->required();
  synth_cmd->add_option("--seed", synth.seed, "master seed");
  synth_cmd->add_option("--d", synth.d, "feature dimension");
  synth_cmd->add_option("--postures", synth.postures,
                        "number of posture prototypes");
  synth_cmd->add_option(
      "--orders", synth.orders,
      "per-class posture orders, e.g. '0,1;1,0' for two classes");
  synth_cmd->add_option("--fpp", synth.fpp,
                        "frames-per-posture choices, e.g. '4,6,8'");
  synth_cmd->add_option("--noise", synth.noise, "additive noise sigma");
  synth_cmd->add_option("--train-per-class", synth.train_per_class,
                        "training sequences per class");
  synth_cmd->add_option("--test-per-class", synth.test_per_class,
                        "test sequences per class");
  synth_cmd->add_option("--pad-max", synth.pad_max,
                        "maximum random zero padding per side");

  ExtractArgs extract;
  CLI::App* extract_cmd = app.add_subcommand(
      "extract", "extract features from a skeleton manifest into a cache");
  extract_cmd->add_option("--manifest", extract.manifest, "dataset manifest")
      ->required();
  extract_cmd->add_option("--out", extract.out, "output dataset cache path")
      ->required();
  extract_cmd->add_option("--feature", extract.feature,
                          "feature to extract: pjd, jo or pa "
                          "(default: the manifest's choice)");
  extract_cmd->add_flag("--standardize", extract.standardize,
                        "z-score the cache (statistics from the train split)");

  HashArgs hash_args;
  CLI::App* hash_cmd = app.add_subcommand(
      "hash", "hash a dataset cache into a code database + hash spec");
  hash_cmd->add_option("--data", hash_args.data, "dataset cache")->required();
  hash_cmd->add_option("--out-codes", hash_args.out_codes,
                       "output code database path")
      ->required();
  hash_cmd->add_option("--out-spec", hash_args.out_spec,
                       "output hash spec path")
      ->required();
  hash_cmd->add_option("--mode", hash_args.mode, "peak, threshold or bow");
  hash_cmd->add_option("--m", hash_args.m, "projection count");
  hash_cmd->add_option("--k", hash_args.k, "group size");
  hash_cmd->add_option("--p", hash_args.p, "code length in symbols");
  hash_cmd->add_option("--theta", hash_args.theta,
                       "activation threshold, a number or 'auto'");
  hash_cmd->add_option("--sigma", hash_args.sigma, "projection scale");
  hash_cmd->add_option("--knn", hash_args.knn,
                       "neighbor count used during auto-theta selection");
  hash_cmd->add_option("--seed", hash_args.seed, "master seed");
  hash_cmd->add_option("--split", hash_args.split,
                       "which sequences to hash: all, train or test");
  hash_cmd->add_option("--threads", hash_args.threads,
                       "worker cap (0 = hardware)");

  QueryArgs query;
  CLI::App* query_cmd = app.add_subcommand(
      "query", "classify sequences against a code database");
  query_cmd->add_option("--codes", query.codes, "code database")->required();
  query_cmd->add_option("--spec", query.spec, "hash spec file")->required();
  query_cmd->add_option("--data", query.data, "dataset cache of queries")
      ->required();
  query_cmd->add_option("--split", query.split,
                        "which sequences to query: all, train or test");
  query_cmd->add_option("--knn", query.knn, "neighbor count");
  query_cmd->add_option("--threads", query.threads,
                        "worker cap (0 = hardware)");

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "repeated-run evaluation: mean/std accuracy over fresh banks");
  EvalArgs sweep_args;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "evaluate along one parameter axis (k, p or theta)");
  for (auto [cmd, args] : {std::pair{eval_cmd, &eval_args},
                           std::pair{sweep_cmd, &sweep_args}}) {
    cmd->add_option("--data", args->data, "dataset cache")->required();
    cmd->add_option("--out", args->out,
                    cmd == eval_cmd ? "output report path (JSON)"
                                    : "output summary path (CSV)");
    cmd->add_option("--mode", args->mode, "peak, threshold or bow");
    cmd->add_option("--m", args->m, "projection count");
    cmd->add_option("--k", args->k, "group size");
    cmd->add_option("--p", args->p, "code length in symbols");
    cmd->add_option("--theta", args->theta,
                    "activation threshold, a number or 'auto'");
    cmd->add_option("--sigma", args->sigma, "projection scale");
    cmd->add_option("--runs", args->runs, "independent repetitions");
    cmd->add_option("--knn", args->knn, "neighbor count");
    cmd->add_option("--seed", args->seed, "master seed");
    cmd->add_option("--threads", args->threads, "worker cap (0 = hardware)");
  }
  sweep_args.out = "sweep.csv";
  sweep_cmd->add_option("--axis", sweep_args.axis, "k, p or theta")
      ->required();
  sweep_cmd->add_option("--values", sweep_args.values,
                        "comma-separated axis values")
      ->required();
  sweep_cmd->add_option("--report-dir", sweep_args.report_dir,
                        "also write one full report per value here");

  VerifyArgs verify;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "run the invariance self-checks (translation, rate, scale, "
                "time-warp, oracle equivalence)");
  verify_cmd->add_option("--seed", verify.seed, "corpus seed");
  verify_cmd->add_option("--cases", verify.cases, "cases per check");
  verify_cmd->add_flag("--bench", verify.bench,
                       "also probe wall-time linearity in n, m and p");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return e.get_exit_code();
  }

  try {
    if (*synth_cmd) run_synth(synth);
    if (*extract_cmd) run_extract(extract);
    if (*hash_cmd) run_hash(hash_args);
    if (*query_cmd) run_query(query);
    if (*eval_cmd) run_eval(eval_args);
    if (*sweep_cmd) run_sweep(sweep_args);
    if (*verify_cmd) return run_verify(verify);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
