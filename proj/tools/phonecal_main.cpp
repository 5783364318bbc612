// Command-line pipeline: reduce -> pool -> eval/calibrate/crosscal,
// plus confusion analysis, synthetic corpus generation, and the
// shuffled-label caveat check.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "phonecal/calib.hpp"
#include "phonecal/core.hpp"
#include "phonecal/io.hpp"
#include "phonecal/metrics.hpp"
#include "phonecal/pooling.hpp"
#include "phonecal/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace phonecal;

static constexpr const char* kVersion = "0.1.0";

namespace {

class ManifestBuilder {
 public:
  ManifestBuilder(std::string command, json config)
      : start_(std::chrono::steady_clock::now()) {
    manifest_["command"] = std::move(command);
    manifest_["config"] = std::move(config);
    manifest_["inputs"] = json::object();
    manifest_["version"] = kVersion;
  }

  void add_input(const fs::path& p) {
    manifest_["inputs"][p.string()] = io::file_digest(p);
  }

  void set_seed(uint64_t seed) { manifest_["seed"] = seed; }

  json finish() {
    auto elapsed = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start_)
                       .count();
    manifest_["wall_time_s"] = elapsed;
    return manifest_;
  }

 private:
  json manifest_;
  std::chrono::steady_clock::time_point start_;
};

void emit_report(const json& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << std::endl;
  } else {
    std::ofstream out(out_path);
    if (!out) throw FormatError("cannot write " + out_path);
    out << report.dump(2) << '\n';
  }
}

PriorVector load_eval_prior(const std::string& prior_path, int n) {
  if (prior_path.empty()) return PriorVector::flat(n);
  PriorVector p = io::read_priors(prior_path);
  if (p.size() != n)
    throw InvalidInput("evaluation prior length does not match phone set");
  return p;
}

json report_from_eval(const EvalReport& r) {
  json j;
  j["h_mc"] = r.h_mc;
  j["per_class_penalty"] = r.per_class_penalty;
  j["class_counts"] = r.class_counts;
  j["n_active_classes"] = r.n_active_classes;
  j["eval_prior"] = r.eval_prior.values;
  return j;
}

json report_from_fit(const FitResult& r) {
  json j;
  j["alpha"] = r.transform.alpha;
  j["beta"] = r.transform.beta;
  j["h_mc_before"] = r.h_mc_before;
  j["h_mc_after"] = r.h_mc_after;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["alpha_nonpositive"] = r.alpha_nonpositive;
  return j;
}

std::vector<fs::path> matrix_files_in(const fs::path& dir,
                                      const std::string& bin_ext) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().filename() == "alignment.csv") continue;
    auto ext = entry.path().extension();
    if (ext == bin_ext || ext == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw InvalidInput("no matrix files found in " + dir.string());
  return files;
}

DurationLaw duration_from_json(const json& j) {
  std::string law = j.at("law").get<std::string>();
  if (law == "fixed") return DurationLaw::fixed(j.at("n").get<int>());
  if (law == "uniform")
    return DurationLaw::uniform(j.at("a").get<int>(), j.at("b").get<int>());
  if (law == "geometric") return DurationLaw::geometric(j.at("p").get<double>());
  throw InvalidInput("unknown duration law: " + law);
}

SynthConfig synth_config_from_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  json j;
  in >> j;
  SynthConfig cfg;
  cfg.n_phones = j.at("n_phones").get<int>();
  cfg.dim = j.value("dim", 2);
  if (j.contains("class_means"))
    cfg.class_means = j["class_means"].get<std::vector<Vec>>();
  cfg.sigma = j.value("sigma", 1.0);
  cfg.rho = j.value("rho", 0.0);
  if (j.contains("duration")) cfg.duration = duration_from_json(j["duration"]);
  cfg.n_trials_per_class = j.at("n_trials_per_class").get<int>();
  cfg.seed = j.value("seed", uint64_t{0});
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"phone-likelihood calibration toolkit"};
  app.require_subcommand(1);

  // reduce
  std::string posteriors_dir, pdf_map_file, pdf_priors_file, phones_file,
      out_dir;
  double floor = kDefaultPosteriorFloor;
  auto* reduce = app.add_subcommand(
      "reduce", "pdf posteriors -> phone log-likelihood matrices");
  reduce->add_option("--posteriors", posteriors_dir)->required();
  reduce->add_option("--pdf-map", pdf_map_file)->required();
  reduce->add_option("--pdf-priors", pdf_priors_file)->required();
  reduce->add_option("--phones", phones_file)->required();
  reduce->add_option("--out", out_dir)->required();
  reduce->add_option("--floor", floor, "posterior floor before the log");

  // pool
  std::string llk_dir, align_file, method_name = "mean", out_file;
  auto* pool_cmd = app.add_subcommand(
      "pool", "frame log-likelihoods + alignment -> phone trials");
  pool_cmd->add_option("--llk", llk_dir)->required();
  pool_cmd->add_option("--align", align_file)->required();
  pool_cmd->add_option("--phones", phones_file)->required();
  pool_cmd->add_option("--method", method_name, "sum|mean|logdur");
  pool_cmd->add_option("--out", out_file)->required();

  // eval
  std::string trials_file, transform_file, prior_file, report_out;
  auto* eval_cmd = app.add_subcommand("eval", "class-balanced cross entropy");
  eval_cmd->add_option("--trials", trials_file)->required();
  eval_cmd->add_option("--phones", phones_file)->required();
  eval_cmd->add_option("--transform", transform_file);
  eval_cmd->add_option("--prior", prior_file);
  eval_cmd->add_option("--out", report_out);

  // calibrate
  std::string transform_out;
  int max_iter = 500;
  double tol = 1e-7, ridge = 0.0;
  auto* cal_cmd = app.add_subcommand("calibrate", "fit the affine transform");
  cal_cmd->add_option("--trials", trials_file)->required();
  cal_cmd->add_option("--phones", phones_file)->required();
  cal_cmd->add_option("--out", transform_out)->required();
  cal_cmd->add_option("--prior", prior_file);
  cal_cmd->add_option("--max-iter", max_iter);
  cal_cmd->add_option("--tol", tol);
  cal_cmd->add_option("--ridge", ridge);
  cal_cmd->add_option("--report", report_out);

  // crosscal
  std::string trials_a, trials_b;
  auto* cross_cmd =
      app.add_subcommand("crosscal", "calibrate each set on the other");
  cross_cmd->add_option("--trials-a", trials_a)->required();
  cross_cmd->add_option("--trials-b", trials_b)->required();
  cross_cmd->add_option("--phones", phones_file)->required();
  cross_cmd->add_option("--prior", prior_file);
  cross_cmd->add_option("--max-iter", max_iter);
  cross_cmd->add_option("--tol", tol);
  cross_cmd->add_option("--out", report_out);

  // confusion
  std::string subset = "all", out_csv, out_pgm;
  bool stress_split = false;
  auto* conf_cmd = app.add_subcommand("confusion", "pairwise EER matrix");
  conf_cmd->add_option("--trials", trials_file)->required();
  conf_cmd->add_option("--phones", phones_file)->required();
  conf_cmd->add_option("--subset", subset,
                       "'all' or a file with one phone label per line");
  conf_cmd->add_flag("--stress-split", stress_split);
  conf_cmd->add_option("--out-csv", out_csv);
  conf_cmd->add_option("--out-pgm", out_pgm);

  // synth
  std::string config_file;
  int segments_per_utt = 100;
  uint64_t seed = 0;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
  synth_cmd->add_option("--config", config_file)->required();
  synth_cmd->add_option("--out", out_dir)->required();
  synth_cmd->add_option("--segments-per-utt", segments_per_utt);
  auto* synth_seed =
      synth_cmd->add_option("--seed", seed, "overrides the config seed");

  // caveat
  auto* caveat_cmd =
      app.add_subcommand("caveat", "shuffled-label sanity experiment");
  caveat_cmd->add_option("--trials", trials_file)->required();
  caveat_cmd->add_option("--phones", phones_file)->required();
  caveat_cmd->add_option("--seed", seed)->required();
  caveat_cmd->add_option("--prior", prior_file);
  caveat_cmd->add_option("--max-iter", max_iter);
  caveat_cmd->add_option("--tol", tol);
  caveat_cmd->add_option("--out", report_out);

  CLI11_PARSE(app, argc, argv);

  if (reduce->parsed()) {
    ManifestBuilder mb("reduce", {{"floor", floor}});
    PhoneSet phones = io::read_phone_set(phones_file);
    PdfMap map = io::read_pdf_map(pdf_map_file, phones);
    PriorVector pdf_priors = io::read_priors(pdf_priors_file);
    PriorVector phone_priors = reduce_pdf_priors(pdf_priors, map, phones);
    mb.add_input(phones_file);
    mb.add_input(pdf_map_file);
    mb.add_input(pdf_priors_file);
    fs::create_directories(out_dir);
    io::write_priors(fs::path(out_dir) / "phone_priors.txt", phone_priors);
    for (const fs::path& file : matrix_files_in(posteriors_dir, ".fpm")) {
      Matrix m = io::read_matrix(file, io::MatrixKind::kPosterior);
      validate_and_renormalize_rows(m);
      Matrix reduced = reduce_pdf_posteriors(m, map, phones);
      Matrix llk;
      llk.utterance_id = reduced.utterance_id;
      llk.rows = reduced.rows;
      llk.cols = reduced.cols;
      llk.values.reserve(reduced.values.size());
      for (int t = 0; t < reduced.rows; ++t) {
        LogLikVector v = frame_log_likelihoods(reduced.row(t), reduced.cols,
                                               phone_priors, floor);
        llk.values.insert(llk.values.end(), v.values.begin(), v.values.end());
      }
      mb.add_input(file);
      io::write_matrix(fs::path(out_dir) / (file.stem().string() + ".fll"),
                       llk, io::MatrixKind::kLogLik);
    }
    emit_report(mb.finish(), (fs::path(out_dir) / "manifest.json").string());
  } else if (pool_cmd->parsed()) {
    ManifestBuilder mb("pool", {{"method", method_name}});
    PhoneSet phones = io::read_phone_set(phones_file);
    std::vector<PhoneSegment> segments = io::read_alignment(align_file, phones);
    std::map<std::string, Matrix> llk;
    for (const fs::path& file : matrix_files_in(llk_dir, ".fll")) {
      Matrix m = io::read_matrix(file, io::MatrixKind::kLogLik);
      mb.add_input(file);
      llk.emplace(m.utterance_id, std::move(m));
    }
    mb.add_input(phones_file);
    mb.add_input(align_file);
    auto trials =
        pool(segments, llk, pool_method_from_string(method_name));
    io::write_trials(out_file, trials, phones);
    emit_report(mb.finish(), out_file + ".manifest.json");
  } else if (eval_cmd->parsed()) {
    ManifestBuilder mb("eval", {{"prior", prior_file.empty() ? "flat"
                                                             : prior_file}});
    PhoneSet phones = io::read_phone_set(phones_file);
    auto trials = io::read_trials(trials_file, phones);
    PriorVector prior = load_eval_prior(prior_file, phones.size());
    mb.add_input(trials_file);
    mb.add_input(phones_file);
    std::optional<CalibrationTransform> transform;
    if (!transform_file.empty()) {
      transform = io::read_transform(transform_file, phones);
      mb.add_input(transform_file);
    }
    EvalReport r =
        h_mc(trials, prior, transform ? &*transform : nullptr);
    json report = report_from_eval(r);
    report["manifest"] = mb.finish();
    emit_report(report, report_out);
  } else if (cal_cmd->parsed()) {
    ManifestBuilder mb("calibrate",
                       {{"max_iter", max_iter}, {"tol", tol}, {"ridge", ridge}});
    PhoneSet phones = io::read_phone_set(phones_file);
    auto trials = io::read_trials(trials_file, phones);
    PriorVector prior = load_eval_prior(prior_file, phones.size());
    mb.add_input(trials_file);
    mb.add_input(phones_file);
    FitOptions opts;
    opts.max_iter = max_iter;
    opts.tol = tol;
    opts.ridge = ridge;
    FitResult r = fit(trials, prior, opts);
    io::write_transform(transform_out, r.transform, phones);
    json report = report_from_fit(r);
    report["manifest"] = mb.finish();
    emit_report(report, report_out);
  } else if (cross_cmd->parsed()) {
    ManifestBuilder mb("crosscal", {{"max_iter", max_iter}, {"tol", tol}});
    PhoneSet phones = io::read_phone_set(phones_file);
    auto a = io::read_trials(trials_a, phones);
    auto b = io::read_trials(trials_b, phones);
    PriorVector prior = load_eval_prior(prior_file, phones.size());
    mb.add_input(trials_a);
    mb.add_input(trials_b);
    mb.add_input(phones_file);
    FitOptions opts;
    opts.max_iter = max_iter;
    opts.tol = tol;
    FitResult fit_a = fit(a, prior, opts);
    FitResult fit_b = fit(b, prior, opts);
    json report;
    report["a"] = {{"h_mc", h_mc(a, prior).h_mc},
                   {"h_mc_cal", h_mc(a, prior, &fit_b.transform).h_mc}};
    report["b"] = {{"h_mc", h_mc(b, prior).h_mc},
                   {"h_mc_cal", h_mc(b, prior, &fit_a.transform).h_mc}};
    report["transform_from_a"] = report_from_fit(fit_a);
    report["transform_from_b"] = report_from_fit(fit_b);
    report["manifest"] = mb.finish();
    emit_report(report, report_out);
  } else if (conf_cmd->parsed()) {
    ManifestBuilder mb("confusion",
                       {{"subset", subset}, {"stress_split", stress_split}});
    PhoneSet phones = io::read_phone_set(phones_file);
    auto trials = io::read_trials(trials_file, phones);
    mb.add_input(trials_file);
    mb.add_input(phones_file);
    std::vector<int> sel;
    if (subset != "all") {
      PhoneSet wanted = io::read_phone_set(subset);
      for (const auto& l : wanted.labels) sel.push_back(phones.index_of(l));
      mb.add_input(subset);
    }
    ConfusionMatrix cm = confusion_matrix(trials, phones, sel, stress_split);
    if (!out_csv.empty()) io::write_confusion_csv(out_csv, cm, phones);
    if (!out_pgm.empty()) io::write_confusion_pgm(out_pgm, cm);
    std::string manifest_path =
        !out_csv.empty() ? out_csv + ".manifest.json"
                         : (!out_pgm.empty() ? out_pgm + ".manifest.json" : "");
    emit_report(mb.finish(), manifest_path);
  } else if (synth_cmd->parsed()) {
    SynthConfig cfg = synth_config_from_file(config_file);
    if (synth_seed->count() > 0) cfg.seed = seed;
    ManifestBuilder mb("synth", {{"config_file", config_file},
                                 {"segments_per_utt", segments_per_utt}});
    mb.add_input(config_file);
    mb.set_seed(cfg.seed);
    SynthCorpus corpus = generate(cfg);
    fs::create_directories(out_dir);
    io::write_phone_set(fs::path(out_dir) / "phones.txt", corpus.phones);

    std::vector<PhoneSegment> segments;
    size_t k = 0;
    int utt_index = 0;
    while (k < corpus.trials.size()) {
      Matrix m;
      char name[32];
      std::snprintf(name, sizeof(name), "utt%05d", utt_index++);
      m.utterance_id = name;
      m.cols = cfg.n_phones;
      for (int s = 0; s < segments_per_utt && k < corpus.trials.size();
           ++s, ++k) {
        const SynthTrial& trial = corpus.trials[k];
        PhoneSegment seg;
        seg.utterance_id = m.utterance_id;
        seg.phone = trial.true_phone;
        seg.start_frame = m.rows;
        for (const LogLikVector& frame : trial.frames) {
          m.values.insert(m.values.end(), frame.values.begin(),
                          frame.values.end());
          ++m.rows;
        }
        seg.end_frame = m.rows;
        segments.push_back(seg);
      }
      io::write_matrix(fs::path(out_dir) / (m.utterance_id + ".fll"), m,
                       io::MatrixKind::kLogLik);
    }
    io::write_alignment(fs::path(out_dir) / "alignment.csv", segments,
                        corpus.phones);
    emit_report(mb.finish(), (fs::path(out_dir) / "manifest.json").string());
  } else if (caveat_cmd->parsed()) {
    ManifestBuilder mb("caveat", {{"max_iter", max_iter}, {"tol", tol}});
    mb.set_seed(seed);
    PhoneSet phones = io::read_phone_set(phones_file);
    auto trials = io::read_trials(trials_file, phones);
    PriorVector prior = load_eval_prior(prior_file, phones.size());
    mb.add_input(trials_file);
    mb.add_input(phones_file);
    auto shuffled = shuffle_labels(trials, seed);
    FitOptions opts;
    opts.max_iter = max_iter;
    opts.tol = tol;
    FitResult r = fit(shuffled, prior, opts);
    json report;
    report["h_mc_shuffled"] = r.h_mc_before;
    report["h_mc_shuffled_selfcal"] = r.h_mc_after;
    report["ln_N"] = std::log(static_cast<double>(phones.size()));
    report["manifest"] = mb.finish();
    emit_report(report, report_out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
