#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spectrasort/error.hpp"
#include "spectrasort/eval.hpp"
#include "spectrasort/learn.hpp"
#include "spectrasort/preprocess.hpp"
#include "spectrasort/reports.hpp"
#include "spectrasort/spectra_io.hpp"
#include "spectrasort/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spectrasort;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitStrict = 3;

constexpr std::uint64_t kDefaultSeed = 20190601;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

template <class T>
std::vector<T> parse_numbers(const std::string& s, const char* flag) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) {
    try {
      std::size_t used = 0;
      if constexpr (std::is_floating_point_v<T>) out.push_back(static_cast<T>(std::stod(item, &used)));
      else out.push_back(static_cast<T>(std::stoll(item, &used)));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw UsageError(std::string(flag) + ": not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  out << content;
  if (!out) throw Error(Errc::Io, "write failed: " + path);
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string sidecar(const std::string& dataset_path) { return dataset_path + ".classes"; }

LabeledDataset load_data(const std::string& path) {
  auto names = read_class_names(sidecar(path)).value_or(default_alloy_names());
  return read_dataset_file(path, std::move(names));
}

void save_data(const LabeledDataset& ds, const std::string& path) {
  write_dataset_file(ds, path);
  write_class_names(ds.class_names, sidecar(path));
}

json grid_json(const WavelengthGrid& g) {
  return {{"start_nm", g.start_nm}, {"end_nm", g.end_nm}, {"n_points", g.n_points}};
}

json gate_json(const GateConfig& g) {
  return {{"low_all_threshold", g.low_all_threshold},
          {"peak_threshold", g.peak_threshold},
          {"saturation_value", g.saturation_value},
          {"saturation_tolerance", g.saturation_tolerance}};
}

// Options shared by every command.
struct Common {
  std::uint64_t seed = kDefaultSeed;
  int jobs = 1;
};

struct GridArgs {
  WavelengthGrid grid;
  void add(CLI::App* cmd) {
    cmd->add_option("--grid-start", grid.start_nm, "first grid wavelength (nm)");
    cmd->add_option("--grid-end", grid.end_nm, "last grid wavelength (nm)");
    cmd->add_option("--grid-points", grid.n_points, "number of grid points");
  }
  WavelengthGrid get() const {
    try {
      grid.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return grid;
  }
};

// Algorithm, scaler and hyperparameters of one pipeline.
struct PipelineArgs {
  std::string algo = "linear-svm";
  std::string scaler = "standard";
  std::string loss = "squared-hinge";
  Hyperparams hp;

  void add(CLI::App* cmd, bool neighbours_as_k) {
    cmd->add_option("--algo", algo, "linear-svm | logreg | knn | mlp")->capture_default_str();
    add_hyper(cmd, neighbours_as_k);
    cmd->add_option("--scaler", scaler, "standard | minmax | maxabs | robust | normalizer | none")
        ->capture_default_str();
  }

  void add_hyper(CLI::App* cmd, bool neighbours_as_k) {
    cmd->add_option("--loss", loss, "hinge | squared-hinge")->capture_default_str();
    cmd->add_option("--C", hp.c, "SVM penalty")->capture_default_str();
    cmd->add_option("--lambda", hp.lambda, "logistic regression L2 weight")->capture_default_str();
    cmd->add_option(neighbours_as_k ? "--k,--neighbors" : "--neighbors", hp.k,
                    "k-NN neighbour count (odd)")
        ->capture_default_str();
    cmd->add_option("--hidden", hp.mlp.hidden_units, "MLP hidden units")->capture_default_str();
    cmd->add_option("--epochs", hp.mlp.epochs, "MLP epochs")->capture_default_str();
    cmd->add_option("--lr", hp.mlp.learning_rate, "MLP learning rate")->capture_default_str();
    cmd->add_option("--batch", hp.mlp.batch_size, "MLP batch size")->capture_default_str();
    cmd->add_option("--max-iter", hp.solver.max_iter, "solver iteration cap")->capture_default_str();
  }

  Hyperparams hyper() const {
    Hyperparams out = hp;
    const auto l = loss_from_string(loss);
    if (!l) throw UsageError("--loss: unknown loss '" + loss + "'");
    out.loss = *l;
    if (!(out.c > 0)) throw UsageError("--C must be positive");
    if (!(out.lambda >= 0)) throw UsageError("--lambda must be non-negative");
    if (out.k < 1 || out.k % 2 == 0) throw UsageError("k-NN needs an odd positive k, got " + std::to_string(out.k));
    if (out.mlp.hidden_units < 1 || out.mlp.epochs < 1 || out.mlp.batch_size < 1 ||
        !(out.mlp.learning_rate > 0))
      throw UsageError("MLP settings must be positive");
    if (out.solver.max_iter < 1) throw UsageError("--max-iter must be positive");
    return out;
  }

  Pipeline get() const {
    Pipeline p;
    const auto a = algorithm_from_string(algo);
    if (!a) throw UsageError("--algo: unknown algorithm '" + algo + "'");
    const auto s = scaler_from_string(scaler);
    if (!s) throw UsageError("--scaler: unknown scaler '" + scaler + "'");
    p.algorithm = *a;
    p.scaler = *s;
    p.hp = hyper();
    return p;
  }
};

// Train/test split for the held-out experiments: an explicit test file, an
// explicit list of test sample ids, or by default the last sample per class.
struct SplitArgs {
  std::string test_path;
  std::string test_samples;

  void add(CLI::App* cmd) {
    cmd->add_option("--test", test_path, "separate test dataset file");
    cmd->add_option("--test-samples", test_samples,
                    "comma list of sample ids held out (default: last sample per class)");
  }

  std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds, json& config) const {
    if (!test_path.empty() && !test_samples.empty())
      throw UsageError("--test and --test-samples are exclusive");
    if (!test_path.empty()) {
      config["test"] = test_path;
      return {ds, read_dataset_file(test_path, ds.class_names, ds.grid)};
    }
    std::set<int> ids;
    if (!test_samples.empty()) {
      for (auto v : parse_numbers<int>(test_samples, "--test-samples")) ids.insert(v);
    } else {
      ids = last_sample_per_class(ds);
    }
    config["test_samples"] = std::vector<int>(ids.begin(), ids.end());
    return split_by_sample(ds, ids);
  }
};

struct Reporting {
  std::string out;
  std::string text;
  void add(CLI::App* cmd) {
    cmd->add_option("--out", out, "JSON report file")->required();
    cmd->add_option("--text", text, "aligned text table file");
  }
  void emit(std::string_view command, const Common& c, const json& config, const json& body,
            const std::string& table) const {
    write_json(out, with_provenance(command, c.seed, config, body));
    if (!text.empty()) write_text(text, table);
    std::cout << table;
  }
};

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string manifest;
  std::string out;
  std::string report;
};

// {"grid": {...}, "gate": {...}, "seed": n,
//  "entries": [{"path": dir-or-file, "alloy": name, "alloy_index": i, "sample_id": id}, ...]}
int run_ingest(const IngestArgs& a, const Common&) {
  std::ifstream in(a.manifest);
  if (!in) throw Error(Errc::Io, "cannot open manifest " + a.manifest);
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::SchemaMismatch, a.manifest + ": " + e.what());
  }
  try {
    WavelengthGrid grid;
    if (m.contains("grid")) {
      const auto& g = m["grid"];
      grid.start_nm = g.value("start_nm", grid.start_nm);
      grid.end_nm = g.value("end_nm", grid.end_nm);
      grid.n_points = g.value("n_points", grid.n_points);
    }
    grid.validate();
    GateConfig gate;
    if (m.contains("gate")) {
      const auto& g = m["gate"];
      gate.low_all_threshold = g.value("low_all_threshold", gate.low_all_threshold);
      gate.peak_threshold = g.value("peak_threshold", gate.peak_threshold);
      gate.saturation_value = g.value("saturation_value", gate.saturation_value);
      gate.saturation_tolerance = g.value("saturation_tolerance", gate.saturation_tolerance);
    }
    gate.validate();

    const auto& entries = m.at("entries");
    if (!entries.is_array() || entries.empty())
      throw Error(Errc::SchemaMismatch, a.manifest + ": 'entries' must be a non-empty list");

    std::map<int, std::string> names;
    std::set<std::pair<std::string, int>> seen;
    for (const auto& e : entries) {
      const int idx = e.at("alloy_index").get<int>();
      const auto name = e.at("alloy").get<std::string>();
      if (idx < 0) throw Error(Errc::LabelOutOfRange, a.manifest + ": negative alloy_index");
      const auto [it, fresh] = names.emplace(idx, name);
      if (!fresh && it->second != name)
        throw Error(Errc::ClassNameMismatch,
                    a.manifest + ": alloy_index " + std::to_string(idx) + " named both '" +
                        it->second + "' and '" + name + "'");
      if (!seen.emplace(e.at("path").get<std::string>(), e.at("sample_id").get<int>()).second)
        throw Error(Errc::SchemaMismatch, a.manifest + ": duplicate entry");
    }
    std::vector<std::string> class_names;
    for (const auto& [idx, name] : names) {
      if (idx != static_cast<int>(class_names.size()))
        throw Error(Errc::LabelOutOfRange, a.manifest + ": alloy_index values must be dense from 0");
      class_names.push_back(name);
    }

    std::vector<LabeledDataset> parts;
    GateReport total;
    for (const auto& e : entries) {
      const fs::path path = e.at("path").get<std::string>();
      const int idx = e.at("alloy_index").get<int>();
      const int sample_id = e.at("sample_id").get<int>();
      std::vector<fs::path> files;
      if (fs::is_directory(path)) {
        for (const auto& f : fs::directory_iterator(path))
          if (f.is_regular_file()) files.push_back(f.path());
        std::sort(files.begin(), files.end());
      } else if (fs::is_regular_file(path)) {
        files.push_back(path);
      } else {
        throw Error(Errc::Io, path.string() + ": no such file or directory");
      }
      std::vector<Spectrum> spectra;
      for (const auto& f : files) spectra.push_back(parse_raw_spectrum_file(f.string(), grid, sample_id));
      auto [ds, report] = assemble(spectra, idx, class_names, grid, gate);
      parts.push_back(std::move(ds));
      total.merge(report);
    }
    const auto merged = merge(parts);
    save_data(merged, a.out);

    const json config = {{"manifest", a.manifest}, {"grid", grid_json(grid)}, {"gate", gate_json(gate)},
                         {"class_names", class_names}};
    const auto report_path = a.report.empty() ? a.out + ".gate.json" : a.report;
    const std::uint64_t seed = m.value("seed", kDefaultSeed);
    write_json(report_path, with_provenance("ingest", seed, config, to_json(total)));
    std::cout << text_report(total) << "wrote " << merged.size() << " spectra to " << a.out << '\n';
    return kExitOk;
  } catch (const json::exception& e) {
    throw Error(Errc::SchemaMismatch, a.manifest + ": " + e.what());
  }
}

struct GateArgs {
  std::vector<std::string> files;
  GridArgs grid;
  GateConfig gate;
  std::string out;
};

int run_gate(const GateArgs& a, const Common& c) {
  const auto grid = a.grid.get();
  try {
    a.gate.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  GateReport report;
  json verdicts = json::array();
  for (const auto& f : a.files) {
    const auto s = parse_raw_spectrum_file(f, grid, 0);
    const auto v = quality_gate(s, a.gate);
    report.add(v.reason);
    verdicts.push_back({{"file", f}, {"verdict", to_string(v.reason)}});
    std::cout << f << "  " << to_string(v.reason) << '\n';
  }
  std::cout << text_report(report);
  if (!a.out.empty()) {
    json body = to_json(report);
    body["files"] = verdicts;
    const json config = {{"files", a.files}, {"grid", grid_json(grid)}, {"gate", gate_json(a.gate)}};
    write_json(a.out, with_provenance("gate", c.seed, config, body));
  }
  return kExitOk;
}

struct TrainArgs {
  std::string data;
  PipelineArgs pipe;
  std::string model_out;
  std::string report;
  bool strict = false;
};

int run_train(const TrainArgs& a, const Common& c) {
  const auto p = a.pipe.get();
  const auto ds = load_data(a.data);
  const auto model = fit(p, ds, c.seed);

  const SolverReport* solver = nullptr;
  if (const auto* m = std::get_if<LinearModel>(&model)) solver = &m->solver_report;
  if (const auto* m = std::get_if<LogRegModel>(&model)) solver = &m->solver_report;
  const bool converged = !solver || solver->all_converged();
  if (!converged) {
    std::cerr << "warning: solver did not converge within " << p.hp.solver.max_iter << " iterations\n";
    if (a.strict) return kExitStrict;
  }
  save_model_file(model, a.model_out);

  if (!a.report.empty()) {
    json body = {{"rows", ds.size()}, {"classes", ds.class_names}, {"converged", converged}};
    if (solver) {
      body["iterations"] = solver->iterations;
      body["final_objective"] = solver->final_objective;
    }
    if (const auto* m = std::get_if<MlpModel>(&model))
      body["mlp"] = {{"epochs", m->training_report.epochs},
                     {"initial_loss", m->training_report.initial_loss},
                     {"final_loss", m->training_report.final_loss}};
    const json config = {{"data", a.data}, {"pipeline", to_json(p)}};
    write_json(a.report, with_provenance("train", c.seed, config, body));
  }
  std::cout << "trained " << to_string(p.algorithm) << " on " << ds.size() << " spectra, "
            << ds.n_classes() << " classes -> " << a.model_out << '\n';
  return kExitOk;
}

struct ClassifyArgs {
  std::string model;
  std::vector<std::string> files;
  bool timing = false;
  std::string out;
};

int run_classify(const ClassifyArgs& a, const Common&) {
  const auto model = load_model_file(a.model);
  const auto& grid = model_grid(model);
  const auto& names = class_names(model);
  std::ostringstream lines;
  for (const auto& f : a.files) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = parse_raw_spectrum_file(f, grid, 0);
    const auto verdict = quality_gate(s);
    std::ostringstream line;
    line << f << "  ";
    if (!verdict.accepted) {
      line << "REJECTED (" << to_string(verdict.reason) << ")";
    } else {
      Matrix x(1, static_cast<Eigen::Index>(grid.n_points));
      for (std::size_t j = 0; j < grid.n_points; ++j)
        x(0, static_cast<Eigen::Index>(j)) = quantize_intensity(s.intensities[j]);
      const Matrix scores = class_scores(model, x);
      const int label = predict(model, x).front();
      std::string clear = "n/a";
      if (std::holds_alternative<LinearModel>(model)) {
        const auto positive = (scores.row(0).array() > 0.0).count();
        clear = positive == 1 ? "true" : "false";
      }
      line << "alloy=" << names.at(static_cast<std::size_t>(label)) << " unambiguous=" << clear
           << " scores=";
      for (Eigen::Index k = 0; k < scores.cols(); ++k)
        line << (k ? "," : "") << names.at(static_cast<std::size_t>(k)) << ':' << scores(0, k);
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    line << '\n';
    if (a.timing) line << f << "  latency_seconds=" << seconds << '\n';
    std::cout << line.str();
    lines << line.str();
  }
  if (!a.out.empty()) write_text(a.out, lines.str());
  return kExitOk;
}

struct CvArgs {
  std::string data;
  PipelineArgs pipe;
  int k = 10;
  Reporting rep;
};

int run_cv(const CvArgs& a, const Common& c) {
  const auto p = a.pipe.get();
  if (a.k < 2) throw UsageError("--k must be at least 2");
  const auto ds = load_data(a.data);
  const auto r = kfold_cv(ds, a.k, p, c.seed, c.jobs);
  const json config = {{"data", a.data}, {"k", a.k}, {"pipeline", to_json(p)}};
  a.rep.emit("cv", c, config, to_json(r), text_report(r));
  return kExitOk;
}

struct SweepArgs {
  std::string data;
  std::string algos = "linear-svm,logreg,knn,mlp";
  std::string scalers = "all";
  PipelineArgs pipe;
  int k = 10;
  Reporting rep;
};

int run_sweep(const SweepArgs& a, const Common& c) {
  std::vector<Algorithm> algos;
  for (const auto& s : split_list(a.algos)) {
    const auto v = algorithm_from_string(s);
    if (!v) throw UsageError("--algos: unknown algorithm '" + s + "'");
    algos.push_back(*v);
  }
  std::vector<ScalerKind> scalers;
  if (a.scalers == "all") {
    scalers = all_scaler_kinds();
  } else {
    for (const auto& s : split_list(a.scalers)) {
      const auto v = scaler_from_string(s);
      if (!v) throw UsageError("--scalers: unknown scaler '" + s + "'");
      scalers.push_back(*v);
    }
  }
  if (algos.empty() || scalers.empty()) throw UsageError("empty --algos or --scalers");
  if (a.k < 2) throw UsageError("--k must be at least 2");
  const auto hp = a.pipe.hyper();
  const auto ds = load_data(a.data);
  const auto r = sweep(ds, algos, scalers, a.k, c.seed, hp, c.jobs);
  json names_a = json::array(), names_s = json::array();
  for (auto v : algos) names_a.push_back(to_string(v));
  for (auto v : scalers) names_s.push_back(to_string(v));
  const json config = {{"data", a.data}, {"k", a.k}, {"algorithms", names_a}, {"scalers", names_s}};
  a.rep.emit("sweep", c, config, to_json(r), text_report(r));
  return kExitOk;
}

struct CurveArgs {
  std::string data;
  PipelineArgs pipe;
  std::string sizes = "5,50,100,200,400";
  SplitArgs split;
  Reporting rep;
};

int run_curve(const CurveArgs& a, const Common& c) {
  const auto p = a.pipe.get();
  const auto sizes = parse_numbers<long long>(a.sizes, "--sizes");
  std::vector<std::size_t> n;
  for (auto v : sizes) {
    if (v < 1) throw UsageError("--sizes must be positive");
    n.push_back(static_cast<std::size_t>(v));
  }
  if (!std::is_sorted(n.begin(), n.end()) || std::adjacent_find(n.begin(), n.end()) != n.end())
    throw UsageError("--sizes must be strictly ascending");
  const auto ds = load_data(a.data);
  json config = {{"data", a.data}, {"sizes", n}, {"pipeline", to_json(p)}};
  const auto [train, test] = a.split.split(ds, config);
  const auto r = learning_curve(train, test, n, p, c.seed, c.jobs);
  a.rep.emit("curve", c, config, to_json(r), text_report(r));
  return kExitOk;
}

struct GridSearchArgs {
  std::string data;
  std::string losses = "hinge,squared-hinge";
  std::string cs = "0.01,0.1,1,10,100";
  std::string scaler = "standard";
  int k = 10;
  int max_iter = SolverOptions{}.max_iter;
  SplitArgs split;
  Reporting rep;
};

int run_grid(const GridSearchArgs& a, const Common& c) {
  std::vector<LossKind> losses;
  for (const auto& s : split_list(a.losses)) {
    const auto v = loss_from_string(s);
    if (!v) throw UsageError("--losses: unknown loss '" + s + "'");
    losses.push_back(*v);
  }
  const auto cs = parse_numbers<double>(a.cs, "--Cs");
  for (auto v : cs)
    if (!(v > 0)) throw UsageError("--Cs must be positive");
  const auto scaler = scaler_from_string(a.scaler);
  if (!scaler) throw UsageError("--scaler: unknown scaler '" + a.scaler + "'");
  if (losses.empty()) throw UsageError("empty --losses");
  if (a.k < 2) throw UsageError("--k must be at least 2");
  if (a.max_iter < 1) throw UsageError("--max-iter must be positive");
  SolverOptions solver;
  solver.max_iter = a.max_iter;
  const auto ds = load_data(a.data);
  json loss_names = json::array();
  for (auto l : losses) loss_names.push_back(to_string(l));
  json config = {{"data", a.data}, {"k", a.k},   {"losses", loss_names},
                 {"Cs", cs},       {"scaler", to_string(*scaler)}, {"max_iter", a.max_iter}};
  const auto [train, test] = a.split.split(ds, config);
  const auto r = grid_search(train, test, losses, cs, a.k, *scaler, c.seed, solver, c.jobs);
  a.rep.emit("grid", c, config, to_json(r), text_report(r));
  return kExitOk;
}

struct ValidateArgs {
  std::string model;
  std::string data;
  std::string taxonomy = "default";
  std::string confusion_csv;
  Reporting rep;
};

int run_validate(const ValidateArgs& a, const Common& c) {
  const auto model = load_model_file(a.model);
  const auto taxonomy = a.taxonomy == "default" ? AlloyTaxonomy::default_taxonomy()
                                                : AlloyTaxonomy::load(a.taxonomy);
  const auto test = read_dataset_file(a.data, class_names(model), model_grid(model));
  const auto r = evaluate(model, test, &taxonomy);
  const json config = {{"model", a.model}, {"data", a.data}, {"taxonomy", a.taxonomy},
                       {"model_kind", model_kind(model)}};
  const auto csv = confusion_csv(r.confusion, &taxonomy);
  write_text(a.confusion_csv.empty() ? a.rep.out + ".confusion.csv" : a.confusion_csv, csv);
  a.rep.emit("validate", c, config, to_json(r), text_report(r));
  return kExitOk;
}

struct SynthArgs {
  std::string config;
  std::string catalog;
  std::string compositions;
  std::string out;
  std::string report;
  GridArgs grid;
  SynthLayout layout;
  int first_sample_id = 0;
};

int run_synth(const SynthArgs& a, const Common& c, bool seed_given) {
  auto cfg = a.config.empty() ? SynthConfig{} : SynthConfig::load(a.config);
  if (seed_given) cfg.seed = c.seed;
  const auto grid = a.grid.get();
  const auto cat = a.catalog.empty() ? default_catalog() : ElementLineCatalog::load(a.catalog);
  const auto comps = a.compositions.empty() ? default_compositions() : load_compositions(a.compositions);
  auto layout = a.layout;
  if (layout.samples_per_alloy < 1 || layout.spectra_per_sample < 1)
    throw UsageError("--samples and --spectra must be positive");
  layout.first_sample_id = a.first_sample_id > 0 ? a.first_sample_id : (layout.offspec ? 201 : 101);

  GateReport gate;
  const auto ds = synth_dataset(comps, cat, cfg, grid, layout, &gate);
  save_data(ds, a.out);

  const json config = {{"config", a.config.empty() ? "built-in" : a.config},
                       {"catalog", a.catalog.empty() ? "built-in" : a.catalog},
                       {"compositions", a.compositions.empty() ? "built-in" : a.compositions},
                       {"grid", grid_json(grid)},
                       {"samples_per_alloy", layout.samples_per_alloy},
                       {"spectra_per_sample", layout.spectra_per_sample},
                       {"first_sample_id", layout.first_sample_id},
                       {"offspec", layout.offspec}};
  write_json(a.report.empty() ? a.out + ".gate.json" : a.report,
             with_provenance("synth", cfg.seed, config, to_json(gate)));
  std::cout << text_report(gate) << "wrote " << ds.size() << " spectra (" << ds.n_classes()
            << " classes) to " << a.out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Alloy identification from optical emission spectra"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Common common;
  const auto add_common = [&](CLI::App* cmd, bool random) {
    if (random) cmd->add_option("--seed", common.seed, "master seed")->capture_default_str();
    cmd->add_option("--jobs", common.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  };

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "gate, label and merge raw spectra listed in a manifest");
  c_ingest->add_option("--manifest", ingest.manifest, "JSON run manifest")->required();
  c_ingest->add_option("--out", ingest.out, "dataset file")->required();
  c_ingest->add_option("--report", ingest.report, "gate report (default <out>.gate.json)");
  add_common(c_ingest, false);

  GateArgs gate;
  auto* c_gate = app.add_subcommand("gate", "run the quality gate on raw spectra");
  c_gate->add_option("files", gate.files, "raw spectrum files")->required();
  c_gate->add_option("--out", gate.out, "JSON report file");
  c_gate->add_option("--low-all", gate.gate.low_all_threshold, "low-signal threshold")->capture_default_str();
  c_gate->add_option("--peak", gate.gate.peak_threshold, "peak threshold")->capture_default_str();
  c_gate->add_option("--saturation", gate.gate.saturation_value, "saturation value")->capture_default_str();
  gate.grid.add(c_gate);
  add_common(c_gate, false);

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "fit a model on a dataset file");
  c_train->add_option("--data", train.data, "dataset file")->required();
  c_train->add_option("--model-out", train.model_out, "model file")->required();
  c_train->add_option("--report", train.report, "JSON training report");
  c_train->add_flag("--strict", train.strict, "exit 3 if the solver does not converge");
  train.pipe.add(c_train, true);
  add_common(c_train, true);

  ClassifyArgs classify;
  auto* c_classify = app.add_subcommand("classify", "identify the alloy of raw spectra");
  c_classify->add_option("--model", classify.model, "model file")->required();
  c_classify->add_option("files", classify.files, "raw spectrum files")->required();
  c_classify->add_flag("--timing", classify.timing, "print per-spectrum latency");
  c_classify->add_option("--out", classify.out, "also write the result lines here");
  add_common(c_classify, false);

  CvArgs cv;
  auto* c_cv = app.add_subcommand("cv", "stratified k-fold cross-validation");
  c_cv->add_option("--data", cv.data, "dataset file")->required();
  c_cv->add_option("--k", cv.k, "folds")->capture_default_str();
  cv.pipe.add(c_cv, false);
  cv.rep.add(c_cv);
  add_common(c_cv, true);

  SweepArgs sw;
  auto* c_sweep = app.add_subcommand("sweep", "cross-validate every algorithm x scaler cell");
  c_sweep->add_option("--data", sw.data, "dataset file")->required();
  c_sweep->add_option("--algos", sw.algos, "comma list of algorithms")->capture_default_str();
  c_sweep->add_option("--scalers", sw.scalers, "comma list of scalers, or all")->capture_default_str();
  c_sweep->add_option("--k", sw.k, "folds")->capture_default_str();
  sw.pipe.add_hyper(c_sweep, false);
  sw.rep.add(c_sweep);
  add_common(c_sweep, true);

  CurveArgs curve;
  auto* c_curve = app.add_subcommand("curve", "learning curve on a sample-held-out split");
  c_curve->add_option("--data", curve.data, "dataset file")->required();
  c_curve->add_option("--sizes", curve.sizes, "spectra per class, ascending")->capture_default_str();
  curve.pipe.add(c_curve, false);
  curve.split.add(c_curve);
  curve.rep.add(c_curve);
  add_common(c_curve, true);

  GridSearchArgs grid;
  auto* c_grid = app.add_subcommand("grid", "linear SVM loss x C grid search");
  c_grid->add_option("--data", grid.data, "dataset file")->required();
  c_grid->add_option("--losses", grid.losses, "comma list of losses")->capture_default_str();
  c_grid->add_option("--Cs", grid.cs, "comma list of C values")->capture_default_str();
  c_grid->add_option("--scaler", grid.scaler, "scaler")->capture_default_str();
  c_grid->add_option("--k", grid.k, "folds")->capture_default_str();
  c_grid->add_option("--max-iter", grid.max_iter, "solver iteration cap")->capture_default_str();
  grid.split.add(c_grid);
  grid.rep.add(c_grid);
  add_common(c_grid, true);

  ValidateArgs validate;
  auto* c_validate = app.add_subcommand("validate", "score a model on a validation dataset");
  c_validate->add_option("--model", validate.model, "model file")->required();
  c_validate->add_option("--data", validate.data, "validation dataset file")->required();
  c_validate->add_option("--taxonomy", validate.taxonomy, "default, or a taxonomy file")->capture_default_str();
  c_validate->add_option("--confusion-csv", validate.confusion_csv,
                         "confusion CSV (default <out>.confusion.csv)");
  validate.rep.add(c_validate);
  add_common(c_validate, false);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic dataset");
  c_synth->add_option("--config", synth.config, "synthesis config file (default built-in)");
  c_synth->add_option("--catalog", synth.catalog, "element line catalog (default built-in)");
  c_synth->add_option("--compositions", synth.compositions, "alloy compositions (default built-in)");
  c_synth->add_option("--out", synth.out, "dataset file")->required();
  c_synth->add_option("--report", synth.report, "gate report (default <out>.gate.json)");
  c_synth->add_option("--samples", synth.layout.samples_per_alloy, "physical samples per alloy")
      ->capture_default_str();
  c_synth->add_option("--spectra", synth.layout.spectra_per_sample, "spectra per sample")
      ->capture_default_str();
  c_synth->add_option("--first-sample-id", synth.first_sample_id,
                      "id of the first sample (default 101, 201 with --offspec)");
  c_synth->add_flag("--offspec", synth.layout.offspec, "draw samples with off-spec jitter");
  synth.grid.add(c_synth);
  add_common(c_synth, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_ingest->parsed()) return run_ingest(ingest, common);
    if (c_gate->parsed()) return run_gate(gate, common);
    if (c_train->parsed()) return run_train(train, common);
    if (c_classify->parsed()) return run_classify(classify, common);
    if (c_cv->parsed()) return run_cv(cv, common);
    if (c_sweep->parsed()) return run_sweep(sw, common);
    if (c_curve->parsed()) return run_curve(curve, common);
    if (c_grid->parsed()) return run_grid(grid, common);
    if (c_validate->parsed()) return run_validate(validate, common);
    if (c_synth->parsed()) return run_synth(synth, common, c_synth->count("--seed") > 0);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
