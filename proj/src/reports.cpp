#include "spectrasort/reports.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "spectrasort/error.hpp"
#include "spectrasort/rng.hpp"
#include "text_util.hpp"

namespace spectrasort {

using nlohmann::json;

namespace {

std::string pct(double v) { return detail::format_fixed(100.0 * v, 2); }

json solver_json(const SolverOptions& s) {
  return {{"eta0", s.eta0}, {"t0", s.t0}, {"rel_tol", s.rel_tol},
          {"patience", s.patience}, {"max_iter", s.max_iter}, {"max_halvings", s.max_halvings},
          {"pg_tol", s.pg_tol}, {"intercept_scaling", s.intercept_scaling}};
}

json hyper_json(const Hyperparams& hp) {
  return {{"C", hp.c},
          {"loss", to_string(hp.loss)},
          {"lambda", hp.lambda},
          {"k", hp.k},
          {"mlp",
           {{"hidden_units", hp.mlp.hidden_units},
            {"epochs", hp.mlp.epochs},
            {"learning_rate", hp.mlp.learning_rate},
            {"batch_size", hp.mlp.batch_size}}},
          {"solver", solver_json(hp.solver)}};
}

std::string f1_cell(double mean, double sd) { return pct(mean) + " +/- " + pct(sd); }

}  // namespace

std::string config_hash(const json& config) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(config.dump());
  return s.str();
}

json with_provenance(std::string_view command, std::uint64_t seed, const json& config, json body) {
  json out;
  out["tool"] = "spectrasort";
  out["version"] = kToolVersion;
  out["command"] = command;
  out["seed"] = seed;
  out["config"] = config;
  out["config_hash"] = config_hash(config);
  out["result"] = std::move(body);
  return out;
}

json to_json(const GateReport& r) {
  json counts = json::object();
  for (const auto& [reason, n] : r.counts) counts[std::string(to_string(reason))] = n;
  return {{"counts", counts}, {"total", r.total()}, {"rejected", r.rejected()},
          {"accept_rate", r.accept_rate()}};
}

json to_json(const Pipeline& p) {
  return {{"algorithm", to_string(p.algorithm)}, {"scaler", to_string(p.scaler)},
          {"hyperparams", hyper_json(p.hp)}};
}

json to_json(const ConfusionMatrix& cm) {
  json rows = json::array();
  for (std::size_t t = 0; t < cm.n_classes; ++t) {
    json row = json::array();
    for (std::size_t p = 0; p < cm.n_classes; ++p) row.push_back(cm.at(t, p));
    rows.push_back(row);
  }
  return {{"class_names", cm.class_names}, {"counts", rows}};
}

json to_json(const UnambiguousReport& r) {
  json j = {{"n_total", r.n_total}, {"n_clear", r.n_clear}, {"n_clear_correct", r.n_clear_correct},
            {"fraction_unambiguous", r.fraction_unambiguous}};
  j["accuracy_on_unambiguous"] =
      r.accuracy_on_unambiguous ? json(*r.accuracy_on_unambiguous) : json(nullptr);
  return j;
}

json to_json(const EvaluationReport& r) {
  json j = {{"confusion", to_json(r.confusion)}, {"per_class_f1", r.per_class_f1},
            {"macro_f1", r.macro_f1}};
  j["cluster_f1"] = r.cluster_f1 ? json(*r.cluster_f1) : json(nullptr);
  j["coverage"] = r.coverage ? to_json(*r.coverage) : json(nullptr);
  if (r.predict_seconds) j["predict_seconds"] = *r.predict_seconds;
  return j;
}

json to_json(const CVReport& r) {
  return {{"k", r.k},          {"seed", r.seed},         {"pipeline", to_json(r.pipeline)},
          {"fold_f1", r.fold_f1}, {"mean_f1", r.mean_f1}, {"std_f1", r.std_f1},
          {"folds", "stratified: per-class cv-shuffle stream, round-robin deal"},
          {"fold_of_row", r.fold_of_row}};
}

json to_json(const SweepReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells)
    cells.push_back({{"algorithm", to_string(c.algorithm)}, {"scaler", to_string(c.scaler)},
                     {"fold_f1", c.fold_f1}, {"mean_f1", c.mean_f1}, {"std_f1", c.std_f1}});
  return {{"k", r.k}, {"seed", r.seed}, {"hyperparams", hyper_json(r.hp)}, {"cells", cells},
          {"fold_of_row", r.fold_of_row}};
}

json to_json(const LearningCurveReport& r) {
  json points = json::array();
  for (const auto& p : r.points)
    points.push_back({{"size_per_class", p.size_per_class}, {"macro_f1", p.macro_f1}});
  return {{"seed", r.seed}, {"pipeline", to_json(r.pipeline)}, {"points", points}};
}

json to_json(const GridSearchReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells)
    cells.push_back({{"loss", to_string(c.loss)}, {"C", c.c}, {"cv_mean_f1", c.cv_mean_f1},
                     {"cv_std_f1", c.cv_std_f1}, {"test_f1", c.test_f1}});
  const auto& best = r.cells.at(r.chosen);
  return {{"k", r.k},
          {"seed", r.seed},
          {"scaler", to_string(r.scaler)},
          {"cells", cells},
          {"chosen", {{"index", r.chosen}, {"loss", to_string(best.loss)}, {"C", best.c}}}};
}

std::string format_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  const auto measure = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size() && i < width.size(); ++i)
      width[i] = std::max(width[i], r[i].size());
  };
  measure(header);
  for (const auto& r : rows) measure(r);
  std::ostringstream out;
  const auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < width.size(); ++i) {
      const std::string cell = i < r.size() ? r[i] : "";
      if (i) out << "  ";
      if (i == 0) out << cell << std::string(width[i] - cell.size(), ' ');
      else out << std::string(width[i] - cell.size(), ' ') << cell;
    }
    out << '\n';
  };
  emit(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& r : rows) emit(r);
  return out.str();
}

std::string text_report(const GateReport& r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [reason, n] : r.counts) rows.push_back({std::string(to_string(reason)), std::to_string(n)});
  rows.push_back({"total", std::to_string(r.total())});
  return format_table({"verdict", "spectra"}, rows) + "accept rate: " + pct(r.accept_rate()) + " %\n";
}

std::string text_report(const CVReport& r) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t f = 0; f < r.fold_f1.size(); ++f) rows.push_back({std::to_string(f), pct(r.fold_f1[f])});
  return std::string(to_string(r.pipeline.algorithm)) + " / " + std::string(to_string(r.pipeline.scaler)) +
         ", " + std::to_string(r.k) + "-fold CV\n" + format_table({"fold", "macro F1 %"}, rows) +
         "mean F1: " + f1_cell(r.mean_f1, r.std_f1) + " %\n";
}

std::string text_report(const SweepReport& r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : r.cells)
    rows.push_back({std::string(to_string(c.algorithm)), std::string(to_string(c.scaler)),
                    f1_cell(c.mean_f1, c.std_f1)});
  return std::to_string(r.k) + "-fold CV, mean macro F1 %\n" +
         format_table({"algorithm", "scaler", "F1 %"}, rows);
}

std::string text_report(const LearningCurveReport& r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : r.points) rows.push_back({std::to_string(p.size_per_class), pct(p.macro_f1)});
  return std::string(to_string(r.pipeline.algorithm)) + " / " + std::string(to_string(r.pipeline.scaler)) +
         ", held-out test set\n" + format_table({"spectra per class", "macro F1 %"}, rows);
}

std::string text_report(const GridSearchReport& r) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const auto& c = r.cells[i];
    rows.push_back({std::string(to_string(c.loss)), detail::format_general(c.c, 6),
                    f1_cell(c.cv_mean_f1, c.cv_std_f1), pct(c.test_f1), i == r.chosen ? "*" : ""});
  }
  return "linear SVM grid, scaler " + std::string(to_string(r.scaler)) + ", " + std::to_string(r.k) +
         "-fold CV on train\n" + format_table({"loss", "C", "CV F1 %", "test F1 %", "chosen"}, rows);
}

std::string text_report(const EvaluationReport& r) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t c = 0; c < r.per_class_f1.size(); ++c)
    rows.push_back({c < r.confusion.class_names.size() ? r.confusion.class_names[c] : std::to_string(c),
                    std::to_string(r.confusion.row_sum(c)), pct(r.per_class_f1[c])});
  std::string out = format_table({"class", "spectra", "F1 %"}, rows);
  out += "alloy macro F1: " + pct(r.macro_f1) + " %\n";
  if (r.cluster_f1) out += "cluster macro F1: " + pct(*r.cluster_f1) + " %\n";
  if (r.coverage) {
    out += "clearly assigned: " + pct(r.coverage->fraction_unambiguous) + " %";
    out += r.coverage->accuracy_on_unambiguous
               ? ", correct among them: " + pct(*r.coverage->accuracy_on_unambiguous) + " %\n"
               : ", correct among them: n/a\n";
  }
  return out;
}

std::string confusion_csv(const ConfusionMatrix& cm, const AlloyTaxonomy* taxonomy) {
  std::vector<std::size_t> order(cm.n_classes);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (taxonomy) {
    std::vector<std::size_t> cluster(cm.n_classes);
    for (std::size_t c = 0; c < cm.n_classes; ++c) {
      const auto it = taxonomy->cluster_of.find(cm.class_names.at(c));
      if (it == taxonomy->cluster_of.end())
        throw Error(Errc::UnmappedClass, "alloy '" + cm.class_names[c] + "' has no cluster");
      cluster[c] = it->second;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cluster[a] < cluster[b]; });
  }
  const auto name = [&](std::size_t c) {
    return c < cm.class_names.size() ? cm.class_names[c] : std::to_string(c);
  };
  std::ostringstream out;
  out << "true\\predicted";
  for (auto p : order) out << ',' << name(p);
  out << '\n';
  for (auto t : order) {
    out << name(t);
    for (auto p : order) out << ',' << cm.at(t, p);
    out << '\n';
  }
  return out.str();
}

}  // namespace spectrasort
