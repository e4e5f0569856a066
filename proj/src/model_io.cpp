#include <fstream>
#include <iomanip>
#include <sstream>

#include "spectrasort/error.hpp"
#include "spectrasort/learn.hpp"
#include "spectrasort/rng.hpp"
#include "text_util.hpp"

namespace spectrasort {

namespace {

constexpr std::string_view kMagic = "spectrasort-model";
constexpr int kDigits = 17;

std::string num(double v) { return detail::format_general(v, kDigits); }

// ---------------------------------------------------------------------------
// Writing
// ---------------------------------------------------------------------------

void put_row(std::ostream& out, const double* v, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i) out << ' ';
    out << num(v[i]);
  }
  out << '\n';
}

void put_vector(std::ostream& out, std::string_view name, const Vector& v) {
  out << "vector " << name << ' ' << v.size() << '\n';
  put_row(out, v.data(), v.size());
}

void put_matrix(std::ostream& out, std::string_view name, const Matrix& m) {
  out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) put_row(out, m.row(r).data(), m.cols());
}

void put_common(std::ostream& out, const std::vector<std::string>& names,
                const WavelengthGrid& grid, const ScalerParams& s) {
  out << "classes " << names.size() << '\n';
  for (const auto& n : names) out << n << '\n';
  out << "grid " << num(grid.start_nm) << ' ' << num(grid.end_nm) << ' ' << grid.n_points << '\n';
  out << "scaler " << to_string(s.kind) << ' ' << s.n_features << '\n';
  put_vector(out, "location", s.location);
  put_vector(out, "spread", s.spread);
}

void put_solver(std::ostream& out, const SolverReport& r) {
  out << "solver " << r.iterations.size() << '\n';
  for (std::size_t i = 0; i < r.iterations.size(); ++i)
    out << r.iterations[i] << ' ' << num(r.final_objective[i]) << ' ' << (r.converged[i] ? 1 : 0)
        << '\n';
}

void put_body(std::ostream& out, const LinearModel& m) {
  put_common(out, m.class_names, m.grid, m.scaler);
  out << "C " << num(m.C) << '\n' << "loss " << to_string(m.loss) << '\n';
  put_matrix(out, "weights", m.weights);
  put_vector(out, "bias", m.bias);
  put_solver(out, m.solver_report);
}

void put_body(std::ostream& out, const LogRegModel& m) {
  put_common(out, m.class_names, m.grid, m.scaler);
  out << "lambda " << num(m.lambda) << '\n';
  put_matrix(out, "weights", m.weights);
  put_vector(out, "bias", m.bias);
  put_solver(out, m.solver_report);
}

void put_body(std::ostream& out, const KnnModel& m) {
  put_common(out, m.class_names, m.grid, m.scaler);
  out << "k " << m.k << '\n';
  put_matrix(out, "train_rows", m.train_rows);
  out << "labels " << m.train_labels.size() << '\n';
  for (std::size_t i = 0; i < m.train_labels.size(); ++i)
    out << (i ? " " : "") << m.train_labels[i];
  out << '\n';
}

void put_body(std::ostream& out, const MlpModel& m) {
  put_common(out, m.class_names, m.grid, m.scaler);
  put_matrix(out, "w1", m.w1);
  put_vector(out, "b1", m.b1);
  put_matrix(out, "w2", m.w2);
  put_vector(out, "b2", m.b2);
  out << "report " << m.training_report.epochs << ' ' << num(m.training_report.initial_loss) << ' '
      << num(m.training_report.final_loss) << '\n';
}

std::string checksum_hex(std::string_view bytes) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(bytes);
  return s.str();
}

// ---------------------------------------------------------------------------
// Reading
// ---------------------------------------------------------------------------

[[noreturn]] void corrupt(const std::string& why) { throw Error(Errc::CorruptModel, why); }

class Reader {
 public:
  explicit Reader(std::string_view body) : body_(body) {}

  std::string_view line() {
    if (pos_ >= body_.size()) corrupt("unexpected end of model file");
    const auto end = body_.find('\n', pos_);
    if (end == std::string_view::npos) corrupt("unterminated line in model file");
    const auto out = body_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_no_;
    return out;
  }

  /// Fields of the next line, whose first field must be `key`.
  std::vector<std::string_view> keyed(std::string_view key) {
    const auto l = line();
    auto fields = detail::split(l, ' ');
    if (fields.empty() || fields[0] != key)
      corrupt("line " + std::to_string(line_no_) + ": expected '" + std::string(key) + "'");
    return fields;
  }

  std::vector<std::string_view> keyed(std::string_view key, std::size_t n_fields) {
    auto f = keyed(key);
    if (f.size() != n_fields)
      corrupt("line " + std::to_string(line_no_) + ": malformed '" + std::string(key) + "'");
    return f;
  }

  double real(std::string_view s) {
    const auto v = detail::parse_double(s);
    if (!v) corrupt("line " + std::to_string(line_no_) + ": bad number '" + std::string(s) + "'");
    return *v;
  }

  long long integer(std::string_view s, long long lo, long long hi) {
    const auto v = detail::parse_int(s);
    if (!v || *v < lo || *v > hi)
      corrupt("line " + std::to_string(line_no_) + ": bad integer '" + std::string(s) + "'");
    return *v;
  }

  void reals(double* out, Eigen::Index n) {
    const auto fields = n == 0 ? std::vector<std::string_view>{} : detail::split(line(), ' ');
    if (n == 0) {
      if (line().size() != 0) corrupt("line " + std::to_string(line_no_) + ": expected empty row");
      return;
    }
    if (static_cast<Eigen::Index>(fields.size()) != n)
      corrupt("line " + std::to_string(line_no_) + ": expected " + std::to_string(n) + " values");
    for (Eigen::Index i = 0; i < n; ++i) out[i] = real(fields[static_cast<std::size_t>(i)]);
  }

  Vector vector(std::string_view name) {
    const auto f = keyed("vector", 3);
    if (f[1] != name) corrupt("expected vector '" + std::string(name) + "'");
    Vector v(integer(f[2], 0, kMaxDim));
    reals(v.data(), v.size());
    return v;
  }

  Matrix matrix(std::string_view name) {
    const auto f = keyed("matrix", 4);
    if (f[1] != name) corrupt("expected matrix '" + std::string(name) + "'");
    Matrix m(integer(f[2], 0, kMaxDim), integer(f[3], 0, kMaxDim));
    for (Eigen::Index r = 0; r < m.rows(); ++r) reals(m.row(r).data(), m.cols());
    return m;
  }

  bool at_end() const { return pos_ == body_.size(); }

  static constexpr long long kMaxDim = 100'000'000;

 private:
  std::string_view body_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

struct Common {
  std::vector<std::string> class_names;
  WavelengthGrid grid;
  ScalerParams scaler;
};

Common get_common(Reader& r) {
  Common c;
  const auto n = r.integer(r.keyed("classes", 2)[1], 1, 1'000'000);
  for (long long i = 0; i < n; ++i) c.class_names.emplace_back(r.line());
  const auto g = r.keyed("grid", 4);
  c.grid = {r.real(g[1]), r.real(g[2]), static_cast<std::size_t>(r.integer(g[3], 2, Reader::kMaxDim))};
  if (!(c.grid.start_nm < c.grid.end_nm)) corrupt("invalid grid");
  const auto s = r.keyed("scaler", 3);
  const auto kind = scaler_from_string(s[1]);
  if (!kind) corrupt("unknown scaler '" + std::string(s[1]) + "'");
  c.scaler.kind = *kind;
  c.scaler.n_features = static_cast<std::size_t>(r.integer(s[2], 0, Reader::kMaxDim));
  c.scaler.location = r.vector("location");
  c.scaler.spread = r.vector("spread");
  const bool columnwise = *kind != ScalerKind::Normalizer && *kind != ScalerKind::NoScaler;
  const auto expect = columnwise ? static_cast<Eigen::Index>(c.scaler.n_features) : 0;
  if (c.scaler.location.size() != expect || c.scaler.spread.size() != expect)
    corrupt("scaler statistics have the wrong length");
  return c;
}

SolverReport get_solver(Reader& r) {
  SolverReport rep;
  const auto n = r.integer(r.keyed("solver", 2)[1], 0, 1'000'000);
  for (long long i = 0; i < n; ++i) {
    const auto f = detail::split(r.line(), ' ');
    if (f.size() != 3) corrupt("malformed solver entry");
    rep.iterations.push_back(static_cast<int>(r.integer(f[0], 0, 1'000'000'000)));
    rep.final_objective.push_back(r.real(f[1]));
    rep.converged.push_back(r.integer(f[2], 0, 1) == 1);
    rep.objective_trace.emplace_back();
  }
  return rep;
}

template <class M>
void attach(M& m, Common&& c) {
  m.class_names = std::move(c.class_names);
  m.grid = c.grid;
  m.scaler = std::move(c.scaler);
}

void check_width(const ScalerParams& s, Eigen::Index d) {
  if (s.n_features != static_cast<std::size_t>(d)) corrupt("scaler width disagrees with model");
}

void check_linear_shapes(const Matrix& w, const Vector& b, std::size_t n_classes) {
  if (w.rows() != static_cast<Eigen::Index>(n_classes) || b.size() != w.rows())
    corrupt("weight shapes disagree with class count");
}

Model get_body(Reader& r, std::string_view kind) {
  auto common = get_common(r);
  const auto k = common.class_names.size();
  if (kind == "linear-svm") {
    LinearModel m;
    m.C = r.real(r.keyed("C", 2)[1]);
    const auto loss = loss_from_string(r.keyed("loss", 2)[1]);
    if (!loss || !(m.C > 0.0)) corrupt("invalid C or loss");
    m.loss = *loss;
    m.weights = r.matrix("weights");
    m.bias = r.vector("bias");
    m.solver_report = get_solver(r);
    check_linear_shapes(m.weights, m.bias, k);
    check_width(common.scaler, m.weights.cols());
    attach(m, std::move(common));
    return m;
  }
  if (kind == "logreg") {
    LogRegModel m;
    m.lambda = r.real(r.keyed("lambda", 2)[1]);
    m.weights = r.matrix("weights");
    m.bias = r.vector("bias");
    m.solver_report = get_solver(r);
    check_linear_shapes(m.weights, m.bias, k);
    check_width(common.scaler, m.weights.cols());
    attach(m, std::move(common));
    return m;
  }
  if (kind == "knn") {
    KnnModel m;
    m.k = static_cast<int>(r.integer(r.keyed("k", 2)[1], 1, Reader::kMaxDim));
    m.train_rows = r.matrix("train_rows");
    const auto n = r.integer(r.keyed("labels", 2)[1], 0, Reader::kMaxDim);
    const auto fields = detail::split(r.line(), ' ');
    if (n != m.train_rows.rows() || static_cast<long long>(fields.size()) != n || m.k > n ||
        m.k % 2 == 0)
      corrupt("inconsistent k-NN data");
    for (auto f : fields)
      m.train_labels.push_back(static_cast<int>(r.integer(f, 0, static_cast<long long>(k) - 1)));
    check_width(common.scaler, m.train_rows.cols());
    attach(m, std::move(common));
    return m;
  }
  if (kind == "mlp") {
    MlpModel m;
    m.w1 = r.matrix("w1");
    m.b1 = r.vector("b1");
    m.w2 = r.matrix("w2");
    m.b2 = r.vector("b2");
    const auto f = r.keyed("report", 4);
    m.training_report = {static_cast<int>(r.integer(f[1], 0, 1'000'000'000)), r.real(f[2]),
                         r.real(f[3])};
    if (m.b1.size() != m.w1.rows() || m.w2.cols() != m.w1.rows() ||
        m.w2.rows() != static_cast<Eigen::Index>(k) || m.b2.size() != m.w2.rows())
      corrupt("MLP layer shapes do not chain");
    check_width(common.scaler, m.w1.cols());
    attach(m, std::move(common));
    return m;
  }
  corrupt("unknown model kind '" + std::string(kind) + "'");
}

}  // namespace

void save_model(const Model& m, std::ostream& out) {
  std::ostringstream body;
  body << kMagic << '\n' << "version " << kModelFormatVersion << '\n';
  body << "kind " << model_kind(m) << '\n';
  std::visit([&](const auto& model) { put_body(body, model); }, m);
  const auto text = body.str();
  out << text << "checksum " << checksum_hex(text) << '\n';
  if (!out) throw Error(Errc::Io, "failed to write model");
}

void save_model_file(const Model& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot open '" + path + "' for writing");
  save_model(m, out);
}

Model load_model(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  Reader head(text);
  if (text.compare(0, kMagic.size() + 1, std::string(kMagic) + "\n") != 0)
    corrupt("missing model file magic");
  head.line();
  const auto version = detail::parse_int(head.keyed("version", 2)[1]);
  if (!version || *version < 1) corrupt("malformed version line");
  if (*version > kModelFormatVersion)
    throw Error(Errc::VersionUnsupported, "model format version " + std::to_string(*version) +
                                              " is newer than supported version " +
                                              std::to_string(kModelFormatVersion));

  // The checksum line is the last line and covers every byte before it.
  if (text.empty() || text.back() != '\n') corrupt("truncated model file");
  const auto start = text.rfind('\n', text.size() - 2);
  if (start == std::string::npos) corrupt("truncated model file");
  const std::string_view last = std::string_view(text).substr(start + 1, text.size() - start - 2);
  if (last.substr(0, 9) != "checksum ") corrupt("missing checksum line");
  const std::string_view body = std::string_view(text).substr(0, start + 1);
  if (last.substr(9) != checksum_hex(body)) corrupt("checksum mismatch");

  Reader r(body);
  r.line();
  r.line();
  const auto kind = r.keyed("kind", 2)[1];
  Model m = get_body(r, kind);
  if (!r.at_end()) corrupt("trailing content before checksum");
  return m;
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open model file '" + path + "'");
  try {
    return load_model(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + std::string(e.what()).substr(to_string(e.code()).size() + 2));
  }
}

}  // namespace spectrasort
