#ifndef MOREAU_IO_HPP_
#define MOREAU_IO_HPP_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "moreau/experiments.hpp"
#include "moreau/solvers.hpp"

namespace moreau::io {

using nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_keys(const json& j,
                         std::initializer_list<const char*> allowed,
                         const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) { ok = true; break; }
    if (!ok) throw ConfigError(ctx + ": unknown key '" + key + "'");
  }
}

inline double require_number(const json& j, const char* key,
                             const std::string& ctx) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ConfigError(ctx + ": missing numeric field '" + key + "'");
  return j.at(key).get<double>();
}

// ---------------------------------------------------------------------------
// Binary matrix format: one JSON shape-header line, then little-endian
// float64 row-major payload.
// ---------------------------------------------------------------------------

inline void write_matrix(const std::string& path, const MatrixXd& a) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  json header = {{"rows", a.rows()}, {"cols", a.cols()}};
  f << header.dump() << '\n';
  std::vector<double> row(a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) row[j] = a(i, j);
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(sizeof(double) * row.size()));
  }
}

inline MatrixXd read_matrix(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open matrix file: " + path);
  std::string line;
  std::getline(f, line);
  json header = json::parse(line);
  require_keys(header, {"rows", "cols"}, "matrix header");
  const Eigen::Index rows = header.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = header.at("cols").get<Eigen::Index>();
  MatrixXd a(rows, cols);
  std::vector<double> row(static_cast<std::size_t>(cols));
  for (Eigen::Index i = 0; i < rows; ++i) {
    f.read(reinterpret_cast<char*>(row.data()),
           static_cast<std::streamsize>(sizeof(double) * row.size()));
    if (!f) throw std::runtime_error("truncated matrix file: " + path);
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = row[j];
  }
  return a;
}

// ---------------------------------------------------------------------------
// Loss / regularizer / problem specs.
// ---------------------------------------------------------------------------

inline ConvexPiece parse_piece(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("piece: expected object with 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "zero") {
    require_keys(j, {"kind"}, "piece");
    return ConvexPiece::zero();
  }
  if (kind == "constant") {
    require_keys(j, {"kind", "c"}, "piece");
    return ConvexPiece::constant(require_number(j, "c", "piece"));
  }
  if (kind == "indicator_origin") {
    require_keys(j, {"kind"}, "piece");
    return ConvexPiece::indicator_of_origin();
  }
  if (kind == "hinge") {
    require_keys(j, {"kind", "theta"}, "piece");
    return ConvexPiece::hinge(require_number(j, "theta", "piece"));
  }
  if (kind == "scaled_quadratic") {
    require_keys(j, {"kind", "a"}, "piece");
    return ConvexPiece::scaled_quadratic(require_number(j, "a", "piece"));
  }
  if (kind == "l2_square") {
    require_keys(j, {"kind", "beta"}, "piece");
    return ConvexPiece::l2_square(require_number(j, "beta", "piece"));
  }
  throw ConfigError("piece: unknown kind '" + kind + "'");
}

inline json piece_to_json(const ConvexPiece& p) {
  json j = {{"kind", to_string(p.kind())}};
  switch (p.kind()) {
    case PieceKind::ConstantFn: j["c"] = p.param(); break;
    case PieceKind::Hinge: j["theta"] = p.param(); break;
    case PieceKind::ScaledQuadratic: j["a"] = p.param(); break;
    case PieceKind::L2Square: j["beta"] = p.param(); break;
    default: break;
  }
  return j;
}

inline PiecewiseConvexFunction parse_stack(const json& j) {
  if (j.contains("stack")) {
    const std::string name = j.at("stack").get<std::string>();
    if (name == "l0") {
      require_keys(j, {"stack", "nu", "shift"}, "loss stack");
      return PiecewiseConvexFunction::l0(
          require_number(j, "nu", "loss stack"),
          j.value("shift", 0.0));
    }
    if (name == "symmetric_hinge") {
      require_keys(j, {"stack"}, "loss stack");
      return PiecewiseConvexFunction::symmetric_hinge();
    }
    throw ConfigError("loss stack: unknown named stack '" + name + "'");
  }
  require_keys(j, {"pieces", "shift"}, "loss stack");
  if (!j.contains("pieces") || !j.at("pieces").is_array())
    throw ConfigError("loss stack: missing 'pieces' array");
  std::vector<ConvexPiece> pieces;
  for (const auto& pj : j.at("pieces")) pieces.push_back(parse_piece(pj));
  return PiecewiseConvexFunction(std::move(pieces), j.value("shift", 0.0));
}

inline SeparableLoss parse_loss(const json& j, Eigen::Index m) {
  if (j.is_object() && j.contains("repeat")) {
    require_keys(j, {"repeat", "fn"}, "loss");
    const auto count = j.at("repeat").get<Eigen::Index>();
    if (count != m)
      throw ConfigError("loss: 'repeat' count does not match matrix rows");
    return SeparableLoss::repeated(parse_stack(j.at("fn")),
                                   static_cast<std::size_t>(count));
  }
  if (!j.is_array())
    throw ConfigError("loss: expected array of stacks or {repeat, fn}");
  std::vector<PiecewiseConvexFunction> coords;
  for (const auto& cj : j) coords.push_back(parse_stack(cj));
  if (static_cast<Eigen::Index>(coords.size()) != m)
    throw ConfigError("loss: entry count does not match matrix rows");
  return SeparableLoss(std::move(coords));
}

inline Regularizer parse_regularizer(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("reg: expected object with 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "zero") {
    require_keys(j, {"kind"}, "reg");
    return Regularizer::zero();
  }
  if (kind == "l0l2") {
    require_keys(j, {"kind", "alpha", "beta"}, "reg");
    return Regularizer::l0_plus_l2(require_number(j, "alpha", "reg"),
                                   require_number(j, "beta", "reg"));
  }
  throw ConfigError("reg: unknown kind '" + kind + "'");
}

inline MatrixXd parse_matrix(const json& j, const std::string& base_dir) {
  if (j.is_array()) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) throw ConfigError("matrix: empty");
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    MatrixXd a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto& rj = j.at(static_cast<std::size_t>(i));
      if (static_cast<Eigen::Index>(rj.size()) != cols)
        throw ConfigError("matrix: ragged rows");
      for (Eigen::Index c = 0; c < cols; ++c)
        a(i, c) = rj.at(static_cast<std::size_t>(c)).get<double>();
    }
    return a;
  }
  if (j.is_object()) {
    require_keys(j, {"path"}, "matrix");
    const std::filesystem::path p(j.at("path").get<std::string>());
    return read_matrix(p.is_absolute() ? p.string()
                                       : (std::filesystem::path(base_dir) / p)
                                             .string());
  }
  throw ConfigError("matrix: expected nested arrays or {path}");
}

// ---------------------------------------------------------------------------
// Dataset manifests.
// ---------------------------------------------------------------------------

inline void write_regression_dataset(const RegressionDataset& d,
                                     const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_matrix((std::filesystem::path(dir) / "A.bin").string(), d.a);
  json manifest = {
      {"kind", "regression"},
      {"seed", d.seed},
      {"m", d.a.rows()},
      {"n", d.a.cols()},
      {"noise_sigma", d.noise_sigma},
      {"outlier_magnitude", d.outlier_magnitude},
      {"matrix", "A.bin"},
      {"b", std::vector<double>(d.b.data(), d.b.data() + d.b.size())},
      {"ground_truth_u",
       std::vector<double>(d.ground_truth_u.data(),
                           d.ground_truth_u.data() + d.ground_truth_u.size())},
      {"outlier_mask", d.outlier_mask},
  };
  std::ofstream f(std::filesystem::path(dir) / "manifest.json");
  f << manifest.dump(2) << '\n';
}

inline RegressionDataset read_regression_dataset(const std::string& manifest_path) {
  std::ifstream f(manifest_path);
  if (!f) throw std::runtime_error("cannot open manifest: " + manifest_path);
  json m = json::parse(f);
  require_keys(m,
               {"kind", "seed", "m", "n", "noise_sigma", "outlier_magnitude",
                "matrix", "b", "ground_truth_u", "outlier_mask"},
               "regression manifest");
  if (m.at("kind") != "regression")
    throw ConfigError("manifest: expected kind 'regression'");
  const std::string dir =
      std::filesystem::path(manifest_path).parent_path().string();
  RegressionDataset d;
  d.seed = m.at("seed").get<unsigned>();
  d.noise_sigma = m.at("noise_sigma").get<double>();
  d.outlier_magnitude = m.at("outlier_magnitude").get<double>();
  d.a = read_matrix(
      (std::filesystem::path(dir) / m.at("matrix").get<std::string>()).string());
  const auto b = m.at("b").get<std::vector<double>>();
  d.b = Eigen::Map<const VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  const auto u = m.at("ground_truth_u").get<std::vector<double>>();
  d.ground_truth_u =
      Eigen::Map<const VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
  d.outlier_mask = m.at("outlier_mask").get<std::vector<bool>>();
  return d;
}

inline void write_classification_dataset(const ClassificationDataset& d,
                                         const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_matrix((std::filesystem::path(dir) / "X.bin").string(), d.x);
  json manifest = {
      {"kind", "classification"},
      {"seed", d.seed},
      {"n_examples", d.x.rows()},
      {"d", d.x.cols()},
      {"noise_dims", d.noise_dims},
      {"matrix", "X.bin"},
      {"labels",
       std::vector<double>(d.labels.data(), d.labels.data() + d.labels.size())},
      {"labeled_mask", d.labeled_mask},
  };
  std::ofstream f(std::filesystem::path(dir) / "manifest.json");
  f << manifest.dump(2) << '\n';
}

inline ClassificationDataset read_classification_dataset(
    const std::string& manifest_path) {
  std::ifstream f(manifest_path);
  if (!f) throw std::runtime_error("cannot open manifest: " + manifest_path);
  json m = json::parse(f);
  require_keys(m,
               {"kind", "seed", "n_examples", "d", "noise_dims", "matrix",
                "labels", "labeled_mask"},
               "classification manifest");
  if (m.at("kind") != "classification")
    throw ConfigError("manifest: expected kind 'classification'");
  const std::string dir =
      std::filesystem::path(manifest_path).parent_path().string();
  ClassificationDataset d;
  d.seed = m.at("seed").get<unsigned>();
  d.noise_dims = m.at("noise_dims").get<int>();
  d.x = read_matrix(
      (std::filesystem::path(dir) / m.at("matrix").get<std::string>()).string());
  const auto labels = m.at("labels").get<std::vector<double>>();
  d.labels = Eigen::Map<const VectorXd>(labels.data(),
                                        static_cast<Eigen::Index>(labels.size()));
  d.labeled_mask = m.at("labeled_mask").get<std::vector<bool>>();
  return d;
}

// ---------------------------------------------------------------------------
// Problem specs.
// ---------------------------------------------------------------------------

inline ConsensusProblem parse_problem(const json& j,
                                      const std::string& base_dir) {
  if (!j.is_object() || !j.contains("type"))
    throw ConfigError("problem: expected object with 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "inline") {
    require_keys(j, {"type", "matrix", "lambda", "loss", "reg"}, "problem");
    MatrixXd a = parse_matrix(j.at("matrix"), base_dir);
    SeparableLoss loss = parse_loss(j.at("loss"), a.rows());
    Regularizer reg = j.contains("reg") ? parse_regularizer(j.at("reg"))
                                        : Regularizer::zero();
    return ConsensusProblem(std::move(a), std::move(loss), reg,
                            require_number(j, "lambda", "problem"));
  }
  if (type == "regression") {
    require_keys(j, {"type", "dataset", "lambda", "nu"}, "problem");
    const std::filesystem::path p(j.at("dataset").get<std::string>());
    const auto d = read_regression_dataset(
        p.is_absolute() ? p.string()
                        : (std::filesystem::path(base_dir) / p).string());
    return build_regression_problem(d, require_number(j, "lambda", "problem"),
                                    require_number(j, "nu", "problem"));
  }
  if (type == "ssl") {
    require_keys(j, {"type", "dataset", "alpha", "beta", "lambda"}, "problem");
    const std::filesystem::path p(j.at("dataset").get<std::string>());
    const auto d = read_classification_dataset(
        p.is_absolute() ? p.string()
                        : (std::filesystem::path(base_dir) / p).string());
    return build_ssl_problem(d, require_number(j, "alpha", "problem"),
                             require_number(j, "beta", "problem"),
                             require_number(j, "lambda", "problem"));
  }
  throw ConfigError("problem: unknown type '" + type + "'");
}

inline Algorithm parse_algorithm(const std::string& name) {
  if (name == "primal_dual") return Algorithm::PrimalDual;
  if (name == "proximal_penalty") return Algorithm::ProximalPenalty;
  if (name == "linearized_admm") return Algorithm::LinearizedAdmm;
  if (name == "vanilla_admm") return Algorithm::VanillaAdmm;
  if (name == "palm") return Algorithm::Palm;
  throw ConfigError("unknown algorithm '" + name + "'");
}

inline SolverConfig parse_solver_config(const json& j, double lambda) {
  SolverConfig c = SolverConfig::defaults(lambda);
  if (j.is_null()) return c;
  require_keys(j,
               {"rho_initial", "rho_growth", "rho_target", "sigma_fraction",
                "palm_tau_fraction", "stop_eps", "max_iters", "escalation_cap",
                "stagnation_window", "stagnation_rel"},
               "solver");
  if (j.contains("rho_target")) c.rho.target = j.at("rho_target").get<double>();
  c.rho.initial = j.value("rho_initial", c.rho.target / 100.0);
  c.rho.growth = j.value("rho_growth", c.rho.growth);
  c.sigma_fraction = j.value("sigma_fraction", c.sigma_fraction);
  c.palm_tau_fraction = j.value("palm_tau_fraction", c.palm_tau_fraction);
  c.stop_eps = j.value("stop_eps", c.stop_eps);
  c.max_iters = j.value("max_iters", c.max_iters);
  c.escalation_cap = j.value("escalation_cap", c.escalation_cap);
  c.stagnation_window = j.value("stagnation_window", c.stagnation_window);
  c.stagnation_rel = j.value("stagnation_rel", c.stagnation_rel);
  return c;
}

// ---------------------------------------------------------------------------
// Trace / summary emission. CSV is locale-independent ('.' decimal, LF).
// ---------------------------------------------------------------------------

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline void write_trace_csv(const Trace& trace, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "t,objective,lyapunov,penalty,feas,du,dz,dy,rho\n";
  for (const auto& r : trace.records) {
    f << r.t << ',' << format_double(r.objective) << ','
      << format_double(r.lyapunov) << ',' << format_double(r.penalty) << ','
      << format_double(r.feas) << ',' << format_double(r.du) << ','
      << format_double(r.dz) << ',' << format_double(r.dy) << ','
      << format_double(r.rho) << '\n';
  }
}

inline json gap_to_json(const GapReport& g) {
  return {
      {"gap_f", g.gap_f},
      {"gap_g", g.gap_g},
      {"gap_feas", g.gap_feas},
      {"total", g.total},
      {"qualification_holds", g.qualification_holds},
      {"licq_holds", g.licq},
      {"lifted_residuals", {{"r1", g.r1}, {"r2", g.r2}, {"r3", g.r3}}},
  };
}

}  // namespace moreau::io

#endif  // MOREAU_IO_HPP_
