#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "moreau/experiments.hpp"
#include "moreau/io.hpp"

using namespace moreau;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "moreau_io_tests";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("matrix binary round-trip") {
  MatrixXd a(3, 2);
  a << 1.0, -2.5, 0.0, 1e-17, 3.25e8, -0.125;
  const auto path = (scratch_dir() / "a.bin").string();
  io::write_matrix(path, a);
  const MatrixXd back = io::read_matrix(path);
  CHECK(back == a);  // bit-exact

  CHECK_THROWS(io::read_matrix((scratch_dir() / "missing.bin").string()));
}

TEST_CASE("piece json round-trip") {
  for (const auto& p :
       {ConvexPiece::zero(), ConvexPiece::constant(0.7),
        ConvexPiece::indicator_of_origin(), ConvexPiece::hinge(-1.0),
        ConvexPiece::scaled_quadratic(2.0), ConvexPiece::l2_square(0.416)}) {
    const auto q = io::parse_piece(io::piece_to_json(p));
    CHECK(q.kind() == p.kind());
    CHECK(q.param() == p.param());
  }
  CHECK_THROWS_AS(io::parse_piece({{"kind", "nonsense"}}), io::ConfigError);
  CHECK_THROWS_AS(io::parse_piece({{"kind", "zero"}, {"extra", 1}}),
                  io::ConfigError);
}

TEST_CASE("stack parsing") {
  const auto l0 = io::parse_stack({{"stack", "l0"}, {"nu", 0.01}, {"shift", 1.5}});
  CHECK(l0.eval(1.5) == 0.0);
  CHECK(l0.eval(0.0) == doctest::Approx(0.01));

  const auto sym = io::parse_stack({{"stack", "symmetric_hinge"}});
  CHECK(sym.eval(0.0) == doctest::Approx(1.0));

  const nlohmann::json custom = {
      {"pieces", {{{"kind", "hinge"}, {"theta", 1.0}},
                  {{"kind", "constant"}, {"c", 0.4}}}},
      {"shift", 0.0}};
  const auto fn = io::parse_stack(custom);
  CHECK(fn.size() == 2);
  CHECK(fn.eval(0.0) == doctest::Approx(0.4));  // min(1, 0.4)

  CHECK_THROWS_AS(io::parse_stack({{"stack", "bogus"}}), io::ConfigError);
  CHECK_THROWS_AS(io::parse_stack({{"stack", "l0"}, {"nu", 0.01}, {"x", 1}}),
                  io::ConfigError);
}

TEST_CASE("inline problem parsing") {
  const nlohmann::json spec = {
      {"type", "inline"},
      {"matrix", {{1.0, 0.0}, {0.0, 2.0}}},
      {"lambda", 0.05},
      {"loss", {{"repeat", 2},
                {"fn", {{"stack", "l0"}, {"nu", 0.01}}}}},
      {"reg", {{"kind", "zero"}}}};
  const auto p = io::parse_problem(spec, ".");
  CHECK(p.m() == 2);
  CHECK(p.n() == 2);
  CHECK(p.lambda == 0.05);
  CHECK(p.op.matrix()(1, 1) == 2.0);

  // Row-count mismatch.
  nlohmann::json bad = spec;
  bad["loss"]["repeat"] = 3;
  CHECK_THROWS_AS(io::parse_problem(bad, "."), io::ConfigError);
  // Unknown top-level key.
  bad = spec;
  bad["surprise"] = 1;
  CHECK_THROWS_AS(io::parse_problem(bad, "."), io::ConfigError);
  // Ragged matrix.
  bad = spec;
  bad["matrix"] = {{1.0, 0.0}, {0.0}};
  CHECK_THROWS_AS(io::parse_problem(bad, "."), io::ConfigError);
}

TEST_CASE("regularizer parsing") {
  const auto g =
      io::parse_regularizer({{"kind", "l0l2"}, {"alpha", 0.025}, {"beta", 0.416}});
  CHECK(g.alpha() == 0.025);
  CHECK(g.beta() == 0.416);
  CHECK(io::parse_regularizer({{"kind", "zero"}}).kind() ==
        RegularizerKind::Zero);
  CHECK_THROWS_AS(io::parse_regularizer({{"kind", "l1"}}), io::ConfigError);
}

TEST_CASE("regression dataset manifest round-trip") {
  const auto d = gen_regression(12, 4, 0.25, std::nan(""), 0.01, 42);
  const auto dir = (scratch_dir() / "reg").string();
  io::write_regression_dataset(d, dir);
  const auto back = io::read_regression_dataset(dir + "/manifest.json");
  CHECK(back.a == d.a);
  CHECK(back.b == d.b);
  CHECK(back.ground_truth_u == d.ground_truth_u);
  CHECK(back.outlier_mask == d.outlier_mask);
  CHECK(back.seed == d.seed);
  CHECK(back.outlier_magnitude == d.outlier_magnitude);
}

TEST_CASE("classification dataset manifest round-trip") {
  const auto d = gen_classification(16, 3, 2, 4, 0.1, 42);
  const auto dir = (scratch_dir() / "cls").string();
  io::write_classification_dataset(d, dir);
  const auto back = io::read_classification_dataset(dir + "/manifest.json");
  CHECK(back.x == d.x);
  CHECK(back.labels == d.labels);
  CHECK(back.labeled_mask == d.labeled_mask);
  CHECK(back.noise_dims == d.noise_dims);
}

TEST_CASE("ssl problem from a manifest") {
  const auto d = gen_classification(16, 3, 2, 4, 0.1, 42);
  const auto dir = (scratch_dir() / "cls2").string();
  io::write_classification_dataset(d, dir);
  const nlohmann::json spec = {{"type", "ssl"},
                               {"dataset", "cls2/manifest.json"},
                               {"alpha", 0.025},
                               {"beta", 0.416},
                               {"lambda", 0.5}};
  const auto p = io::parse_problem(spec, scratch_dir().string());
  CHECK(p.m() == 16);
  CHECK(p.n() == 5);
  CHECK(p.reg.alpha() == 0.025);
}

TEST_CASE("solver config parsing") {
  auto c = io::parse_solver_config(nullptr, 0.05);
  CHECK(c.rho.target == doctest::Approx(21.0));
  CHECK(c.rho.initial == doctest::Approx(0.21));

  c = io::parse_solver_config({{"rho_target", 40.0}, {"stop_eps", 1e-9}}, 0.05);
  CHECK(c.rho.target == 40.0);
  CHECK(c.rho.initial == doctest::Approx(0.4));
  CHECK(c.stop_eps == 1e-9);

  CHECK_THROWS_AS(io::parse_solver_config({{"rho", 40.0}}, 0.05),
                  io::ConfigError);
}

TEST_CASE("trace csv emission") {
  Trace tr;
  TraceRecord r;
  r.t = 1;
  r.objective = 0.5;
  r.lyapunov = 0.75;
  r.penalty = 0.6;
  r.feas = 1e-3;
  r.du = 0.1;
  r.dz = 0.2;
  r.dy = 0.3;
  r.rho = 21.0;
  tr.records.push_back(r);
  const auto path = (scratch_dir() / "trace.csv").string();
  io::write_trace_csv(tr, path);
  std::ifstream f(path, std::ios::binary);
  std::string header, line;
  std::getline(f, header);
  std::getline(f, line);
  CHECK(header == "t,objective,lyapunov,penalty,feas,du,dz,dy,rho");
  CHECK(line == std::string("1,0.5,0.75,") + io::format_double(0.6) + ",0.001," +
                    io::format_double(0.1) + ',' + io::format_double(0.2) +
                    ',' + io::format_double(0.3) + ",21");
  // Round-trippable precision: parsing the formatted value is exact.
  CHECK(std::stod(io::format_double(0.6)) == 0.6);
  CHECK(std::stod(io::format_double(1e-17)) == 1e-17);
}
