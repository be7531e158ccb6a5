#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "phsmor/pipeline.hpp"

using namespace phs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("phsmor_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small_config(const fs::path& out) {
  RunConfig c = parse_config(R"({
    "model": {"preset": "wave_mixed"},
    "mesh": {"N": 20},
    "simulation": {"dt": 1e-2, "T": 2.0,
                   "input": {"kind": "sin", "omega": 1.6, "t_off": 1.0, "channels": [2]},
                   "decimation": 5, "snapshots": [1.0]},
    "mor": {"band": [0.9, 8.5], "n_points": 8, "require_certificate": false},
    "outputs": {"bode_points": 50}
  })");
  c.out.dir = out.string();
  return c;
}

int exit_code(const std::string& cmd) {
  const int st = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("numbers are written with 17 significant digits") {
  CHECK(io::fmt(0.1) == "0.10000000000000001");
  CHECK(io::fmt(1.0) == "1");
  for (double v : {-2.5e-300, 1.0 / 3.0, 6.02214076e23, -0.0}) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    CHECK(io::fmt(v) == buf);
  }
}

TEST_CASE("configuration errors name the field") {
  try {
    parse_config(R"({"model": {"preset": "wave_mixed"}, "simulation": {"dt": 0}})");
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidConfig);
    CHECK(std::string(e.what()).find("simulation.dt") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(R"({"model": {"preset": "wave_mixed"}, "mesh": {"M": 3}})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"model": {}})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"model": {"preset": "wave_mixed"}, "mor": {"band": [5, 1]}})"), Error);
  CHECK_THROWS_AS(parse_config("{not json"), Error);
}

TEST_CASE("configuration round trip") {
  const RunConfig a = small_config("x");
  const RunConfig b = parse_config(dump_config(a));
  CHECK(dump_config(b) == dump_config(a));
  CHECK(b.sim.input.channels == std::vector<int>{2});
  CHECK(b.N1 == 20);
}

TEST_CASE("inline model specification") {
  const RunConfig c = parse_config(R"({"model": {"spec": {
      "n1": 1, "n2": 1, "interval": [0, 2],
      "P": [[0, 1], [1, 0]], "G": [[0, 0], [0, 0]],
      "VB": [[0, 0, 0, 1], [1, 0, 0, 0]], "VC": [[0, 0, -1, 0], [0, 1, 0, 0]],
      "H1": [[2]], "H2": [[1]]}}})");
  const ValidatedModel m = build_model(c);
  CHECK(m.spec.b == 2.0);
  CHECK(m.iep);
  CHECK(parse_config(dump_config(c)).model.inline_spec->H1(0.5)(0, 0) == 2.0);
}

TEST_CASE("input signals") {
  InputConfig in;
  in.kind = "sin";
  in.omega = 2.0;
  in.t_off = 1.0;
  in.channels = {2};
  const InputSignal u = make_input(in, 2);
  CHECK(u(0.5)(0) == 0.0);
  CHECK(u(0.5)(1) == doctest::Approx(std::sin(1.0)));
  CHECK(u(1.5)(1) == 0.0);
  in.channels = {3};
  CHECK_THROWS_AS(make_input(in, 2), Error);
}

TEST_CASE("tangential data CSV round trip") {
  const AssembledFom f = assemble_fom(validate(preset("wave_mixed")), 10, 10);
  const PhOperator op(f);
  const TangentialData d = generate_data(op, {1.0, 2.0, 3.0});
  const fs::path p = scratch("tangential.csv");
  io::write_tangential(p, d);
  const TangentialData e = io::read_tangential(p);
  REQUIRE(e.right.size() == d.right.size());
  REQUIRE(e.left.size() == d.left.size());
  for (std::size_t i = 0; i < d.right.size(); ++i) {
    CHECK(e.right[i].lambda == d.right[i].lambda);
    CHECK(e.right[i].w == d.right[i].w);
    CHECK(e.right[i].dir == d.right[i].dir);
  }
  CHECK(e.left[1].v == d.left[1].v);
}

TEST_CASE("full run is reproducible and the manifest matches the files") {
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  const Manifest ma = run(small_config(a));
  const Manifest mb = run(small_config(b));
  REQUIRE(ma.files.size() == mb.files.size());
  CHECK(ma.files.size() > 20);
  for (std::size_t i = 0; i < ma.files.size(); ++i) {
    const auto& fa = ma.files[i];
    CHECK(fa.sha256 == io::sha256_file(a / fa.path));
    CHECK(fa.bytes == fs::file_size(a / fa.path));
    if (fa.path == "config.json") continue;  // records its own output directory
    CHECK(fa.sha256 == mb.files[i].sha256);
  }
  CHECK(fs::exists(a / "manifest.json"));
  CHECK(fs::exists(a / "energy.csv"));
  CHECK(fs::exists(a / "snapshot_fom_0.csv"));
  const std::string traj = io::read_text(a / "trajectory_fom.csv");
  CHECK(traj.rfind("t,u_1,u_2,y_1,y_2,H\n", 0) == 0);
  CHECK(traj.find('\r') == std::string::npos);
}

TEST_CASE("compare reports zero for identical trajectories and rejects mismatched grids") {
  const fs::path a = scratch("cmp");
  run(small_config(a));
  const io::TrajectoryTable t = io::read_trajectory(a / "trajectory_fom.csv");
  const CompareReport r = compare(t, t);
  CHECK(r.max_output_rel == 0.0);
  CHECK(r.output_error.maxCoeff() == 0.0);
  io::TrajectoryTable s = t;
  s.t.conservativeResize(s.t.size() - 1);
  s.y.conservativeResize(Eigen::NoChange, s.y.cols() - 1);
  try {
    compare(t, s);
    FAIL("expected GridMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GridMismatch);
  }
}

TEST_CASE("command line exit codes") {
  const std::string cli = PHSMOR_CLI;
  const fs::path out = scratch("cli");
  CHECK(exit_code(cli + " validate --preset wave_mixed") == 0);
  CHECK(exit_code(cli + " validate --preset string") == 2);
  CHECK(exit_code(cli + " simulate --preset wave_mixed --dt -1") == 2);
  CHECK(exit_code(cli + " assemble --preset timoshenko --N 5 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "fom_J.csv"));
  CHECK(exit_code(cli + " bogus") == 2);
}
