#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phsmor/simulate.hpp"
#include "support.hpp"

using namespace phs;

namespace {

SpMat scalar(double v) {
  SpMat m(1, 1);
  if (v != 0.0) m.insert(0, 0) = v;
  return m;
}

AssembledFom wave(int N) { return assemble_fom(validate(preset("wave_mixed")), N, N); }

InputSignal sine(double w, Eigen::Index n) {
  return [w, n](double t) { return VectorXd::Constant(n, std::sin(w * t)); };
}

}  // namespace

TEST_CASE("descriptor form of a scalar toy") {
  AssembledFom f;
  f.E = scalar(2.0);
  f.J = scalar(0.0);
  f.R = scalar(1.0);
  f.Q = scalar(2.0);
  f.B = MatrixXd::Ones(1, 1);
  const RealDescriptor d = to_descriptor(f);
  CHECK(d.A(0, 0) == doctest::Approx(-1.0));
  CHECK(d.C(0, 0) == doctest::Approx(1.0));
  CHECK(d.D(0, 0) == 0.0);
  REQUIRE(d.Q);
  CHECK((*d.Q)(0, 0) == 2.0);
  f.E = scalar(-1.0);
  CHECK_THROWS_AS(to_descriptor(f), Error);
}

TEST_CASE("lossless wave has its finite spectrum on the imaginary axis") {
  const RealDescriptor d = to_descriptor(wave(40));
  const VectorXc ev = pencil_eigenvalues(d);
  CHECK(ev.size() == 80);
  CHECK(ev.real().cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("damped Timoshenko beam is asymptotically stable") {
  PresetParams p;
  p.g1 = p.g2 = 0.3;
  const RealDescriptor d = to_descriptor(assemble_fom(validate(preset("timoshenko", p)), 40, 40));
  CHECK(spectral_abscissa(d) < 0.0);
}

TEST_CASE("undriven lossless wave conserves energy") {
  const AssembledFom f = wave(50);
  std::mt19937 g(3);
  const VectorXd x0 = test::gaussian(g, f.size(), 1);
  SimOptions o;
  o.dt = 1e-3;
  o.T = 2.0;
  const Trajectory tr = simulate(f, zero_input(2), x0, o);
  const double H0 = tr.H(0);
  CHECK((tr.H.array() - H0).abs().maxCoeff() <= 1e-10 * H0);
  CHECK(energy_balance_report(tr, f).max_abs <= 1e-10 * std::max(1.0, H0));
}

TEST_CASE("driven wave satisfies the discrete balance and is linear in the input") {
  const AssembledFom f = wave(40);
  SimOptions o;
  o.dt = 1e-3;
  o.T = 3.0;
  const Trajectory a = simulate(f, sine(1.6, 2), VectorXd::Zero(f.size()), o);
  const BalanceReport b = energy_balance_report(a, f);
  CHECK(b.max_abs <= 1e-9 * std::max(1.0, b.max_H));

  const InputSignal u3 = [](double t) { return VectorXd::Constant(2, 3.0 * std::sin(1.6 * t)); };
  const Trajectory c = simulate(f, u3, VectorXd::Zero(f.size()), o);
  CHECK((c.y - 3.0 * a.y).norm() <= 1e-10 * c.y.norm());
}

TEST_CASE("sparse and dense midpoint steps agree") {
  const AssembledFom f = wave(20);
  SimOptions o;
  o.dt = 1e-2;
  o.T = 1.0;
  std::mt19937 g(5);
  const VectorXd x0 = test::gaussian(g, f.size(), 1);
  const Trajectory s = simulate(f, sine(2.0, 2), x0, o);
  const Trajectory d = simulate(to_descriptor(f), sine(2.0, 2), x0, o);
  CHECK((s.y - d.y).norm() <= 1e-10 * s.y.norm());
  CHECK((s.H - d.H).norm() <= 1e-10 * s.H.norm());
}

TEST_CASE("output feedback dissipates energy of a lossless model") {
  const AssembledFom f = wave(30);
  std::mt19937 g(9);
  SimOptions o;
  o.dt = 1e-3;
  o.T = 2.0;
  o.feedback = Feedback{0.5 * MatrixXd::Identity(2, 2), VectorXd::Zero(2)};
  const Trajectory tr = simulate(f, zero_input(2), test::gaussian(g, f.size(), 1), o);
  const double tol = 1e-9 * std::max(1.0, tr.H(0));
  for (Eigen::Index k = 0; k + 1 < tr.H.size(); ++k) CHECK(tr.H(k + 1) <= tr.H(k) + tol);
  CHECK(tr.H(tr.H.size() - 1) < tr.H(0));
  CHECK(energy_balance_report(tr, f).max_abs <= 1e-9 * std::max(1.0, tr.H(0)));
}

TEST_CASE("damped beam loses energy without input") {
  PresetParams p;
  p.g1 = p.g2 = 0.3;
  const AssembledFom f = assemble_fom(validate(preset("timoshenko", p)), 20, 20);
  std::mt19937 g(13);
  SimOptions o;
  o.dt = 1e-3;
  o.T = 1.0;
  const Trajectory tr = simulate(f, zero_input(4), test::gaussian(g, f.size(), 1), o);
  for (Eigen::Index k = 0; k + 1 < tr.H.size(); ++k) CHECK(tr.H(k + 1) <= tr.H(k));
  const BalanceReport b = energy_balance_report(tr, f);
  CHECK(b.max_abs <= 1e-9 * b.max_H);
}

TEST_CASE("decimation keeps every k-th state") {
  const AssembledFom f = wave(10);
  SimOptions o;
  o.dt = 0.01;
  o.T = 0.1;
  o.decimation = 3;
  const Trajectory tr = simulate(f, zero_input(2), VectorXd::Ones(f.size()), o);
  CHECK(tr.steps() == 10);
  REQUIRE(tr.kept.size() == static_cast<std::size_t>(tr.X.cols()));
  CHECK(tr.kept.front() == 0);
  CHECK(tr.kept[1] == 3);
}

TEST_CASE("invalid step and shape errors") {
  const AssembledFom f = wave(10);
  SimOptions o;
  o.dt = 0.0;
  CHECK_THROWS_AS(simulate(f, zero_input(2), VectorXd::Zero(f.size()), o), Error);
  o.dt = 0.1;
  CHECK_THROWS_AS(simulate(f, zero_input(2), VectorXd::Zero(3), o), Error);
}
