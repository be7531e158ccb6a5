// Command-line front end for the reduction pipeline.
#include <CLI11.hpp>

#include <iostream>

#include "phsmor/pipeline.hpp"

namespace fs = std::filesystem;
using namespace phs;

namespace {

struct Overrides {
  std::string config, out, preset;
  int N = 0;
  double dt = 0.0, T = 0.0, Dr_scale = 0.0, rank_tol = 0.0;
  std::vector<double> band;
  int n_points = 0, fixed_k = -1;
  std::string left_values, realization;
  bool no_require = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "artifact directory");
  cmd->add_option("--preset", o.preset, "wave_neumann | wave_mixed | timoshenko");
  cmd->add_option("--N", o.N, "nodes per field");
  cmd->add_option("--dt", o.dt, "time step (s)");
  cmd->add_option("--T", o.T, "horizon (s)");
  cmd->add_option("--band", o.band, "interpolation band lower upper (rad/s)")->expected(2);
  cmd->add_option("--n-points", o.n_points, "interpolation frequencies");
  cmd->add_option("--rank-tol", o.rank_tol, "relative SVD truncation tolerance");
  cmd->add_option("--fixed-k", o.fixed_k, "fixed ROM order (0 uses the tolerance)");
  cmd->add_option("--Dr-scale", o.Dr_scale, "feedthrough shift Dr = scale * I");
  cmd->add_option("--left-values", o.left_values, "mu | literal");
  cmd->add_option("--realization", o.realization, "feedthrough | strict");
  cmd->add_flag("--no-require-certificate", o.no_require, "write artifacts even when certification fails");
}

RunConfig resolve(const Overrides& o) {
  RunConfig c;
  if (!o.config.empty()) c = load_config(o.config);
  if (!o.preset.empty()) {
    c.model.preset = o.preset;
    c.model.inline_spec.reset();
  }
  if (c.model.preset.empty() && !c.model.inline_spec)
    throw Error(Errc::InvalidConfig, "no model: pass --config or --preset");
  if (o.N) c.N1 = c.N2 = o.N;
  if (o.dt != 0.0) c.sim.dt = o.dt;
  if (o.T != 0.0) c.sim.T = o.T;
  if (o.band.size() == 2) {
    c.mor.band_lo = o.band[0];
    c.mor.band_hi = o.band[1];
  }
  if (o.n_points) c.mor.n_points = o.n_points;
  if (o.rank_tol != 0.0) c.mor.rank_tol = o.rank_tol;
  if (o.fixed_k >= 0) c.mor.fixed_k = o.fixed_k;
  if (o.Dr_scale != 0.0) c.mor.Dr_scale = o.Dr_scale;
  if (o.left_values == "mu") c.mor.left_values = LeftValues::Mu;
  else if (o.left_values == "literal") c.mor.left_values = LeftValues::Literal;
  else if (!o.left_values.empty()) throw Error(Errc::InvalidConfig, "--left-values: expected mu or literal");
  if (o.realization == "feedthrough") c.mor.realization = Realization::Feedthrough;
  else if (o.realization == "strict") c.mor.realization = Realization::Strict;
  else if (!o.realization.empty()) throw Error(Errc::InvalidConfig, "--realization: expected feedthrough or strict");
  if (o.no_require) c.mor.require_certificate = false;
  if (!o.out.empty()) c.out.dir = o.out;
  check_config(c);
  return c;
}

void print_certificate(const char* label, const PassivityCertificate& c) {
  std::cout << label << ": " << verdict_name(c.verdict) << ", min Popov eigenvalue " << c.min_popov
            << ", spectral abscissa " << c.spectral_abscissa << "\n";
}

int cmd_validate(const RunConfig& c) {
  const BcPhsSpec spec = c.model.inline_spec ? *c.model.inline_spec : preset(c.model.preset, c.model.params);
  const auto v = check(spec);
  for (const auto& x : v) std::cout << errc_name(x.kind) << ": " << x.detail << "\n";
  if (!v.empty()) return 2;
  const ValidatedModel m = validate(spec);
  std::cout << spec.name << ": valid, n = " << spec.n() << (m.iep ? ", lossless" : ", dissipative") << "\n";
  return 0;
}

int cmd_assemble(const RunConfig& c) {
  const AssembledFom fom = assemble_fom(build_model(c), c.N1, c.N2);
  const fs::path d = c.out.dir;
  io::write_coo(d / "fom_E.csv", fom.E);
  io::write_coo(d / "fom_Q.csv", fom.Q);
  io::write_coo(d / "fom_J.csv", fom.J);
  io::write_coo(d / "fom_R.csv", fom.R);
  io::write_dense(d / "fom_B.csv", fom.B);
  std::cout << "assembled " << fom.size() << " states, " << fom.inputs() << " ports\n";
  return 0;
}

int cmd_simulate(const RunConfig& c) {
  const AssembledFom fom = assemble_fom(build_model(c), c.N1, c.N2);
  const Trajectory tr = simulate(fom, make_input(c.sim.input, fom.inputs()), initial_state(fom, c.sim.x0),
                                 sim_options(c.sim));
  io::write_trajectory(fs::path(c.out.dir) / "trajectory_fom.csv", tr, c.sim.csv_stride);
  const BalanceReport b = energy_balance_report(tr, fom);
  std::cout << tr.steps() << " steps, max balance residual " << b.max_abs << ", max H " << b.max_H << "\n";
  return 0;
}

int cmd_bode(const RunConfig& c) {
  const AssembledFom fom = assemble_fom(build_model(c), c.N1, c.N2);
  const PhOperator op(fom);
  const VectorXd w = log_grid(c.out.bode_lo, c.out.bode_hi, c.out.bode_points);
  io::write_table(fs::path(c.out.dir) / "bode_fom.csv", io::bode_header(fom.inputs(), fom.inputs()),
                  io::bode_table(op, w));
  return 0;
}

// reduce, passivate and project share the first pipeline steps.
int cmd_reduce(const RunConfig& c, int depth) {
  const fs::path d = c.out.dir;
  const AssembledFom fom = assemble_fom(build_model(c), c.N1, c.N2);
  const PhOperator op(fom);
  const Reduction red = reduce(op, c.mor);
  io::write_tangential(d / "tangential_data.csv", red.data);
  io::write_table(d / "singular_values.csv", {"sigma"}, red.rom.sigma);
  const PassiveOptions po = passive_options(c.mor);
  const PassivityCertificate pre = passivity_check(red.rom.sys, po.grid, po.certificate);
  io::write_certificate(d / "certificate_preliminary.csv", pre);
  std::cout << "preliminary order " << red.trunc.k << "\n";
  print_certificate("preliminary", pre);
  const std::pair<const char*, const MatrixXd*> pre_parts[] = {
      {"E", &red.rom.sys.E}, {"A", &red.rom.sys.A}, {"B", &red.rom.sys.B}, {"C", &red.rom.sys.C}, {"D", &red.rom.sys.D}};
  for (const auto& [n, m] : pre_parts) io::write_dense(d / (std::string("rom_preliminary_") + n + ".csv"), *m);
  if (depth == 0) return 0;

  Rom fin = red.rom;
  PassivityCertificate cert = pre;
  if (pre.verdict != Verdict::Passive) {
    PassiveOptions o = po;
    o.require_certificate = false;
    const MatrixXd Dr = c.mor.Dr_scale * MatrixXd::Identity(fom.inputs(), fom.inputs());
    const PassiveResult pr = passive_reduce(red.rom.sys, Dr, o, depth > 1 ? &op : nullptr);
    io::write_zeros(d / "spectral_zeros.csv", pr.zeros);
    fin = pr.rom;
    cert = pr.certificate;
    std::cout << pr.zeros.zeros.size() << " spectral zeros, max zero residual " << pr.max_zero_residual << "\n";
  }
  io::write_certificate(d / "certificate_final.csv", cert);
  const std::pair<const char*, const MatrixXd*> parts[] = {
      {"E", &fin.sys.E}, {"A", &fin.sys.A}, {"B", &fin.sys.B}, {"C", &fin.sys.C}, {"D", &fin.sys.D}};
  for (const auto& [n, m] : parts) io::write_dense(d / (std::string("rom_final_") + n + ".csv"), *m);
  print_certificate("final", cert);
  if (depth > 1 && fin.T) {
    io::write_dense(d / "rom_final_T.csv", *fin.T);
    std::cout << "projector " << fin.T->rows() << " x " << fin.T->cols() << "\n";
  }
  if (c.mor.require_certificate && cert.verdict != Verdict::Passive)
    throw Error(Errc::CertificateFailure, "final model is " + verdict_name(cert.verdict));
  return 0;
}

int cmd_run(const RunConfig& c) {
  const Manifest m = run(c);
  std::cout << m.files.size() << " artifacts in " << m.dir.string() << ", preliminary order "
            << m.preliminary_order << ", final order " << m.final_order << ", verdict " << m.verdict << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving discretization and Loewner reduction of boundary-controlled port-Hamiltonian systems"};
  app.require_subcommand(1);
  Overrides o;
  std::string fom_csv, rom_csv, compare_out = "compare.csv";
  const char* names[] = {"validate", "assemble", "simulate", "bode", "reduce", "passivate", "project", "run"};
  const char* help[] = {"check a model specification",
                        "assemble the discretized model and export its matrices",
                        "simulate the discretized model",
                        "export the frequency response of the discretized model",
                        "build the preliminary Loewner model",
                        "rebuild at spectral zeros and certify",
                        "passivate and export the lifting projector",
                        "run the whole pipeline and write a manifest"};
  std::vector<CLI::App*> cmds;
  for (int i = 0; i < 8; ++i) {
    cmds.push_back(app.add_subcommand(names[i], help[i]));
    add_common(cmds.back(), o);
  }
  CLI::App* cmp = app.add_subcommand("compare", "compare two trajectory CSV files");
  cmp->add_option("--fom", fom_csv, "reference trajectory")->required()->check(CLI::ExistingFile);
  cmp->add_option("--rom", rom_csv, "reduced trajectory")->required()->check(CLI::ExistingFile);
  cmp->add_option("--out", compare_out, "error report CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmp->parsed()) {
      const CompareReport r = compare(io::read_trajectory(fom_csv), io::read_trajectory(rom_csv));
      write_compare(compare_out, r);
      std::cout << "max relative output error " << r.max_output_rel << "\n";
      return 0;
    }
    RunConfig c;
    try {
      c = resolve(o);
    } catch (const Error& e) {
      throw StageError("config", e);
    }
    if (cmds[0]->parsed()) return cmd_validate(c);
    if (cmds[1]->parsed()) return cmd_assemble(c);
    if (cmds[2]->parsed()) return cmd_simulate(c);
    if (cmds[3]->parsed()) return cmd_bode(c);
    if (cmds[4]->parsed()) return cmd_reduce(c, 0);
    if (cmds[5]->parsed()) return cmd_reduce(c, 1);
    if (cmds[6]->parsed()) return cmd_reduce(c, 2);
    return cmd_run(c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_validation_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
