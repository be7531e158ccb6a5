#include "phsmor/pipeline.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

namespace phs {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

ValidatedModel build_model(const RunConfig& cfg) {
  const BcPhsSpec spec = cfg.model.inline_spec ? *cfg.model.inline_spec
                                               : preset(cfg.model.preset, cfg.model.params);
  return validate(spec);
}

InputSignal make_input(const InputConfig& in, Eigen::Index n) {
  VectorXd mask = VectorXd::Zero(n);
  if (in.channels.empty()) mask.setOnes();
  for (int ch : in.channels) {
    if (ch < 1 || ch > n)
      throw Error(Errc::InvalidConfig, "simulation.input.channels: channel " + std::to_string(ch) +
                                           " outside 1.." + std::to_string(n));
    mask(ch - 1) = 1.0;
  }
  if (in.kind == "zero") return zero_input(n);
  const bool sine = in.kind == "sin";
  return [in, mask, sine](double t) -> VectorXd {
    if (t < in.t_on || t >= in.t_off) return VectorXd::Zero(mask.size());
    return mask * (sine ? in.amplitude * std::sin(in.omega * t) : in.amplitude);
  };
}

SpatialFunction make_profile(const std::vector<FieldInit>& fields, const BcPhsSpec& spec) {
  const double a = spec.a, L = spec.b - spec.a;
  SpatialFunction f;
  f.rows = static_cast<Eigen::Index>(fields.size());
  f.cols = 1;
  f.eval = [fields, a, L](double z) {
    VectorXd v(fields.size());
    const double xi = (z - a) / L;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto& p = fields[i];
      const double arg = p.mode * std::numbers::pi * xi;
      v(i) = p.kind == "sin"   ? p.amplitude * std::sin(arg)
             : p.kind == "cos" ? p.amplitude * std::cos(arg)
             : p.kind == "const" ? p.amplitude
                                 : 0.0;
    }
    return MatrixXd(v);
  };
  return f;
}

VectorXd initial_state(const AssembledFom& fom, const std::vector<FieldInit>& fields) {
  if (fields.empty()) return VectorXd::Zero(fom.size());
  const auto& spec = fom.model.spec;
  if (static_cast<int>(fields.size()) != spec.n())
    throw Error(Errc::InvalidConfig, "simulation.x0: expected " + std::to_string(spec.n()) +
                                         " field profiles, got " + std::to_string(fields.size()));
  return project_initial(fom, make_profile(fields, spec));
}

SimOptions sim_options(const SimConfig& s) {
  SimOptions o;
  o.dt = s.dt;
  o.T = s.T;
  o.decimation = s.decimation;
  o.feedback = s.feedback;
  return o;
}

std::vector<double> interpolation_frequencies(const MorConfig& m) {
  std::vector<double> f(m.n_points);
  for (int i = 0; i < m.n_points; ++i) {
    const double t = static_cast<double>(i) / (m.n_points - 1);
    f[i] = m.spacing == "log" ? m.band_lo * std::pow(m.band_hi / m.band_lo, t)
                              : m.band_lo + t * (m.band_hi - m.band_lo);
  }
  return f;
}

VectorXd log_grid(double lo, double hi, int points) {
  VectorXd g(points);
  for (int i = 0; i < points; ++i) g(i) = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
  return g;
}

Reduction reduce(const PhOperator& op, const MorConfig& m) {
  Reduction r;
  r.data = generate_data(op, interpolation_frequencies(m));
  r.pencil = build_pencil(r.data);
  ComplexDescriptor cd;
  try {
    cd = realize(r.pencil, m.rank_tol);
  } catch (const Error& e) {
    if (e.code() != Errc::RankDeficientData) throw;
    r.full_rank = false;
    cd = realize(r.pencil, 0.0);
  }
  r.real = real_transform(cd, left_points(r.data), right_points(r.data));
  r.trunc = svd_truncate(r.real.sys, m.rank_tol, m.fixed_k);
  r.proj = build_projector(op, r.pencil, r.real.JR, r.trunc.X);
  r.rom = r.trunc.rom;
  r.rom.T = r.proj.T;
  return r;
}

PassiveOptions passive_options(const MorConfig& m) {
  PassiveOptions o;
  o.left_values = m.left_values;
  o.realization = m.realization;
  o.zeros.max_freq = m.max_freq;
  o.certificate.tol_popov = m.tol_popov;
  o.certificate.tol_stab = m.tol_stab;
  o.grid = log_grid(m.grid_lo, m.grid_hi, m.grid_points);
  o.require_certificate = m.require_certificate;
  return o;
}

VectorXd reduced_initial(const AssembledFom& fom, const MatrixXd& T, const VectorXd& x0) {
  if (x0.isZero(0.0)) return VectorXd::Zero(T.cols());
  const MatrixXd ET = fom.E * T;
  return (T.transpose() * ET).ldlt().solve(ET.transpose() * x0);
}

CompareReport compare(const Trajectory& f, const Trajectory& r, const AssembledFom* ctx, const MatrixXd* T) {
  if (f.t.size() != r.t.size() || (f.t - r.t).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, f.t.cwiseAbs().maxCoeff()))
    throw Error(Errc::GridMismatch, "time grids differ");
  if (f.y.rows() != r.y.rows()) throw Error(Errc::GridMismatch, "output counts differ");
  CompareReport rep;
  rep.t = f.t;
  rep.output_error = (f.y - r.y).colwise().norm().transpose();
  rep.max_output = f.y.colwise().norm().maxCoeff();
  rep.max_output_rel = rep.output_error.maxCoeff() / std::max(rep.max_output, 1e-300);
  if (ctx && T) {
    if (f.kept != r.kept) throw Error(Errc::GridMismatch, "kept state instants differ");
    const MatrixXd D = f.X - (*T) * r.X;
    const MatrixXd ED = ctx->E * D, EX = ctx->E * f.X;
    rep.state_error.resize(D.cols());
    rep.t_state.resize(D.cols());
    for (std::size_t k = 0; k < f.kept.size(); ++k) rep.t_state(static_cast<Eigen::Index>(k)) = f.t(f.kept[k]);
    for (Eigen::Index k = 0; k < D.cols(); ++k) {
      rep.state_error(k) = std::sqrt(std::max(0.0, D.col(k).dot(ED.col(k))));
      rep.max_state = std::max(rep.max_state, std::sqrt(std::max(0.0, f.X.col(k).dot(EX.col(k)))));
    }
    rep.max_state_rel = rep.state_error.size() ? rep.state_error.maxCoeff() / std::max(rep.max_state, 1e-300) : 0.0;
  }
  return rep;
}

CompareReport compare(const io::TrajectoryTable& f, const io::TrajectoryTable& r) {
  Trajectory a, b;
  a.t = f.t;
  a.y = f.y;
  b.t = r.t;
  b.y = r.y;
  return compare(a, b);
}

void write_compare(const fs::path& path, const CompareReport& r) {
  const Eigen::Index m = r.t.size();
  MatrixXd tab(m, 2);
  tab << r.t, r.output_error;
  io::write_table(path, {"t", "output_error"}, tab);
  if (r.state_error.size()) {
    MatrixXd st(r.state_error.size(), 2);
    st << r.t_state, r.state_error;
    fs::path sp = path;
    sp.replace_filename(path.stem().string() + "_states.csv");
    io::write_table(sp, {"t", "state_error"}, st);
  }
}

MatrixXd field_table(const AssembledFom& fom, const VectorXd& x) {
  const int n = fom.model.spec.n();
  const Basis& fine = fom.basis1.N >= fom.basis2.N ? fom.basis1 : fom.basis2;
  MatrixXd tab(fine.N, n + 1);
  tab.col(0) = fine.nodes;
  for (int c = 0; c < n; ++c) {
    const Basis& b = fom.basis_of(c);
    const auto coef = x.segment(fom.offset(c), b.N);
    for (int i = 0; i < fine.N; ++i) {
      const double z = fine.nodes(i);
      const int e = std::clamp(static_cast<int>(std::floor((z - b.a) / b.h)), 0, b.N - 2);
      const double t = std::clamp((z - b.nodes(e)) / b.h, 0.0, 1.0);
      tab(i, c + 1) = (1.0 - t) * coef(e) + t * coef(e + 1);
    }
  }
  return tab;
}

std::vector<std::string> field_header(const AssembledFom& fom) {
  std::vector<std::string> h{"z"};
  for (int c = 1; c <= fom.model.spec.n(); ++c) h.push_back("x_" + std::to_string(c));
  return h;
}

void Manifest::add(const fs::path& file) {
  files.push_back({fs::relative(file, dir).generic_string(), io::sha256_file(file), fs::file_size(file)});
}

void Manifest::write() const {
  ojson j;
  j["verdict"] = verdict;
  j["preliminary_order"] = preliminary_order;
  j["final_order"] = final_order;
  ojson list = ojson::array();
  for (const auto& f : files) list.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  j["files"] = list;
  io::write_text(dir / "manifest.json", j.dump(2) + "\n");
}

namespace {

void write_descriptor(Manifest& man, const std::string& stem, const RealDescriptor& s) {
  const std::pair<const char*, const MatrixXd*> parts[] = {{"E", &s.E}, {"A", &s.A}, {"B", &s.B}, {"C", &s.C}, {"D", &s.D}};
  for (const auto& [name, m] : parts) {
    const fs::path p = man.dir / (stem + "_" + name + ".csv");
    io::write_dense(p, *m);
    man.add(p);
  }
}

double finite_or_nan(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

Manifest run(const RunConfig& cfg) {
  Manifest man;
  man.dir = cfg.out.dir;
  fs::create_directories(man.dir);
  auto out = [&](const std::string& name) { return man.dir / name; };
  auto stage = [&](const char* name, auto&& f) {
    try {
      return f();
    } catch (const StageError&) {
      man.write();
      throw;
    } catch (const Error& e) {
      man.write();
      throw StageError(name, e);
    }
  };
  ojson summary;

  io::write_text(out("config.json"), dump_config(cfg));
  man.add(out("config.json"));

  const ValidatedModel model = stage("validate", [&] { return build_model(cfg); });
  summary["model"] = model.spec.name;
  summary["iep"] = model.iep;

  const AssembledFom fom = stage("assemble", [&] {
    AssembledFom f = assemble_fom(model, cfg.N1, cfg.N2);
    if (cfg.out.fom_matrices) {
      const std::pair<const char*, const SpMat*> parts[] = {{"E", &f.E}, {"Q", &f.Q}, {"J", &f.J}, {"R", &f.R}};
      for (const auto& [name, m] : parts) {
        io::write_coo(out(std::string("fom_") + name + ".csv"), *m);
        man.add(out(std::string("fom_") + name + ".csv"));
      }
      io::write_dense(out("fom_B.csv"), f.B);
      man.add(out("fom_B.csv"));
    }
    return f;
  });
  summary["fom_order"] = fom.size();
  const PhOperator op(fom);

  const Reduction red = stage("reduce", [&] {
    Reduction r = reduce(op, cfg.mor);
    io::write_tangential(out("tangential_data.csv"), r.data);
    man.add(out("tangential_data.csv"));
    io::write_table(out("singular_values.csv"), {"sigma"}, r.trunc.rom.sigma);
    man.add(out("singular_values.csv"));
    if (cfg.out.rom_matrices) {
      write_descriptor(man, "rom_preliminary", r.rom.sys);
      io::write_dense(out("rom_preliminary_T.csv"), *r.rom.T);
      man.add(out("rom_preliminary_T.csv"));
    }
    return r;
  });
  man.preliminary_order = red.trunc.k;
  summary["preliminary_order"] = red.trunc.k;
  summary["rank_condition_held"] = red.full_rank;
  summary["projector_residuals"] = {red.proj.res_E, red.proj.res_A, red.proj.res_B, red.proj.res_C};

  const PassiveOptions popt = passive_options(cfg.mor);
  const PassivityCertificate cert_pre = stage("certify", [&] {
    PassivityCertificate c = passivity_check(red.rom.sys, popt.grid, popt.certificate);
    io::write_certificate(out("certificate_preliminary.csv"), c);
    man.add(out("certificate_preliminary.csv"));
    return c;
  });
  summary["preliminary_certificate"] = {{"verdict", verdict_name(cert_pre.verdict)},
                                        {"min_popov", finite_or_nan(cert_pre.min_popov)},
                                        {"spectral_abscissa", finite_or_nan(cert_pre.spectral_abscissa)}};

  Rom final_rom = red.rom;
  PassivityCertificate cert = cert_pre;
  stage("passivate", [&] {
    if (cert_pre.verdict != Verdict::Passive) {
      PassiveOptions o = popt;
      o.require_certificate = false;
      const MatrixXd Dr = cfg.mor.Dr_scale * MatrixXd::Identity(fom.inputs(), fom.inputs());
      const PassiveResult pr = passive_reduce(red.rom.sys, Dr, o, &op);
      io::write_zeros(out("spectral_zeros.csv"), pr.zeros);
      man.add(out("spectral_zeros.csv"));
      final_rom = pr.rom;
      cert = pr.certificate;
      summary["spectral_zeros"] = pr.zeros.zeros.size();
      summary["max_zero_residual"] = pr.max_zero_residual;
      try {
        const PhFactors f = extract_ph(final_rom);
        summary["ph_factors"] = {{"loewner_positive", f.loewner_positive},
                                 {"skew_residual", f.skew_residual},
                                 {"min_eig_R", f.min_eig_R},
                                 {"min_eig_W", f.min_eig_W}};
        const std::pair<const char*, const MatrixXd*> parts[] = {{"J", &f.J}, {"R", &f.R}, {"Q", &f.Q},
                                                                 {"G", &f.G}, {"P", &f.P}};
        for (const auto& [name, m] : parts) {
          io::write_dense(out(std::string("ph_") + name + ".csv"), *m);
          man.add(out(std::string("ph_") + name + ".csv"));
        }
      } catch (const Error& e) {
        summary["ph_factors"] = e.what();
      }
    }
    if (cfg.out.rom_matrices) {
      write_descriptor(man, "rom_final", final_rom.sys);
      if (final_rom.T) {
        io::write_dense(out("rom_final_T.csv"), *final_rom.T);
        man.add(out("rom_final_T.csv"));
      }
    }
    io::write_certificate(out("certificate_final.csv"), cert);
    man.add(out("certificate_final.csv"));
    return 0;
  });
  man.final_order = static_cast<int>(final_rom.sys.order());
  man.verdict = verdict_name(cert.verdict);
  summary["final_order"] = man.final_order;
  summary["final_certificate"] = {{"verdict", man.verdict},
                                  {"min_popov", finite_or_nan(cert.min_popov)},
                                  {"spectral_abscissa", finite_or_nan(cert.spectral_abscissa)}};

  stage("bode", [&] {
    const VectorXd w = log_grid(cfg.out.bode_lo, cfg.out.bode_hi, cfg.out.bode_points);
    const auto header = io::bode_header(fom.inputs(), fom.inputs());
    io::write_table(out("bode_fom.csv"), header, io::bode_table(op, w));
    man.add(out("bode_fom.csv"));
    io::write_table(out("bode_preliminary.csv"), header, io::bode_table(red.rom.sys, w));
    man.add(out("bode_preliminary.csv"));
    io::write_table(out("bode_final.csv"), header, io::bode_table(final_rom.sys, w));
    man.add(out("bode_final.csv"));
    return 0;
  });

  stage("simulate", [&] {
    const SimOptions so = sim_options(cfg.sim);
    const InputSignal u = make_input(cfg.sim.input, fom.inputs());
    const VectorXd x0 = initial_state(fom, cfg.sim.x0);
    const Trajectory tf = simulate(fom, u, x0, so);
    const BalanceReport bal = energy_balance_report(tf, fom);
    summary["fom_balance_max_residual"] = bal.max_abs;
    summary["fom_max_H"] = bal.max_H;

    auto rom_x0 = [&](const Rom& r) {
      return r.T ? reduced_initial(fom, *r.T, x0) : VectorXd::Zero(r.sys.order());
    };
    const Trajectory tr = simulate(final_rom.sys, u, rom_x0(final_rom), so);
    Trajectory tp;
    try {
      tp = simulate(red.rom.sys, u, rom_x0(red.rom), so);
    } catch (const Error& e) {
      summary["preliminary_simulation"] = e.what();
    }

    io::write_trajectory(out("trajectory_fom.csv"), tf, cfg.sim.csv_stride);
    man.add(out("trajectory_fom.csv"));
    io::write_trajectory(out("trajectory_final.csv"), tr, cfg.sim.csv_stride);
    man.add(out("trajectory_final.csv"));
    if (tp.t.size()) {
      io::write_trajectory(out("trajectory_preliminary.csv"), tp, cfg.sim.csv_stride);
      man.add(out("trajectory_preliminary.csv"));
    }

    const int stride = cfg.sim.csv_stride;
    const Eigen::Index rows = (tf.t.size() + stride - 1) / stride;
    MatrixXd en(rows, 4);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Eigen::Index k = i * stride;
      en.row(i) << tf.t(k), tf.H(k), tp.t.size() ? tp.H(k) : std::numeric_limits<double>::quiet_NaN(), tr.H(k);
    }
    io::write_table(out("energy.csv"), {"t", "H_fom", "H_preliminary", "H_final"}, en);
    man.add(out("energy.csv"));

    for (std::size_t s = 0; s < cfg.sim.snapshots.size(); ++s) {
      const double ts = cfg.sim.snapshots[s];
      Eigen::Index best = 0;
      for (std::size_t c = 0; c < tf.kept.size(); ++c)
        if (std::abs(tf.t(tf.kept[c]) - ts) < std::abs(tf.t(tf.kept[best]) - ts)) best = static_cast<Eigen::Index>(c);
      const std::string tag = std::to_string(s);
      io::write_table(out("snapshot_fom_" + tag + ".csv"), field_header(fom), field_table(fom, tf.X.col(best)));
      man.add(out("snapshot_fom_" + tag + ".csv"));
      if (final_rom.T) {
        const VectorXd lifted = *final_rom.T * tr.X.col(best);
        io::write_table(out("snapshot_final_" + tag + ".csv"), field_header(fom), field_table(fom, lifted));
        man.add(out("snapshot_final_" + tag + ".csv"));
      }
      summary["snapshot_times"].push_back(tf.t(tf.kept[best]));
    }

    const MatrixXd* T = final_rom.T ? &*final_rom.T : nullptr;
    const CompareReport rep = stage("compare", [&] { return compare(tf, tr, T ? &fom : nullptr, T); });
    write_compare(out("compare.csv"), rep);
    man.add(out("compare.csv"));
    if (rep.state_error.size()) man.add(out("compare_states.csv"));
    summary["compare"] = {{"max_output_rel", rep.max_output_rel}, {"max_state_rel", rep.max_state_rel}};
    return 0;
  });

  io::write_text(out("summary.json"), summary.dump(2) + "\n");
  man.add(out("summary.json"));
  man.write();
  if (cfg.mor.require_certificate && cert.verdict != Verdict::Passive)
    throw StageError("passivate", Error(Errc::CertificateFailure,
                                        "final model verdict " + man.verdict + " (artifacts written)"));
  return man;
}

}  // namespace phs
