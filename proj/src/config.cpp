#include "phsmor/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "phsmor/io.hpp"

namespace phs {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(Errc::InvalidConfig, where + ": " + what);
}

void known_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where, "expected an object");
  std::set<std::string> k(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!k.count(it.key())) bad(where, "unknown key '" + it.key() + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(where + "." + key, e.what());
  }
}

MatrixXd matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where, "expected a non-empty array of rows");
  const bool flat = !j[0].is_array();
  const Eigen::Index r = flat ? 1 : static_cast<Eigen::Index>(j.size());
  const Eigen::Index c = flat ? static_cast<Eigen::Index>(j.size()) : static_cast<Eigen::Index>(j[0].size());
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = flat ? j : j[i];
    if (static_cast<Eigen::Index>(row.size()) != c) bad(where, "ragged rows");
    for (Eigen::Index k = 0; k < c; ++k) {
      if (!row[k].is_number()) bad(where, "non-numeric entry");
      m(i, k) = row[k].get<double>();
    }
  }
  return m;
}

json to_json(const MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    a.push_back(row);
  }
  return a;
}

ModelConfig parse_model(const json& j) {
  const std::string w = "model";
  known_keys(j, w, {"preset", "params", "spec"});
  ModelConfig m;
  read(j, "preset", m.preset, w);
  if (j.contains("params")) {
    const json& p = j["params"];
    known_keys(p, w + ".params", {"T0", "rho0", "K", "EI", "rho", "Irho", "g1", "g2", "a", "b"});
    auto& q = m.params;
    for (auto [k, v] : {std::pair{"T0", &q.T0}, {"rho0", &q.rho0}, {"K", &q.K}, {"EI", &q.EI},
                        {"rho", &q.rho}, {"Irho", &q.Irho}, {"g1", &q.g1}, {"g2", &q.g2},
                        {"a", &q.a}, {"b", &q.b}})
      read(p, k, *v, w + ".params");
  }
  if (j.contains("spec")) {
    const json& s = j["spec"];
    const std::string ws = w + ".spec";
    known_keys(s, ws, {"name", "n1", "n2", "interval", "a", "b", "P", "G", "VB", "VC", "H1", "H2"});
    BcPhsSpec spec;
    read(s, "name", spec.name, ws);
    read(s, "n1", spec.n1, ws);
    read(s, "n2", spec.n2, ws);
    read(s, "a", spec.a, ws);
    read(s, "b", spec.b, ws);
    if (s.contains("interval")) {
      std::vector<double> iv;
      read(s, "interval", iv, ws);
      if (iv.size() != 2) bad(ws + ".interval", "expected [a, b]");
      spec.a = iv[0];
      spec.b = iv[1];
    }
    for (const char* k : {"P", "G", "VB", "VC", "H1", "H2"})
      if (!s.contains(k)) bad(ws, std::string("missing '") + k + "'");
    spec.P = matrix(s["P"], ws + ".P");
    spec.G = matrix(s["G"], ws + ".G");
    spec.VB = matrix(s["VB"], ws + ".VB");
    spec.VC = matrix(s["VC"], ws + ".VC");
    spec.H1 = SpatialFunction::constant(matrix(s["H1"], ws + ".H1"));
    spec.H2 = SpatialFunction::constant(matrix(s["H2"], ws + ".H2"));
    if (spec.name.empty()) spec.name = "inline";
    m.inline_spec = spec;
  }
  if (m.preset.empty() == !m.inline_spec) bad(w, "give exactly one of 'preset' and 'spec'");
  return m;
}

std::vector<FieldInit> parse_x0(const json& j, const std::string& w) {
  if (!j.is_array()) bad(w, "expected an array of field profiles");
  std::vector<FieldInit> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string wi = w + "[" + std::to_string(i) + "]";
    known_keys(j[i], wi, {"kind", "amplitude", "mode"});
    FieldInit f;
    read(j[i], "kind", f.kind, wi);
    read(j[i], "amplitude", f.amplitude, wi);
    read(j[i], "mode", f.mode, wi);
    out.push_back(f);
  }
  return out;
}

SimConfig parse_sim(const json& j) {
  const std::string w = "simulation";
  known_keys(j, w, {"dt", "T", "input", "feedback", "x0", "decimation", "csv_stride", "snapshots"});
  SimConfig s;
  read(j, "dt", s.dt, w);
  read(j, "T", s.T, w);
  read(j, "decimation", s.decimation, w);
  read(j, "csv_stride", s.csv_stride, w);
  read(j, "snapshots", s.snapshots, w);
  if (j.contains("input")) {
    const json& u = j["input"];
    const std::string wu = w + ".input";
    known_keys(u, wu, {"kind", "amplitude", "omega", "t_on", "t_off", "channels"});
    read(u, "kind", s.input.kind, wu);
    read(u, "amplitude", s.input.amplitude, wu);
    read(u, "omega", s.input.omega, wu);
    read(u, "t_on", s.input.t_on, wu);
    read(u, "t_off", s.input.t_off, wu);
    read(u, "channels", s.input.channels, wu);
  }
  if (j.contains("feedback") && !j["feedback"].is_null()) {
    const json& f = j["feedback"];
    const std::string wf = w + ".feedback";
    known_keys(f, wf, {"K", "r"});
    Feedback fb;
    if (!f.contains("K")) bad(wf, "missing 'K'");
    fb.K = matrix(f["K"], wf + ".K");
    if (f.contains("r")) {
      const MatrixXd r = matrix(f["r"], wf + ".r");
      fb.r = Eigen::Map<const VectorXd>(r.data(), r.size());
    } else {
      fb.r = VectorXd::Zero(fb.K.rows());
    }
    s.feedback = fb;
  }
  if (j.contains("x0")) s.x0 = parse_x0(j["x0"], w + ".x0");
  return s;
}

MorConfig parse_mor(const json& j) {
  const std::string w = "mor";
  known_keys(j, w, {"band", "n_points", "spacing", "rank_tol", "fixed_k", "Dr_scale", "left_values",
                    "realization", "max_freq", "require_certificate", "grid", "tol_popov", "tol_stab"});
  MorConfig m;
  if (j.contains("band")) {
    std::vector<double> b;
    read(j, "band", b, w);
    if (b.size() != 2) bad(w + ".band", "expected [lower, upper]");
    m.band_lo = b[0];
    m.band_hi = b[1];
  }
  read(j, "n_points", m.n_points, w);
  read(j, "spacing", m.spacing, w);
  read(j, "rank_tol", m.rank_tol, w);
  read(j, "fixed_k", m.fixed_k, w);
  read(j, "Dr_scale", m.Dr_scale, w);
  read(j, "max_freq", m.max_freq, w);
  read(j, "require_certificate", m.require_certificate, w);
  read(j, "tol_popov", m.tol_popov, w);
  read(j, "tol_stab", m.tol_stab, w);
  std::string lv = "mu", re = "feedthrough";
  read(j, "left_values", lv, w);
  read(j, "realization", re, w);
  if (lv == "mu") m.left_values = LeftValues::Mu;
  else if (lv == "literal") m.left_values = LeftValues::Literal;
  else bad(w + ".left_values", "expected 'mu' or 'literal'");
  if (re == "feedthrough") m.realization = Realization::Feedthrough;
  else if (re == "strict") m.realization = Realization::Strict;
  else bad(w + ".realization", "expected 'feedthrough' or 'strict'");
  if (j.contains("grid")) {
    const json& g = j["grid"];
    known_keys(g, w + ".grid", {"lo", "hi", "points"});
    read(g, "lo", m.grid_lo, w + ".grid");
    read(g, "hi", m.grid_hi, w + ".grid");
    read(g, "points", m.grid_points, w + ".grid");
  }
  return m;
}

OutputConfig parse_out(const json& j) {
  const std::string w = "outputs";
  known_keys(j, w, {"dir", "fom_matrices", "rom_matrices", "bode_points", "bode_band"});
  OutputConfig o;
  read(j, "dir", o.dir, w);
  read(j, "fom_matrices", o.fom_matrices, w);
  read(j, "rom_matrices", o.rom_matrices, w);
  read(j, "bode_points", o.bode_points, w);
  if (j.contains("bode_band")) {
    std::vector<double> b;
    read(j, "bode_band", b, w);
    if (b.size() != 2) bad(w + ".bode_band", "expected [lower, upper]");
    o.bode_lo = b[0];
    o.bode_hi = b[1];
  }
  return o;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad("config", e.what());
  }
  known_keys(j, "config", {"model", "mesh", "simulation", "mor", "outputs"});
  RunConfig c;
  if (!j.contains("model")) bad("config", "missing 'model'");
  c.model = parse_model(j["model"]);
  if (j.contains("mesh")) {
    known_keys(j["mesh"], "mesh", {"N", "N1", "N2"});
    int N = 0;
    read(j["mesh"], "N", N, "mesh");
    if (N) c.N1 = c.N2 = N;
    read(j["mesh"], "N1", c.N1, "mesh");
    read(j["mesh"], "N2", c.N2, "mesh");
  }
  if (j.contains("simulation")) c.sim = parse_sim(j["simulation"]);
  if (j.contains("mor")) c.mor = parse_mor(j["mor"]);
  if (j.contains("outputs")) c.out = parse_out(j["outputs"]);
  check_config(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const Error& e) {
    bad("config", e.what());
  }
  return parse_config(text);
}

std::string dump_config(const RunConfig& c) {
  ojson j;
  ojson model;
  if (c.model.inline_spec) {
    const auto& s = *c.model.inline_spec;
    model["spec"] = {{"name", s.name}, {"n1", s.n1}, {"n2", s.n2}, {"interval", {s.a, s.b}},
                     {"P", to_json(s.P)}, {"G", to_json(s.G)}, {"VB", to_json(s.VB)},
                     {"VC", to_json(s.VC)}, {"H1", to_json(s.H1(s.a))}, {"H2", to_json(s.H2(s.a))}};
  } else {
    const auto& p = c.model.params;
    model["preset"] = c.model.preset;
    model["params"] = {{"T0", p.T0}, {"rho0", p.rho0}, {"K", p.K}, {"EI", p.EI}, {"rho", p.rho},
                       {"Irho", p.Irho}, {"g1", p.g1}, {"g2", p.g2}, {"a", p.a}, {"b", p.b}};
  }
  j["model"] = model;
  j["mesh"] = {{"N1", c.N1}, {"N2", c.N2}};
  ojson sim;
  sim["dt"] = c.sim.dt;
  sim["T"] = c.sim.T;
  const auto& u = c.sim.input;
  sim["input"] = {{"kind", u.kind}, {"amplitude", u.amplitude}, {"omega", u.omega}, {"t_on", u.t_on},
                  {"t_off", std::isfinite(u.t_off) ? ojson(u.t_off) : ojson(nullptr)},
                  {"channels", u.channels}};
  if (c.sim.feedback) {
    const VectorXd& r = c.sim.feedback->r;
    sim["feedback"] = {{"K", to_json(c.sim.feedback->K)},
                       {"r", std::vector<double>(r.data(), r.data() + r.size())}};
  }
  ojson x0 = ojson::array();
  for (const auto& f : c.sim.x0) x0.push_back({{"kind", f.kind}, {"amplitude", f.amplitude}, {"mode", f.mode}});
  sim["x0"] = x0;
  sim["decimation"] = c.sim.decimation;
  sim["csv_stride"] = c.sim.csv_stride;
  sim["snapshots"] = c.sim.snapshots;
  j["simulation"] = sim;
  const auto& m = c.mor;
  j["mor"] = {{"band", {m.band_lo, m.band_hi}},
              {"n_points", m.n_points},
              {"spacing", m.spacing},
              {"rank_tol", m.rank_tol},
              {"fixed_k", m.fixed_k},
              {"Dr_scale", m.Dr_scale},
              {"left_values", m.left_values == LeftValues::Mu ? "mu" : "literal"},
              {"realization", m.realization == Realization::Feedthrough ? "feedthrough" : "strict"},
              {"max_freq", m.max_freq},
              {"require_certificate", m.require_certificate},
              {"grid", {{"lo", m.grid_lo}, {"hi", m.grid_hi}, {"points", m.grid_points}}},
              {"tol_popov", m.tol_popov},
              {"tol_stab", m.tol_stab}};
  const auto& o = c.out;
  j["outputs"] = {{"dir", o.dir},
                  {"fom_matrices", o.fom_matrices},
                  {"rom_matrices", o.rom_matrices},
                  {"bode_points", o.bode_points},
                  {"bode_band", {o.bode_lo, o.bode_hi}}};
  return j.dump(2) + "\n";
}

void check_config(const RunConfig& c) {
  if (c.N1 < 2) bad("mesh.N1", "must be at least 2");
  if (c.N2 < 2) bad("mesh.N2", "must be at least 2");
  const auto& s = c.sim;
  if (!(s.dt > 0.0)) bad("simulation.dt", "must be positive");
  if (!(s.T > 0.0)) bad("simulation.T", "must be positive");
  if (s.decimation < 1) bad("simulation.decimation", "must be at least 1");
  if (s.csv_stride < 1) bad("simulation.csv_stride", "must be at least 1");
  if (s.input.kind != "zero" && s.input.kind != "sin" && s.input.kind != "step")
    bad("simulation.input.kind", "expected zero, sin or step");
  if (!(s.input.t_off > s.input.t_on)) bad("simulation.input", "t_off must exceed t_on");
  for (int ch : s.input.channels)
    if (ch < 1) bad("simulation.input.channels", "channels are 1-based");
  for (const auto& f : s.x0)
    if (f.kind != "zero" && f.kind != "sin" && f.kind != "cos" && f.kind != "const")
      bad("simulation.x0", "unknown profile '" + f.kind + "'");
  if (s.feedback && (s.feedback->K.rows() != s.feedback->K.cols() ||
                     s.feedback->r.size() != s.feedback->K.rows()))
    bad("simulation.feedback", "K must be square and r must match it");
  const auto& m = c.mor;
  if (!(m.band_lo > 0.0 && m.band_lo < m.band_hi)) bad("mor.band", "need 0 < lower < upper");
  if (m.n_points < 2) bad("mor.n_points", "need at least two frequencies");
  if (m.spacing != "linear" && m.spacing != "log") bad("mor.spacing", "expected linear or log");
  if (!(m.rank_tol > 0.0 && m.rank_tol < 1.0)) bad("mor.rank_tol", "must lie in (0, 1)");
  if (m.fixed_k < 0) bad("mor.fixed_k", "must be non-negative");
  if (!(m.Dr_scale > 0.0)) bad("mor.Dr_scale", "must be positive");
  if (m.max_freq < 0.0) bad("mor.max_freq", "must be non-negative");
  if (!(m.grid_lo > 0.0 && m.grid_lo < m.grid_hi) || m.grid_points < 2) bad("mor.grid", "invalid grid");
  if (c.out.bode_points < 2 || !(c.out.bode_lo > 0.0 && c.out.bode_lo < c.out.bode_hi))
    bad("outputs", "invalid Bode grid");
  if (c.out.dir.empty()) bad("outputs.dir", "must not be empty");
}

}  // namespace phs
