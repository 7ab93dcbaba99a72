#include "ptrg/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <Eigen/Core>
#include <json.hpp>

#include "ptrg/bethe.hpp"
#include "ptrg/charges.hpp"
#include "ptrg/dynamics.hpp"
#include "ptrg/eig.hpp"
#include "ptrg/error.hpp"
#include "ptrg/kernels.hpp"
#include "ptrg/model.hpp"
#include "ptrg/perturb.hpp"
#include "ptrg/ptsym.hpp"

namespace ptrg::cli {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

[[noreturn]] void invalid(const std::string& what) { fail(ErrorCode::Validation, what); }

// ---- schema helpers ---------------------------------------------------------

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) invalid(where + " must be a JSON object");
}

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key)) invalid("unknown key '" + key + "' in " + where);
}

const json& required(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) invalid("missing key '" + key + "' in " + where);
  return j.at(key);
}

double as_number(const json& v, const std::string& what) {
  if (!v.is_number()) invalid(what + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) invalid(what + " must be finite");
  return x;
}

int as_int(const json& v, const std::string& what) {
  if (!v.is_number_integer()) invalid(what + " must be an integer");
  return v.get<int>();
}

bool as_bool(const json& v, const std::string& what) {
  if (!v.is_boolean()) invalid(what + " must be true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& what) {
  if (!v.is_string()) invalid(what + " must be a string");
  return v.get<std::string>();
}

std::vector<double> as_number_list(const json& v, const std::string& what) {
  if (!v.is_array()) invalid(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_number(x, what + " entry"));
  return out;
}

cplx as_complex(const json& v, const std::string& what) {
  if (!v.is_object()) invalid(what + " must be an object {\"re\": x, \"im\": y}");
  reject_unknown(v, what, {"re", "im"});
  return {as_number(required(v, "re", what), what + ".re"), as_number(required(v, "im", what), what + ".im")};
}

template <class F>
void optional_key(const json& j, const std::string& key, F&& f) {
  if (j.contains(key)) f(j.at(key));
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "xxz-rational") return ModelKind::XxzRational;
  if (s == "xxz-trig") return ModelKind::XxzTrig;
  if (s == "xxz-hyperbolic") return ModelKind::XxzHyperbolic;
  if (s == "xyz-field") return ModelKind::XyzField;
  invalid("model.family must be one of xxz-rational, xxz-trig, xxz-hyperbolic, xyz-field (got '" + s + "')");
}

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::XxzRational: return "xxz-rational";
    case ModelKind::XxzTrig: return "xxz-trig";
    case ModelKind::XxzHyperbolic: return "xxz-hyperbolic";
    case ModelKind::XyzField: return "xyz-field";
  }
  return "?";
}

const std::map<std::string, TaskKind>& task_names() {
  static const std::map<std::string, TaskKind> m{
      {"spectrum", TaskKind::Spectrum}, {"charges", TaskKind::Charges},   {"integrability", TaskKind::Integrability},
      {"dynamics", TaskKind::Dynamics}, {"lindblad", TaskKind::Lindblad}, {"perturb", TaskKind::Perturb},
      {"bethe", TaskKind::Bethe},       {"couplings", TaskKind::Couplings}};
  return m;
}

ModelConfig parse_model(const json& j) {
  require_object(j, "model");
  ModelConfig m;
  m.kind = parse_model_kind(as_string(required(j, "family", "model"), "model.family"));
  if (m.kind == ModelKind::XyzField)
    reject_unknown(j, "model", {"family", "N", "epsilon", "g", "alpha_x", "alpha_y", "beta_x", "beta_y", "delta", "lambda"});
  else
    reject_unknown(j, "model", {"family", "N", "epsilon", "g", "imaginary_x_coupling"});
  m.n = as_int(required(j, "N", "model"), "model.N");
  if (m.n < 1 || m.n > kMaxSites) invalid("model.N must lie in [1, " + std::to_string(kMaxSites) + "]");
  m.epsilon = as_number_list(required(j, "epsilon", "model"), "model.epsilon");
  if (m.epsilon.size() != static_cast<std::size_t>(m.n)) invalid("model.epsilon must have N entries");
  for (std::size_t a = 0; a < m.epsilon.size(); ++a)
    for (std::size_t b = a + 1; b < m.epsilon.size(); ++b)
      if (m.epsilon[a] == m.epsilon[b]) invalid("epsilon entries must be distinct");
  m.g = as_number(required(j, "g", "model"), "model.g");
  optional_key(j, "alpha_x", [&](const json& v) { m.alpha_x = as_number(v, "model.alpha_x"); });
  optional_key(j, "alpha_y", [&](const json& v) { m.alpha_y = as_number(v, "model.alpha_y"); });
  optional_key(j, "beta_x", [&](const json& v) { m.beta_x = as_number(v, "model.beta_x"); });
  optional_key(j, "beta_y", [&](const json& v) { m.beta_y = as_number(v, "model.beta_y"); });
  optional_key(j, "delta", [&](const json& v) { m.delta = as_complex(v, "model.delta"); });
  optional_key(j, "lambda", [&](const json& v) { m.lambda = as_complex(v, "model.lambda"); });
  optional_key(j, "imaginary_x_coupling",
               [&](const json& v) { m.imaginary_x_coupling = as_bool(v, "model.imaginary_x_coupling"); });
  return m;
}

void parse_window(const json& v, TaskConfig& t) {
  const auto w = as_number_list(v, "task.window");
  if (w.size() != 2 || !(w[0] < w[1])) invalid("task.window must be [t_a, t_b] with t_a < t_b");
  t.window_a = w[0];
  t.window_b = w[1];
}

TaskConfig parse_task(const json& j, const std::optional<ModelConfig>& model) {
  require_object(j, "task");
  TaskConfig t;
  const std::string type = as_string(required(j, "type", "task"), "task.type");
  const auto it = task_names().find(type);
  if (it == task_names().end()) invalid("unknown task type '" + type + "'");
  t.kind = it->second;

  auto bitstring = [&](const json& v) {
    t.initial = as_string(v, "task.initial");
    if (!model || t.initial.size() != static_cast<std::size_t>(model->n) ||
        t.initial.find_first_not_of("01") != std::string::npos)
      invalid("task.initial must be a bitstring of N characters 0/1");
  };
  auto time_keys = [&](const json& jj) {
    optional_key(jj, "t_max", [&](const json& v) { t.t_max = as_number(v, "task.t_max"); });
    optional_key(jj, "step", [&](const json& v) { t.step = as_number(v, "task.step"); });
    optional_key(jj, "dt", [&](const json& v) { t.dt = as_number(v, "task.dt"); });
    optional_key(jj, "window", [&](const json& v) { parse_window(v, t); });
    optional_key(jj, "weights", [&](const json& v) { t.weights = as_number_list(v, "task.weights"); });
    if (!(t.t_max > 0.0) || !(t.step > 0.0) || !(t.dt > 0.0)) invalid("task.t_max, task.step and task.dt must be positive");
    if (!t.weights.empty() && t.weights.size() != static_cast<std::size_t>(model->n))
      invalid("task.weights must have N entries");
    if (jj.contains("initial")) bitstring(jj.at("initial"));
    else t.initial = std::string(static_cast<std::size_t>(model->n), '0');
  };

  if (t.kind != TaskKind::Couplings && !model) invalid("task '" + type + "' needs a model block");

  switch (t.kind) {
    case TaskKind::Spectrum:
      reject_unknown(j, "task", {"type", "tol"});
      optional_key(j, "tol", [&](const json& v) { t.tol = as_number(v, "task.tol"); });
      if (!(t.tol > 0.0)) invalid("task.tol must be positive");
      break;
    case TaskKind::Charges:
      reject_unknown(j, "task", {"type", "normalization", "weights"});
      optional_key(j, "normalization", [&](const json& v) { t.normalization = as_string(v, "task.normalization"); });
      if (t.normalization != "spin" && t.normalization != "pauli") invalid("task.normalization must be spin or pauli");
      optional_key(j, "weights", [&](const json& v) { t.weights = as_number_list(v, "task.weights"); });
      if (!t.weights.empty() && t.weights.size() != static_cast<std::size_t>(model->n))
        invalid("task.weights must have N entries");
      break;
    case TaskKind::Integrability:
      reject_unknown(j, "task", {"type"});
      break;
    case TaskKind::Dynamics:
      reject_unknown(j, "task", {"type", "t_max", "step", "dt", "initial", "mode", "window", "weights"});
      time_keys(j);
      optional_key(j, "mode", [&](const json& v) { t.mode = as_string(v, "task.mode"); });
      if (t.mode != "standard" && t.mode != "cp") invalid("task.mode must be standard or cp");
      break;
    case TaskKind::Lindblad:
      reject_unknown(j, "task", {"type", "t_max", "step", "dt", "gamma", "initial", "window", "weights", "jump_sites"});
      time_keys(j);
      t.gamma = as_number(required(j, "gamma", "task"), "task.gamma");
      if (t.gamma < 0.0) invalid("task.gamma must be non-negative");
      optional_key(j, "jump_sites", [&](const json& v) {
        if (!v.is_array()) invalid("task.jump_sites must be an array of site indices");
        for (const auto& s : v) {
          const int site = as_int(s, "task.jump_sites entry");
          if (site < 1 || site > model->n) invalid("task.jump_sites entries must lie in [1, N]");
          t.jump_sites.push_back(site);
        }
      });
      break;
    case TaskKind::Perturb:
      reject_unknown(j, "task", {"type", "inner", "scales", "bz_from_epsilon"});
      optional_key(j, "inner", [&](const json& v) { t.inner = as_string(v, "task.inner"); });
      (void)parse_inner_product(t.inner);
      optional_key(j, "scales", [&](const json& v) { t.scales = as_number_list(v, "task.scales"); });
      optional_key(j, "bz_from_epsilon", [&](const json& v) { t.bz_from_epsilon = as_bool(v, "task.bz_from_epsilon"); });
      if (model->kind != ModelKind::XyzField) invalid("task 'perturb' needs an xyz-field model");
      break;
    case TaskKind::Bethe:
      reject_unknown(j, "task", {"type", "pairs"});
      t.pairs = as_int(required(j, "pairs", "task"), "task.pairs");
      if (t.pairs < 1 || t.pairs > model->n) invalid("task.pairs must satisfy 1 <= M <= N");
      if (model->g == 0.0) invalid("task 'bethe' needs g != 0");
      break;
    case TaskKind::Couplings:
      reject_unknown(j, "task", {"type", "d"});
      t.d_grid = as_number_list(required(j, "d", "task"), "task.d");
      if (t.d_grid.empty()) invalid("task.d must not be empty");
      break;
  }
  return t;
}

OutputConfig parse_output(const json& j) {
  require_object(j, "output");
  reject_unknown(j, "output", {"directory", "formats"});
  OutputConfig o;
  optional_key(j, "directory", [&](const json& v) { o.directory = as_string(v, "output.directory"); });
  optional_key(j, "formats", [&](const json& v) {
    if (!v.is_array() || v.empty()) invalid("output.formats must be a non-empty array");
    o.csv = o.json = false;
    for (const auto& f : v) {
      const std::string s = as_string(f, "output.formats entry");
      if (s == "csv") o.csv = true;
      else if (s == "json") o.json = true;
      else invalid("output.formats entries must be csv or json");
    }
  });
  return o;
}

// ---- model assembly ---------------------------------------------------------

CouplingSet couplings_for(const ModelConfig& m) {
  if (m.kind == ModelKind::XyzField) {
    XYZFieldParams p;
    p.alpha_x = m.alpha_x;
    p.alpha_y = m.alpha_y;
    p.beta_x = m.beta_x;
    p.beta_y = m.beta_y;
    p.delta = m.delta;
    p.lambda = m.lambda;
    p.epsilon = m.epsilon;
    p.g = m.g;
    return build_fields_xyz(p);
  }
  XXZParams p;
  p.family = m.kind == ModelKind::XxzRational ? Family::Rational
             : m.kind == ModelKind::XxzTrig   ? Family::Trigonometric
                                              : Family::Hyperbolic;
  p.epsilon = m.epsilon;
  p.g = m.g;
  p.imaginary_x_coupling = m.imaginary_x_coupling;
  return build_couplings_xxz(p);
}

std::vector<double> weights_or_first(const TaskConfig& t, int n) {
  if (!t.weights.empty()) return t.weights;
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  w[0] = 1.0;
  return w;
}

json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

// Non-finite values are written as null so that the summary stays valid JSON.
json number_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

struct Artifacts {
  json metrics = json::object();
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
};

std::string trajectory_csv(const TrajectoryRecord& tr) {
  std::string s = "t,site,sx,sy,sz,norm_or_trace,mode\n";
  const std::string mode(to_string(tr.mode));
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    for (int i = 0; i < tr.sites; ++i) {
      const auto si = static_cast<std::size_t>(i);
      s += format_double(tr.times[k]) + "," + std::to_string(i + 1) + "," + format_double(tr.sx[k][si]) + "," +
           format_double(tr.sy[k][si]) + "," + format_double(tr.sz[k][si]) + "," + format_double(tr.norm_or_trace[k]) +
           "," + mode + "\n";
    }
  return s;
}

json steady_json(const TrajectoryRecord& tr, const TaskConfig& t) {
  json sites = json::array();
  const auto m = steady_state_metric(tr, t.window_a, t.window_b);
  for (std::size_t i = 0; i < m.size(); ++i)
    sites.push_back({{"site", i + 1}, {"stddev", m[i].stddev}, {"drift", m[i].drift}});
  return json{{"window", json::array({t.window_a, t.window_b})}, {"sites", sites}};
}

// ---- tasks ------------------------------------------------------------------

void task_spectrum(const RunConfig& cfg, Artifacts& art) {
  const auto& m = *cfg.model;
  const SpinSystem sys(m.n);
  const auto charges = build_all_charges(sys, couplings_for(m));
  std::string csv = "charge_index,eig_index,re,im,tag,partner\n";
  json per = json::array();
  std::size_t unpaired = 0;
  for (std::size_t i = 0; i < charges.size(); ++i) {
    const auto d = eig_general(charges[i]);
    const auto cls = classify_spectrum(d.eigenvalues, cfg.task.tol);
    for (std::size_t k = 0; k < d.size(); ++k)
      csv += std::to_string(i + 1) + "," + std::to_string(k) + "," + format_double(d.eigenvalues[k].real()) + "," +
             format_double(d.eigenvalues[k].imag()) + "," + to_string(cls.tags[k]) + "," +
             std::to_string(cls.partner[k]) + "\n";
    unpaired += cls.count(PTTag::UnpairedComplex);
    per.push_back({{"charge_index", i + 1},
                   {"real", cls.count(PTTag::Real)},
                   {"pair", cls.count(PTTag::ConjugatePair)},
                   {"unpaired", cls.count(PTTag::UnpairedComplex)},
                   {"biorth_residual", d.biorth_residual}});
  }
  art.metrics["spectrum_tags"] = per;
  art.metrics["unpaired_total"] = unpaired;
  art.files.emplace_back("spectrum.csv", csv);
}

void task_charges(const RunConfig& cfg, Artifacts& art) {
  const auto& m = *cfg.model;
  const SpinSystem sys(m.n);
  const auto cs = couplings_for(m);
  const auto norm = cfg.task.normalization == "pauli" ? ChargeNormalization::Pauli : ChargeNormalization::Spin;
  const auto set = build_charge_set(sys, cs, norm);
  OperatorMatrix h;
  if (!cfg.task.weights.empty()) h = build_hamiltonian_from_charges(set.charges, cfg.task.weights);
  const auto rep = commutation_report(set, cfg.task.weights.empty() ? nullptr : &h);
  art.metrics["max_commutator_residual"] = rep.max_pair;
  if (rep.max_with_h >= 0.0) art.metrics["max_commutator_with_h"] = rep.max_with_h;

  const auto qr = quadratic_coeffs(cs, norm);
  const auto cal = calibrate_kappa(set, qr);
  art.metrics["kappa"] = cal.kappa;
  art.metrics["branch_agreement"] = qr.branch_agreement;
  art.metrics["max_quadratic_residual"] = *std::max_element(cal.residuals.begin(), cal.residuals.end());
  std::string csv = "charge_index,k_re,k_im,quadratic_residual\n";
  for (std::size_t i = 0; i < set.charges.size(); ++i)
    csv += std::to_string(i + 1) + "," + format_double(qr.k[i].real()) + "," + format_double(qr.k[i].imag()) + "," +
           format_double(cal.residuals[i]) + "\n";
  art.files.emplace_back("quadratic.csv", csv);
  std::string cm = "i,j,re,im\n";
  for (std::size_t i = 0; i < qr.c.dim(); ++i)
    for (std::size_t k = 0; k < qr.c.dim(); ++k)
      cm += std::to_string(i + 1) + "," + std::to_string(k + 1) + "," + format_double(qr.c(i, k).real()) + "," +
            format_double(qr.c(i, k).imag()) + "\n";
  art.files.emplace_back("quadratic_c.csv", cm);
}

void task_integrability(const RunConfig& cfg, Artifacts& art) {
  const auto& m = *cfg.model;
  const SpinSystem sys(m.n);
  const auto cs = couplings_for(m);
  std::string csv = "check,value\n";
  auto row = [&](const std::string& name, double v) {
    csv += name + "," + format_double(v) + "\n";
    art.metrics[name] = number_json(v);
  };
  if (m.kind == ModelKind::XyzField) {
    const auto r = check_integrability_xyz(cs);
    row("linear", r.linear);
    row("quadratic", r.quadratic);
    row("linear_alternate", r.linear_alternate);
  } else {
    const auto r = check_integrability_xxz(cs);
    row("antisymmetry_x", r.antisymmetry_x);
    row("antisymmetry_z", r.antisymmetry_z);
    row("triple", r.triple);
  }
  row("max_commutator_residual", commutation_report(build_charge_set(sys, cs)).max_pair);
  art.files.emplace_back("integrability.csv", csv);
}

void task_dynamics(const RunConfig& cfg, Artifacts& art) {
  const auto& m = *cfg.model;
  const auto& t = cfg.task;
  const SpinSystem sys(m.n);
  const auto h = build_hamiltonian_from_charges(build_all_charges(sys, couplings_for(m)), weights_or_first(t, m.n));
  const auto psi0 = StateVector::basis(sys, t.initial);
  const auto grid = uniform_grid(t.t_max, t.step);
  ClosedOptions opts;
  opts.dt = t.dt;
  TrajectoryRecord tr;
  if (t.mode == "cp") {
    SignatureOptions so;
    so.allow_broken = true;
    const auto pt = pt_operators(h, parity_op(sys), so);
    tr = evolve_closed(h, psi0, grid, EvolutionMode::ClosedCPWeighted, &pt, opts);
  } else {
    tr = evolve_closed(h, psi0, grid, EvolutionMode::ClosedStandard, nullptr, opts);
  }
  art.metrics["propagator"] = tr.propagator;
  art.metrics["broken_phase"] = tr.broken_phase;
  art.metrics["max_imag"] = tr.max_imag;
  art.metrics["steady_state"] = steady_json(tr, t);
  art.files.emplace_back("trajectory.csv", trajectory_csv(tr));
}

void task_lindblad(const RunConfig& cfg, Artifacts& art) {
  const auto& m = *cfg.model;
  const auto& t = cfg.task;
  const SpinSystem sys(m.n);
  const auto h = build_hamiltonian_from_charges(build_all_charges(sys, couplings_for(m)), weights_or_first(t, m.n));
  const auto rho0 = DensityMatrix::pure(StateVector::basis(sys, t.initial));
  LindbladOptions opts;
  opts.dt = t.dt;
  const auto tr = evolve_lindblad(h, rho0, LindbladSpec{t.gamma, t.jump_sites}, uniform_grid(t.t_max, t.step), opts);
  double trace_dev = 0.0;
  for (double x : tr.norm_or_trace) trace_dev = std::max(trace_dev, std::abs(x - 1.0));
  art.metrics["dt_used"] = tr.dt_used;
  art.metrics["max_trace_deviation"] = trace_dev;
  art.metrics["steady_state"] = steady_json(tr, t);
  art.files.emplace_back("trajectory.csv", trajectory_csv(tr));
}

void task_perturb(const RunConfig& cfg, Artifacts& art) {
  const auto& m = *cfg.model;
  const auto& t = cfg.task;
  const SpinSystem sys(m.n);
  auto cs = couplings_for(m);
  if (t.bz_from_epsilon) cs.bz = m.epsilon;
  const auto split = split_hamiltonian(sys, cs);
  CorrectionOptions opts;
  opts.inner = parse_inner_product(t.inner);
  const auto tab = corrections(split, opts);
  std::string csv = "level,e0_re,e0_im,e1_re,e1_im,e2_re,e2_im,cluster,degenerate,valid\n";
  double max_e1 = 0.0;
  for (std::size_t n = 0; n < tab.size(); ++n) {
    csv += std::to_string(n) + "," + format_double(tab.e0[n].real()) + "," + format_double(tab.e0[n].imag()) + "," +
           format_double(tab.e1[n].real()) + "," + format_double(tab.e1[n].imag()) + "," +
           format_double(tab.e2[n].real()) + "," + format_double(tab.e2[n].imag()) + "," +
           std::to_string(tab.cluster[n]) + "," + (tab.degenerate[n] ? "1" : "0") + "," + (tab.valid[n] ? "1" : "0") +
           "\n";
    if (tab.valid[n] && !tab.degenerate[n]) max_e1 = std::max(max_e1, std::abs(tab.e1[n]));
  }
  art.files.emplace_back("corrections.csv", csv);
  art.metrics["inner_product"] = std::string(to_string(opts.inner));
  art.metrics["ratio"] = split.ratio;
  art.metrics["unresolved_clusters"] = tab.unresolved_clusters;
  art.metrics["max_abs_e1_nondegenerate"] = max_e1;
  if (m.g == 0.0) art.metrics["closed_form_check"] = closed_form_matrix_element_check(sys, cs, split);
  if (!t.scales.empty()) {
    const auto sr = scaling_validation(split, t.scales, opts);
    json slopes = json::array();
    std::string sc = "level,scale,error\n";
    for (std::size_t l = 0; l < sr.levels.size(); ++l) {
      slopes.push_back({{"level", sr.levels[l]}, {"slope", sr.slopes[l]}});
      for (std::size_t k = 0; k < sr.scales.size(); ++k)
        sc += std::to_string(sr.levels[l]) + "," + format_double(sr.scales[k]) + "," + format_double(sr.errors[l][k]) +
              "\n";
    }
    art.metrics["scaling_slopes"] = slopes;
    art.metrics["min_slope"] = sr.min_slope;
    art.files.emplace_back("scaling.csv", sc);
  }
}

void task_bethe(const RunConfig& cfg, Artifacts& art) {
  const auto& m = *cfg.model;
  const SpinSystem sys(m.n);
  const auto roots = solve_richardson({m.epsilon, m.g, cfg.task.pairs});
  const auto state = bethe_state(sys, m.epsilon, roots.roots);
  const auto check = verify_eigenstate(richardson_hamiltonian(sys, m.epsilon, m.g), state.normalized);

  json rj = json::array();
  for (const auto& r : roots.roots) rj.push_back(complex_json(r));
  json trace = json::array();
  for (const auto& cp : roots.trace) {
    json rr = json::array();
    for (const auto& r : cp.roots) rr.push_back(complex_json(r));
    trace.push_back({{"g", complex_json(cp.g)}, {"roots", rr}});
  }
  json newton = json::array();
  for (double r : roots.final_newton_residuals) newton.push_back(number_json(r));
  json doc{{"pairs", cfg.task.pairs},        {"g", m.g},
           {"roots", rj},                    {"residual", roots.residual},
           {"min_gap", number_json(roots.min_gap)}, {"coalesced", roots.coalesced},
           {"path", roots.path},             {"final_newton_residuals", newton},
           {"trace", trace}};
  art.files.emplace_back("bethe_roots.json", doc.dump(2) + "\n");

  art.metrics["bethe_residual"] = roots.residual;
  art.metrics["path"] = roots.path;
  art.metrics["rayleigh"] = complex_json(check.rayleigh);
  art.metrics["eigen_residual"] = check.residual;
  art.metrics["overlap"] = check.best_overlap;
}

void task_couplings(const RunConfig& cfg, Artifacts& art) {
  art.files.emplace_back("couplings.csv", couplings_csv(cfg.task.d_grid));
  art.metrics["rows"] = 3 * cfg.task.d_grid.size();
}

json versions_json() {
  return json{{"ptrg", kVersion},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

void write_file(const std::filesystem::path& p, const std::string& contents) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << contents;
  if (!f) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string couplings_csv(const std::vector<double>& d_grid) {
  constexpr double kPoleGap = 1e-6;
  std::string s = "family,d,gamma_x,gamma_z,nearest_pole\n";
  for (Family f : {Family::Rational, Family::Trigonometric, Family::Hyperbolic}) {
    for (double d : d_grid) {
      const double pole = nearest_pole(f, d);
      if (std::abs(d - pole) < kPoleGap)
        invalid("couplings grid point d = " + format_double(d) + " lies within 1e-6 of a " +
                std::string(to_string(f)) + " pole");
      const auto c = coupling_family(f, d, 0.0);
      s += std::string(to_string(f)) + "," + format_double(d) + "," + format_double(c.gx) + "," + format_double(c.gz) +
           "," + format_double(pole) + "\n";
    }
  }
  return s;
}

RunConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  require_object(j, "config");
  reject_unknown(j, "config", {"model", "task", "output"});
  RunConfig cfg;
  if (j.contains("model")) cfg.model = parse_model(j.at("model"));
  cfg.task = parse_task(required(j, "task", "config"), cfg.model);
  if (j.contains("output")) cfg.output = parse_output(j.at("output"));
  return cfg;
}

RunResult run(const RunRequest& req, std::ostream& err) {
  RunResult res;
  const auto start = std::chrono::steady_clock::now();
  auto report = [&](int code, const std::string& msg) {
    res.exit_code = code;
    res.diagnostic = msg;
    err << "ptrg: error: " << msg << "\n";
    return res;
  };

  std::string text;
  {
    std::ifstream f(req.config, std::ios::binary);
    if (!f) return report(2, "cannot read config " + req.config.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }

  try {
    const RunConfig cfg = parse_config(text);
    res.out_dir = req.out ? *req.out : std::filesystem::path(cfg.output.directory);
    kernels::set_thread_count(req.threads);

    Artifacts art;
    using Task = std::function<void(const RunConfig&, Artifacts&)>;
    static const std::map<TaskKind, Task> tasks{
        {TaskKind::Spectrum, task_spectrum},   {TaskKind::Charges, task_charges},
        {TaskKind::Integrability, task_integrability}, {TaskKind::Dynamics, task_dynamics},
        {TaskKind::Lindblad, task_lindblad},   {TaskKind::Perturb, task_perturb},
        {TaskKind::Bethe, task_bethe},         {TaskKind::Couplings, task_couplings}};
    tasks.at(cfg.task.kind)(cfg, art);

    std::filesystem::create_directories(res.out_dir);
    if (cfg.output.csv)
      for (const auto& [name, contents] : art.files) write_file(res.out_dir / name, contents);

    if (cfg.output.json) {
      json summary;
      summary["config"] = json::parse(text);
      summary["versions"] = versions_json();
      for (const auto& [name, kind] : task_names())
        if (kind == cfg.task.kind) summary["task"] = name;
      if (cfg.model) summary["model_family"] = model_kind_name(cfg.model->kind);
      summary["seedless"] = req.seedless;
      summary["randomness_used"] = false;
      summary["metrics"] = art.metrics;
      json files = json::array();
      for (const auto& f : art.files)
        if (cfg.output.csv) files.push_back(f.first);
      summary["files"] = files;
      summary["exit_status"] = 0;
      write_file(res.out_dir / "summary.json", summary.dump(2) + "\n");
    }
  } catch (const Error& e) {
    return report(e.is_validation() ? 2 : 3, std::string(to_string(e.code())) + ": " + e.what());
  } catch (const std::exception& e) {
    return report(3, e.what());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", wall);
  err << "ptrg: done in " << buf << " s\n";
  return res;
}

}  // namespace ptrg::cli
