#include "diraclab/report.hpp"

#include <cmath>
#include <sstream>

namespace diraclab {

Json RunConfig::to_json() const {
  Json j;
  j["command"] = command;
  j["n"] = n;
  j["weight"] = weight;
  j["radial_m"] = radial_m;
  j["aniso_a"] = aniso_a;
  j["identity"] = identity;
  j["kappa"] = kappa;
  j["trials"] = trials;
  j["seed"] = seed;
  j["tol"] = tol;
  j["m_list"] = m_list;
  j["domain"] = domain;
  j["r0"] = r0;
  j["r1"] = r1;
  j["levels"] = levels;
  j["base_cells"] = base_cells;
  j["poisson"] = poisson;
  j["aux_k"] = aux_k;
  j["aux_eps"] = aux_eps;
  j["radial_nodes"] = radial_nodes;
  j["sphere_level"] = sphere_level;
  return j;
}

RunConfig RunConfig::from_json(const Json& j) {
  RunConfig c;
  c.command = j.at("command").get<std::string>();
  c.n = j.at("n").get<int>();
  c.weight = j.at("weight").get<std::string>();
  c.radial_m = j.at("radial_m").get<double>();
  c.aniso_a = j.at("aniso_a").get<std::vector<double>>();
  c.identity = j.at("identity").get<std::string>();
  c.kappa = j.at("kappa").get<double>();
  c.trials = j.at("trials").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.tol = j.at("tol").get<double>();
  c.m_list = j.at("m_list").get<std::vector<int>>();
  c.domain = j.at("domain").get<std::string>();
  c.r0 = j.at("r0").get<double>();
  c.r1 = j.at("r1").get<double>();
  c.levels = j.at("levels").get<int>();
  c.base_cells = j.at("base_cells").get<int>();
  c.poisson = j.at("poisson").get<bool>();
  c.aux_k = j.at("aux_k").get<double>();
  c.aux_eps = j.at("aux_eps").get<double>();
  c.radial_nodes = j.at("radial_nodes").get<int>();
  c.sphere_level = j.at("sphere_level").get<int>();
  return c;
}

ReportEntry make_entry(std::string kind, std::string name, double metric,
                       std::string op, double threshold, Json values) {
  ReportEntry e;
  e.kind = std::move(kind);
  e.name = std::move(name);
  e.metric = metric;
  e.op = std::move(op);
  e.threshold = threshold;
  e.pass = (e.op == ">=") ? (metric >= threshold) : (metric <= threshold);
  e.values = std::move(values);
  return e;
}

bool ReportFile::all_pass() const {
  for (const ReportEntry& e : entries) {
    if (!e.pass) return false;
  }
  return true;
}

Json ReportFile::to_json(bool include_wall) const {
  Json j;
  j["schema_version"] = schema_version;
  j["config"] = config.to_json();
  Json arr = Json::array();
  for (const ReportEntry& e : entries) {
    Json je;
    je["kind"] = e.kind;
    je["name"] = e.name;
    je["metric"] = e.metric;
    je["op"] = e.op;
    je["threshold"] = e.threshold;
    je["pass"] = e.pass;
    if (include_wall) je["wall_ms"] = e.wall_ms;
    je["values"] = e.values;
    arr.push_back(std::move(je));
  }
  j["entries"] = std::move(arr);
  j["all_pass"] = all_pass();
  return j;
}

std::string ReportFile::serialize(bool include_wall) const {
  return to_json(include_wall).dump(2) + "\n";
}

std::string ReportFile::to_csv() const {
  std::ostringstream out;
  out << "kind,name,metric,op,threshold,pass\n";
  for (const ReportEntry& e : entries) {
    out << e.kind << ',' << e.name << ',';
    out.precision(17);
    out << e.metric << ',' << e.op << ',' << e.threshold << ','
        << (e.pass ? 1 : 0) << '\n';
  }
  return out.str();
}

Json identity_report_to_json(const IdentityReport& r) {
  Json j;
  j["name"] = r.name;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["abs_residual"] = r.abs_residual;
  j["rel_residual"] = r.rel_residual;
  j["est_error"] = r.est_error;
  j["nodes_used"] = r.nodes_used;
  Json terms;
  for (const auto& [k, v] : r.terms) terms[k] = v;
  j["terms"] = std::move(terms);
  Json margins;
  for (const auto& [k, v] : r.margins) margins[k] = v;
  j["margins"] = std::move(margins);
  return j;
}

Json obstruction_result_to_json(const ObstructionResult& r) {
  Json j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["norm_u_sq"] = r.norm_u_sq;
  j["weighted_f_integral"] = r.weighted_f_integral;
  j["ratio"] = r.ratio;
  j["quad_norm_u_sq"] = r.quad_norm_u_sq;
  j["quad_weighted_f"] = r.quad_weighted_f;
  j["rel_err_u"] = r.rel_err_u;
  j["rel_err_f"] = r.rel_err_f;
  j["pointwise_dirac_residual"] = r.pointwise_dirac_residual;
  j["truncation_R"] = r.truncation_R;
  return j;
}

Json solve_report_to_json(const SolveReport& r) {
  Json j;
  j["residual"] = r.residual;
  j["normal_residual"] = r.normal_residual;
  j["norm_ratio"] = r.norm_ratio;
  j["iterations"] = r.iterations;
  j["grid_h"] = r.grid_h;
  j["bound_expected"] = r.bound_expected;
  j["converged"] = r.converged;
  j["consistent"] = r.consistent;
  return j;
}

double margin_floor(const IdentityReport& r) {
  const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
  return r.est_error + 1e-12 * scale + 1e-30;
}

bool identity_trial_passes(IdentityKind kind, const IdentityReport& r,
                           double rel_tol) {
  const double floor = margin_floor(r);
  for (const auto& [name, value] : r.margins) {
    if (value < -floor) return false;
  }
  if (kind == IdentityKind::perturbed) return true;
  return r.rel_residual <= rel_tol;
}

}  // namespace diraclab
