#pragma once

#include "diraclab/identity_lab.hpp"
#include "diraclab/obstruction.hpp"
#include "diraclab/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace diraclab {

/// Key order is fixed so that serialized reports are byte-stable.
using Json = nlohmann::ordered_json;

/// Fully serializable run configuration; round-trips through its file form
/// bit-exactly (to_json . from_json . to_json is the identity on text).
struct RunConfig {
  std::string command = "verify";
  int n = 3;
  std::string weight = "gauss";  // gauss | x1sq | log | radial | aniso | none
  double radial_m = 2.0;
  std::vector<double> aniso_a;
  std::string identity = "bochner";
  double kappa = 1.0;
  int trials = 50;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  std::vector<int> m_list = {1, 3, 10};
  std::string domain = "annulus";  // annulus | box
  double r0 = 1.0;
  double r1 = 2.0;
  int levels = 3;
  int base_cells = 8;
  bool poisson = false;
  double aux_k = 1.0;
  double aux_eps = 0.5;
  int radial_nodes = 48;
  int sphere_level = 20;

  Json to_json() const;
  static RunConfig from_json(const Json& j);

  QuadratureSpec quadrature() const {
    QuadratureSpec q;
    q.radial_nodes = radial_nodes;
    q.sphere_level = sphere_level;
    return q;
  }
};

/// One checked statement: `metric op threshold` decides pass, so pass/fail is
/// recomputable from the stored numbers alone. `values` carries the full
/// term breakdown for diffing.
struct ReportEntry {
  std::string kind;  // identity | margin | obstruction | solve | sharpness
  std::string name;
  double metric = 0.0;
  std::string op = "<=";  // "<=" or ">="
  double threshold = 0.0;
  bool pass = false;
  double wall_ms = 0.0;
  Json values;
};

struct ReportFile {
  int schema_version = 1;
  RunConfig config;
  std::vector<ReportEntry> entries;

  bool all_pass() const;
  /// `include_wall = false` drops the wall-clock fields (the only
  /// run-dependent payload) for bit-exact comparisons.
  Json to_json(bool include_wall = true) const;
  std::string serialize(bool include_wall = true) const;
  std::string to_csv() const;
};

ReportEntry make_entry(std::string kind, std::string name, double metric,
                       std::string op, double threshold, Json values = {});

Json identity_report_to_json(const IdentityReport& r);
Json obstruction_result_to_json(const ObstructionResult& r);
Json solve_report_to_json(const SolveReport& r);

/// Pass rule for one identity trial: relative residual within tolerance and
/// every margin above -(est_error + floor). The perturbed-Gaussian check is
/// margin-only (it is an inequality, not an identity).
bool identity_trial_passes(IdentityKind kind, const IdentityReport& r,
                           double rel_tol);

/// The margin floor paired with a report's quadrature error estimate.
double margin_floor(const IdentityReport& r);

}  // namespace diraclab
