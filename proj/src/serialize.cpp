#include "mcps/serialize.hpp"

#include <cmath>
#include <fstream>

namespace mcps {

namespace {

constexpr const char* kInstanceFormat = "mcps-instance";

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j, Index expected, const char* name) {
  if (!j.is_array() || static_cast<Index>(j.size()) != expected)
    throw Error(std::string("instance field '") + name + "' has the wrong length");
  Vector v(expected);
  for (Index i = 0; i < expected; ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

}  // namespace

Json real_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double real_from_json(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    throw Error("not a real: " + s);
  }
  return j.get<double>();
}

Json instance_to_json(const ProblemInstance& inst) {
  Json j;
  j["format"] = kInstanceFormat;
  j["version"] = 1;
  j["n"] = inst.n();
  j["m"] = inst.m();
  j["k"] = inst.k();
  j["d"] = inst.d();
  j["seed"] = inst.seed();
  j["support"] = inst.support();
  Json rows = Json::array();
  for (Index i = 0; i < inst.m(); ++i) rows.push_back(vector_to_json(inst.A().row(i).transpose()));
  j["A"] = std::move(rows);
  j["x_true"] = vector_to_json(inst.x_true());
  j["eta"] = vector_to_json(inst.eta());
  j["y"] = vector_to_json(inst.y());
  return j;
}

ProblemInstance instance_from_json(const Json& j) {
  if (j.value("format", "") != kInstanceFormat) throw Error("not an mcps instance document");
  if (j.value("version", 0) != 1) throw Error("unsupported instance version");
  const auto n = j.at("n").get<Index>();
  const auto m = j.at("m").get<Index>();
  if (n <= 0 || m <= 0) throw Error("instance dimensions must be positive");
  const Json& rows = j.at("A");
  if (!rows.is_array() || static_cast<Index>(rows.size()) != m) throw Error("A has the wrong row count");
  Matrix A(m, n);
  for (Index i = 0; i < m; ++i) A.row(i) = vector_from_json(rows[static_cast<std::size_t>(i)], n, "A");
  ProblemInstance inst(std::move(A), vector_from_json(j.at("x_true"), n, "x_true"),
                       vector_from_json(j.at("eta"), m, "eta"), vector_from_json(j.at("y"), m, "y"),
                       j.at("d").get<double>(), j.value("seed", std::uint64_t{0}));
  if (j.contains("support") && j.at("support").get<IndexSet>() != inst.support())
    throw Error("support does not match the nonzeros of x_true");
  if (j.contains("k") && j.at("k").get<Index>() != inst.k()) throw Error("k does not match the support");
  return inst;
}

void save_instance(const ProblemInstance& inst, const std::filesystem::path& path) {
  write_json(instance_to_json(inst), path);
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_json(path));
}

Json report_to_json(const CertificateReport& r) {
  Json j;
  j["format"] = "mcps-certificate";
  j["version"] = 1;
  j["lambda_used"] = real_to_json(r.lambda_used);
  j["epsilon"] = real_to_json(r.epsilon);
  j["alpha"] = real_to_json(r.alpha);
  j["phi_estimate"] = real_to_json(r.phi_estimate);
  j["phi_provenance"] = r.phi_provenance;
  j["d"] = real_to_json(r.d);
  j["mu"] = real_to_json(r.mu);
  j["k"] = r.k;
  j["noise_free"] = r.noise_free;
  j["irr_constant"] = real_to_json(r.irr_constant);
  j["omega_max"] = real_to_json(r.omega_max);
  j["lasso_sign_lhs"] = real_to_json(r.lasso_sign_lhs);
  j["lasso_sign_rhs"] = real_to_json(r.lasso_sign_rhs);
  j["lasso_vsc_lhs"] = real_to_json(r.lasso_vsc_lhs);
  j["zeta_inf"] = real_to_json(r.zeta_inf);
  j["lemma1_lhs"] = real_to_json(r.lemma1_lhs);
  j["lemma1_rhs"] = real_to_json(r.lemma1_rhs);
  j["q"] = real_to_json(r.q);
  j["c3_margin"] = real_to_json(r.c3_margin);
  j["theta"] = real_to_json(r.theta);
  j["alpha_required"] = real_to_json(r.alpha_required);
  j["global_radius"] = real_to_json(r.global_radius);
  j["candidate_sign_consistent"] = r.candidate_sign_consistent;
  j["candidate_in_box"] = r.candidate_in_box;
  j["x_star"] = vector_to_json(r.x_star);
  j["verdicts"] = {{"lasso_vsc", r.verdicts.lasso_vsc},   {"lemma1", r.verdicts.lemma1},
                   {"c3", r.verdicts.c3},                 {"c3_strict", r.verdicts.c3_strict},
                   {"prop1_global", r.verdicts.prop1_global}, {"corollary1", r.verdicts.corollary1}};
  j["notes"] = r.notes;
  return j;
}

Json result_to_json(const SolverResult& r) {
  Json j;
  j["format"] = "mcps-solver-result";
  j["version"] = 1;
  j["solver_id"] = to_string(r.solver_id);
  j["lambda"] = real_to_json(r.lambda);
  j["rho"] = real_to_json(r.rho);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["primal_residual"] = real_to_json(r.primal_residual);
  j["dual_residual"] = real_to_json(r.dual_residual);
  j["objective"] = real_to_json(r.objective);
  j["runtime_seconds"] = r.runtime_seconds;
  if (r.solver_id == SolverId::oracle) {
    j["lipschitz_bound"] = real_to_json(r.lipschitz_bound);
    j["objective_tolerance"] = real_to_json(r.objective_tolerance);
  }
  j["x_hat"] = vector_to_json(r.x_hat);
  return j;
}

void write_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(1) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace mcps
