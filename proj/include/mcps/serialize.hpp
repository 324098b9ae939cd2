#pragma once

#include "mcps/conditions.hpp"
#include "mcps/problem.hpp"
#include "mcps/solvers.hpp"

#include "json.hpp"

#include <filesystem>

namespace mcps {

using Json = nlohmann::ordered_json;

/// Instance document: {"format": "mcps-instance", "version": 1, "n", "m", "k",
/// "d", "seed", "support" (zero-based), "A" (array of rows), "x_true", "eta", "y"}.
Json instance_to_json(const ProblemInstance& inst);
/// Rejects documents whose support or y disagree with x_true, A and eta.
ProblemInstance instance_from_json(const Json& j);

void save_instance(const ProblemInstance& inst, const std::filesystem::path& path);
ProblemInstance load_instance(const std::filesystem::path& path);

/// Non-finite reals are written as the strings "inf", "-inf" and "nan".
Json report_to_json(const CertificateReport& r);
Json result_to_json(const SolverResult& r);

Json real_to_json(double v);
double real_from_json(const Json& j);

void write_json(const Json& j, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

}  // namespace mcps
