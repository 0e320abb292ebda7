#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "cymono/core/domain.hpp"
#include "cymono/core/involution.hpp"
#include "cymono/core/tensor.hpp"
#include "cymono/monotonicity/monotonicity.hpp"

namespace cymono::io {

using json = nlohmann::ordered_json;

struct ProblemInput {
  core::DiscreteDomain domain;
  core::FieldTuple fields;
};

// {"dimension": d, "order": N, "points": [[...]...],
//  "weights": [...] (optional), "fields": [[[...]...]...]}
ProblemInput problem_from_json(const json& j);
json problem_to_json(const ProblemInput& input);

// CSV with header row x1..xd,u1_1..; one sample per row, uniform weights.
ProblemInput problem_from_csv(const std::string& text);

// Dispatches on the .csv extension, otherwise JSON.
ProblemInput load_problem(const std::filesystem::path& path);
void save_problem(const std::filesystem::path& path, const ProblemInput& input);

// {"order": N, "m": m, "values": flat row-major array} with an optional
// "flags" object.
json tensor_to_json(const core::GridHamiltonian& h);
core::GridHamiltonian tensor_from_json(const json& j);
core::GridHamiltonian load_tensor(const std::filesystem::path& path);
void save_tensor(const std::filesystem::path& path, const core::GridHamiltonian& h);

// Sparse coupling: {"order": N, "m": m, "entries": [[[t1..tN], mass]...]}
// in ascending rank order.
json coupling_to_json(const core::SigmaCoupling& pi);
core::SigmaCoupling coupling_from_json(const json& j, std::span<const double> first_marginal);

json involution_to_json(const core::NInvolution& s);
core::NInvolution involution_from_json(const json& j);

json witness_to_json(const monotonicity::CycleWitness& witness);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

// FNV-1a of the raw file bytes, as a 16-digit hex string.
std::string digest_hex(const std::string& bytes);

}  // namespace cymono::io
