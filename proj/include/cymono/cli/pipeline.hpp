#pragma once

#include <cstdint>
#include <string>

#include "cymono/io/json_io.hpp"

namespace cymono::cli {

using io::json;
using io::ProblemInput;

// Exit-code convention shared by every subcommand.
inline constexpr int kExitPass = 0;
inline constexpr int kExitMathFailure = 1;
inline constexpr int kExitUsage = 2;

struct GenParams {
  std::string kind;  // gradient | rotation | triplet4 | random_monotone | random
  core::Index m = 4;
  int dimension = 1;
  int order = 3;
  std::uint64_t seed = 0;
};

ProblemInput generate_example(const GenParams& params);

struct PipelineOptions {
  double tolerance = 1e-8;
  double build_tol = 1e-9;
  int max_iter = 200;
  std::uint64_t seed = 0;
  int restarts = 20;
  core::Rank tensor_cap = core::kDefaultTensorCap;
  core::Index factorial_cap = 8;
  core::ExecPolicy policy = core::ExecPolicy::Parallel;
};

struct PipelineResult {
  json report;
  int exit_code;
};

// check -> psi -> fixed-point H -> bar-H -> representation/dualrep ->
// sigma-invariant LP -> involution polar -> duality gap. The report is
// byte-identical across runs with the same seed and inputs except for the
// "timing_ms" object.
PipelineResult run_pipeline(const ProblemInput& input, const PipelineOptions& options,
                            const std::string& command_echo, const std::string& input_digest);

}  // namespace cymono::cli
