#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fragchain/stats.hpp"

namespace fragchain {

struct UnknownSuiteError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SuiteOptions {
  std::uint64_t seed = 7;
};

/// AC1 ... AC15 in order.
const std::vector<std::string>& suite_ids();

/// Runs one registered suite ("all" is not accepted here); every row of
/// the result must pass for the suite to pass.
std::vector<TestReport> run_suite(const std::string& id, const SuiteOptions& options = {});

bool all_pass(const std::vector<TestReport>& reports);

}  // namespace fragchain
