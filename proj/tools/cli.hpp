#pragma once

#include <iosfwd>

#include "json.hpp"

#include "pmc/kernel.hpp"

namespace pmc::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kModel = 2,
  kLawFailure = 3,
  kNumeric = 4,
};

nlohmann::json objectToJson(const FinObject& x);
FinObject objectFromJson(const nlohmann::json& j);

/// {dom, cod, rows: {in: {out: w}}, fail: {in: mass}}; zero weights are omitted.
nlohmann::json kernelToJson(const SubKernel& k);
/// Inverse of kernelToJson. The "fail" map is informational and ignored.
SubKernel kernelFromJson(const nlohmann::json& j, double slack = kDefaultSlack);

/// Runs one command line. argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pmc::cli
