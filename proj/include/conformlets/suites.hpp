#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace conformlets::suites {

struct Tolerances {
  double gyrogroup = 1e-11;
  double decomposition = 1e-10;
  double iwasawa = 1e-10;
  double intertwining = 1e-8;
  double unitarity = 1e-5;
  double reconstruction_harmonic = 1e-6;
  double reconstruction_quadrature = 1e-2;
  double plancherel = 1e-6;
  double frame = 1e-2;
  double covariance_wigner = 1e-10;
  double covariance_grid = 1e-8;
  double noncovariance = 1e-8;
  double constants = 1e-12;
};

struct Options {
  std::uint64_t seed = 1;
  Tolerances tolerances{};
};

/// One measured quantity against its limit. Non-gating checks are reported but
/// do not decide the exit status of the verify command.
struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  /// "<=" (value <= limit), ">=" or "<" / ">".
  std::string relation = "<=";
  bool pass = false;
  bool gating = true;
  std::string note;
};

struct SuiteResult {
  std::string name;
  int criterion = 0;
  std::vector<Check> checks;
  double seconds = 0.0;
  double time_limit = 0.0;

  /// Every check passes.
  bool pass() const;
  /// Every gating check passes.
  bool gating_pass() const;
};

/// Suite names in criterion order.
const std::vector<std::string>& suite_names();

/// Throws invalid-argument for an unknown name.
SuiteResult run_suite(const std::string& name, const Options& opts = {});

}  // namespace conformlets::suites
