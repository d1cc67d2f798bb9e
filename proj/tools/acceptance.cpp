// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "conformlets/error.hpp"
#include "conformlets/suites.hpp"

namespace {

const char* relation_text(const std::string& r) { return r.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria runner"};
  std::uint64_t seed = 1;
  bool strict = false;
  bool details = true;
  std::vector<std::string> only;
  app.add_option("--seed", seed, "seed of the randomized suites");
  app.add_flag("--strict", strict, "exit nonzero when any criterion fails");
  app.add_flag("!--quiet", details, "omit the per-check lines");
  app.add_option("suites", only, "subset of suites to run");
  CLI11_PARSE(app, argc, argv);

  using namespace conformlets;
  const std::vector<std::string>& names = only.empty() ? suites::suite_names() : only;
  suites::Options opts;
  opts.seed = seed;
  int failures = 0;
  try {
    for (const std::string& name : names) {
      const suites::SuiteResult r = suites::run_suite(name, opts);
      const bool in_time = r.seconds < r.time_limit;
      const bool ok = r.pass() && in_time;
      failures += ok ? 0 : 1;
      std::printf("criterion %2d %-15s %s  runtime %.2fs (limit %.0fs)\n", r.criterion,
                  r.name.c_str(), ok ? "PASS" : "FAIL", r.seconds, r.time_limit);
      if (!details) continue;
      for (const suites::Check& c : r.checks) {
        std::printf("    [%s] %s: %.6g %s %.10g%s%s\n", c.pass ? "ok" : "FAIL", c.name.c_str(),
                    c.value, relation_text(c.relation), c.limit, c.note.empty() ? "" : "  ; ",
                    c.note.c_str());
      }
      std::fflush(stdout);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(e.code())).c_str(), e.what());
    return exit_status(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: E_INTERNAL: %s\n", e.what());
    return 1;
  }
  std::printf("%d of %zu criteria failed\n", failures, names.size());
  return strict && failures > 0 ? 1 : 0;
}
