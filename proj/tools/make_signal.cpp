// Writes a deterministic smooth test signal: two Gaussian caps and a band-limited
// harmonic mixture, projected to degree L and sampled on the Gauss-Legendre grid.

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "conformlets/cli.hpp"
#include "conformlets/error.hpp"

int main(int argc, char** argv) {
  using namespace conformlets;
  CLI::App app{"example signal generator"};
  int L = 8;
  int oversample = 1;
  bool complex = false;
  std::string output;
  app.add_option("--band-limit", L, "band limit L")->check(CLI::Range(0, 256));
  app.add_option("--oversample", oversample, "grid oversampling")->check(CLI::Range(1, 8));
  app.add_flag("--complex", complex, "write complex values");
  app.add_option("--output", output, "signal file")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto grid = std::make_shared<const sphere::SphereGrid>(L, oversample);
    const sphere::Vec3 c1 = sphere::Vec3(0.3, -0.2, 0.9).normalized();
    const sphere::Vec3 c2 = sphere::Vec3(-0.5, 0.6, -0.4).normalized();
    const auto raw = sphere::SphericalSignal::sample(
        std::make_shared<const sphere::SphereGrid>(L, 2), [&](const sphere::Vec3& x) {
          const double a = std::exp(4.0 * (c1.dot(x) - 1.0));
          const double b = 0.5 * std::exp(2.0 * (c2.dot(x) - 1.0));
          return sphere::cplx(a + b, complex ? 0.3 * x[0] * x[2] : 0.0);
        });
    const auto f = sphere::sh_inverse(sphere::sh_forward(raw, L), grid);
    cli::write_file(output, cli::encode_signal(cli::SignalFile::from_signal(
                                f, complex ? cli::ValueType::complex : cli::ValueType::real)));
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(e.code())).c_str(), e.what());
    return exit_status(e.code());
  }
  return 0;
}
