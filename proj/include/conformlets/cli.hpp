#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "conformlets/cwt.hpp"
#include "conformlets/sections.hpp"
#include "conformlets/sphere.hpp"
#include "conformlets/suites.hpp"

namespace conformlets::cli {

/// Parsed configuration file. Sections and keys:
///   [transform] band_limit, oversample, t_nodes, u_min, u_max, n_alpha, n_beta, n_gamma, path
///   [section]   family, parameter, compare, t_samples
///   [wavelet]   name, file
///   [tolerances] one key per suites::Tolerances field
///   [output]    directory
struct Config {
  int band_limit = 8;
  /// Output grid of synthesize: 0 reuses the analyzed signal's layout.
  int oversample = 0;
  int t_nodes = 32;
  double u_min = 1e-4;
  double u_max = 1e4;
  int n_alpha = 0;
  int n_beta = 0;
  int n_gamma = 0;
  cwt::Path path = cwt::Path::harmonic;
  std::string section = "fundamental";
  /// Second section for side-by-side admissibility profiles.
  std::optional<std::string> compare;
  int t_samples = 201;
  std::string wavelet = "dog";
  std::optional<std::string> wavelet_file;
  suites::Tolerances tolerances{};
  std::string output_directory = ".";
};

/// Throws E_CONFIG on unknown sections or keys, malformed values or values out of range.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

enum class ValueType : std::uint8_t { real = 0, complex = 1 };

inline constexpr std::uint8_t kSignalVersion = 1;
inline constexpr std::uint8_t kCoefficientVersion = 1;

/// Header "CSIG", version, value type, two reserved bytes, then u32 L, n_theta, n_phi;
/// payload of little-endian f64 values, theta-major, (re, im) pairs when complex.
struct SignalFile {
  int band_limit = 0;
  int n_theta = 0;
  int n_phi = 0;
  ValueType type = ValueType::real;
  Eigen::VectorXcd values;

  sphere::SphericalSignal signal() const;
  static SignalFile from_signal(const sphere::SphericalSignal& s, ValueType type);
};

std::string encode_signal(const SignalFile& f);
/// Throws E_FORMAT on a short, corrupt or inconsistent buffer.
SignalFile decode_signal(const std::string& bytes);

/// Header "CCOF", version, path, source value type, reserved byte, u32 L, n_alpha, n_beta,
/// n_gamma, n_t, source n_theta, source n_phi, f64 u_min, u_max, length-prefixed section
/// and wavelet names, n_t f64 scale nodes; payload of (re, im) f64 pairs, node-major then
/// scale.
struct CoefficientFile {
  int band_limit = 0;
  int n_alpha = 0;
  int n_beta = 0;
  int n_gamma = 0;
  double u_min = 0.0;
  double u_max = 0.0;
  cwt::Path path = cwt::Path::harmonic;
  ValueType source_type = ValueType::real;
  int source_n_theta = 1;
  int source_n_phi = 1;
  std::string section;
  std::string wavelet;
  std::vector<double> t;
  Eigen::MatrixXcd values;
};

std::string encode_coefficients(const CoefficientFile& f);
CoefficientFile decode_coefficients(const std::string& bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

/// Wavelet family described by a configuration.
cwt::FamilyPtr make_family(const Config& cfg, const std::string& section);

/// Entry point of the conformlets tool. Errors print one line
/// "error: <CODE>: <message>" to err and return the code's exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace conformlets::cli
