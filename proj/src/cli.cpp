#include "conformlets/cli.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <CLI11.hpp>
#include <json.hpp>

#include "conformlets/error.hpp"
#include "conformlets/gyroball.hpp"

namespace conformlets::cli {

namespace {

namespace fs = std::filesystem;
using boost::property_tree::ptree;

constexpr char kSignalMagic[4] = {'C', 'S', 'I', 'G'};
constexpr char kCoefficientMagic[4] = {'C', 'C', 'O', 'F'};
constexpr int kMaxBandLimit = 512;

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

// --- configuration ------------------------------------------------------------------

template <typename T>
T value_of(const ptree& node, const std::string& where) {
  const std::string raw = node.get_value<std::string>();
  std::istringstream in(raw);
  in.imbue(std::locale::classic());
  T v{};
  if (!(in >> v) || !(in >> std::ws).eof()) {
    fail(ErrorCode::config, "malformed value '" + raw + "' for " + where);
  }
  return v;
}

void require(bool ok, const std::string& message) {
  if (!ok) fail(ErrorCode::config, message);
}

cwt::Path parse_path(const std::string& s) {
  if (s == "harmonic") return cwt::Path::harmonic;
  if (s == "quadrature") return cwt::Path::quadrature;
  fail(ErrorCode::config, "transform.path must be harmonic or quadrature, got '" + s + "'");
}

std::string path_name(cwt::Path p) { return p == cwt::Path::harmonic ? "harmonic" : "quadrature"; }

const std::map<std::string, double suites::Tolerances::*>& tolerance_keys() {
  using T = suites::Tolerances;
  static const std::map<std::string, double T::*> keys = {
      {"gyrogroup", &T::gyrogroup},
      {"decomposition", &T::decomposition},
      {"iwasawa", &T::iwasawa},
      {"intertwining", &T::intertwining},
      {"unitarity", &T::unitarity},
      {"reconstruction_harmonic", &T::reconstruction_harmonic},
      {"reconstruction_quadrature", &T::reconstruction_quadrature},
      {"plancherel", &T::plancherel},
      {"frame", &T::frame},
      {"covariance_wigner", &T::covariance_wigner},
      {"covariance_grid", &T::covariance_grid},
      {"noncovariance", &T::noncovariance},
      {"constants", &T::constants},
  };
  return keys;
}

std::string canonical_section(const std::string& text) {
  try {
    return sections::Section::parse(text).spec();
  } catch (const Error& e) {
    fail(ErrorCode::config, std::string("invalid section '") + text + "': " + e.what());
  }
}

// --- binary encoding ----------------------------------------------------------------

class Writer {
 public:
  void bytes(const char* p, std::size_t n) { out_.append(p, n); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string& in, std::string what) : in_(in), what_(std::move(what)) {}

  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) fail(ErrorCode::format, what_ + " is truncated");
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(in_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return std::bit_cast<double>(bits);
  }
  std::string str(std::size_t max_len) {
    const std::uint32_t n = u32();
    if (n > max_len) fail(ErrorCode::format, what_ + " has an oversized string field");
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void magic(const char (&m)[4]) {
    if (in_.empty()) fail(ErrorCode::format, what_ + " is empty");
    need(4);
    if (in_.compare(pos_, 4, m, 4) != 0) fail(ErrorCode::format, what_ + " has a bad magic number");
    pos_ += 4;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  const std::string& in_;
  std::string what_;
  std::size_t pos_ = 0;
};

ValueType value_type(std::uint8_t b, const std::string& what) {
  if (b > 1) fail(ErrorCode::format, what + " has an unknown value type " + std::to_string(b));
  return static_cast<ValueType>(b);
}

void check_finite(const Eigen::VectorXcd& v, const std::string& what) {
  if (!v.allFinite()) fail(ErrorCode::validation, what + " contains non-finite values");
}

// --- commands -----------------------------------------------------------------------

struct Flags {
  std::string config;
  std::string input;
  std::string output;
  std::vector<std::string> suites;
  std::uint64_t seed = 1;
};

Config config_or_default(const Flags& f) {
  return f.config.empty() ? Config{} : load_config(f.config);
}

void need(const std::string& value, const std::string& flag, const std::string& cmd) {
  if (value.empty()) fail(ErrorCode::invalid_argument, cmd + " requires " + flag);
}

void print_warnings(const cwt::AdmissibilityProfile& prof, std::ostream& out) {
  for (const auto& w : prof.warnings) out << "warning: " << one_line(w) << "\n";
}

sphere::GridPtr output_grid(const Config& cfg, int n_theta, int n_phi) {
  if (cfg.oversample == 0) {
    return std::make_shared<const sphere::SphereGrid>(cfg.band_limit, n_theta, n_phi);
  }
  return std::make_shared<const sphere::SphereGrid>(cfg.band_limit, cfg.oversample);
}

void cmd_analyze(const Flags& flags, std::ostream& out) {
  need(flags.config, "--config", "analyze");
  need(flags.input, "--input", "analyze");
  need(flags.output, "--output", "analyze");
  const Config cfg = load_config(flags.config);
  const SignalFile in = decode_signal(read_file(flags.input));
  if (in.band_limit != cfg.band_limit) {
    fail(ErrorCode::validation, "signal band limit " + std::to_string(in.band_limit) +
                                    " does not match configured band_limit " +
                                    std::to_string(cfg.band_limit));
  }
  const sphere::SphericalSignal f = in.signal();
  const cwt::FamilyPtr fam = make_family(cfg, cfg.section);
  const cwt::AdmissibilityProfile prof = cwt::admissibility(*fam);
  const cwt::WaveletCoefficients W = cwt::analyze(fam, f, cfg.path);
  const cwt::PlancherelResult p = cwt::plancherel_check(fam, prof, f);

  CoefficientFile cf;
  cf.band_limit = cfg.band_limit;
  cf.n_alpha = fam->rotations().n_alpha();
  cf.n_beta = fam->rotations().n_beta();
  cf.n_gamma = fam->rotations().n_gamma();
  cf.u_min = cfg.u_min;
  cf.u_max = cfg.u_max;
  cf.path = cfg.path;
  cf.source_type = in.type;
  cf.section = fam->section().spec();
  cf.wavelet = fam->wavelet().name;
  cf.t = fam->measure().t;
  cf.values = W.values;
  cf.source_n_theta = in.n_theta;
  cf.source_n_phi = in.n_phi;
  write_file(flags.output, encode_coefficients(cf));

  print_warnings(prof, out);
  out << "coefficients: " << W.values.rows() << " rotations x " << W.values.cols()
      << " scales, path " << path_name(cfg.path) << "\n";
  out << "plancherel: norm2=" << num(p.lhs) << " transform=" << num(p.rhs)
      << " relerr=" << num(p.relerr) << "\n";
}

void cmd_synthesize(const Flags& flags, std::ostream& out) {
  need(flags.config, "--config", "synthesize");
  need(flags.input, "--input", "synthesize");
  need(flags.output, "--output", "synthesize");
  const Config cfg = load_config(flags.config);
  const CoefficientFile cf = decode_coefficients(read_file(flags.input));
  const cwt::FamilyPtr fam = make_family(cfg, cfg.section);
  auto mismatch = [](const std::string& what, const std::string& file, const std::string& conf) {
    fail(ErrorCode::validation, "coefficient file " + what + " " + file +
                                    " does not match configured " + conf);
  };
  if (cf.band_limit != cfg.band_limit) {
    mismatch("band limit", std::to_string(cf.band_limit), std::to_string(cfg.band_limit));
  }
  const auto& rot = fam->rotations();
  if (cf.n_alpha != rot.n_alpha() || cf.n_beta != rot.n_beta() || cf.n_gamma != rot.n_gamma()) {
    mismatch("rotation grid", std::to_string(cf.n_alpha) + "x" + std::to_string(cf.n_beta) + "x" +
                                  std::to_string(cf.n_gamma),
             std::to_string(rot.n_alpha()) + "x" + std::to_string(rot.n_beta()) + "x" +
                 std::to_string(rot.n_gamma()));
  }
  if (cf.section != fam->section().spec()) mismatch("section", cf.section, fam->section().spec());
  if (cf.wavelet != fam->wavelet().name) mismatch("wavelet", cf.wavelet, fam->wavelet().name);
  if (cf.t != fam->measure().t || cf.u_min != cfg.u_min || cf.u_max != cfg.u_max) {
    mismatch("scale nodes", std::to_string(cf.t.size()) + " nodes",
             std::to_string(fam->measure().size()) + " nodes");
  }
  const cwt::AdmissibilityProfile prof = cwt::admissibility(*fam);
  const cwt::WaveletCoefficients W{fam, cf.values};
  const cwt::Reconstruction rec =
      cwt::synthesize(prof, W, cfg.path, output_grid(cfg, cf.source_n_theta, cf.source_n_phi));
  write_file(flags.output, encode_signal(SignalFile::from_signal(rec.signal, cf.source_type)));
  print_warnings(prof, out);
  out << "signal: L=" << cfg.band_limit << " grid " << rec.signal.grid->n_theta() << "x"
      << rec.signal.grid->n_phi() << ", norm " << num(rec.signal.norm()) << "\n";
}

void summary(const std::string& label, const cwt::AdmissibilityProfile& p, std::ostream& out) {
  out << label << ": min=" << num(p.min) << " max=" << num(p.max)
      << " ratio=" << num(p.min > 0.0 ? p.max / p.min : std::numeric_limits<double>::infinity())
      << " edge_fraction=" << num(p.edge_fraction) << "\n";
  print_warnings(p, out);
}

std::string row_warning(double c) {
  return c <= cwt::kSingularThreshold ? "singular" : "";
}

void cmd_admissibility(const Flags& flags, std::ostream& out) {
  const Config cfg = config_or_default(flags);
  const std::string path =
      flags.output.empty() ? (fs::path(cfg.output_directory) / "admissibility.csv").string()
                           : flags.output;
  const auto fam = make_family(cfg, cfg.section);
  const auto prof = cwt::admissibility(*fam);
  std::optional<cwt::AdmissibilityProfile> other;
  std::string other_spec;
  if (cfg.compare) {
    const auto fam2 = make_family(cfg, *cfg.compare);
    other_spec = fam2->section().spec();
    other = cwt::admissibility(*fam2);
  }
  std::ostringstream csv;
  csv << "l,C";
  if (other) csv << ",C_compare";
  csv << ",warning\n";
  for (int l = 0; l <= prof.band_limit(); ++l) {
    const double c = prof.c[static_cast<std::size_t>(l)];
    csv << l << "," << num(c);
    std::string w = row_warning(c);
    if (other) {
      const double c2 = other->c[static_cast<std::size_t>(l)];
      csv << "," << num(c2);
      if (w.empty()) w = row_warning(c2);
    }
    csv << "," << w << "\n";
  }
  write_file(path, csv.str());
  out << "wavelet " << fam->wavelet().name << ", L=" << cfg.band_limit << ", " << cfg.t_nodes
      << " scale nodes\n";
  summary(fam->section().spec(), prof, out);
  if (other) summary(other_spec, *other, out);
  out << "wrote " << path << "\n";
}

double reference_deviation(const sections::Section& sec, double p, bool& known) {
  known = true;
  const double x = std::abs(sec.parameter());
  switch (sec.family()) {
    case sections::SectionFamily::fundamental:
      return 0.0;
    case sections::SectionFamily::constant_lambda:
      if (std::isinf(p)) return x;
      if (p == 1.0) {
        const double as = std::asinh(x);
        return x == 0.0 ? 0.0 : (2 * x * x * as - x * std::sqrt(1 + x * x) + as) / (x * x);
      }
      break;
    case sections::SectionFamily::sigma_c:
      if (std::isinf(p)) return x;
      if (p == 1.0) return 2.0 * x;
      break;
    case sections::SectionFamily::custom:
      break;
  }
  known = false;
  return 0.0;
}

void cmd_section_info(const Flags& flags, std::ostream& out) {
  const Config cfg = config_or_default(flags);
  const fs::path dir = flags.output.empty() ? fs::path(cfg.output_directory) : fs::path(flags.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create directory " + dir.string() + ": " + ec.message());
  const sections::Section sec = sections::Section::parse(cfg.section);

  std::ostringstream curve;
  std::ostringstream orbits;
  std::ostringstream delta;
  curve << "t,g,x2,x3,deviation\n";
  orbits << "t,flat,center3,radius\n";
  delta << "t,alpha,beta,delta,xi,delta_star\n";
  double lo = 1e300;
  double hi = -1e300;
  const int n = cfg.t_samples;
  for (int k = 0; k < n; ++k) {
    const double t = -1.0 + 2.0 * (k + 1) / (n + 1);
    const gyro::Vector v = sections::section_vector(sec, t);
    curve << num(t) << "," << num(sec.g(t)) << "," << num(v[1]) << "," << num(v[2]) << ","
          << num(sections::section_deviation(sec, t)) << "\n";
    const gyro::OrbitSurface o = gyro::orbit_sphere(3, t);
    orbits << num(t) << "," << (o.flat ? 1 : 0) << ","
           << (o.flat ? std::string("inf") : num(o.center[2])) << "," << num(o.radius) << "\n";
    const sections::IwasawaParams p = sections::iwasawa_on_section(sec, t);
    const double ds = sections::delta_star(sec, t);
    lo = std::min(lo, ds);
    hi = std::max(hi, ds);
    delta << num(t) << "," << num(p.alpha) << "," << num(p.beta) << "," << num(p.delta) << ","
          << num(p.xi) << "," << num(ds) << "\n";
  }
  std::ostringstream dev;
  dev << "p,value,reference\n";
  out << "section " << sec.spec() << ", " << n << " scale samples\n";
  for (double p : {1.0, 2.0, sections::kInfinity}) {
    const double v = sections::p_deviation(sec, p);
    bool known = false;
    const double ref = reference_deviation(sec, p, known);
    dev << num(p) << "," << num(v) << "," << (known ? num(ref) : "") << "\n";
    out << "eps*_" << num(p) << "=" << num(v);
    if (known) out << " (reference " << num(ref) << ")";
    out << "\n";
  }
  out << "delta*: min=" << num(lo) << " max=" << num(hi)
      << " bound=" << num(sections::kDeltaStarBound) << "\n";
  write_file((dir / "section_curve.csv").string(), curve.str());
  write_file((dir / "orbits.csv").string(), orbits.str());
  write_file((dir / "delta_star.csv").string(), delta.str());
  write_file((dir / "deviations.csv").string(), dev.str());
  out << "wrote " << dir.string() << "/{section_curve,orbits,delta_star,deviations}.csv\n";
}

void cmd_verify(const Flags& flags, std::ostream& out) {
  const Config cfg = config_or_default(flags);
  std::vector<std::string> names;
  for (const std::string& s : flags.suites) {
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (item.empty()) continue;
      const auto& all = suites::suite_names();
      if (std::find(all.begin(), all.end(), item) == all.end()) {
        fail(ErrorCode::invalid_argument, "unknown suite '" + item + "'");
      }
      if (std::find(names.begin(), names.end(), item) == names.end()) names.push_back(item);
    }
  }
  if (names.empty()) names = suites::suite_names();

  suites::Options opts;
  opts.seed = flags.seed;
  opts.tolerances = cfg.tolerances;
  nlohmann::ordered_json doc;
  doc["seed"] = flags.seed;
  doc["suites"] = nlohmann::ordered_json::array();
  std::vector<std::string> failed;
  for (const std::string& name : names) {
    const suites::SuiteResult r = suites::run_suite(name, opts);
    nlohmann::ordered_json s;
    s["name"] = r.name;
    s["criterion"] = r.criterion;
    s["pass"] = r.gating_pass();
    s["all_checks_pass"] = r.pass();
    s["checks"] = nlohmann::ordered_json::array();
    for (const suites::Check& c : r.checks) {
      nlohmann::ordered_json j;
      j["name"] = c.name;
      j["value"] = c.value;
      j["relation"] = c.relation;
      j["limit"] = c.limit;
      j["pass"] = c.pass;
      j["gating"] = c.gating;
      if (!c.note.empty()) j["note"] = c.note;
      s["checks"].push_back(j);
    }
    doc["suites"].push_back(s);
    if (!r.gating_pass()) failed.push_back(name);
  }
  doc["pass"] = failed.empty();
  const std::string text = doc.dump(2) + "\n";
  out << text;
  if (!flags.output.empty()) write_file(flags.output, text);
  if (!failed.empty()) {
    std::string list;
    for (const auto& f : failed) list += (list.empty() ? "" : ",") + f;
    fail(ErrorCode::verification_failed, "suites failed: " + list);
  }
}

}  // namespace

// --- configuration ------------------------------------------------------------------

Config parse_config(const std::string& text) {
  ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    fail(ErrorCode::config, "line " + std::to_string(e.line()) + ": " + e.message());
  }
  static const std::map<std::string, std::set<std::string>> allowed = {
      {"transform",
       {"band_limit", "oversample", "t_nodes", "u_min", "u_max", "n_alpha", "n_beta", "n_gamma",
        "path"}},
      {"section", {"family", "parameter", "compare", "t_samples"}},
      {"wavelet", {"name", "file"}},
      {"tolerances", {}},
      {"output", {"directory"}},
  };
  Config cfg;
  std::string family = "fundamental";
  std::optional<double> parameter;
  for (const auto& [section, node] : tree) {
    const auto it = allowed.find(section);
    require(it != allowed.end() && !node.empty(),
            node.empty() ? "key '" + section + "' outside a section"
                         : "unknown section [" + section + "]");
    for (const auto& [key, value] : node) {
      const std::string where = section + "." + key;
      require(value.empty(), "nested value under " + where);
      if (section == "tolerances") {
        const auto t = tolerance_keys().find(key);
        require(t != tolerance_keys().end(), "unknown key " + where);
        const double v = value_of<double>(value, where);
        require(v > 0.0 && std::isfinite(v), where + " must be positive");
        cfg.tolerances.*(t->second) = v;
        continue;
      }
      require(it->second.count(key) > 0, "unknown key " + where);
      if (where == "transform.band_limit") cfg.band_limit = value_of<int>(value, where);
      else if (where == "transform.oversample") cfg.oversample = value_of<int>(value, where);
      else if (where == "transform.t_nodes") cfg.t_nodes = value_of<int>(value, where);
      else if (where == "transform.u_min") cfg.u_min = value_of<double>(value, where);
      else if (where == "transform.u_max") cfg.u_max = value_of<double>(value, where);
      else if (where == "transform.n_alpha") cfg.n_alpha = value_of<int>(value, where);
      else if (where == "transform.n_beta") cfg.n_beta = value_of<int>(value, where);
      else if (where == "transform.n_gamma") cfg.n_gamma = value_of<int>(value, where);
      else if (where == "transform.path") cfg.path = parse_path(value.get_value<std::string>());
      else if (where == "section.family") family = value.get_value<std::string>();
      else if (where == "section.parameter") parameter = value_of<double>(value, where);
      else if (where == "section.compare") cfg.compare = value.get_value<std::string>();
      else if (where == "section.t_samples") cfg.t_samples = value_of<int>(value, where);
      else if (where == "wavelet.name") cfg.wavelet = value.get_value<std::string>();
      else if (where == "wavelet.file") cfg.wavelet_file = value.get_value<std::string>();
      else if (where == "output.directory") cfg.output_directory = value.get_value<std::string>();
    }
  }
  require(cfg.band_limit >= 0 && cfg.band_limit <= kMaxBandLimit,
          "transform.band_limit must lie in [0, " + std::to_string(kMaxBandLimit) + "]");
  require(cfg.oversample >= 0 && cfg.oversample <= 8, "transform.oversample must lie in [0, 8]");
  require(cfg.t_nodes >= 1 && cfg.t_nodes <= 4096, "transform.t_nodes must lie in [1, 4096]");
  require(cfg.u_min > 0.0 && cfg.u_min < 1.0 && cfg.u_max > 1.0 && std::isfinite(cfg.u_max),
          "transform.u_min must lie in (0, 1) and transform.u_max in (1, inf)");
  for (int n : {cfg.n_alpha, cfg.n_beta, cfg.n_gamma}) {
    require(n >= 0 && n <= 4 * kMaxBandLimit, "rotation grid sizes must lie in [0, 2048]");
  }
  require(cfg.t_samples >= 1 && cfg.t_samples <= 1000000, "section.t_samples must lie in [1, 10^6]");
  if (family == "fundamental") {
    require(!parameter, "section.parameter is not used by the fundamental section");
    cfg.section = "fundamental";
  } else {
    require(family == "constant-lambda" || family == "sigma-c",
            "section.family must be fundamental, constant-lambda or sigma-c");
    require(parameter.has_value(), "section.parameter is required for " + family);
    cfg.section = canonical_section(family + ":" + num(*parameter));
  }
  if (cfg.compare) cfg.compare = canonical_section(*cfg.compare);
  if (cfg.wavelet_file) {
    require(cfg.wavelet == "dog" || cfg.wavelet == "file",
            "wavelet.name and wavelet.file are mutually exclusive");
    cfg.wavelet = "file";
  } else {
    require(cfg.wavelet == "dog" || cfg.wavelet == "dog-conformal" || cfg.wavelet == "constant",
            "wavelet.name must be dog, dog-conformal or constant");
  }
  return cfg;
}

Config load_config(const std::string& path) { return parse_config(read_file(path)); }

cwt::FamilyPtr make_family(const Config& cfg, const std::string& section) {
  cwt::FamilyOptions o;
  o.band_limit = cfg.band_limit;
  o.t_nodes = cfg.t_nodes;
  o.u_min = cfg.u_min;
  o.u_max = cfg.u_max;
  o.n_alpha = cfg.n_alpha;
  o.n_beta = cfg.n_beta;
  o.n_gamma = cfg.n_gamma;
  cwt::Wavelet psi;
  if (cfg.wavelet_file) {
    const SignalFile w = decode_signal(read_file(*cfg.wavelet_file));
    psi = cwt::sampled_wavelet(w.signal(), "file:" + fs::path(*cfg.wavelet_file).filename().string());
  } else {
    psi = cwt::named_wavelet(cfg.wavelet);
  }
  return std::make_shared<const cwt::WaveletFamily>(std::move(psi), sections::Section::parse(section),
                                                    o);
}

// --- files --------------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::io, "cannot read " + path);
  return bytes;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::io, "cannot write " + path);
}

sphere::SphericalSignal SignalFile::signal() const {
  auto grid = std::make_shared<const sphere::SphereGrid>(band_limit, n_theta, n_phi);
  return sphere::SphericalSignal(std::move(grid), values);
}

SignalFile SignalFile::from_signal(const sphere::SphericalSignal& s, ValueType type) {
  SignalFile f;
  f.band_limit = s.grid->band_limit();
  f.n_theta = s.grid->n_theta();
  f.n_phi = s.grid->n_phi();
  f.type = type;
  f.values = type == ValueType::real ? Eigen::VectorXcd(s.values.real().cast<sphere::cplx>())
                                     : s.values;
  return f;
}

std::string encode_signal(const SignalFile& f) {
  Writer w;
  w.bytes(kSignalMagic, 4);
  w.u8(kSignalVersion);
  w.u8(static_cast<std::uint8_t>(f.type));
  w.u8(0);
  w.u8(0);
  w.u32(static_cast<std::uint32_t>(f.band_limit));
  w.u32(static_cast<std::uint32_t>(f.n_theta));
  w.u32(static_cast<std::uint32_t>(f.n_phi));
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    w.f64(f.values[i].real());
    if (f.type == ValueType::complex) w.f64(f.values[i].imag());
  }
  return w.take();
}

SignalFile decode_signal(const std::string& bytes) {
  Reader r(bytes, "signal file");
  r.magic(kSignalMagic);
  const std::uint8_t version = r.u8();
  if (version != kSignalVersion) {
    fail(ErrorCode::format, "signal file version " + std::to_string(version) + " is not supported");
  }
  SignalFile f;
  f.type = value_type(r.u8(), "signal file");
  if (r.u8() != 0 || r.u8() != 0) fail(ErrorCode::format, "signal file reserved bytes are not zero");
  const std::uint32_t L = r.u32();
  const std::uint32_t nt = r.u32();
  const std::uint32_t np = r.u32();
  if (L > static_cast<std::uint32_t>(kMaxBandLimit) || nt < L + 1 || np < 2 * L + 1 ||
      nt > 16u * (L + 1) || np > 16u * (2 * L + 1)) {
    fail(ErrorCode::format, "signal file grid " + std::to_string(nt) + "x" + std::to_string(np) +
                                " is inconsistent with L=" + std::to_string(L));
  }
  const std::size_t nodes = static_cast<std::size_t>(nt) * np;
  const std::size_t per = f.type == ValueType::complex ? 2 : 1;
  if (r.remaining() != nodes * per * 8) {
    fail(ErrorCode::format, "signal payload has " + std::to_string(r.remaining()) +
                                " bytes, expected " + std::to_string(nodes * per * 8));
  }
  f.band_limit = static_cast<int>(L);
  f.n_theta = static_cast<int>(nt);
  f.n_phi = static_cast<int>(np);
  f.values.resize(static_cast<Eigen::Index>(nodes));
  for (std::size_t i = 0; i < nodes; ++i) {
    const double re = r.f64();
    const double im = per == 2 ? r.f64() : 0.0;
    f.values[static_cast<Eigen::Index>(i)] = {re, im};
  }
  check_finite(f.values, "signal file");
  return f;
}

std::string encode_coefficients(const CoefficientFile& f) {
  Writer w;
  w.bytes(kCoefficientMagic, 4);
  w.u8(kCoefficientVersion);
  w.u8(f.path == cwt::Path::harmonic ? 0 : 1);
  w.u8(static_cast<std::uint8_t>(f.source_type));
  w.u8(0);
  for (int v : {f.band_limit, f.n_alpha, f.n_beta, f.n_gamma, static_cast<int>(f.t.size()),
                f.source_n_theta, f.source_n_phi}) {
    w.u32(static_cast<std::uint32_t>(v));
  }
  w.f64(f.u_min);
  w.f64(f.u_max);
  w.str(f.section);
  w.str(f.wavelet);
  for (double t : f.t) w.f64(t);
  for (Eigen::Index i = 0; i < f.values.rows(); ++i) {
    for (Eigen::Index k = 0; k < f.values.cols(); ++k) {
      w.f64(f.values(i, k).real());
      w.f64(f.values(i, k).imag());
    }
  }
  return w.take();
}

CoefficientFile decode_coefficients(const std::string& bytes) {
  Reader r(bytes, "coefficient file");
  r.magic(kCoefficientMagic);
  const std::uint8_t version = r.u8();
  if (version != kCoefficientVersion) {
    fail(ErrorCode::format,
         "coefficient file version " + std::to_string(version) + " is not supported");
  }
  CoefficientFile f;
  const std::uint8_t path = r.u8();
  if (path > 1) fail(ErrorCode::format, "coefficient file has an unknown path");
  f.path = path == 0 ? cwt::Path::harmonic : cwt::Path::quadrature;
  f.source_type = value_type(r.u8(), "coefficient file");
  if (r.u8() != 0) fail(ErrorCode::format, "coefficient file reserved byte is not zero");
  std::uint32_t h[7];
  for (auto& v : h) v = r.u32();
  const std::uint32_t L = h[0];
  if (L > static_cast<std::uint32_t>(kMaxBandLimit)) {
    fail(ErrorCode::format, "coefficient file band limit is out of range");
  }
  for (int i = 1; i <= 4; ++i) {
    if (h[i] == 0 || h[i] > 4u * kMaxBandLimit) {
      fail(ErrorCode::format, "coefficient file grid sizes are out of range");
    }
  }
  if (h[5] < L + 1 || h[6] < 2 * L + 1 || h[5] > 16u * (L + 1) || h[6] > 16u * (2 * L + 1)) {
    fail(ErrorCode::format, "coefficient file source grid is inconsistent with its band limit");
  }
  f.band_limit = static_cast<int>(L);
  f.n_alpha = static_cast<int>(h[1]);
  f.n_beta = static_cast<int>(h[2]);
  f.n_gamma = static_cast<int>(h[3]);
  f.source_n_theta = static_cast<int>(h[5]);
  f.source_n_phi = static_cast<int>(h[6]);
  const std::size_t nt = h[4];
  f.u_min = r.f64();
  f.u_max = r.f64();
  f.section = r.str(256);
  f.wavelet = r.str(4096);
  const std::size_t rows = static_cast<std::size_t>(f.n_alpha) * f.n_beta * f.n_gamma;
  if (r.remaining() != nt * 8 + rows * nt * 16) {
    fail(ErrorCode::format, "coefficient payload has " + std::to_string(r.remaining()) +
                                " bytes, expected " + std::to_string(nt * 8 + rows * nt * 16));
  }
  f.t.resize(nt);
  for (double& t : f.t) t = r.f64();
  f.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(nt));
  for (Eigen::Index i = 0; i < f.values.rows(); ++i) {
    for (Eigen::Index k = 0; k < f.values.cols(); ++k) {
      const double re = r.f64();
      f.values(i, k) = {re, r.f64()};
    }
  }
  if (!f.values.allFinite()) fail(ErrorCode::validation, "coefficient file contains non-finite values");
  return f;
}

// --- entry point --------------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"continuous wavelet transform on the sphere over conformal dilations"};
  app.require_subcommand(1);
  Flags flags;
  auto add_io = [&](CLI::App* sub, bool input) {
    sub->add_option("--config", flags.config, "configuration file");
    if (input) sub->add_option("--input", flags.input, "input file");
    sub->add_option("--output", flags.output, "output file or directory");
  };
  add_io(app.add_subcommand("analyze", "signal file to coefficient file"), true);
  add_io(app.add_subcommand("synthesize", "coefficient file to signal file"), true);
  add_io(app.add_subcommand("admissibility", "CSV of C(l) with a summary"), false);
  add_io(app.add_subcommand("section-info", "CSV data of the section geometry"), false);
  CLI::App* verify = app.add_subcommand("verify", "run the invariant suites; JSON summary");
  add_io(verify, false);
  verify->add_option("--suite", flags.suites, "suite name (repeatable or comma separated)");
  verify->add_option("--seed", flags.seed, "seed of the randomized suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << to_string(ErrorCode::invalid_argument) << ": " << one_line(e.what()) << "\n";
    return exit_status(ErrorCode::invalid_argument);
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "analyze") cmd_analyze(flags, out);
    else if (cmd == "synthesize") cmd_synthesize(flags, out);
    else if (cmd == "admissibility") cmd_admissibility(flags, out);
    else if (cmd == "section-info") cmd_section_info(flags, out);
    else cmd_verify(flags, out);
  } catch (const Error& e) {
    out.flush();
    err << "error: " << to_string(e.code()) << ": " << one_line(e.what()) << "\n";
    return exit_status(e.code());
  } catch (const std::bad_alloc&) {
    err << "error: E_RESOURCE: out of memory\n";
    return 9;
  } catch (const std::exception& e) {
    err << "error: E_INTERNAL: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace conformlets::cli
