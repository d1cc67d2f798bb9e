#include "conformlets/sections.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "conformlets/error.hpp"
#include "conformlets/quadrature.hpp"

namespace conformlets::sections {

namespace {

void check_t(double t) {
  if (!(std::abs(t) < 1.0)) fail(ErrorCode::domain, "section parameter must satisfy |t| < 1");
}

void check_unit_open(double x, const char* what) {
  if (!(std::abs(x) < 1.0)) {
    fail(ErrorCode::domain, std::string(what) + " must satisfy |x| < 1");
  }
}

double parse_number(std::string_view text) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    fail(ErrorCode::config, "invalid section parameter '" + std::string(text) + "'");
  }
  return value;
}

// Shortest representation that round-trips.
std::string format_number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

Section::Section(SectionFamily family, double parameter, std::function<double(double)> g,
                 std::string name)
    : family_(family), parameter_(parameter), g_(std::move(g)), name_(std::move(name)) {}

Section Section::fundamental() {
  return Section(SectionFamily::fundamental, 0.0, [](double) { return 0.0; }, "fundamental");
}

Section Section::constant_lambda(double lambda) {
  check_unit_open(lambda, "lambda");
  return Section(SectionFamily::constant_lambda, lambda, [lambda](double) { return lambda; },
                 "constant-lambda");
}

Section Section::sigma_c(double c) {
  check_unit_open(c, "c");
  if (c == 0.0) fail(ErrorCode::domain, "sigma-c family needs c != 0");
  return Section(SectionFamily::sigma_c, c, [c](double t) { return sigma_c_generating(c, t); },
                 "sigma-c");
}

Section Section::custom(std::function<double(double)> g, std::string name) {
  if (!g) fail(ErrorCode::invalid_argument, "custom section needs a generating function");
  constexpr int kSamples = 10000;
  for (int i = 0; i < kSamples; ++i) {
    const double t = -1.0 + (2.0 * i + 1.0) / kSamples;
    const double v = g(t);
    if (!(std::abs(v) < 1.0)) {
      fail(ErrorCode::domain, "custom generating function leaves (-1,1) at t=" +
                                  format_number(t));
    }
  }
  return Section(SectionFamily::custom, 0.0, std::move(g), std::move(name));
}

Section Section::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  if (head == "fundamental") {
    if (colon != std::string_view::npos) {
      fail(ErrorCode::config, "fundamental section takes no parameter");
    }
    return fundamental();
  }
  if (colon == std::string_view::npos) {
    fail(ErrorCode::config, "unknown section '" + std::string(text) + "'");
  }
  const double value = parse_number(text.substr(colon + 1));
  if (head == "constant-lambda") return constant_lambda(value);
  if (head == "sigma-c") return sigma_c(value);
  fail(ErrorCode::config, "unknown section family '" + std::string(head) + "'");
}

std::string Section::spec() const {
  switch (family_) {
    case SectionFamily::fundamental:
      return "fundamental";
    case SectionFamily::constant_lambda:
    case SectionFamily::sigma_c:
      return name_ + ":" + format_number(parameter_);
    case SectionFamily::custom:
      break;
  }
  return name_;
}

bool Section::isotropic() const noexcept {
  return family_ == SectionFamily::fundamental ||
         (family_ == SectionFamily::constant_lambda && parameter_ == 0.0);
}

double Section::g(double t) const {
  check_t(t);
  return g_(t);
}

double sigma_c_generating(double c, double t) {
  check_unit_open(c, "c");
  if (c == 0.0) fail(ErrorCode::domain, "sigma-c family needs c != 0");
  check_t(t);
  const double w = 1.0 - t * t;
  const double c2 = c * c;
  const double root = std::sqrt(w * w + 4.0 * c2 * c2 * t * t);
  return std::copysign(std::sqrt(2.0 * c2 / (w + root)), c);
}

gyro::Vector section_vector(const Section& sec, double t, int dim) {
  check_t(t);
  if (dim < 2 || dim > clifford::kMaxDim) {
    fail(ErrorCode::invalid_argument, "ball dimension must be in [2, 8]");
  }
  const double g = sec.g(t);
  const double den = 1.0 + t * t * g * g;
  gyro::Vector v = gyro::Vector::Zero(dim);
  v[dim - 2] = g * (1.0 - t * t) / den;
  v[dim - 1] = t * (1.0 + g * g) / den;
  return v;
}

gyro::BallPoint section_point(const Section& sec, double t, int dim) {
  return gyro::BallPoint(section_vector(sec, t, dim));
}

double measure_density(int n, double t) {
  check_t(t);
  return 2.0 * std::pow(1.0 - t, n - 2) / std::pow(1.0 + t, n);
}

MeasureWeights make_measure_weights(int n, int count, double u_min, double u_max) {
  if (count < 1) fail(ErrorCode::invalid_argument, "measure needs at least one node");
  if (!(u_min > 0.0 && u_max > u_min)) {
    fail(ErrorCode::invalid_argument, "scale range must satisfy 0 < u_min < u_max");
  }
  const QuadratureRule rule = gauss_legendre(count, std::log(u_min), std::log(u_max));
  MeasureWeights mw;
  mw.dim = n;
  mw.u_min = u_min;
  mw.u_max = u_max;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double u = std::exp(rule.nodes[k]);
    mw.u.push_back(u);
    mw.t.push_back((u - 1.0) / (u + 1.0));
    // du / u^n = u^{1-n} dv
    mw.weights.push_back(rule.weights[k] * std::pow(u, 1 - n));
  }
  return mw;
}

namespace {

struct TauParts {
  double a1;
  double an;
  double aa;
  double root;    // sqrt(C1 C2)
  double linear;  // (1+|a|^2)(1+t^2) - 4 t a_n
};

TauParts tau_parts(const gyro::BallPoint& a, double t) {
  check_t(t);
  const int n = a.dim();
  const gyro::Vector& v = a.vec();
  TauParts p{};
  p.a1 = v.head(n - 1).norm();
  p.an = v[n - 1];
  p.aa = v.squaredNorm();
  const double c1 = (1 - t) * (1 - t) * p.a1 * p.a1 + (1 + t) * (1 + t) * (1 - p.an) * (1 - p.an);
  const double c2 = (1 + t) * (1 + t) * p.a1 * p.a1 + (1 - t) * (1 - t) * (1 + p.an) * (1 + p.an);
  p.root = std::sqrt(c1 * c2);
  p.linear = (1 + p.aa) * (1 + t * t) - 4 * t * p.an;
  return p;
}

}  // namespace

double tau(const gyro::BallPoint& a, double t) {
  const TauParts p = tau_parts(a, t);
  const double num = -2 * p.an * (1 + t * t) + 2 * (1 - p.a1 * p.a1 + p.an * p.an) * t;
  return num / (p.root + p.linear);
}

double tau_derivative(const gyro::BallPoint& a, double t) {
  const TauParts p = tau_parts(a, t);
  const double num = 2 * (1 - t * t) * (1 + p.a1 * p.a1 - p.an * p.an) * (1 - p.aa);
  return num / (p.root * p.root + p.linear * p.root);
}

double radon_nikodym(const gyro::BallPoint& a, double t) {
  const int n = a.dim();
  const double tt = tau(a, t);
  const double ratio = std::pow((1 - tt) / (1 - t), n - 2) * std::pow((1 + t) / (1 + tt), n);
  return ratio * tau_derivative(a, t);
}

double radon_nikodym_bound(const gyro::BallPoint& a) {
  const int n = a.dim();
  const gyro::Vector& v = a.vec();
  const double a1 = v.head(n - 1).norm();
  const double an = v[n - 1];
  return (1 - v.squaredNorm()) * (1 + a1 * a1 - an * an) / std::pow(1 - an, 4);
}

IwasawaParams iwasawa_on_section(const Section& sec, double t) {
  const double g = sec.g(t);
  const double g2 = g * g;
  const double d = (1 + t * t + 6 * t) * g2 + 4 * (1 + t * t * g2 * g2);
  const double sd = std::sqrt(d);
  IwasawaParams p{};
  p.alpha = 2 * (1 + t * g2) / sd;
  p.beta = (1 - t) * g / sd;
  p.delta = 4 * (1 - t) * (1 - g2) * (1 + t * t * g2) / ((t + 1) * d);
  p.xi = 2 * (t - 1) * g * ((5 * t * t + 3 * t) * g2 + 3 * t + 5) / ((t + 1) * d);
  return p;
}

double delta_star(const Section& sec, double t) {
  const double g = sec.g(t);
  const double g2 = g * g;
  const double d = (1 + t * t + 6 * t) * g2 + 4 * (1 + t * t * g2 * g2);
  return 4 * (1 - g2) * (1 + t * t * g2) / d;
}

double section_deviation(const Section& sec, double t) {
  const double g = sec.g(t);
  return std::abs(g) * (1 - t * t) / std::sqrt(1 + t * t * g * g);
}

double p_deviation(const Section& sec, double p) {
  if (std::isnan(p) || p < 1.0) fail(ErrorCode::domain, "p-deviation needs p >= 1");
  if (std::isinf(p)) {
    constexpr int kGrid = 20001;
    double best = section_deviation(sec, 0.0);
    double best_t = 0.0;
    for (int i = 1; i < kGrid - 1; ++i) {
      const double t = -1.0 + 2.0 * i / (kGrid - 1);
      const double v = section_deviation(sec, t);
      if (v > best) {
        best = v;
        best_t = t;
      }
    }
    const double h = 2.0 / (kGrid - 1);
    const double lo = std::max(-1.0 + 1e-15, best_t - h);
    const double hi = std::min(1.0 - 1e-15, best_t + h);
    const auto refined = boost::math::tools::brent_find_minima(
        [&](double t) { return -section_deviation(sec, t); }, lo, hi, 52);
    return std::max(best, -refined.second);
  }
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double t) {
        if (std::abs(t) >= 1.0) return 0.0;
        return std::pow(section_deviation(sec, t), p);
      },
      -1.0, 1.0, 15, 1e-14, &error);
}

}  // namespace conformlets::sections
