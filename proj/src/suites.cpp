#include "conformlets/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "conformlets/cwt.hpp"
#include "conformlets/error.hpp"
#include "conformlets/gyroball.hpp"
#include "conformlets/plane.hpp"
#include "conformlets/sections.hpp"
#include "conformlets/sphere.hpp"

namespace conformlets::suites {

namespace {

using gyro::BallPoint;
using gyro::Vector;
using sections::Section;
using sphere::Rotor;

constexpr double kPi = std::numbers::pi;

class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  Vector unit(int n) {
    std::normal_distribution<double> normal;
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(engine_);
    return v.normalized();
  }
  /// Uniform direction, radius uniform on [0, r_max).
  Vector ball(int n, double r_max = 0.95) { return unit(n) * uniform(0.0, r_max); }
  BallPoint point(int n, double r_max = 0.95) { return BallPoint(ball(n, r_max)); }
  Rotor rotor(int n) {
    Rotor s = Rotor::identity(n);
    for (int i = 1; i <= n; ++i) {
      for (int j = i + 1; j <= n; ++j) {
        s = s * clifford::rotor_from_plane(n, i, j, uniform(0.0, 2.0 * kPi));
      }
    }
    return s;
  }
  Rotor rotor3() {
    return sphere::rotor_from_euler(
        {uniform(0.0, 2.0 * kPi), std::acos(uniform(-1.0, 1.0)), uniform(0.0, 2.0 * kPi)});
  }
  /// Coefficients uniform in the unit square, scaled by (1 + l)^-decay.
  sphere::ShCoefficients coefficients(int L, double decay = 0.0) {
    sphere::ShCoefficients c(L);
    for (int l = 0; l <= L; ++l) {
      const double s = std::pow(1.0 + l, -decay);
      for (int m = -l; m <= l; ++m) c(l, m) = {s * uniform(-1.0, 1.0), s * uniform(-1.0, 1.0)};
    }
    return c;
  }

 private:
  std::mt19937_64 engine_;
};

Check check(std::string name, double value, double limit, std::string relation = "<=") {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.limit = limit;
  c.relation = std::move(relation);
  if (c.relation == "<=") c.pass = value <= limit;
  else if (c.relation == "<") c.pass = value < limit;
  else if (c.relation == ">=") c.pass = value >= limit;
  else c.pass = value > limit;
  return c;
}

double dist(const BallPoint& a, const BallPoint& b) { return (a.vec() - b.vec()).norm(); }

double relative(double value, double reference) {
  return std::abs(value - reference) / std::max(1.0, std::abs(reference));
}

sphere::SphericalSignal signal_of(const sphere::ShCoefficients& c) {
  return sphere::sh_inverse(c, std::make_shared<const sphere::SphereGrid>(c.band_limit));
}

cwt::FamilyPtr family(const Section& sec, int L, int t_nodes, int rot = 0) {
  cwt::FamilyOptions o;
  o.band_limit = L;
  o.t_nodes = t_nodes;
  o.n_alpha = o.n_beta = o.n_gamma = rot;
  return std::make_shared<const cwt::WaveletFamily>(cwt::dog_wavelet(), sec, o);
}

double signal_relerr(const sphere::SphericalSignal& got, const sphere::SphericalSignal& want) {
  return (got.values - want.values).norm() / want.values.norm();
}

// --- criterion 1
void gyrogroup(const Options& o, SuiteResult& r) {
  Random rng(o.seed);
  for (int n : {3, 4}) {
    const int reps = n == 3 ? 10000 : 1000;
    double axioms = 0.0;
    double laws = 0.0;
    double assoc = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      const BallPoint a = rng.point(n);
      const BallPoint b = rng.point(n);
      const BallPoint c = rng.point(n);
      const BallPoint d = rng.point(n);
      const Rotor q = gyro::gyration(a, b);
      axioms = std::max(axioms, dist(gyro::gyro_add(BallPoint::origin(n), a), a));
      axioms = std::max(axioms, gyro::gyro_add(-a, a).norm());
      const Vector lhs = q.apply(gyro::gyro_add(c, d).vec());
      const Vector rhs =
          gyro::gyro_add(BallPoint(q.apply(c.vec())), BallPoint(q.apply(d.vec()))).vec();
      axioms = std::max(axioms, (lhs - rhs).norm());
      axioms = std::max(axioms, (q.matrix() - gyro::gyration(gyro::gyro_add(a, b), b).matrix()).norm());
      assoc = std::max(assoc, gyro::check_gyroassociativity(a, b, c));
      laws = std::max(laws, (gyro::gyro_add(a, b).vec() - q.apply(gyro::gyro_add(b, a).vec())).norm());
      laws = std::max(laws, dist(gyro::left_cancel(b, a), a));
      laws = std::max(laws, dist(gyro::right_cancel(a, b), a));
    }
    const std::string tag = "B" + std::to_string(n);
    r.checks.push_back(check(tag + " identity, inverse, automorphism, loop residual", axioms,
                             o.tolerances.gyrogroup));
    r.checks.push_back(check(tag + " gyroassociativity residual", assoc, o.tolerances.gyrogroup));
    r.checks.push_back(check(tag + " gyrocommutativity and cancellation residual", laws,
                             o.tolerances.gyrogroup));
  }
}

// --- criterion 2
void decomposition(const Options& o, SuiteResult& r) {
  Random rng(o.seed);
  constexpr int n = 3;
  double compose_decompose = 0.0;
  double decompose_compose = 0.0;
  double rejection = 1e300;
  for (int rep = 0; rep < 10000; ++rep) {
    const BallPoint c = rng.point(n);
    const auto dec = gyro::unique_decompose(c);
    compose_decompose = std::max(compose_decompose, dist(gyro::gyro_add(dec.b, dec.a), c));

    Vector av = rng.ball(n, 0.95);
    av[n - 1] = 0.0;
    const BallPoint a(av);
    const BallPoint b(Vector::Unit(n, n - 1) * rng.uniform(-0.95, 0.95));
    const auto back = gyro::unique_decompose(gyro::gyro_add(b, a));
    decompose_compose = std::max(decompose_compose, std::max(dist(back.a, a), dist(back.b, b)));

    if (rep % 10 == 0) {
      // any other admissible pair must compose to a different point
      const double eps = 1e-4;
      Vector du = rng.unit(n);
      du[n - 1] = 0.0;
      const Vector a2 = dec.a.vec() + eps * du.normalized();
      const Vector b2 = dec.b.vec() + Vector::Unit(n, n - 1) * eps * rng.uniform(-1.0, 1.0);
      if (a2.norm() < 1.0 && b2.norm() < 1.0) {
        rejection = std::min(rejection, dist(gyro::gyro_add(BallPoint(b2), BallPoint(a2)), c) / eps);
      }
    }
  }
  r.checks.push_back(check("compose after decompose residual", compose_decompose,
                           o.tolerances.decomposition));
  r.checks.push_back(check("decompose after compose residual", decompose_compose,
                           o.tolerances.decomposition));
  Check u = check("perturbed pairs: min displacement / perturbation", rejection, 1e-3, ">=");
  u.note = "perturbation 1e-4 of a inside the hyperdisc and of b along the axis";
  r.checks.push_back(u);
}

// --- criterion 3
void iwasawa(const Options& o, SuiteResult& r) {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double t = -0.975 + 1.95 * i / 19.0;
      const double lambda = -0.9 + 1.8 * j / 9.0;
      const Section sec = Section::constant_lambda(lambda);
      const plane::Iwasawa gen = plane::iwasawa(plane::project_moebius(sections::section_point(sec, t)));
      const sections::IwasawaParams closed = sections::iwasawa_on_section(sec, t);
      worst = std::max(worst, relative(gen.alpha.scalar_part(), closed.alpha));
      worst = std::max(worst, relative(gen.beta[2], closed.beta));
      worst = std::max(worst, std::abs(gen.beta[1]));
      worst = std::max(worst, relative(gen.delta, closed.delta));
      worst = std::max(worst, relative(gen.xi[2], closed.xi));
    }
  }
  r.checks.push_back(check("closed form vs generic decomposition (200 points)", worst,
                           o.tolerances.iwasawa));
  double lo = 1e300;
  double hi = -1e300;
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double t = -0.999 + 1.998 * i / 99.0;
      const double lambda = -0.999 + 1.998 * j / 99.0;
      const double ds = sections::delta_star(Section::constant_lambda(lambda), t);
      lo = std::min(lo, ds);
      hi = std::max(hi, ds);
    }
  }
  r.checks.push_back(check("delta* minimum (10^4 points)", lo, 0.0, ">"));
  r.checks.push_back(check("delta* maximum (10^4 points)", hi, sections::kDeltaStarBound, "<"));
}

// --- criterion 4
void intertwining(const Options& o, SuiteResult& r) {
  Random rng(o.seed);
  const plane::PlanarGrid grid(std::make_shared<const sphere::SphereGrid>(16, 2));
  const sphere::Vec3 center(0.6, 0.0, 0.8);
  const sphere::SphereFunction psi = [center](const sphere::Vec3& x) {
    return sphere::cplx(std::exp(3.0 * (center.dot(x) - 1.0)), 0.0);
  };
  double factored = 0.0;
  double m_form = 0.0;
  std::size_t excluded = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const auto res = plane::intertwine_check(rng.point(3), psi, grid);
    factored = std::max(factored, res.factored);
    m_form = std::max(m_form, res.m_form);
    excluded += res.excluded;
  }
  Check c = check("factored form pointwise residual", factored, o.tolerances.intertwining);
  c.note = std::to_string(excluded) + " node evaluations excluded near the singular ring";
  r.checks.push_back(c);
  r.checks.push_back(check("Moebius-operator form pointwise residual", m_form,
                           o.tolerances.intertwining));
}

// --- criterion 5
void unitarity(const Options& o, SuiteResult& r) {
  Random rng(o.seed);
  const sphere::SphereFunction f = sphere::as_function(rng.coefficients(16, 2.0));
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const Rotor s = rng.rotor3();
    const BallPoint a = rng.point(3);
    worst = std::max(worst, std::abs(cwt::unitarity_ratio(s, a, f) - 1.0));
  }
  r.checks.push_back(check("max |ratio - 1| over 100 (s, a)", worst, o.tolerances.unitarity));
}

// --- criterion 6
void reconstruction(const Options& o, SuiteResult& r) {
  Random rng(o.seed);
  const std::vector<std::pair<std::string, Section>> secs = {
      {"fundamental", Section::fundamental()}, {"lambda=0.3", Section::constant_lambda(0.3)}};
  for (const auto& [label, sec] : secs) {
    const auto fam = family(sec, 8, 32);
    const auto prof = cwt::admissibility(*fam);
    const auto f = signal_of(rng.coefficients(8));
    const auto rec = cwt::synthesize(prof, cwt::analyze(fam, f));
    r.checks.push_back(check("harmonic path L=8 " + label + " relative L2 error",
                             signal_relerr(rec.signal, f), o.tolerances.reconstruction_harmonic));
  }
  for (const auto& [label, sec] : secs) {
    const auto fam = family(sec, 4, 32, 9);
    const auto prof = cwt::admissibility(*fam);
    const auto f = signal_of(rng.coefficients(4));
    const auto W = cwt::analyze(fam, f, cwt::Path::quadrature);
    const auto rec = cwt::synthesize(prof, W, cwt::Path::quadrature);
    r.checks.push_back(check("quadrature path L=4 9x9x9 " + label + " relative L2 error",
                             signal_relerr(rec.signal, f), o.tolerances.reconstruction_quadrature));
  }
}

// --- criterion 7
void plancherel(const Options& o, SuiteResult& r) {
  Random rng(o.seed);
  for (const auto& [label, sec] : std::vector<std::pair<std::string, Section>>{
           {"fundamental", Section::fundamental()}, {"lambda=0.3", Section::constant_lambda(0.3)}}) {
    const auto fam = family(sec, 8, 32);
    const auto prof = cwt::admissibility(*fam);
    const auto res = cwt::plancherel_check(fam, prof, signal_of(rng.coefficients(8)));
    r.checks.push_back(check("harmonic path L=8 " + label + " relative error", res.relerr,
                             o.tolerances.plancherel));
  }
}

// --- criterion 8
void frame(const Options& o, SuiteResult& r) {
  Random rng(o.seed);
  const auto fam = family(Section::fundamental(), 4, 32);
  const auto prof = cwt::admissibility(*fam);
  const auto q = cwt::frame_quadratic_form(fam, prof, signal_of(rng.coefficients(4)));
  Check c = check("multiplier vs direct double integral, L=4", q.relerr, o.tolerances.frame);
  std::ostringstream note;
  note.precision(17);
  note << "multiplier " << q.multiplier << ", direct " << q.direct;
  c.note = note.str();
  r.checks.push_back(c);
}

// --- criterion 9
void covariance(const Options& o, SuiteResult& r) {
  Random rng(o.seed);
  constexpr int L = 8;
  const auto fam = family(Section::constant_lambda(0.3), L, 8);
  const auto f = signal_of(rng.coefficients(L));
  double wigner = 0.0;
  double grid = 0.0;
  for (int rep = 0; rep < 4; ++rep) {
    const auto res = cwt::covariance_check(fam, f, rng.rotor3(), cwt::Path::harmonic, 16, o.seed + rep);
    wigner = std::max(wigner, res.wigner);
  }
  const int n_alpha = 2 * L + 1;
  for (int k : {1, 5, 12}) {
    const Rotor z = sphere::rotor_from_euler({2.0 * kPi * k / n_alpha, 0.0, 0.0});
    const auto res = cwt::covariance_check(fam, f, z, cwt::Path::harmonic, 16, o.seed + k);
    wigner = std::max(wigner, res.wigner);
    grid = std::max(grid, res.grid);
  }
  {
    const auto small = family(Section::fundamental(), 2, 4);
    const auto g = signal_of(rng.coefficients(2));
    const Rotor z = sphere::rotor_from_euler({2.0 * kPi * 2.0 / 5.0, 0.0, 0.0});
    grid = std::max(grid, cwt::covariance_check(small, g, z, cwt::Path::quadrature, 4, o.seed).grid);
  }
  r.checks.push_back(check("rotation covariance, Wigner domain", wigner,
                           o.tolerances.covariance_wigner));
  r.checks.push_back(check("rotation covariance, grid-aligned z-rotations", grid,
                           o.tolerances.covariance_grid));

  const sphere::SphereFunction fn = sphere::as_function(rng.coefficients(4));
  const cwt::Wavelet psi = cwt::dog_wavelet();
  double literal = 0.0;
  double corrected = 0.0;
  for (const auto& [label, sec] : std::vector<std::pair<std::string, Section>>{
           {"lambda=0.3", Section::constant_lambda(0.3)}, {"sigma-c(0.5)", Section::sigma_c(0.5)}}) {
    int off = 0;
    for (int rep = 0; rep < 10; ++rep) {
      const BallPoint b = rng.point(3, 0.5);
      const Rotor s = rng.rotor3();
      const double t = rng.uniform(-0.8, 0.8);
      const auto res = cwt::dilation_noncovariance_check(psi, sec, fn, b, s, t);
      literal = std::max(literal, res.literal_residual);
      corrected = std::max(corrected, res.residual);
      off += res.off_section ? 1 : 0;
    }
    r.checks.push_back(check("off-section instances, " + label, off, 1.0, ">="));
  }
  Check lit = check("dilation identity as stated, max residual (20 instances)", literal,
                    o.tolerances.noncovariance);
  lit.gating = false;
  lit.note = "the stated form omits the gyration of the wavelet and the sign of a";
  r.checks.push_back(lit);
  Check cor = check("dilation identity with rotated wavelet, max residual (20 instances)",
                    corrected, o.tolerances.noncovariance);
  cor.note = "W_psi[D_b f](s,a) = W_{R_q psi}[f](s, (-conj(s) b s) (+) a)";
  r.checks.push_back(cor);
}

// --- criterion 10
void constants(const Options& o, SuiteResult& r) {
  const double tol = o.tolerances.constants;
  double chi = 0.0;
  for (double an : {-0.9, -0.6, -0.2, 0.0, 0.3, 0.7, 0.9}) {
    Vector v = Vector::Zero(3);
    v[2] = an;
    const BallPoint a(v);
    const double expected = std::pow((1 + an) / (1 - an), 2);
    for (double t : {-0.95, -0.5, 0.0, 0.4, 0.95}) {
      chi = std::max(chi, std::abs(sections::radon_nikodym(a, t) - expected) / expected);
    }
  }
  r.checks.push_back(check("chi(a_n e3, t) vs ((1+a_n)/(1-a_n))^2, relative", chi, tol));

  double eps_c1 = 0.0;
  double eps_cinf = 0.0;
  std::ostringstream c1;
  c1.precision(12);
  for (double c : {0.5, 0.3, -0.7}) {
    const Section sec = Section::sigma_c(c);
    const double e1 = sections::p_deviation(sec, 1.0);
    eps_c1 = std::max(eps_c1, std::abs(e1 - 2.0 * std::abs(c)));
    eps_cinf = std::max(eps_cinf, std::abs(sections::p_deviation(sec, sections::kInfinity) - std::abs(c)));
    c1 << (c1.tellp() > 0 ? ", " : "") << "c=" << c << ": " << e1;
  }
  Check e1 = check("eps*_{c,1} vs 2|c|", eps_c1, tol);
  e1.gating = false;
  e1.note = "computed " + c1.str();
  r.checks.push_back(e1);
  r.checks.push_back(check("eps*_{c,inf} vs |c|", eps_cinf, tol));

  double eps_linf = 0.0;
  double eps_l1 = 0.0;
  for (double lam : {0.3, -0.6, 0.9}) {
    const Section sec = Section::constant_lambda(lam);
    const double l = std::abs(lam);
    eps_linf = std::max(eps_linf, std::abs(sections::p_deviation(sec, sections::kInfinity) - l));
    const double as = std::asinh(l);
    const double closed = (2 * l * l * as - l * std::sqrt(1 + l * l) + as) / (l * l);
    eps_l1 = std::max(eps_l1, std::abs(sections::p_deviation(sec, 1.0) - closed));
  }
  r.checks.push_back(check("eps*_{lambda,inf} vs |lambda|", eps_linf, tol));
  r.checks.push_back(check("eps*_{lambda,1} vs closed form", eps_l1, tol));

  double orbit = 0.0;
  for (double t : {-0.9, -0.5, -0.1, 0.2, 0.5, 0.8}) {
    const auto s = gyro::orbit_sphere(3, t);
    const double center = (1 + t * t) / (2 * t);
    const double radius = (1 - t * t) / (2 * std::abs(t));
    orbit = std::max(orbit, relative(s.center[2], center));
    orbit = std::max(orbit, relative(s.radius, radius));
    orbit = std::max(orbit, s.center.head(2).norm());
  }
  r.checks.push_back(check("orbit sphere center and radius vs closed forms", orbit, tol));
}

struct Entry {
  int criterion;
  double time_limit;
  std::function<void(const Options&, SuiteResult&)> run;
};

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> r = {
      {"gyrogroup", {1, 10.0, gyrogroup}},
      {"decomposition", {2, 5.0, decomposition}},
      {"iwasawa", {3, 5.0, iwasawa}},
      {"intertwining", {4, 60.0, intertwining}},
      {"unitarity", {5, 60.0, unitarity}},
      {"reconstruction", {6, 300.0, reconstruction}},
      {"plancherel", {7, 30.0, plancherel}},
      {"frame", {8, 120.0, frame}},
      {"covariance", {9, 120.0, covariance}},
      {"constants", {10, 10.0, constants}},
  };
  return r;
}

}  // namespace

bool SuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

bool SuiteResult::gating_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.pass || !c.gating; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "gyrogroup",      "decomposition", "iwasawa", "intertwining", "unitarity",
      "reconstruction", "plancherel",    "frame",   "covariance",   "constants"};
  return names;
}

SuiteResult run_suite(const std::string& name, const Options& opts) {
  const auto it = registry().find(name);
  if (it == registry().end()) fail(ErrorCode::invalid_argument, "unknown suite '" + name + "'");
  SuiteResult r;
  r.name = name;
  r.criterion = it->second.criterion;
  r.time_limit = it->second.time_limit;
  const auto start = std::chrono::steady_clock::now();
  it->second.run(opts, r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace conformlets::suites
