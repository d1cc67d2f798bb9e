#include "conformlets/cwt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <random>
#include <sstream>

#include "conformlets/error.hpp"
#include "conformlets/parallel.hpp"

namespace conformlets::cwt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPruneMass = 1e-14;
using sphere::Vec3;

Vec3 mobius3(const Vec3& a, const Vec3& x) {
  const double aa = a.squaredNorm();
  const double xx = x.squaredNorm();
  const double na = std::sqrt(aa);
  const double nx = std::sqrt(xx);
  // 1 - 2<a,x> + |a|^2|x|^2 and 1 + |x|^2 - 2<a,x> without cancellation near x = a/|a|.
  double den = 1.0;
  if (na > 0.0 && nx > 0.0) {
    den = (1.0 - na * nx) * (1.0 - na * nx) + na * nx * (a / na - x / nx).squaredNorm();
  }
  const double num = (x - a).squaredNorm() + (1.0 - aa);
  return ((1.0 - aa) * x - num * a) / den;
}

double weight3(const Vec3& a, const Vec3& x) {
  const double aa = a.squaredNorm();
  if (aa == 0.0) return 1.0;
  // |x + a|^2 equals 1 + 2<a,x> + |a|^2 on the sphere and does not cancel near x = -a/|a|.
  return (1.0 - aa) / (x.normalized() + a).squaredNorm();
}

Vec3 axis_of(const Vec3& a) {
  const double r = a.norm();
  return r > 0.0 ? Vec3(a / r) : Vec3(0.0, 0.0, 1.0);
}

// Widens the graded rule so that it reaches the concentration scale 1 - |a|.
sphere::GradedOptions adapted(sphere::GradedOptions opts, const Vec3& a) {
  const double gap = 1.0 - a.norm();
  if (gap < 1.0) opts.v_max = std::max(opts.v_max, std::log(2.0 / gap) + 6.0);
  return opts;
}

Vec3 vec3(const BallPoint& a) {
  if (a.dim() != 3) fail(ErrorCode::dimension_mismatch, "the transform needs points of B^3");
  return a.vec();
}

Wavelet normalized(std::string name, SphereFunction f) {
  const double n = wavelet_norm(f);
  if (!(n > 1e-14) || !std::isfinite(n)) {
    fail(ErrorCode::validation, "wavelet '" + name + "' has zero or non-finite norm");
  }
  const double k = 1.0 / n;
  return {std::move(name), [k, f = std::move(f)](const Vec3& x) { return k * f(x); }};
}

// tan^2(theta/2) for a unit vector, with theta the polar angle.
double tan_half_sq(const Vec3& x) {
  const double z = std::clamp(x[2], -1.0, 1.0);
  return (1.0 - z) / (1.0 + z);
}

double gaussian_cap(const Vec3& x, double sigma) {
  if (x[2] <= -1.0) return 0.0;
  return std::exp(-tan_half_sq(x) / (sigma * sigma));
}

// Pointwise evaluation of a band-limited expansion with tabulated Legendre recursions.
class Evaluator {
 public:
  explicit Evaluator(const ShCoefficients& f) : L_(f.band_limit), f_(f) {
    for (int m = 0; m <= L_; ++m) {
      diag_.push_back(m == 0 ? 1.0 / std::sqrt(4.0 * kPi)
                             : -std::sqrt((2.0 * m + 1.0) / (2.0 * m)));
      first_.push_back(std::sqrt(2.0 * m + 3.0));
      for (int l = m + 2; l <= L_; ++l) {
        const double ll = static_cast<double>(l) * l;
        const double mm = static_cast<double>(m) * m;
        a_.push_back(std::sqrt((4.0 * ll - 1.0) / (ll - mm)));
        b_.push_back(std::sqrt(((l - 1.0) * (l - 1.0) - mm) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0)));
      }
    }
  }

  cplx operator()(const Vec3& x) const {
    const double rho = std::hypot(x[0], x[1]);
    const double r = std::sqrt(rho * rho + x[2] * x[2]);
    const double z = std::clamp(x[2] / r, -1.0, 1.0);
    const double st = rho / r;
    const cplx e = rho > 0.0 ? cplx(x[0], x[1]) / rho : cplx(1.0, 0.0);
    cplx eim(1.0, 0.0);
    double pmm = 1.0;
    cplx sum = 0.0;
    std::size_t ab = 0;
    for (int m = 0; m <= L_; ++m) {
      if (m > 0) {
        eim *= e;
        pmm *= diag_[static_cast<std::size_t>(m)] * st;
      } else {
        pmm = diag_[0];
      }
      cplx pos = f_(m, m) * pmm;
      cplx neg = m > 0 ? f_(m, -m) * pmm : 0.0;
      if (m < L_) {
        double prev2 = pmm;
        double prev1 = first_[static_cast<std::size_t>(m)] * z * pmm;
        pos += f_(m + 1, m) * prev1;
        if (m > 0) neg += f_(m + 1, -m) * prev1;
        for (int l = m + 2; l <= L_; ++l, ++ab) {
          const double cur = a_[ab] * (z * prev1 - b_[ab] * prev2);
          pos += f_(l, m) * cur;
          if (m > 0) neg += f_(l, -m) * cur;
          prev2 = prev1;
          prev1 = cur;
        }
      }
      sum += pos * eim;
      if (m > 0) sum += ((m % 2 == 0) ? 1.0 : -1.0) * neg * std::conj(eim);
    }
    return sum;
  }

 private:
  int L_;
  const ShCoefficients& f_;
  std::vector<double> diag_;
  std::vector<double> first_;
  std::vector<double> a_;
  std::vector<double> b_;
};

Eigen::MatrixXcd exponentials(int n, int L, double (sphere::RotationGrid::*angle)(int) const,
                              const sphere::RotationGrid& grid) {
  Eigen::MatrixXcd e(n, 2 * L + 1);
  for (int i = 0; i < n; ++i) {
    const double a = (grid.*angle)(i);
    for (int m = -L; m <= L; ++m) e(i, m + L) = std::polar(1.0, m * a);
  }
  return e;
}

std::vector<sphere::WignerSmallD> beta_tables(const sphere::RotationGrid& grid, int L) {
  std::vector<sphere::WignerSmallD> d;
  d.reserve(static_cast<std::size_t>(grid.n_beta()));
  for (int j = 0; j < grid.n_beta(); ++j) d.emplace_back(L, grid.beta(j));
  return d;
}

// W(s,t) = sum_{l,m',m} conj(D^l_{m'm}(s)) conj(k_t(l,m)) f(l,m') on the rotation grid.
Eigen::MatrixXcd harmonic_analyze(const WaveletFamily& fam,
                                  const std::vector<ShCoefficients>& kernels,
                                  const ShCoefficients& f) {
  const int L = fam.band_limit();
  const auto& grid = fam.rotations();
  const int na = grid.n_alpha();
  const int nb = grid.n_beta();
  const int ng = grid.n_gamma();
  const Eigen::MatrixXcd ea = exponentials(na, L, &sphere::RotationGrid::alpha, grid);
  const Eigen::MatrixXcd eg = exponentials(ng, L, &sphere::RotationGrid::gamma, grid);
  const auto tables = beta_tables(grid, L);
  const std::size_t nt = kernels.size();
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(nt));

  parallel_for(nt * static_cast<std::size_t>(nb), [&](std::size_t job) {
    const std::size_t t = job / static_cast<std::size_t>(nb);
    const int j = static_cast<int>(job % static_cast<std::size_t>(nb));
    const auto& d = tables[static_cast<std::size_t>(j)];
    const ShCoefficients& k = kernels[t];
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2 * L + 1, 2 * L + 1);
    for (int l = 0; l <= L; ++l) {
      for (int mp = -l; mp <= l; ++mp) {
        const cplx fl = f(l, mp);
        if (fl == 0.0) continue;
        for (int m = -l; m <= l; ++m) {
          g(mp + L, m + L) += d(l, mp, m) * std::conj(k(l, m)) * fl;
        }
      }
    }
    const Eigen::MatrixXcd w = ea * g * eg.transpose();
    for (int i = 0; i < na; ++i) {
      for (int kk = 0; kk < ng; ++kk) {
        out(static_cast<Eigen::Index>(grid.index(i, j, kk)), static_cast<Eigen::Index>(t)) =
            w(i, kk);
      }
    }
  });
  return out;
}

std::vector<Eigen::Matrix3d> rotation_matrices(const sphere::RotationGrid& grid) {
  std::vector<Eigen::Matrix3d> r(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    r[n] = sphere::rotor_from_euler(grid.euler(n)).matrix();
  }
  return r;
}

void check_signal(const WaveletFamily& fam, const SphericalSignal& f) {
  if (!f.grid || f.grid->band_limit() != fam.band_limit()) {
    std::ostringstream os;
    os << "signal band limit " << (f.grid ? f.grid->band_limit() : -1)
       << " does not match the family band limit " << fam.band_limit();
    fail(ErrorCode::grid_mismatch, os.str());
  }
}

void check_profile(const WaveletFamily& fam, const AdmissibilityProfile& prof) {
  if (prof.band_limit() != fam.band_limit()) {
    fail(ErrorCode::dimension_mismatch, "admissibility profile does not match the family");
  }
}

void check_coefficients(const WaveletFamily& fam, const WaveletCoefficients& W) {
  if (W.values.rows() != static_cast<Eigen::Index>(fam.rotations().size()) ||
      W.values.cols() != static_cast<Eigen::Index>(fam.scale_count())) {
    fail(ErrorCode::dimension_mismatch, "wavelet coefficients do not match the family grids");
  }
}

std::vector<ShCoefficients> atoms(const WaveletFamily& fam, const AdmissibilityProfile& prof) {
  std::vector<ShCoefficients> out;
  out.reserve(fam.scale_count());
  for (std::size_t k = 0; k < fam.scale_count(); ++k) {
    out.push_back(frame_inverse_apply(prof, fam.dilated(k)));
  }
  return out;
}

std::vector<ShCoefficients> kernels_of(const WaveletFamily& fam) {
  std::vector<ShCoefficients> out;
  out.reserve(fam.scale_count());
  for (std::size_t k = 0; k < fam.scale_count(); ++k) out.push_back(fam.dilated(k));
  return out;
}

// Sum over the grid of node weight times scale weight times g(W).
template <class G>
double weighted_sum(const WaveletFamily& fam, G g) {
  const auto& grid = fam.rotations();
  const auto& mw = fam.measure();
  std::vector<double> per_scale(fam.scale_count(), 0.0);
  parallel_for(fam.scale_count(), [&](std::size_t t) {
    double s = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n) {
      s += grid.node_weight(n) * g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
    }
    per_scale[t] = mw.weights[t] * s;
  });
  double total = 0.0;
  for (double v : per_scale) total += v;
  return total;
}

}  // namespace

// --- wavelets ----------------------------------------------------------------------

double wavelet_norm(const SphereFunction& psi) {
  return std::sqrt(sphere::graded_quadrature(Vec3(0.0, 0.0, 1.0)).norm_squared(psi));
}

Wavelet dog_wavelet(double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::invalid_argument, "dog width must be positive");
  return normalized("dog", [sigma](const Vec3& x) -> cplx {
    return gaussian_cap(x, sigma) - 0.25 * gaussian_cap(x, 2.0 * sigma);
  });
}

Wavelet dog_conformal_wavelet(double sigma, double alpha) {
  if (!(sigma > 0.0)) fail(ErrorCode::invalid_argument, "dog width must be positive");
  if (!(alpha > 0.0) || alpha == 1.0) {
    fail(ErrorCode::invalid_argument, "conformal dog ratio must be positive and not 1");
  }
  const SphereFunction g = [sigma](const Vec3& x) -> cplx { return gaussian_cap(x, sigma); };
  const double t = (alpha - 1.0) / (alpha + 1.0);
  Eigen::VectorXd av(3);
  av << 0.0, 0.0, t;
  const SphereFunction dg = sphere::dilate(BallPoint(av), g);
  const double k = 1.0 / alpha;
  return normalized("dog-conformal", [g, dg, k](const Vec3& x) { return g(x) - k * dg(x); });
}

Wavelet constant_wavelet() {
  const double c = 1.0 / std::sqrt(4.0 * kPi);
  return {"constant", [c](const Vec3&) { return cplx(c, 0.0); }};
}

Wavelet sampled_wavelet(const SphericalSignal& samples, std::string name) {
  ShCoefficients c = sphere::sh_forward(samples);
  const double n = c.norm();
  if (!(n > 1e-14) || !std::isfinite(n)) {
    fail(ErrorCode::validation, "wavelet '" + name + "' has zero or non-finite norm");
  }
  c.values /= n;
  return {std::move(name), sphere::as_function(std::move(c))};
}

Wavelet named_wavelet(const std::string& name) {
  if (name == "dog") return dog_wavelet();
  if (name == "dog-conformal") return dog_conformal_wavelet();
  if (name == "constant") return constant_wavelet();
  fail(ErrorCode::invalid_argument, "unknown wavelet '" + name + "'");
}

// --- family ------------------------------------------------------------------------

WaveletFamily::WaveletFamily(Wavelet psi, sections::Section sec, const FamilyOptions& opts)
    : wavelet_(std::move(psi)),
      section_(std::move(sec)),
      options_(opts),
      measure_(sections::make_measure_weights(3, opts.t_nodes, opts.u_min, opts.u_max)),
      rotations_(opts.n_alpha > 0 ? opts.n_alpha : 2 * opts.band_limit + 1,
                 opts.n_beta > 0 ? opts.n_beta : 2 * opts.band_limit + 1,
                 opts.n_gamma > 0 ? opts.n_gamma : 2 * opts.band_limit + 1) {
  if (opts.band_limit < 0) fail(ErrorCode::invalid_argument, "band limit must be non-negative");
  if (!wavelet_.psi) fail(ErrorCode::invalid_argument, "wavelet function is empty");
  const std::size_t nt = measure_.size();
  points_.reserve(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    points_.push_back(sections::section_point(section_, measure_.t[k], 3));
  }
  dilated_.assign(nt, ShCoefficients(opts.band_limit));
  std::vector<double> defect(nt, 0.0);
  parallel_for(nt, [&](std::size_t k) {
    const BallPoint& a = points_[k];
    const sphere::GradedOptions g = adapted(opts.graded, a.vec());
    dilated_[k] = sphere::dilated_coefficients(a, wavelet_.psi, opts.band_limit, g);
    const auto q = sphere::graded_quadrature(axis_of(a.vec()), g);
    const double n = std::sqrt(q.norm_squared(sphere::dilate(a, wavelet_.psi)));
    defect[k] = std::abs(n - 1.0);
  });
  norm_defect_ = *std::max_element(defect.begin(), defect.end());
}

// --- admissibility -------------------------------------------------------------------

AdmissibilityProfile admissibility(const WaveletFamily& fam) {
  const int L = fam.band_limit();
  const auto& mw = fam.measure();
  AdmissibilityProfile prof;
  prof.c.assign(static_cast<std::size_t>(L + 1), 0.0);
  std::vector<double> edge(static_cast<std::size_t>(L + 1), 0.0);
  for (int l = 0; l <= L; ++l) {
    double total = 0.0;
    double tail = 0.0;
    for (std::size_t k = 0; k < fam.scale_count(); ++k) {
      double s = 0.0;
      for (int m = -l; m <= l; ++m) s += std::norm(fam.dilated(k)(l, m));
      const double v = mw.weights[k] * s / (2.0 * l + 1.0);
      total += v;
      if (mw.u[k] < 10.0 * mw.u_min || mw.u[k] > 0.1 * mw.u_max) tail += v;
    }
    prof.c[static_cast<std::size_t>(l)] = total;
    edge[static_cast<std::size_t>(l)] = total > 0.0 ? tail / total : 0.0;
  }
  prof.min = *std::min_element(prof.c.begin(), prof.c.end());
  prof.max = *std::max_element(prof.c.begin(), prof.c.end());
  prof.edge_fraction = *std::max_element(edge.begin(), edge.end());
  for (int l = 0; l <= L; ++l) {
    const double c = prof.c[static_cast<std::size_t>(l)];
    if (c <= kSingularThreshold) {
      std::ostringstream os;
      os << "C(" << l << ") = " << c << " is below " << kSingularThreshold
         << "; not admissible at this band limit";
      prof.warnings.push_back(os.str());
    }
  }
  if (prof.edge_fraction > 1e-3) {
    std::ostringstream os;
    os << "scale integral not converged: " << prof.edge_fraction
       << " of some C(l) comes from the outer decades of u";
    prof.warnings.push_back(os.str());
  }
  return prof;
}

ShCoefficients frame_inverse_apply(const AdmissibilityProfile& prof, const ShCoefficients& g) {
  if (g.band_limit > prof.band_limit()) {
    fail(ErrorCode::dimension_mismatch, "coefficients exceed the profile band limit");
  }
  ShCoefficients out(g.band_limit);
  for (int l = 0; l <= g.band_limit; ++l) {
    const double c = prof.c[static_cast<std::size_t>(l)];
    if (!(c > kSingularThreshold)) {
      std::ostringstream os;
      os << "C(l) = " << c << " at l=" << l << " cannot be inverted";
      fail(ErrorCode::singular_multiplier, os.str());
    }
    for (int m = -l; m <= l; ++m) out(l, m) = g(l, m) / c;
  }
  return out;
}

ShCoefficients frame_apply(const AdmissibilityProfile& prof, const ShCoefficients& g) {
  if (g.band_limit > prof.band_limit()) {
    fail(ErrorCode::dimension_mismatch, "coefficients exceed the profile band limit");
  }
  ShCoefficients out(g.band_limit);
  for (int l = 0; l <= g.band_limit; ++l) {
    for (int m = -l; m <= l; ++m) out(l, m) = prof.c[static_cast<std::size_t>(l)] * g(l, m);
  }
  return out;
}

// --- analysis ------------------------------------------------------------------------

WaveletCoefficients analyze(const FamilyPtr& fam, const ShCoefficients& f) {
  if (!fam) fail(ErrorCode::invalid_argument, "missing wavelet family");
  return {fam, harmonic_analyze(*fam, kernels_of(*fam), f.resized(fam->band_limit()))};
}

WaveletCoefficients analyze(const FamilyPtr& fam, const SphericalSignal& f, Path path,
                            const QuadratureOptions& q) {
  if (!fam) fail(ErrorCode::invalid_argument, "missing wavelet family");
  check_signal(*fam, f);
  const ShCoefficients fh = sphere::sh_forward(f);
  if (path == Path::harmonic) return analyze(fam, fh);

  const auto& grid = fam->rotations();
  const auto rot = rotation_matrices(grid);
  const std::size_t nt = fam->scale_count();
  const SphereFunction& psi = fam->wavelet().psi;

  // Per scale: pulled-back points phi_a(z) and weights w_{-a}(z) conj(psi(z)).
  struct Pullback {
    std::vector<Vec3> y;
    std::vector<cplx> c;
  };
  std::vector<Pullback> pb(nt);
  parallel_for(nt, [&](std::size_t t) {
    const Vec3 a = fam->scale_point(t).vec();
    const auto rule = sphere::graded_quadrature(axis_of(a), adapted(q.graded, a));
    std::vector<cplx> c(rule.size());
    double total = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const Vec3& z = rule.points[k];
      c[k] = rule.weights[k] * weight3(-a, z) * std::conj(psi(z));
      total += std::abs(c[k]);
    }
    // Drop the smallest nodes while their combined weight stays below kPruneMass.
    std::vector<std::size_t> order(rule.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return std::abs(c[x]) < std::abs(c[y]); });
    double dropped = 0.0;
    std::size_t first = 0;
    while (first < order.size() && dropped + std::abs(c[order[first]]) <= kPruneMass * total) {
      dropped += std::abs(c[order[first]]);
      ++first;
    }
    std::vector<std::size_t> keep(order.begin() + static_cast<std::ptrdiff_t>(first), order.end());
    std::sort(keep.begin(), keep.end());
    for (std::size_t k : keep) {
      pb[t].y.push_back(mobius3(a, rule.points[k]));
      pb[t].c.push_back(c[k]);
    }
  });

  const Evaluator eval(fh);
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(nt));
  parallel_for(grid.size() * nt, [&](std::size_t job) {
    const std::size_t node = job / nt;
    const std::size_t t = job % nt;
    const Eigen::Matrix3d& r = rot[node];
    cplx sum = 0.0;
    for (std::size_t k = 0; k < pb[t].y.size(); ++k) sum += pb[t].c[k] * eval(r * pb[t].y[k]);
    out(static_cast<Eigen::Index>(node), static_cast<Eigen::Index>(t)) = sum;
  });
  return {fam, std::move(out)};
}

cplx coefficient_at(const WaveletFamily& fam, const ShCoefficients& f, const Rotor& s,
                    std::size_t k) {
  const ShCoefficients rp = sphere::rotate_coefficients(s, fam.dilated(k));
  const int L = std::min(fam.band_limit(), f.band_limit);
  cplx sum = 0.0;
  for (int i = 0; i < ShCoefficients::count(L); ++i) sum += std::conj(rp.values[i]) * f.values[i];
  return sum;
}

cplx transform_at(const SphereFunction& psi, const Rotor& s, const BallPoint& a,
                  const SphereFunction& f, const sphere::GradedOptions& opts) {
  const Vec3 av = vec3(a);
  const Eigen::Matrix3d r = s.matrix();
  const auto rule = sphere::graded_quadrature(axis_of(av), adapted(opts, av));
  cplx sum = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const Vec3& z = rule.points[k];
    const cplx p = psi(z);
    if (p == 0.0) continue;
    sum += rule.weights[k] * weight3(-av, z) * std::conj(p) * f(r * mobius3(av, z));
  }
  return sum;
}

// --- synthesis -----------------------------------------------------------------------

Reconstruction synthesize(const AdmissibilityProfile& prof, const WaveletCoefficients& W,
                          Path path, sphere::GridPtr out) {
  if (!W.family) fail(ErrorCode::invalid_argument, "coefficients carry no family");
  const WaveletFamily& fam = *W.family;
  check_profile(fam, prof);
  check_coefficients(fam, W);
  const int L = fam.band_limit();
  if (!out) out = std::make_shared<const sphere::SphereGrid>(L);
  const auto& grid = fam.rotations();
  const auto& mw = fam.measure();
  const std::size_t nt = fam.scale_count();

  if (path == Path::harmonic) {
    const int na = grid.n_alpha();
    const int nb = grid.n_beta();
    const int ng = grid.n_gamma();
    const Eigen::MatrixXcd ea = exponentials(na, L, &sphere::RotationGrid::alpha, grid);
    const Eigen::MatrixXcd eg = exponentials(ng, L, &sphere::RotationGrid::gamma, grid);
    const auto tables = beta_tables(grid, L);
    std::vector<ShCoefficients> partial(nt, ShCoefficients(L));
    parallel_for(nt, [&](std::size_t t) {
      const ShCoefficients& k = fam.dilated(t);
      Eigen::MatrixXcd wm(na, ng);
      for (int j = 0; j < nb; ++j) {
        for (int i = 0; i < na; ++i) {
          for (int kk = 0; kk < ng; ++kk) {
            wm(i, kk) = W.values(static_cast<Eigen::Index>(grid.index(i, j, kk)),
                                 static_cast<Eigen::Index>(t));
          }
        }
        const Eigen::MatrixXcd wh = ea.adjoint() * wm * eg.conjugate();
        const double w = mw.weights[t] * grid.weight(j);
        const auto& d = tables[static_cast<std::size_t>(j)];
        for (int l = 0; l <= L; ++l) {
          for (int mp = -l; mp <= l; ++mp) {
            cplx s = 0.0;
            for (int m = -l; m <= l; ++m) s += d(l, mp, m) * wh(mp + L, m + L) * k(l, m);
            partial[t](l, mp) += w * s;
          }
        }
      }
    });
    ShCoefficients g(L);
    for (const auto& p : partial) g.values += p.values;
    ShCoefficients fh = frame_inverse_apply(prof, g);
    SphericalSignal signal = sphere::sh_inverse(fh, out);
    return {std::move(fh), std::move(signal)};
  }

  // Direct double sum: per rotation, h_s = sum_t w_t W(s,t) A^{-1} D_t psi, then
  // f(x) = sum_s w_s h_s(conj(s) x s).
  const auto at = atoms(fam, prof);
  const auto n_coef = static_cast<Eigen::Index>(ShCoefficients::count(L));
  Eigen::MatrixXcd h(static_cast<Eigen::Index>(grid.size()), n_coef);
  parallel_for(grid.size(), [&](std::size_t node) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n_coef);
    for (std::size_t t = 0; t < nt; ++t) {
      acc += (mw.weights[t] *
              W.values(static_cast<Eigen::Index>(node), static_cast<Eigen::Index>(t))) *
             at[t].values;
    }
    h.row(static_cast<Eigen::Index>(node)) = grid.node_weight(node) * acc.transpose();
  });
  const auto rot = rotation_matrices(grid);
  Eigen::VectorXcd values(static_cast<Eigen::Index>(out->size()));
  parallel_for(out->size(), [&](std::size_t p) {
    const Vec3& x = out->point(p);
    std::vector<cplx> y(static_cast<std::size_t>(n_coef));
    cplx sum = 0.0;
    for (std::size_t node = 0; node < grid.size(); ++node) {
      sphere::sh_values(L, rot[node].transpose() * x, y);
      cplx v = 0.0;
      for (Eigen::Index i = 0; i < n_coef; ++i) {
        v += h(static_cast<Eigen::Index>(node), i) * y[static_cast<std::size_t>(i)];
      }
      sum += v;
    }
    values[static_cast<Eigen::Index>(p)] = sum;
  });
  SphericalSignal signal(out, std::move(values));
  ShCoefficients fh = sphere::sh_forward(signal, std::min(L, out->band_limit())).resized(L);
  return {std::move(fh), std::move(signal)};
}

// --- identities ----------------------------------------------------------------------

PlancherelResult plancherel_check(const FamilyPtr& fam, const AdmissibilityProfile& prof,
                                  const SphericalSignal& f) {
  if (!fam) fail(ErrorCode::invalid_argument, "missing wavelet family");
  check_signal(*fam, f);
  check_profile(*fam, prof);
  const ShCoefficients fh = sphere::sh_forward(f);
  const Eigen::MatrixXcd w = harmonic_analyze(*fam, kernels_of(*fam), fh);
  const Eigen::MatrixXcd wt = harmonic_analyze(*fam, atoms(*fam, prof), fh);
  PlancherelResult r;
  r.lhs = fh.values.squaredNorm();
  r.rhs = weighted_sum(*fam, [&](Eigen::Index n, Eigen::Index t) {
    return std::real(std::conj(wt(n, t)) * w(n, t));
  });
  r.relerr = r.lhs > 0.0 ? std::abs(r.lhs - r.rhs) / r.lhs : std::abs(r.rhs);
  return r;
}

QuadraticForm frame_quadratic_form(const FamilyPtr& fam, const AdmissibilityProfile& prof,
                                   const SphericalSignal& f, Path path,
                                   const QuadratureOptions& q) {
  if (!fam) fail(ErrorCode::invalid_argument, "missing wavelet family");
  check_signal(*fam, f);
  check_profile(*fam, prof);
  const ShCoefficients fh = sphere::sh_forward(f);
  QuadraticForm r;
  for (int l = 0; l <= fam->band_limit(); ++l) {
    double s = 0.0;
    for (int m = -l; m <= l; ++m) s += std::norm(fh(l, m));
    r.multiplier += prof.c[static_cast<std::size_t>(l)] * s;
  }
  const WaveletCoefficients W = analyze(fam, f, path, q);
  r.direct = weighted_sum(*fam,
                          [&](Eigen::Index n, Eigen::Index t) { return std::norm(W.values(n, t)); });
  r.relerr = r.multiplier > 0.0 ? std::abs(r.multiplier - r.direct) / r.multiplier
                                : std::abs(r.direct);
  return r;
}

CovarianceResult covariance_check(const FamilyPtr& fam, const SphericalSignal& f, const Rotor& s1,
                                  Path grid_path, int samples, std::uint64_t seed) {
  if (!fam) fail(ErrorCode::invalid_argument, "missing wavelet family");
  check_signal(*fam, f);
  if (s1.dim() != 3) fail(ErrorCode::dimension_mismatch, "covariance needs a Spin(3) rotor");
  CovarianceResult r;
  const ShCoefficients fh = sphere::sh_forward(f);
  const ShCoefficients rf = sphere::rotate_coefficients(s1, fh);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> cosine(-1.0, 1.0);
  for (int i = 0; i < samples; ++i) {
    const double a = angle(rng);
    const double b = std::acos(cosine(rng));
    const double g = angle(rng);
    const Rotor s = sphere::rotor_from_euler({a, b, g});
    const Rotor moved = s1.inverse() * s;
    for (std::size_t k = 0; k < fam->scale_count(); ++k) {
      r.wigner = std::max(r.wigner, std::abs(coefficient_at(*fam, rf, s, k) -
                                             coefficient_at(*fam, fh, moved, k)));
    }
  }

  const Eigen::Matrix3d m = s1.matrix();
  if (std::abs(m(2, 2) - 1.0) > 1e-12) return r;
  const auto& grid = fam->rotations();
  const int na = grid.n_alpha();
  const double steps = std::atan2(m(1, 0), m(0, 0)) * na / (2.0 * kPi);
  const double shift = std::round(steps);
  if (std::abs(steps - shift) > 1e-9) return r;
  const int n = static_cast<int>(shift);
  const WaveletCoefficients w0 = analyze(fam, f, grid_path);
  const WaveletCoefficients w1 = analyze(fam, sphere::rotate_signal(s1, f), grid_path);
  double worst = 0.0;
  for (int j = 0; j < grid.n_beta(); ++j) {
    for (int i = 0; i < na; ++i) {
      const int src = ((i - n) % na + na) % na;
      for (int k = 0; k < grid.n_gamma(); ++k) {
        const auto a = static_cast<Eigen::Index>(grid.index(i, j, k));
        const auto b = static_cast<Eigen::Index>(grid.index(src, j, k));
        worst = std::max(worst, (w1.values.row(a) - w0.values.row(b)).cwiseAbs().maxCoeff());
      }
    }
  }
  r.grid = worst;
  return r;
}

bool on_section(const sections::Section& sec, const BallPoint& c, double tol) {
  const gyro::Decomposition d = gyro::unique_decompose(c);
  Eigen::VectorXd target = Eigen::VectorXd::Zero(c.dim());
  target[c.dim() - 2] = sec.g(d.t);
  return (d.a.vec() - target).norm() < tol;
}

NoncovarianceResult dilation_noncovariance_check(const Wavelet& psi, const sections::Section& sec,
                                                 const SphereFunction& f, const BallPoint& b,
                                                 const Rotor& s, double t,
                                                 const sphere::GradedOptions& opts) {
  vec3(b);
  const BallPoint a = sections::section_point(sec, t, 3);
  const BallPoint bs(s.inverse().apply(b.vec()));
  const BallPoint image = gyro::gyro_add(-bs, a);
  using clifford::Multivector;
  const Rotor qbar = Rotor::normalized(Multivector::scalar(3, 1.0) +
                                       Multivector::vector(bs.vec()) * Multivector::vector(a.vec()));
  const SphereFunction rotated = sphere::rotate(qbar, psi.psi);

  NoncovarianceResult r{0.0, 0.0, 0.0, 0.0, image, false};
  r.lhs = transform_at(psi.psi, s, a, sphere::dilate(b, f), opts);
  r.rhs = transform_at(rotated, s, image, f, opts);
  r.residual = std::abs(r.lhs - r.rhs);
  r.literal_residual =
      std::abs(r.lhs - transform_at(psi.psi, s, gyro::gyro_add(bs, -a), f, opts));
  r.off_section = !on_section(sec, image);
  return r;
}

double unitarity_ratio(const Rotor& s, const BallPoint& a, const SphereFunction& f) {
  const Vec3 av = vec3(a);
  const Vec3 target = s.matrix() * (-axis_of(av));
  const double image = sphere::graded_quadrature(target, adapted({}, av))
                            .norm_squared(sphere::represent(s, a, f));
  const double base = sphere::graded_quadrature(Vec3(0.0, 0.0, 1.0)).norm_squared(f);
  if (!(base > 0.0)) fail(ErrorCode::division_by_zero, "unitarity ratio of a zero function");
  return std::sqrt(image / base);
}

}  // namespace conformlets::cwt
