#include "ellipsotope/containment.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "ellipsotope/norms.hpp"

namespace ellipsotope {

using conic::ConeProgram;
using conic::LinExpr;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::contained: return "contained";
    case Verdict::not_contained: return "not_contained";
    default: return "unknown";
  }
}

std::string to_string(Method m) {
  switch (m) {
    case Method::automatic: return "auto";
    case Method::vpoly: return "vpoly";
    case Method::ellipsoid_sdp: return "ellipsoid_sdp";
    case Method::ellipsoid_eigen: return "ellipsoid_eigen";
    case Method::lr: return "lr";
    case Method::zsr: return "zsr";
    case Method::lr_zsr: return "lr+zsr";
    case Method::sr: return "sr";
    case Method::fallback: return "fallback";
    case Method::bruteforce: return "bruteforce";
    case Method::facets: return "facets";
    case Method::exact: return "exact";
    default: return "degenerate";
  }
}

Method method_from_string(const std::string& s) {
  for (Method m : {Method::automatic, Method::vpoly, Method::ellipsoid_sdp, Method::ellipsoid_eigen, Method::lr,
                   Method::zsr, Method::lr_zsr, Method::sr, Method::fallback, Method::bruteforce, Method::facets,
                   Method::exact, Method::degenerate})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown containment method '" + s + "'.");
}

Verdict verdict_for(double lo, double hi) {
  if (hi <= 1.0 + kVerdictBand) return Verdict::contained;
  if (lo > 1.0 + kVerdictBand) return Verdict::not_contained;
  return Verdict::unknown;
}

namespace {

ContainmentResult finish(ContainmentResult r) {
  if (r.r_lower > r.r_upper) r.r_lower = r.r_upper;
  r.verdict = verdict_for(r.r_lower, r.r_upper);
  return r;
}

ContainmentResult exact_result(double r, Method m) {
  ContainmentResult out;
  out.r_lower = out.r_upper = r;
  out.method = m;
  out.exact = true;
  return out;
}

MatrixXd pinv(const MatrixXd& H) { return H.completeOrthogonalDecomposition().pseudoInverse(); }

bool in_open_one_two(const Exponent& q) { return q.is_finite() && !q.is_one() && q.value() <= 2.0; }

double gamma(const Exponent& k) { return gaussian_moment(k); }

// dimension-dependent equivalence constant: ||x||_a <= dim^(1/a - 1/b) ||x||_b for a <= b
double equiv(Index dim, const Exponent& a, const Exponent& b) {
  return std::pow(static_cast<double>(dim), std::max(0.0, a.reciprocal() - b.reciprocal()));
}

ContainmentResult dispatch(const Ellipsotope& in, const Ellipsotope& out, const ContainmentOptions& opt);

void tighten_with_sampling(ContainmentResult& r, const Ellipsotope& in, const Ellipsotope& out,
                           const ContainmentOptions& opt) {
  if (!opt.sampling_lower_bound || r.exact) return;
  OracleResult s = radius_sampling_lower_bound(in, out, opt.oracle);
  if (s.value > r.r_lower) {
    r.r_lower = s.value;
    r.witness.alpha = s.alpha;
  }
}

ContainmentResult zonotope_inbody(const Ellipsotope& in, const Ellipsotope& out, const ContainmentOptions& opt,
                                  bool use_lr, bool use_zsr) {
  const Exponent q = out.p;
  const MatrixXd Gp = center_reduction(in.G, in.c, out.c);
  const MatrixXd& H = out.G;
  const double m = static_cast<double>(Gp.cols());

  auto launch = [&](auto fn) {
    return std::async(opt.parallel ? std::launch::async : std::launch::deferred, fn);
  };
  std::future<LrResult> lr;
  std::future<LrDualResult> dual;
  std::future<SdpRelaxationResult> zsr;
  if (use_lr) {
    lr = launch([&] { return lr_relaxation(Gp, H, q, opt.solver); });
    dual = launch([&] { return lr_dual(Gp, H, q, opt.solver); });
  }
  if (use_zsr) zsr = launch([&] { return zsr_relaxation(Gp, H, q, opt.solver); });

  ContainmentResult res;
  res.r_lower = 0.0;
  res.r_upper = kInf;
  res.method = use_lr && use_zsr ? Method::lr_zsr : use_lr ? Method::lr : Method::zsr;
  if (use_lr) {
    LrResult a = lr.get();
    LrDualResult b = dual.get();
    res.witness.X = a.X;
    res.witness.Y = b.Y;
    res.r_upper = a.value;
    if (!q.is_one()) res.r_lower = a.value * gamma(Exponent::one()) / (gamma(q.conjugate()) * std::sqrt(m));
    for (Index j = 0; j < b.Y.cols(); ++j) res.r_lower = std::max(res.r_lower, dual_lower_bound(Gp, H, q, b.Y.col(j)));
    if (lr_exactness_certificate(b.Y, opt.certificate_tol)) {
      res.lr_certificate = true;
      res.exact = true;
      res.r_lower = res.r_upper;
    }
  }
  if (use_zsr) {
    SdpRelaxationResult z = zsr.get();
    res.witness.v = z.v;
    res.witness.w = z.w;
    if (!res.exact) {
      res.r_upper = std::min(res.r_upper, z.value);
      res.r_lower = std::max(res.r_lower, z.value * gamma(Exponent::one()) / gamma(q.conjugate()));
    }
  }
  tighten_with_sampling(res, in, out, opt);
  return res;
}

ContainmentResult sr_path(const Ellipsotope& in, const Ellipsotope& out, const ContainmentOptions& opt) {
  if ((in.c - out.c).norm() != 0.0) throw std::invalid_argument("sr_relaxation: inbody and circumbody must share a center.");
  SdpRelaxationResult s = sr_relaxation(in.G, out.G, in.p, out.p, opt.solver);
  ContainmentResult res;
  res.method = Method::sr;
  res.r_upper = s.value;
  res.r_lower = s.value / (gamma(out.p.conjugate()) * gamma(in.p));
  res.witness.v = s.v;
  res.witness.w = s.w;
  tighten_with_sampling(res, in, out, opt);
  return res;
}

ContainmentResult dispatch(const Ellipsotope& in, const Ellipsotope& out, const ContainmentOptions& opt) {
  const Exponent p = in.p, q = out.p;
  const bool same_center = (in.c - out.c).norm() == 0.0;
  Method m = opt.method;
  if (m == Method::automatic) {
    if (p.is_one()) m = Method::vpoly;
    else if (p.is_two() && q.is_two()) m = Method::ellipsoid_sdp;
    else if (p.is_infinite()) m = in_open_one_two(q) ? Method::lr_zsr : Method::lr;
    else if (p.value() >= 2.0 && in_open_one_two(q) && same_center) m = Method::sr;
    else m = Method::fallback;
  } else if (m == Method::exact) {
    if (p.is_one()) m = Method::vpoly;
    else if (p.is_two() && q.is_two()) m = Method::ellipsoid_sdp;
    else if (q.is_infinite()) m = Method::facets;
    else if (p.is_infinite()) m = Method::bruteforce;
    else throw std::invalid_argument("no exact method for this pair of exponents.");
  }
  switch (m) {
    case Method::vpoly:
      if (!p.is_one()) throw std::invalid_argument("vpoly method requires an inbody with p = 1.");
      return radius_vpoly_in_ellipsotope(in.G, in.c, out.G, out.c, q);
    case Method::ellipsoid_sdp:
    case Method::ellipsoid_eigen:
      if (!(p.is_two() && q.is_two())) throw std::invalid_argument("ellipsoid method requires p = q = 2.");
      return radius_ellipsoid_in_ellipsoid(in.G, in.c, out.G, out.c, opt.solver);
    case Method::lr:
    case Method::zsr:
    case Method::lr_zsr:
      if (!p.is_infinite()) throw std::invalid_argument("relaxation methods require a zonotope inbody.");
      if (m != Method::lr && !in_open_one_two(q)) throw std::invalid_argument("zsr_relaxation: q must lie in (1, 2].");
      return zonotope_inbody(in, out, opt, m != Method::zsr, m != Method::lr);
    case Method::sr: return sr_path(in, out, opt);
    case Method::bruteforce: {
      OracleResult o = radius_bruteforce(in, out, opt.oracle);
      ContainmentResult r = exact_result(o.value, Method::bruteforce);
      r.witness.alpha = o.alpha;
      return r;
    }
    case Method::facets: {
      if (!q.is_infinite()) throw std::invalid_argument("facet method requires a zonotope circumbody.");
      OracleResult o = radius_zonotope_facets(in, out, opt.oracle);
      ContainmentResult r = exact_result(o.value, Method::facets);
      r.witness.alpha = o.alpha;
      return r;
    }
    case Method::fallback: return norm_equivalence_fallback(in, out, opt);
    default: throw std::invalid_argument("unsupported containment method.");
  }
}

}  // namespace

MatrixXd center_reduction(const MatrixXd& G, const VectorXd& c, const VectorXd& d) {
  if (c.size() != G.rows() || d.size() != G.rows()) throw std::invalid_argument("center_reduction: inconsistent dimensions.");
  const VectorXd off = c - d;
  if (off.norm() == 0.0) return G;
  MatrixXd out(G.rows(), G.cols() + 1);
  out << G, off;
  return out;
}

ContainmentResult radius_vpoly_in_ellipsotope(const MatrixXd& G, const VectorXd& c, const MatrixXd& H,
                                              const VectorXd& d, const Exponent& q) {
  if (G.rows() != H.rows() || c.size() != G.rows() || d.size() != G.rows())
    throw std::invalid_argument("radius_vpoly_in_ellipsotope: inconsistent dimensions.");
  EllipsotopeNorm nrm(H, q);
  const VectorXd off = c - d;
  const bool symmetric = off.norm() == 0.0;
  double best = -1.0;
  VectorXd alpha = VectorXd::Zero(G.cols());
  for (Index i = 0; i < G.cols(); ++i)
    for (double s : {1.0, -1.0}) {
      if (s < 0 && symmetric) continue;
      auto v = nrm(s * G.col(i) + off);
      double val = v ? *v : kInf;
      if (val > best) {
        best = val;
        alpha.setZero();
        alpha(i) = s;
      }
    }
  ContainmentResult r = exact_result(best, Method::vpoly);
  r.witness.alpha = alpha;
  return finish(r);
}

ContainmentResult radius_ellipsoid_in_ellipsoid(const MatrixXd& G, const VectorXd& c, const MatrixXd& H,
                                                const VectorXd& d, const conic::SolverSettings& settings) {
  if (G.rows() != H.rows() || c.size() != G.rows() || d.size() != G.rows())
    throw std::invalid_argument("radius_ellipsoid_in_ellipsoid: inconsistent dimensions.");
  if (rank_and_projection(H).rank != H.rows())
    throw std::invalid_argument("radius_ellipsoid_in_ellipsoid: circumbody must be nondegenerate.");
  const MatrixXd Hp = pinv(H);
  const MatrixXd Theta = Hp * G;
  const VectorXd theta = Hp * (c - d);
  const Index m = G.cols();
  MatrixXd A(Theta.rows(), m + 1);
  A << Theta, theta;
  const MatrixXd M = A.transpose() * A;

  ConeProgram P;
  auto rho = P.add_variable("rho");
  auto delta = P.add_variable("delta");
  conic::ExprMatrix S(m + 1, m + 1);
  for (Index j = 0; j <= m; ++j)
    for (Index i = j; i <= m; ++i) {
      LinExpr e(-M(i, j));
      if (i == j) e += (i < m ? 1.0 : -1.0) * delta(0);
      if (i == m && j == m) e += rho(0);
      S(i, j) = e;
    }
  P.add_psd(S, "s-lemma");
  P.add_nonnegative(delta(0));
  P.minimize(rho(0));
  ContainmentResult r;
  try {
    conic::Solution sol = solve_verified(P, settings, "radius_ellipsoid_in_ellipsoid");
    const double rv = std::sqrt(std::max(0.0, sol.value(rho(0))));
    r = exact_result(rv, Method::ellipsoid_sdp);
    r.witness.rho = sol.value(rho(0));
    r.witness.delta = sol.value(delta(0));
  } catch (const SolverFailure& e) {
    BallMaximum b = quadratic_over_ball(Theta, theta);
    r = exact_result(b.value, Method::ellipsoid_eigen);
    r.witness.alpha = b.alpha;
    r.witness.rho = b.value * b.value;
    r.note = std::string("SDP failed; eigen oracle used (") + e.what() + ")";
  }
  return finish(r);
}

ContainmentResult norm_equivalence_fallback(const Ellipsotope& inbody, const Ellipsotope& circumbody,
                                            const ContainmentOptions& options) {
  if (inbody.dimension() != circumbody.dimension())
    throw std::invalid_argument("norm_equivalence_fallback: inconsistent dimensions.");
  const Exponent p = inbody.p, q = circumbody.p;
  const Index m = inbody.num_generators(), l = circumbody.num_generators();
  const VectorXd zero = VectorXd::Zero(inbody.dimension());
  ContainmentOptions sub = options;
  sub.method = Method::automatic;
  sub.sampling_lower_bound = false;

  std::vector<std::pair<Exponent, Exponent>> pairs = {{Exponent::one(), q}, {Exponent::infinity(), q}};
  pairs.emplace_back(Exponent::two(), Exponent::two());
  if (p.is_finite() && p.value() >= 2.0) pairs.emplace_back(p, Exponent::two());
  if (in_open_one_two(q) && !q.is_two()) pairs.emplace_back(Exponent::two(), q);

  ContainmentResult res;
  res.method = Method::fallback;
  res.r_lower = 0.0;
  res.r_upper = kInf;
  int solved = 0;
  std::string failure;
  for (const auto& [pp, qq] : pairs) {
    if (pp == p && qq == q) continue;
    ContainmentResult c;
    try {
      c = dispatch(Ellipsotope(pp, inbody.G, zero), Ellipsotope(qq, circumbody.G, zero), sub);
    } catch (const SolverFailure& e) {
      failure = e.what();
      continue;
    }
    ++solved;
    double lo = c.r_lower, hi = c.r_upper;
    // inbody exponent: E_a(G) inside E_b(G) for a <= b, and E_b inside m^(1/a-1/b) E_a
    if (pp.reciprocal() >= p.reciprocal()) hi *= equiv(m, pp, p);
    else lo /= equiv(m, p, pp);
    // circumbody exponent, same inclusions in dimension l
    if (qq.reciprocal() >= q.reciprocal()) lo /= equiv(l, qq, q);
    else hi *= equiv(l, q, qq);
    res.r_lower = std::max(res.r_lower, lo);
    res.r_upper = std::min(res.r_upper, hi);
  }
  if (solved == 0) throw SolverFailure("norm_equivalence_fallback: no substitute problem solved (" + failure + ").");
  const VectorXd off = inbody.c - circumbody.c;
  if (off.norm() != 0.0) {
    // r0 <= r <= r0 + ||c - d|| and r >= ||c - d|| in the circumbody norm
    auto nd = EllipsotopeNorm(circumbody.G, q)(off);
    const double dn = nd ? *nd : kInf;
    res.r_lower = std::max(res.r_lower, dn);
    res.r_upper = res.r_upper + dn;
  }
  tighten_with_sampling(res, inbody, circumbody, options);
  return finish(res);
}

ContainmentResult containment_radius(const Ellipsotope& inbody, const Ellipsotope& circumbody,
                                     const ContainmentOptions& options) {
  const Index n = inbody.dimension();
  if (circumbody.dimension() != n) throw std::invalid_argument("containment_radius: inconsistent dimensions.");
  RankReport rh = rank_and_projection(circumbody.G, options.rank_tol);
  if (rh.rank < n) {
    MatrixXd aug(n, inbody.num_generators() + 1 + circumbody.num_generators());
    aug << inbody.G, inbody.c - circumbody.c, circumbody.G;
    if (rank_and_projection(aug, options.rank_tol).rank != rh.rank) {
      ContainmentResult r;
      r.r_lower = r.r_upper = kInf;
      r.method = Method::degenerate;
      r.exact = true;
      r.note = "inbody leaves the affine hull of the circumbody";
      return finish(r);
    }
    if (rh.rank == 0) {
      ContainmentResult r = exact_result(0.0, Method::degenerate);
      r.note = "both bodies reduce to the same point";
      return finish(r);
    }
    const MatrixXd& P = rh.projector;
    ContainmentResult r = containment_radius(Ellipsotope(inbody.p, P * inbody.G, P * inbody.c),
                                             Ellipsotope(circumbody.p, P * circumbody.G, P * circumbody.c), options);
    r.note = r.note.empty() ? "projected onto the circumbody range" : r.note;
    if (r.witness.Y.size() > 0) r.witness.Y = P.transpose() * r.witness.Y;
    return r;
  }
  return finish(dispatch(inbody, circumbody, options));
}

}  // namespace ellipsotope
