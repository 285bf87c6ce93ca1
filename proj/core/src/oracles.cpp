#include "ellipsotope/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>

#include "ellipsotope/rng.hpp"

namespace ellipsotope {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int thread_count(const OracleBudget& b, std::uint64_t work) {
  int t = b.threads > 0 ? b.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(t), std::max<std::uint64_t>(1, work / 64)));
}

struct ChunkBest {
  double value = -1.0;
  std::uint64_t code = 0;
};

// Gray-code walk over codes [lo, hi) of a (bits)-bit counter
ChunkBest scan(const EllipsotopeNorm& nrm, const MatrixXd& G, const VectorXd& offset, int bits, std::uint64_t lo,
               std::uint64_t hi) {
  ChunkBest best;
  auto sign = [](std::uint64_t g, int j) { return (g >> j) & 1u ? -1.0 : 1.0; };
  auto point = [&](std::uint64_t g) {
    VectorXd x = offset;
    for (int j = 0; j < bits; ++j) x += sign(g, j) * G.col(j);
    return x;
  };
  std::uint64_t gray = lo ^ (lo >> 1);
  VectorXd x = point(gray);
  for (std::uint64_t i = lo; i < hi; ++i) {
    if (i != lo) {
      std::uint64_t next = i ^ (i >> 1);
      int j = std::countr_zero(next ^ gray);
      gray = next;
      if ((i & 1023u) == 0) x = point(gray);
      else x += 2.0 * sign(gray, j) * G.col(j);
    }
    auto v = nrm(x);
    double val = v ? *v : kInf;
    if (val > best.value) {
      best.value = val;
      best.code = gray;
    }
    if (std::isinf(val)) break;
  }
  return best;
}

}  // namespace

OracleResult radius_bruteforce_zonotope_inbody(const MatrixXd& G, const VectorXd& c, const MatrixXd& H,
                                               const VectorXd& d, const Exponent& q, const OracleBudget& budget) {
  const Index n = G.rows(), m = G.cols();
  if (c.size() != n || H.rows() != n || d.size() != n)
    throw std::invalid_argument("radius_bruteforce_zonotope_inbody: inconsistent dimensions.");
  if (m > budget.max_enumeration_columns || m > 62)
    throw std::invalid_argument("radius_bruteforce_zonotope_inbody: too many generators to enumerate.");
  EllipsotopeNorm nrm(H, q);
  const VectorXd offset = c - d;
  // with equal centres -alpha gives the same value, so the last sign stays fixed
  const bool symmetric = offset.norm() == 0.0 && m > 0;
  const int bits = symmetric ? static_cast<int>(m) - 1 : static_cast<int>(m);
  VectorXd base = offset;
  MatrixXd Gs = G.leftCols(bits);
  if (symmetric) base += G.col(m - 1);
  const std::uint64_t total = std::uint64_t{1} << bits;
  const int threads = thread_count(budget, total);
  std::vector<ChunkBest> parts(static_cast<size_t>(threads));
  if (threads == 1) {
    parts[0] = scan(nrm, Gs, base, bits, 0, total);
  } else {
    std::vector<std::future<ChunkBest>> futs;
    for (int t = 0; t < threads; ++t) {
      std::uint64_t lo = total * static_cast<std::uint64_t>(t) / static_cast<std::uint64_t>(threads);
      std::uint64_t hi = total * static_cast<std::uint64_t>(t + 1) / static_cast<std::uint64_t>(threads);
      futs.push_back(std::async(std::launch::async, [&, lo, hi] { return scan(nrm, Gs, base, bits, lo, hi); }));
    }
    for (int t = 0; t < threads; ++t) parts[static_cast<size_t>(t)] = futs[static_cast<size_t>(t)].get();
  }
  ChunkBest best = parts[0];
  for (const ChunkBest& p : parts)
    if (p.value > best.value) best = p;
  OracleResult out;
  out.value = best.value;
  out.exact = true;
  out.alpha = VectorXd::Ones(m);
  for (int j = 0; j < bits; ++j)
    if ((best.code >> j) & 1u) out.alpha(j) = -1.0;
  return out;
}

OracleResult radius_bruteforce(const Ellipsotope& inbody, const Ellipsotope& circumbody, const OracleBudget& budget) {
  if (!inbody.p.is_infinite()) throw std::invalid_argument("radius_bruteforce: inbody must be a zonotope.");
  return radius_bruteforce_zonotope_inbody(inbody.G, inbody.c, circumbody.G, circumbody.c, circumbody.p, budget);
}

OracleResult radius_zonotope_facets(const Ellipsotope& inbody, const Ellipsotope& circumbody,
                                    const OracleBudget& budget) {
  if (!circumbody.p.is_infinite()) throw std::invalid_argument("radius_zonotope_facets: circumbody must be a zonotope.");
  if (inbody.dimension() != circumbody.dimension())
    throw std::invalid_argument("radius_zonotope_facets: inconsistent dimensions.");
  const Index m = inbody.num_generators();
  OracleResult out;
  out.exact = true;
  out.alpha = VectorXd::Zero(m);
  const RankReport rr = rank_and_projection(circumbody.G);
  MatrixXd Gi(inbody.dimension(), m + 1);
  Gi << inbody.G, inbody.c - circumbody.c;
  const double tol = 1e-9 * std::max(1.0, Gi.cwiseAbs().maxCoeff());
  if ((rr.projector.transpose() * (rr.projector * Gi) - Gi).cwiseAbs().maxCoeff() > tol) {
    out.value = kInf;
    return out;
  }
  const Index d = rr.rank;
  if (d == 0) return out;
  const MatrixXd H = rr.projector * circumbody.G;
  const MatrixXd G = rr.projector * inbody.G;
  const VectorXd off = rr.projector * (inbody.c - circumbody.c);
  const Index l = H.cols(), k = d - 1;
  double subsets = 1.0;
  for (Index i = 0; i < k; ++i) subsets = subsets * static_cast<double>(l - i) / static_cast<double>(i + 1);
  if (subsets > static_cast<double>(budget.max_facet_subsets))
    throw std::invalid_argument("radius_zonotope_facets: too many facet candidates.");
  const Exponent pd = inbody.p.conjugate();
  out.value = -1.0;
  VectorXd best_y;
  auto consider = [&](const VectorXd& y) {
    const double h = (H.transpose() * y).lpNorm<1>();
    if (h <= 1e-12 * y.norm() * std::max(1.0, H.cwiseAbs().maxCoeff())) return;
    const double v = (vector_norm(G.transpose() * y, pd) + std::abs(y.dot(off))) / h;
    if (v > out.value) {
      out.value = v;
      best_y = y.dot(off) < 0.0 ? VectorXd(-y) : y;
    }
  };
  std::vector<Index> idx(static_cast<size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
  while (true) {
    MatrixXd S(d, k);
    for (Index i = 0; i < k; ++i) S.col(i) = H.col(idx[static_cast<size_t>(i)]);
    if (k == 0) {
      consider(VectorXd::Ones(1));
    } else {
      Eigen::JacobiSVD<MatrixXd> svd(S, Eigen::ComputeFullU);
      const auto& sv = svd.singularValues();
      if (sv(k - 1) > 1e-10 * std::max(sv(0), 1e-300)) consider(svd.matrixU().col(d - 1));
    }
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<size_t>(i)] == l - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<size_t>(i)];
    for (Index j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  }
  if (best_y.size() > 0) {
    VectorXd g = G.transpose() * best_y;
    if (g.norm() > 0.0) out.alpha = dual_vector(g, pd);
  }
  out.value = std::max(out.value, 0.0);
  return out;
}

OracleResult radius_sampling_lower_bound(const Ellipsotope& inbody, const Ellipsotope& circumbody,
                                         const OracleBudget& budget) {
  if (inbody.dimension() != circumbody.dimension())
    throw std::invalid_argument("radius_sampling_lower_bound: inconsistent dimensions.");
  const Index m = inbody.num_generators();
  const Exponent p = inbody.p, pd = p.conjugate();
  EllipsotopeNorm nrm(circumbody.G, circumbody.p);
  const VectorXd offset = inbody.c - circumbody.c;
  OracleResult best;
  best.value = -1.0;
  best.alpha = VectorXd::Zero(m);

  auto ascend = [&](VectorXd a) {
    double val = -1.0;
    for (int it = 0; it <= budget.ascent_iterations; ++it) {
      auto v = nrm.evaluate(inbody.G * a + offset);
      if (!v) {
        val = kInf;
        break;
      }
      if (v->norm <= val * (1.0 + 1e-12) && it > 0) break;
      val = v->norm;
      if (val > best.value) {
        best.value = val;
        best.alpha = a;
      }
      VectorXd g = inbody.G.transpose() * v->dual;
      if (g.norm() == 0.0) break;
      a = dual_vector(g, pd);
    }
    if (val > best.value) {
      best.value = val;
      best.alpha = a;
    }
  };

  for (Index j = 0; j < m && !std::isinf(best.value); ++j) {
    VectorXd e = VectorXd::Zero(m);
    e(j) = 1.0;
    ascend(e);
    if (!std::isinf(best.value)) ascend(-e);
  }
  CounterRng rng(budget.seed);
  for (int s = 0; s < budget.sample_count && !std::isinf(best.value); ++s) {
    VectorXd a = rng.normal_vector(m);
    if (p.is_infinite()) a = a.cwiseSign();
    double nv = vector_norm(a, p);
    if (nv == 0.0) continue;
    ascend(a / nv);
  }
  best.value = std::max(best.value, 0.0);
  return best;
}

BallMaximum quadratic_over_ball(const MatrixXd& Theta, const VectorXd& theta) {
  if (Theta.rows() != theta.size()) throw std::invalid_argument("quadratic_over_ball: inconsistent dimensions.");
  if (!Theta.allFinite() || !theta.allFinite()) throw std::invalid_argument("quadratic_over_ball: entries must be finite.");
  const Index m = Theta.cols();
  BallMaximum out;
  if (m == 0) {
    out.value = theta.norm();
    out.alpha = VectorXd();
    return out;
  }
  const MatrixXd M = Theta.transpose() * Theta;
  const VectorXd b = Theta.transpose() * theta;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
  const VectorXd lam = es.eigenvalues();  // ascending
  const MatrixXd& Q = es.eigenvectors();
  const VectorXd beta = Q.transpose() * b;
  const double lmax = lam(m - 1);
  const double scale = std::max({1.0, lmax, b.norm()});
  const double tiny = 1e-13 * scale;

  // gaps to the top eigenvalue; the secular variable is the shift above it
  VectorXd gap(m);
  for (Index i = 0; i < m; ++i) gap(i) = lmax - lam(i) <= tiny ? 0.0 : lmax - lam(i);
  auto alpha_norm = [&](double delta) {
    double s = 0.0;
    for (Index i = 0; i < m; ++i) s += beta(i) * beta(i) / ((delta + gap(i)) * (delta + gap(i)));
    return std::sqrt(s);
  };

  double top = 0.0;
  for (Index i = 0; i < m; ++i)
    if (gap(i) == 0.0) top += beta(i) * beta(i);
  VectorXd a_eig(m);

  bool hard = std::sqrt(top) <= tiny;
  if (hard) {
    double s = 0.0;
    for (Index i = 0; i < m; ++i) {
      a_eig(i) = gap(i) == 0.0 ? 0.0 : beta(i) / gap(i);
      s += a_eig(i) * a_eig(i);
    }
    if (s <= 1.0) {
      a_eig(m - 1) += std::sqrt(1.0 - s);
    } else {
      hard = false;
    }
  }
  if (!hard) {
    // root of 1/||a(delta)|| - 1 on (0, ||b||]
    double lo = 0.0, hi = b.norm() + tiny;
    double delta = hi;
    for (int it = 0; it < 300; ++it) {
      double na = alpha_norm(delta);
      double phi = 1.0 / na - 1.0;
      if (std::abs(phi) < 1e-15) break;
      if (phi < 0) lo = delta; else hi = delta;
      // d/d delta (1/||a||) = (sum beta^2/(delta+gap)^3) / ||a||^3
      double ds = 0.0;
      for (Index i = 0; i < m; ++i) ds += beta(i) * beta(i) / std::pow(delta + gap(i), 3);
      double next = delta - phi / (ds / (na * na * na));
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - delta) <= 1e-17 * std::max(delta, 1e-300)) break;
      delta = next;
    }
    for (Index i = 0; i < m; ++i) a_eig(i) = beta(i) / (delta + gap(i));
    a_eig /= std::max(1.0, a_eig.norm());
  }
  out.alpha = Q * a_eig;
  out.value = (Theta * out.alpha + theta).norm();
  // a maximiser over the ball lies on the sphere unless the objective is constant
  return out;
}

OperatorNormEstimate opnorm_p_to_1_oracle(const MatrixXd& A, const Exponent& p, const OracleBudget& budget) {
  if (p.is_one()) throw std::invalid_argument("opnorm_p_to_1_oracle: p must exceed 1.");
  OperatorNormOptions opt;
  opt.max_enumeration_columns = budget.max_enumeration_columns;
  opt.require_exact = p.is_infinite();
  opt.seed = budget.seed;
  return operator_norm(A, p, Exponent::one(), opt);
}

}  // namespace ellipsotope
