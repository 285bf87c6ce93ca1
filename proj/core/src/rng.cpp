#include "ellipsotope/rng.hpp"

#include <cmath>
#include <numbers>

namespace ellipsotope {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::result_type CounterRng::operator()() {
  return mix(mix(key_) ^ (counter_++ * 0xd1b54a32d192ed03ULL));
}

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double CounterRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller keeps the stream independent of library distribution internals
  double u1 = 0.0;
  while (u1 <= 0.0) u1 = uniform();
  double u2 = uniform();
  double rad = std::sqrt(-2.0 * std::log(u1));
  spare_ = rad * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return rad * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::VectorXd CounterRng::normal_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

Eigen::MatrixXd CounterRng::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal();
  return m;
}

Eigen::VectorXd CounterRng::uniform_vector(Eigen::Index n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
  return v;
}

Eigen::VectorXd CounterRng::sphere(Eigen::Index n) {
  Eigen::VectorXd v;
  double nrm = 0.0;
  do {
    v = normal_vector(n);
    nrm = v.norm();
  } while (nrm < 1e-12);
  return v / nrm;
}

int CounterRng::integer(int lo, int hi) {
  auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>((*this)() % span);
}

CounterRng CounterRng::split(std::uint64_t stream) const { return CounterRng(mix(key_ ^ mix(stream + 0x632be59bd9b4e019ULL))); }

}  // namespace ellipsotope
