#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>

namespace ellipsotope {

// Counter-based generator: the i-th output is a fixed mix of (key, i).
// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key = 0, std::uint64_t counter = 0) : key_(key), counter_(counter) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  double normal();
  Eigen::VectorXd normal_vector(Eigen::Index n);
  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);
  Eigen::VectorXd uniform_vector(Eigen::Index n, double lo, double hi);
  // uniform on the unit 2-sphere
  Eigen::VectorXd sphere(Eigen::Index n);
  int integer(int lo, int hi);  // inclusive range

  // independent stream derived from this key
  CounterRng split(std::uint64_t stream) const;

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ellipsotope
