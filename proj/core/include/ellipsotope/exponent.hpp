#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

namespace ellipsotope {

// Norm exponent in [1, inf]. Infinity is a distinct kind, never a large float.
// The conjugate value is carried along so conjugate() is an exact involution.
class Exponent {
 public:
  enum class Kind { one, finite, infinity };

  Exponent() : Exponent(Kind::one, 1.0, 0.0) {}
  explicit Exponent(double p);

  static Exponent one() { return Exponent(Kind::one, 1.0, 0.0); }
  static Exponent infinity() { return Exponent(Kind::infinity, 0.0, 1.0); }
  static Exponent two() { return Exponent(2.0); }

  Kind kind() const { return kind_; }
  bool is_one() const { return kind_ == Kind::one; }
  bool is_infinite() const { return kind_ == Kind::infinity; }
  bool is_finite() const { return kind_ != Kind::infinity; }
  bool is_two() const { return kind_ == Kind::finite && value_ == 2.0; }

  // +inf for the infinity kind
  double value() const;
  // 1/p, exactly 0 for infinity
  double reciprocal() const;
  Exponent conjugate() const;

  std::string to_string() const;

  friend bool operator==(const Exponent& a, const Exponent& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::finite || a.value_ == b.value_);
  }

 private:
  Exponent(Kind kind, double value, double conj_value)
      : kind_(kind), value_(value), conj_value_(conj_value) {}

  Kind kind_;
  // finite value; for infinity unused
  double value_;
  // value of the conjugate exponent, kept so the pair stays exact
  double conj_value_;
};

Exponent holder_conjugate(const Exponent& p);

// p/(p-2) for p >= 2, with 2 -> inf and inf -> 1
Exponent weight_norm_exponent(const Exponent& p);

// Continued-fraction rationalisation; nullopt when no fraction with
// denominator <= max_den reproduces x to rel_tol.
std::optional<std::pair<std::int64_t, std::int64_t>> as_rational(double x, std::int64_t max_den = 1000,
                                                                 double rel_tol = 1e-12);

}  // namespace ellipsotope
