#include "ellipsotope/exponent.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ellipsotope {

Exponent::Exponent(double p) {
  if (std::isnan(p) || p < 1.0) throw std::invalid_argument("Exponent: value must lie in [1, inf].");
  if (std::isinf(p)) {
    *this = infinity();
  } else if (p == 1.0) {
    *this = one();
  } else {
    kind_ = Kind::finite;
    value_ = p;
    conj_value_ = p / (p - 1.0);
  }
}

double Exponent::value() const {
  switch (kind_) {
    case Kind::one: return 1.0;
    case Kind::infinity: return std::numeric_limits<double>::infinity();
    default: return value_;
  }
}

double Exponent::reciprocal() const {
  switch (kind_) {
    case Kind::one: return 1.0;
    case Kind::infinity: return 0.0;
    default: return 1.0 / value_;
  }
}

Exponent Exponent::conjugate() const {
  switch (kind_) {
    case Kind::one: return infinity();
    case Kind::infinity: return one();
    default: {
      if (value_ == 2.0) return *this;
      Exponent e = *this;
      std::swap(e.value_, e.conj_value_);
      return e;
    }
  }
}

std::string Exponent::to_string() const {
  if (is_infinite()) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << value();
  return os.str();
}

Exponent holder_conjugate(const Exponent& p) { return p.conjugate(); }

Exponent weight_norm_exponent(const Exponent& p) {
  if (p.is_infinite()) return Exponent::one();
  double v = p.value();
  if (v < 2.0) throw std::invalid_argument("weight_norm_exponent: exponent must be at least 2.");
  if (v == 2.0) return Exponent::infinity();
  return Exponent(v / (v - 2.0));
}

std::optional<std::pair<std::int64_t, std::int64_t>> as_rational(double x, std::int64_t max_den, double rel_tol) {
  if (!std::isfinite(x) || x <= 0) return std::nullopt;
  // convergents h/k of the continued fraction of x
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    double a = std::floor(r);
    if (a > 1e15) break;
    auto ai = static_cast<std::int64_t>(a);
    std::int64_t h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) <= rel_tol * x) return std::make_pair(h1, k1);
    double frac = r - a;
    if (frac <= 0) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

}  // namespace ellipsotope
