#pragma once

#include <compare>
#include <ostream>

namespace lyz {

// Element of R ∪ {+inf}. Infinity is a tag, not a large float.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT(implicit)

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_finite() const { return !infinite_; }
  constexpr bool is_infinite() const { return infinite_; }

  // Throws DomainError for +inf.
  double value() const;
  // Finite value or the supplied fallback.
  constexpr double value_or(double fallback) const { return infinite_ ? fallback : value_; }
  // IEEE view (+inf for the infinite element), for numeric kernels.
  double as_double() const;

  friend constexpr ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return ExtendedReal(a.value_ + b.value_);
  }
  // Scaling by a positive real keeps +inf.
  friend constexpr ExtendedReal operator*(double s, ExtendedReal a) {
    if (a.infinite_) return infinity();
    return ExtendedReal(s * a.value_);
  }

  friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend constexpr std::partial_ordering operator<=>(ExtendedReal a, ExtendedReal b) {
    if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
    if (a.infinite_) return std::partial_ordering::greater;
    if (b.infinite_) return std::partial_ordering::less;
    return a.value_ <=> b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, ExtendedReal a);

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

}  // namespace lyz
