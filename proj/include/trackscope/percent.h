#ifndef TRACKSCOPE_PERCENT_H_
#define TRACKSCOPE_PERCENT_H_

#include <cstdint>
#include <string>

namespace trackscope {

// A percentage held in hundredths of a percent so that every rendering is
// reproducible. Rounding is half-up throughout.
class Percent {
 public:
  constexpr Percent() = default;

  // 100 * part / whole, rounded half-up to two decimals. whole must be > 0.
  static constexpr Percent Of(uint64_t part, uint64_t whole) {
    return Percent(static_cast<int64_t>((20000 * part + whole) / (2 * whole)));
  }
  static constexpr Percent FromBasisPoints(int64_t hundredths) {
    return Percent(hundredths);
  }

  constexpr int64_t hundredths() const { return hundredths_; }
  constexpr int64_t RoundedInteger() const { return (hundredths_ + 50) / 100; }
  double value() const { return static_cast<double>(hundredths_) / 100.0; }

  // "3.24"
  std::string ToFixed2() const {
    std::string frac = std::to_string(hundredths_ % 100);
    if (frac.size() < 2) frac.insert(0, "0");
    return std::to_string(hundredths_ / 100) + "." + frac;
  }
  // "78"
  std::string ToInteger() const { return std::to_string(RoundedInteger()); }

  constexpr auto operator<=>(const Percent&) const = default;

 private:
  constexpr explicit Percent(int64_t hundredths) : hundredths_(hundredths) {}
  int64_t hundredths_ = 0;
};

}  // namespace trackscope

#endif  // TRACKSCOPE_PERCENT_H_
