#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace decoric {

// Non-negative dyadic rational num / 2^shift, kept normalised (num odd or shift 0).
class FailCounter {
 public:
  FailCounter() = default;
  static FailCounter from_int(std::uint64_t v) { return FailCounter(v, 0); }

  void reset() { num_ = 0; shift_ = 0; }
  void increment();  // += 1
  void halve();

  bool at_least(std::uint64_t threshold) const;  // value >= threshold
  double value() const;
  std::uint64_t numerator() const { return num_; }
  std::uint32_t shift() const { return shift_; }
  std::string str() const;

  bool operator==(const FailCounter&) const = default;
  std::strong_ordering operator<=>(const FailCounter& o) const;

 private:
  FailCounter(std::uint64_t n, std::uint32_t s) : num_(n), shift_(s) { normalise(); }
  void normalise();
  std::uint64_t num_ = 0;
  std::uint32_t shift_ = 0;
};

}  // namespace decoric
