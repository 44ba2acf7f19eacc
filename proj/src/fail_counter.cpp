#include "decoric/fail_counter.hpp"

#include <cmath>
#include <sstream>

namespace decoric {

namespace {
// Past this many halvings the value is far below any threshold and the
// numerator would overflow on increment, so it collapses to zero.
constexpr std::uint32_t kMaxShift = 48;
}

void FailCounter::normalise() {
  if (num_ == 0) {
    shift_ = 0;
    return;
  }
  while (shift_ > 0 && (num_ & 1u) == 0) {
    num_ >>= 1;
    --shift_;
  }
}

void FailCounter::increment() {
  num_ += std::uint64_t{1} << shift_;
  normalise();
}

void FailCounter::halve() {
  if (num_ == 0) return;
  if (shift_ >= kMaxShift) {
    reset();
    return;
  }
  ++shift_;
  normalise();
}

bool FailCounter::at_least(std::uint64_t threshold) const { return (num_ >> shift_) >= threshold; }

double FailCounter::value() const { return std::ldexp(static_cast<double>(num_), -static_cast<int>(shift_)); }

std::string FailCounter::str() const {
  std::ostringstream os;
  if (shift_ == 0) os << num_;
  else os << num_ << "/" << (std::uint64_t{1} << shift_);
  return os.str();
}

std::strong_ordering FailCounter::operator<=>(const FailCounter& o) const {
  const std::uint32_t s = std::max(shift_, o.shift_);
  const unsigned __int128 a = static_cast<unsigned __int128>(num_) << (s - shift_);
  const unsigned __int128 b = static_cast<unsigned __int128>(o.num_) << (s - o.shift_);
  return a <=> b;
}

}  // namespace decoric
