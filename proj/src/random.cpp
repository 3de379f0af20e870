#include "psk/random.hpp"

#include <algorithm>

namespace psk {

std::vector<Rational> Rng::distinct_nodes(int count, long num, long den) {
  std::vector<Rational> out;
  while (static_cast<int>(out.size()) < count) {
    Rational x = positive_rational(num, den);
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace psk
