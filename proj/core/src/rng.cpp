#include "nlishape/rng.hpp"

#include <cmath>
#include <numbers>

namespace nlishape {

std::pair<double, double> Rng::next_gaussian_pair() {
    // u1 in (0,1] so the log is finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

} // namespace nlishape
