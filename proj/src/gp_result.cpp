#include "qgp/gp_result.hpp"

#include <cmath>

namespace qgp {

double principal_value(double angle) noexcept {
    double r = std::remainder(angle, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    return r;
}

double wrap_positive(double angle) noexcept {
    double r = std::fmod(angle, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

double circular_difference(double a, double b) noexcept {
    return principal_value(a - b);
}

}  // namespace qgp
