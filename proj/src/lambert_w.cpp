#include "embcomm/lambert_w.hpp"

#include "embcomm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace embcomm {

namespace {

constexpr double kInvE = 0.36787944117144232159552377016146087;
constexpr double kE = 2.71828182845904523536028747135266250;

double initial_guess(double x) {
    // Branch-point expansion in p = sqrt(2 (e x + 1)).
    if (x < -0.32) {
        const double p = std::sqrt(std::max(0.0, 2.0 * (kE * x + 1.0)));
        return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0));
    }
    if (x < 1.0) {
        return x * (1.0 + x * (-1.0 + x * 1.5));
    }
    if (x < 3.0) {
        return 0.5 * std::log1p(x) + 0.2 * std::log1p(x) * std::log1p(x) / (1.0 + 0.1 * x);
    }
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    return l1 - l2 + l2 / l1;
}

} // namespace

double lambert_w0(double x) {
    if (std::isnan(x) || x < -kInvE) {
        throw DomainError("lambert_w0: argument below -1/e");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return x;
    }
    if (x == -kInvE) {
        return -1.0;
    }

    double w = initial_guess(x);
    for (int iter = 0; iter < 64; ++iter) {
        // Halley step on f(w) = w e^w - x.
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) {
            break;
        }
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if (denom == 0.0 || !std::isfinite(denom)) {
            break;
        }
        double next = w - f / denom;
        if (next < -1.0) {
            next = 0.5 * (w - 1.0);
        }
        const double change = std::abs(next - w);
        w = next;
        if (change <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(w))) {
            break;
        }
    }
    return w;
}

} // namespace embcomm
