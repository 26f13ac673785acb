// Extended-precision G-function built literally from Ω_m and the three-term
// recurrence for f_m (valid for U != 0, where the recurrence is not 0/0).
#pragma once

#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using real50 = boost::multiprecision::cpp_bin_float_50;

struct LiteralModel {
    real50 delta, u, g, w;

    LiteralModel(double d, double u_, double g_) : delta(d), u(u_), g(g_) {
        w = g / sqrt(real50(1) - u * u / 4);
    }

    [[nodiscard]] real50 gamma(int m) const { return real50(m) + w * w; }

    [[nodiscard]] real50 omega(int m, const real50& e) const {
        const real50 gm = gamma(m);
        const real50 num = u * w / (g + w) * (gm - e + 2 * g * w) - (delta + u * gm);
        const real50 den = u * w / (2 * (g + w)) * (delta + u * gm) - 2 * (gm - e - 2 * g * w);
        return num / den;
    }

    /// f_0 .. f_N with f_0 = 1.
    [[nodiscard]] std::vector<real50> f(const real50& e, int order) const {
        std::vector<real50> out{real50(1)};
        for (int m = 1; m <= order; ++m) {
            const real50 den = m * (u * w + 2 * (g - w) * omega(m, e));
            const real50 a = (delta + u * gamma(m - 1) - 2 * (gamma(m - 1) - e - 2 * g * w) * omega(m - 1, e)) / den;
            real50 next = a * out[m - 1];
            if (m >= 2) next -= (2 * (g - w) * omega(m - 2, e) + u * w) / den * out[m - 2];
            out.push_back(next);
        }
        return out;
    }

    /// Σ (Ω_n - s) f_n wⁿ; s = +1 for even parity, -1 for odd.
    [[nodiscard]] real50 g_function(const real50& e, int s, int order = 250) const {
        const auto fs = f(e, order);
        real50 total = 0;
        real50 wn = 1;
        for (int n = 0; n <= order; ++n) {
            total += (omega(n, e) - s) * fs[n] * wn;
            wn *= w;
        }
        return total;
    }
};

}  // namespace oracle
