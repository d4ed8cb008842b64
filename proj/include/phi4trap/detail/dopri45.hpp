#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace phi4trap::detail {

/// Embedded Dormand-Prince 5(4) step with the classic coefficients.
/// State is a fixed-size array; Rhs is f(t, y, dydt) returning false to
/// abort (out of domain). Error control uses a mixed abs/rel RMS norm.
template <std::size_t N>
struct Dopri45 {
    double rtol = 1e-9;
    double atol = 1e-11;
    double h = 1e-4;
    double h_min = 1e-14;
    double h_max = 0.1;

    using State = std::array<double, N>;

    enum class StepResult { accepted, rejected, rhs_abort, underflow };

    /// One controlled attempt from (t, y) with the current h; on acceptance
    /// t, y are advanced. k1 is the derivative at the incoming point (FSAL).
    template <typename Rhs>
    StepResult step(const Rhs& rhs, double& t, State& y, State& k1, bool have_k1) {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                                a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

        State k2, k3, k4, k5, k6, k7, yt, ynew;
        if (!have_k1 && !rhs(t, y, k1)) return StepResult::rhs_abort;

        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
        if (!rhs(t + c2 * h, yt, k2)) return StepResult::rhs_abort;
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        if (!rhs(t + c3 * h, yt, k3)) return StepResult::rhs_abort;
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        if (!rhs(t + c4 * h, yt, k4)) return StepResult::rhs_abort;
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        if (!rhs(t + c5 * h, yt, k5)) return StepResult::rhs_abort;
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                a65 * k5[i]);
        if (!rhs(t + h, yt, k6)) return StepResult::rhs_abort;
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                  b6 * k6[i]);
        if (!rhs(t + h, ynew, k7)) return StepResult::rhs_abort;

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / N);

        const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
        if (err <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;  // first-same-as-last
            h = std::min(h * fac, h_max);
            return StepResult::accepted;
        }
        h *= fac;
        if (h < h_min) return StepResult::underflow;
        return StepResult::rejected;
    }
};

}  // namespace phi4trap::detail
