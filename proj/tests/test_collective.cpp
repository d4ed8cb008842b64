#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "phi4trap/collective.hpp"
#include "phi4trap/model.hpp"
#include "phi4trap/spectra.hpp"
#include "phi4trap/stationary.hpp"

using namespace phi4trap;

namespace {

SimParams params(double omega = 0.15) {
    SimParams p;
    p.omega = omega;
    return p;
}

const StationaryProfile& ground_015() {
    static StationaryProfile g = solve_ground_state(params());
    return g;
}

struct PairSetup {
    SpectrumResult spec;
    std::vector<double> chi1;
    CCTables tables;
};

const PairSetup& pair_setup() {
    static PairSetup s = [] {
        auto spec = linearization_spectrum(solve_kink(params(), +1), 0.04, true);
        auto chi1 = extract_chi1(spec);
        auto tables = build_pair_tables(ground_015(), chi1, spec.grid, 12.0, 0.05);
        return PairSetup{std::move(spec), std::move(chi1), std::move(tables)};
    }();
    return s;
}

double rel_drift(const CCTrajectory& tr) {
    const double e0 = tr.samples.front().E;
    double d = 0.0;
    for (const auto& s : tr.samples) d = std::max(d, std::abs(s.E - e0));
    return d / std::max(1.0, std::abs(e0));
}

}  // namespace

TEST_SUITE("collective") {

TEST_CASE("homogeneous tables are flat") {
    // at omega = 0 the medium is uniform: a0 = 2/3 and a1 is X-independent,
    // so the reduced kink feels no force
    auto ground = solve_ground_state(params(0.0));
    auto t = build_single_tables(ground, 6.0, 0.05);
    const int a0 = t.column("a0"), a1 = t.column("a1");
    for (double X : {-5.0, -1.3, 0.0, 2.7, 5.5}) {
        CHECK(t.value(a0, X) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
        CHECK(std::abs(t.value(a1, X) - t.value(a1, 0.0)) < 1e-8);
        CHECK(std::abs(t.slope(a1, X)) < 1e-8);
    }

    auto tr = integrate_cc_single(t, 0.0, 0.3, 10.0);
    for (const auto& s : tr.samples)
        CHECK(s.X == doctest::Approx(0.3 * s.t).epsilon(1e-9));
}

TEST_CASE("single tables at omega 0.15") {
    auto t = build_single_tables(ground_015(), 12.0, 0.05);
    const int a0 = t.column("a0"), a1 = t.column("a1");

    CHECK(t.value(a0, 0.0) > 0.5);
    CHECK(t.value(a0, 0.0) < 0.7);
    for (double X = -12.0; X <= 12.0; X += 0.6) CHECK(t.value(a0, X) > 0.0);

    // barrier at the center
    CHECK(std::abs(t.slope(a1, 0.0)) < 1e-6);
    CHECK(t.value(a1, 0.0) > t.value(a1, 0.05));
    CHECK(t.value(a1, 0.0) > t.value(a1, -0.05));
    // a0 decays toward the TF edge
    CHECK(t.value(a0, 11.5) < 0.5 * t.value(a0, 0.0));
}

TEST_CASE("coefficients are even in X") {
    for (double X : {0.4, 1.3, 3.7}) {
        auto plus = cc_single_coefficients(ground_015(), X);
        auto minus = cc_single_coefficients(ground_015(), -X);
        CHECK(std::abs(plus[0] - minus[0]) < 1e-8);
        CHECK(std::abs(plus[1] - minus[1]) < 1e-8);
    }
}

TEST_CASE("table range is validated") {
    CHECK_THROWS_AS(build_single_tables(ground_015(), 28.0, 0.05), std::invalid_argument);
}

TEST_CASE("interpolation is consistent at and between knots") {
    auto t = build_single_tables(ground_015(), 12.0, 0.05);
    const int a1 = t.column("a1");
    // knot values reproduced
    CHECK(t.value(a1, 0.35) == doctest::Approx(t.values(a1)[t.X().size() / 2 + 7]).epsilon(1e-12));
    // adjacent-sample jumps bounded by the derivative scale
    double max_der = 0.0;
    for (double d : t.derivs(a1)) max_der = std::max(max_der, std::abs(d));
    for (std::size_t k = 0; k + 1 < t.X().size(); ++k)
        CHECK(std::abs(t.values(a1)[k + 1] - t.values(a1)[k]) <= 10.0 * t.x_step() * max_der);
}

TEST_CASE("reduced kink conserves its energy") {
    auto t = build_single_tables(ground_015(), 12.0, 0.05);
    auto tr = integrate_cc_single(t, -3.0, 0.0, 20.0);
    CHECK(rel_drift(tr) <= 1e-6);
    // released off center, it slides outward monotonically
    CHECK(tr.samples.back().X < -8.0);
}

TEST_CASE("kink at the origin stays put") {
    auto t = build_single_tables(ground_015(), 12.0, 0.05);
    auto tr = integrate_cc_single(t, 0.0, 0.0, 50.0);
    for (const auto& s : tr.samples) CHECK(std::abs(s.X) < 1e-12);
}

TEST_CASE("reduced growth rate is consistent with the PDE eigenvalue") {
    auto t = build_single_tables(ground_015(), 12.0, 0.05);
    const int a0 = t.column("a0"), a1 = t.column("a1");
    const double h = t.x_step();
    const double a1pp =
        (t.value(a1, h) - 2.0 * t.value(a1, 0.0) + t.value(a1, -h)) / (h * h);
    const double rate = std::sqrt(-a1pp / (2.0 * t.value(a0, 0.0)));
    CHECK(std::abs(rate - 0.13) / 0.13 < 0.30);
}

TEST_CASE("pair coefficient basics") {
    const auto& s = pair_setup();
    const auto& t = s.tables;
    const int iI = t.column("I"), iQ = t.column("Q");
    for (double X = -11.5; X <= 11.5; X += 0.7) {
        CHECK(t.value(iI, X) > 0.0);
        CHECK(t.value(iQ, X) > 0.0);
    }
    // for well-separated kinks the chi bumps stop overlapping and Q -> 1
    for (double X : {4.0, 5.0, 6.0, 7.0, 8.0})
        CHECK(t.value(iQ, X) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("pair coefficient parity and the even table extension") {
    const auto& s = pair_setup();
    auto plus = cc_pair_coefficients(ground_015(), s.chi1, s.spec.grid, 1.7);
    auto minus = cc_pair_coefficients(ground_015(), s.chi1, s.spec.grid, -1.7);
    // I and Q are even integrals of the ansatz; U is not (negative X drives
    // the raw ansatz into its overshoot branch), which is why the tables are
    // built on X >= 0 and mirrored
    CHECK(std::abs(plus[0] - minus[0]) < 1e-8);   // I
    CHECK(std::abs(plus[4] - minus[4]) < 1e-8);   // Q
    CHECK(std::abs(plus[1] - minus[1]) > 1.0);    // U: raw branch differs

    const auto& t = s.tables;
    const int M = static_cast<int>(t.X().size());
    for (int c = 0; c < 6; ++c)
        for (int k = 0; k < M; ++k)
            CHECK(t.values(c)[k] == t.values(c)[M - 1 - k]);
}

TEST_CASE("pair potential has its barrier near x_cr") {
    const auto& t = pair_setup().tables;
    const int iU = t.column("U");
    // stationary point of U(X) on the positive axis
    double best_x = -1.0;
    for (double X = 0.5; X < 5.0; X += 0.01) {
        if (t.slope(iU, X) * t.slope(iU, X + 0.01) <= 0.0) {
            best_x = X + 0.005;
            break;
        }
    }
    REQUIRE(best_x > 0.0);
    CHECK(std::abs(best_x - 1.6907) < 0.3);
}

TEST_CASE("reduced pair conserves its energy") {
    const auto& t = pair_setup().tables;
    auto tr = integrate_cc_pair(t, 2.0, 0.7, 30.0);
    CHECK(rel_drift(tr) <= 1e-5);
    CHECK(tr.samples.size() > 100);
}

TEST_CASE("pair run from rest inside x_cr contracts") {
    const auto& t = pair_setup().tables;
    auto tr = integrate_cc_pair(t, 1.4, 0.0, 30.0);
    bool collided = false;
    for (const auto& s : tr.samples)
        if (std::abs(s.X) < 0.5) collided = true;
    CHECK(collided);
}

TEST_CASE("near-critical pair capture improves with the speed offset") {
    // at x0=1.607, v=0.13 the full PDE forms a bion; the reduced model only
    // captures when the launch speed is lowered by 0.02, which is why the
    // offset is exposed as an explicit parameter
    const auto& t = pair_setup().tables;
    auto dips = [&](double v) {
        auto tr = integrate_cc_pair(t, 1.607, v, 150.0);
        int n = 0;
        bool in = false;
        for (const auto& s : tr.samples) {
            const bool col = std::abs(s.X) <= 0.5;
            if (col && !in) ++n;
            in = col;
        }
        return n;
    };
    const int plain = dips(0.13), offset = dips(0.13 - 0.02);
    CHECK(offset >= 4);
    CHECK(plain < offset);
}

TEST_CASE("singular mass matrix is reported") {
    std::vector<double> X(9);
    for (int k = 0; k < 9; ++k) X[k] = (k - 4) * 0.1;
    const std::vector<double> one(9, 1.0);
    // C^2 == I Q makes the mass matrix singular everywhere
    CCTables bad(X, {"I", "U", "F", "K", "Q", "C"}, {one, one, one, one, one, one}, 0.15);
    CHECK_THROWS_AS(integrate_cc_pair(bad, 0.0, 0.1, 1.0), SingularMassError);
}

TEST_CASE("trajectories truncate at the table edge") {
    auto t = build_single_tables(ground_015(), 6.0, 0.05);
    auto tr = integrate_cc_single(t, -3.0, 0.0, 50.0);
    CHECK(tr.exited_range);
    CHECK(tr.end_time < 50.0);
    CHECK(std::abs(tr.samples.back().X) <= 6.0 + 1e-9);
}

}  // TEST_SUITE
