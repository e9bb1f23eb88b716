#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hobis/boundary.hpp"

using namespace hobis;
using Catch::Approx;

namespace {

BarrierContract down_contract(double k, double b, double t, double s0) {
    BarrierContract c;
    c.strike = k;
    c.expiry = t;
    c.spot = s0;
    c.geometry = BarrierGeometry::down_and_out(b);
    return c;
}

}  // namespace

TEST_CASE("drift of the log-price", "[boundary]") {
    CHECK(drift_star({0.10, 0.0, 0.25}) == Approx(0.06875).margin(1e-15));
    CHECK(drift_star({0.05, 0.0, 0.20}) == Approx(0.03).margin(1e-15));
    CHECK(drift_star({0.04, 0.04, 1e-9}) == Approx(0.0).margin(1e-15));
}

TEST_CASE("no-breach probability", "[boundary]") {
    // S0 = B with zero log-drift: a* = 0
    CHECK(breach_probability_complement(90, 90, 1.0, {0.02, 0.0, 0.20}) ==
          Approx(0.5).margin(1e-12));
    // far above the barrier
    CHECK(breach_probability_complement(1000, 90, 1.0, {0.10, 0.0, 0.25}) ==
          Approx(1.0).margin(1e-12));
    CHECK_THROWS_AS(breach_probability_complement(95, 90, 0.0, {0.1, 0.0, 0.25}),
                    std::domain_error);
    // increasing in S0
    double prev = 0.0;
    for (double s0 = 91; s0 < 140; s0 += 1.0) {
        double v = breach_probability_complement(s0, 90, 1.0, {0.10, 0.0, 0.25});
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("no-breach probability vs Monte Carlo of terminal draws",
          "[boundary][oracle]") {
    const MarketParams m{0.10, 0.0, 0.25};
    const double analytic = breach_probability_complement(95, 90, 1.0, m);
    // independent check: 1e7 terminal lognormal draws
    std::mt19937_64 rng(424242);
    std::normal_distribution<double> z(0.0, 1.0);
    const double mu_t = drift_star(m) * 1.0;
    const double vol_t = m.sigma;
    long hits = 0;
    const long n = 10'000'000;
    for (long i = 0; i < n; ++i)
        if (std::log(95.0 / 90.0) + mu_t + vol_t * z(rng) > 0.0) ++hits;
    const double mc = static_cast<double>(hits) / n;
    CHECK(analytic == Approx(mc).margin(5e-4));
    // arithmetic anchor
    CHECK(analytic ==
          Approx(norm_cdf((std::log(95.0 / 90.0) + 0.06875) / 0.25)).margin(1e-15));
}

TEST_CASE("turning point of the cutoff objective", "[boundary]") {
    CHECK_FALSE(turning_point(0.0, 0.25, 4.2).has_value());
    CHECK(*turning_point(0.03, 0.20, 4.2) == Approx(196.0).margin(1e-10));
    CHECK(*turning_point(0.9, 0.30, 6.0) == Approx(1.0).margin(1e-12));
    // sign of the drift does not matter
    CHECK(*turning_point(-0.03, 0.20, 4.2) == Approx(196.0).margin(1e-10));
}

TEST_CASE("published cutoff gaps", "[boundary]") {
    // first parameter set: gap 0.4125, S_m = 271.906
    auto cut1 = cutoff(down_contract(150, 180, 0.25, 200), {0.05, 0.0, 0.20},
                       CutoffConfig{4.2});
    CHECK(cut1.x_m - std::log(180.0 / 150.0) == Approx(0.4125).margin(1e-4));
    CHECK(cut1.s_m == Approx(271.906).margin(2e-3));
    CHECK_FALSE(cut1.t_p_used);  // t_p = 196 years >= T
    CHECK(cut1.side == CutoffSide::Upper);

    // second set (negative drift forces the full-expiry branch): gap 2.0112
    auto cut2 =
        cutoff(down_contract(150, 180, 1.0, 200), {0.07, 0.0, 0.45}, CutoffConfig{4.4});
    CHECK(cut2.x_m - std::log(180.0 / 150.0) == Approx(2.0112).margin(1e-4));
    CHECK(cut2.s_m == Approx(1345.08).margin(2e-2));
    CHECK_FALSE(cut2.t_p_used);
}

TEST_CASE("turning-point branch engages for large drift", "[boundary]") {
    // mu* = 0.9, sigma = 0.3, delta = 6: t_p = 1 < T = 2
    BarrierContract c = down_contract(100, 90, 2.0, 95);
    const MarketParams m{0.945, 0.0, 0.30};
    REQUIRE(drift_star(m) == Approx(0.9).margin(1e-12));
    auto cut = cutoff(c, m, CutoffConfig{6.0});
    CHECK(cut.t_p_used);
    // x_m = x_b + delta sigma sqrt(t_p) - mu* t_p with t_p = 1
    CHECK(cut.x_m == Approx(std::log(0.9) + 6.0 * 0.3 - 0.9).margin(1e-12));
}

TEST_CASE("sigma -> 0 endpoint", "[boundary]") {
    // with negative drift and tiny sigma, x_m = x_b - mu* T
    const MarketParams m{0.0, 0.05, 1e-9};
    auto cut = cutoff(down_contract(100, 90, 1.0, 95), m, CutoffConfig{4.2});
    CHECK(cut.x_m == Approx(std::log(0.9) + 0.05).margin(1e-6));
}

TEST_CASE("cutoff is monotone in delta", "[boundary][property]") {
    double prev = 0.0;
    for (double delta = 3.8; delta < 6.4; delta += 0.2) {
        auto cut = cutoff(down_contract(100, 90, 1.0, 95), {0.10, 0.0, 0.25},
                          CutoffConfig{delta});
        const double gap = cut.x_m - std::log(0.9);
        CHECK(gap > prev);
        prev = gap;
    }
    CHECK_THROWS_AS(cutoff(down_contract(100, 90, 1, 95), {0.1, 0.0, 0.25},
                           CutoffConfig{3.0}),
                    std::invalid_argument);
}

TEST_CASE("cutoff is conservative at every earlier time", "[boundary][property]") {
    const MarketParams m{0.10, 0.0, 0.25};
    auto c = down_contract(100, 90, 1.0, 95);
    const CutoffConfig cfg{4.2};
    auto cut = cutoff(c, m, cfg);
    for (int i = 1; i <= 40; ++i) {
        const double t = c.expiry * i / 40.0;
        CHECK(breach_probability_complement(cut.s_m, 90.0, t, m) >=
              norm_cdf(cfg.delta) - 1e-12);
    }
}

TEST_CASE("worthless barrier prices as vanilla at working accuracy",
          "[boundary][property]") {
    const MarketParams m{0.10, 0.0, 0.25};
    auto cut = cutoff(down_contract(100, 90, 1.0, 95), m, CutoffConfig{4.2});
    const double dao = down_and_out_call(cut.s_m, 100, 90, 1.0, m.r, m.q, m.sigma, 0);
    const double van = vanilla_call(cut.s_m, 100, 1.0, m.r, m.q, m.sigma);
    CHECK(std::abs(dao - van) <= 1e-4);
}

TEST_CASE("worthless-barrier predicate includes the boundary", "[boundary]") {
    auto cut = cutoff(down_contract(150, 180, 0.25, 200), {0.05, 0.0, 0.20},
                      CutoffConfig{4.2});
    CHECK(barrier_worthless(cut.s_m, cut));
    CHECK(barrier_worthless(cut.s_m + 10, cut));
    CHECK_FALSE(barrier_worthless(180.0, cut));
    CHECK_FALSE(barrier_worthless(cut.s_m - 0.01, cut));

    BarrierContract up;
    up.strike = 100;
    up.expiry = 0.5;
    up.spot = 100;
    up.geometry = BarrierGeometry::up_and_out(110);
    auto ucut = cutoff(up, {0.10, 0.0, 0.20}, CutoffConfig{4.2});
    CHECK(ucut.side == CutoffSide::Lower);
    CHECK(ucut.x_m < std::log(1.10));
    CHECK(barrier_worthless(ucut.s_m, ucut));
    CHECK(barrier_worthless(ucut.s_m * 0.5, ucut));
    CHECK_FALSE(barrier_worthless(105.0, ucut));
}

TEST_CASE("double-barrier classification", "[boundary]") {
    BarrierContract c;
    c.strike = 100;
    c.expiry = 0.5;
    c.spot = 100;
    const MarketParams m{0.10, 0.0, 0.20};

    // both barriers matter for the tight corridor
    c.geometry = BarrierGeometry::double_knock_out(95, 125);
    CHECK(classify_double(c, m).kind == DoubleClass::BothActive);

    // barriers pushed far away
    c.geometry = BarrierGeometry::double_knock_out(1e-3, 1e6);
    CHECK(classify_double(c, m).kind == DoubleClass::NeitherActive);

    // distant upper barrier drops out at delta = 4.2 (its worthless cutoff
    // sits just above the spot), leaving the lower barrier
    c.geometry = BarrierGeometry::double_knock_out(75, 185);
    const MarketParams m7{0.10, 0.045, 0.20};
    auto cls = classify_double(c, m7, CutoffConfig{4.2});
    CHECK(cls.kind == DoubleClass::LowerOnly);
    CHECK(cls.upper_cutoff.s_m >= 100.0);

    // mirrored: lower barrier unreachable, upper active
    c.geometry = BarrierGeometry::double_knock_out(20, 110);
    CHECK(classify_double(c, m).kind == DoubleClass::UpperOnly);
}
