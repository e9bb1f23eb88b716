#include <catch2/catch_amalgamated.hpp>

#include "hobis/contracts.hpp"

using namespace hobis;

namespace {

BarrierContract table1_contract(double s0 = 95.0) {
    BarrierContract c;
    c.strike = 100.0;
    c.expiry = 1.0;
    c.spot = s0;
    c.geometry = BarrierGeometry::down_and_out(90.0);
    c.rebate = 0.0;
    c.monitoring = MonitoringPolicy::continuous();
    return c;
}

MarketParams table1_market() { return {0.10, 0.0, 0.25}; }

}  // namespace

TEST_CASE("benchmark down-and-out contract validates", "[contracts]") {
    auto res = validate(table1_contract(), table1_market());
    CHECK(res.ok());
    CHECK(res.message().empty());
}

TEST_CASE("spot on the barrier is rejected for continuous monitoring", "[contracts]") {
    auto c = table1_contract(90.0);
    auto res = validate(c, table1_market());
    REQUIRE_FALSE(res.ok());
    CHECK(res.message().find("S0 must exceed B") != std::string::npos);
}

TEST_CASE("spot beyond the barrier is fine for discrete monitoring", "[contracts]") {
    auto c = table1_contract(89.0);
    c.monitoring = MonitoringPolicy::weekly();
    CHECK(validate(c, table1_market()).ok());
}

TEST_CASE("double barrier ordering enforced", "[contracts]") {
    auto c = table1_contract();
    c.geometry = BarrierGeometry::double_knock_out(125.0, 95.0);
    auto res = validate(c, table1_market());
    REQUIRE_FALSE(res.ok());
    CHECK(res.message().find("B_l < B_u required") != std::string::npos);
}

TEST_CASE("up-and-out requires spot below barrier", "[contracts]") {
    auto c = table1_contract(120.0);
    c.geometry = BarrierGeometry::up_and_out(110.0);
    CHECK_FALSE(validate(c, table1_market()).ok());
    c.spot = 100.0;
    CHECK(validate(c, table1_market()).ok());
}

TEST_CASE("market invariants", "[contracts]") {
    auto c = table1_contract();
    MarketParams m{0.10, 0.03, 0.0};
    CHECK_FALSE(validate(c, m).ok());
    m.sigma = 0.2;
    CHECK(validate(c, m).ok());
    CHECK(m.drift() == Catch::Approx(0.07));
}

TEST_CASE("validate is deterministic", "[contracts]") {
    auto c = table1_contract(90.0);
    c.geometry = BarrierGeometry::double_knock_out(125.0, 95.0);
    auto a = validate(c, table1_market());
    auto b = validate(c, table1_market());
    CHECK(a.violations == b.violations);
}

TEST_CASE("day-count convention: 250 days, 50 weeks", "[contracts]") {
    CHECK(MonitoringPolicy::daily().dates(0.5) == 125);
    CHECK(MonitoringPolicy::weekly().dates(0.5) == 25);
    CHECK(MonitoringPolicy::daily().dates(1.0) == 250);
    CHECK(MonitoringPolicy::explicit_count(7).dates(0.5) == 7);
}

TEST_CASE("config file round trip", "[contracts]") {
    const std::string text =
        "# benchmark contract\n"
        "strike = 100\n"
        "expiry = 1\n"
        "s0 = 95\n"
        "barrier_type = down\n"
        "barrier = 90\n"
        "rebate = 0\n"
        "monitoring = continuous\n"
        "r = 0.10\n"
        "q = 0\n"
        "sigma = 0.25\n";
    auto cfg = parse_contract_config(text);
    CHECK(cfg.contract.strike == 100.0);
    CHECK(cfg.contract.spot == 95.0);
    CHECK(cfg.contract.geometry.kind == BarrierKind::DownAndOut);
    CHECK(cfg.contract.geometry.single_level() == 90.0);
    CHECK(cfg.market.sigma == 0.25);
    CHECK(validate(cfg.contract, cfg.market).ok());
}

TEST_CASE("config file: double barrier and count monitoring", "[contracts]") {
    auto cfg = parse_contract_config(
        "strike = 100\nexpiry = 0.5\ns0 = 100\nbarrier_type = double\n"
        "barrier_low = 95\nbarrier_high = 125\nmonitoring = count:25\n"
        "r = 0.1\nsigma = 0.2\n");
    CHECK(cfg.contract.geometry.kind == BarrierKind::DoubleKnockOut);
    CHECK(cfg.contract.monitoring.dates(0.5) == 25);
}

TEST_CASE("config file rejects junk", "[contracts]") {
    CHECK_THROWS_AS(parse_contract_config("strike = abc\n"), ValidationError);
    CHECK_THROWS_AS(parse_contract_config("nonsense = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_contract_config("strike 100\n"), ValidationError);
    CHECK_THROWS_AS(parse_contract_config("monitoring = count:0\n"), ValidationError);
}
