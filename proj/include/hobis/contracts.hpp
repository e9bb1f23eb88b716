#pragma once

#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hobis {

/// Thrown by pricing entry points when a contract fails validation.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown on numerical failure (inadmissible mesh, singular pivot,
/// unstable explicit weights, series non-convergence).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat market data, rates and volatility per annum.
/// The risk-neutral drift is always derived as r - q, never stored.
struct MarketParams {
    double r = 0.0;      // risk-free rate
    double q = 0.0;      // continuous dividend yield
    double sigma = 0.0;  // volatility

    double drift() const { return r - q; }
};

enum class BarrierKind { DownAndOut, UpAndOut, DoubleKnockOut };

struct BarrierGeometry {
    BarrierKind kind = BarrierKind::DownAndOut;
    double lower = 0.0;  // single barrier level for down/up; lower barrier for double
    double upper = 0.0;  // upper barrier for double, unused otherwise

    static BarrierGeometry down_and_out(double b) { return {BarrierKind::DownAndOut, b, 0.0}; }
    static BarrierGeometry up_and_out(double b) { return {BarrierKind::UpAndOut, b, 0.0}; }
    static BarrierGeometry double_knock_out(double lo, double hi) {
        return {BarrierKind::DoubleKnockOut, lo, hi};
    }

    /// Single-barrier level; invalid to call on a double knock-out.
    double single_level() const {
        if (kind == BarrierKind::DoubleKnockOut)
            throw std::logic_error("single_level() on double barrier");
        return lower;
    }
};

enum class MonitoringKind { Continuous, Daily, Weekly, Count };

/// Day count is fixed: 250 days a year, 50 weeks, 5 days a week.
struct MonitoringPolicy {
    MonitoringKind kind = MonitoringKind::Continuous;
    int count = 0;  // explicit number of monitoring dates for Count

    static MonitoringPolicy continuous() { return {MonitoringKind::Continuous, 0}; }
    static MonitoringPolicy daily() { return {MonitoringKind::Daily, 0}; }
    static MonitoringPolicy weekly() { return {MonitoringKind::Weekly, 0}; }
    static MonitoringPolicy explicit_count(int n) { return {MonitoringKind::Count, n}; }

    bool is_continuous() const { return kind == MonitoringKind::Continuous; }

    /// Number of monitoring dates over a life of `expiry` years.
    int dates(double expiry) const {
        switch (kind) {
            case MonitoringKind::Continuous: return 0;
            case MonitoringKind::Daily: return static_cast<int>(std::lround(250.0 * expiry));
            case MonitoringKind::Weekly: return static_cast<int>(std::lround(50.0 * expiry));
            case MonitoringKind::Count: return count;
        }
        return 0;
    }
};

struct BarrierContract {
    double strike = 0.0;
    double expiry = 0.0;  // years
    double spot = 0.0;    // initial asset price S0
    BarrierGeometry geometry;
    double rebate = 0.0;
    MonitoringPolicy monitoring;
};

/// Collected invariant violations; empty means the contract is priceable.
struct ValidationResult {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }

    std::string message() const {
        std::string out;
        for (const auto& v : violations) {
            if (!out.empty()) out += "; ";
            out += v;
        }
        return out;
    }
};

/// Pure check of the economic invariants. Pricing entry points require ok().
/// S0 on or beyond a barrier is rejected only for continuous monitoring;
/// between monitoring dates no breach can occur, so discrete contracts may
/// start beyond the barrier.
inline ValidationResult validate(const BarrierContract& c, const MarketParams& m) {
    ValidationResult res;
    auto fail = [&res](const std::string& s) { res.violations.push_back(s); };

    if (!(m.sigma > 0.0)) fail("sigma must be positive");
    if (!std::isfinite(m.r)) fail("r must be finite");
    if (!std::isfinite(m.q)) fail("q must be finite");
    if (!(c.strike > 0.0)) fail("strike must be positive");
    if (!(c.expiry > 0.0)) fail("expiry must be positive");
    if (!(c.spot > 0.0)) fail("S0 must be positive");
    if (!(c.rebate >= 0.0)) fail("rebate must be nonnegative");

    const auto& g = c.geometry;
    switch (g.kind) {
        case BarrierKind::DownAndOut:
        case BarrierKind::UpAndOut:
            if (!(g.lower > 0.0)) fail("barrier must be positive");
            break;
        case BarrierKind::DoubleKnockOut:
            if (!(g.lower > 0.0) || !(g.upper > 0.0)) fail("barriers must be positive");
            if (!(g.lower < g.upper)) fail("B_l < B_u required");
            break;
    }

    if (c.monitoring.is_continuous()) {
        if (g.kind == BarrierKind::DownAndOut && !(c.spot > g.lower))
            fail("S0 must exceed B");
        if (g.kind == BarrierKind::UpAndOut && !(c.spot < g.lower))
            fail("S0 must be below B");
        if (g.kind == BarrierKind::DoubleKnockOut &&
            (!(c.spot > g.lower) || !(c.spot < g.upper)))
            fail("S0 must lie strictly between the barriers");
    } else {
        if (c.monitoring.dates(c.expiry) < 1)
            fail("discrete monitoring needs at least one date");
    }
    return res;
}

/// Throws ValidationError unless validate() passes.
inline void require_valid(const BarrierContract& c, const MarketParams& m) {
    auto res = validate(c, m);
    if (!res.ok()) throw ValidationError(res.message());
}

// ---------------------------------------------------------------------------
// Plain-text key/value contract files.
//
// Recognized keys: strike, expiry, s0, barrier_type (down|up|double),
// barrier, barrier_low, barrier_high, rebate,
// monitoring (continuous|daily|weekly|count:N), r, q, sigma.
// Lines are `key = value`; '#' starts a comment.
// ---------------------------------------------------------------------------

struct ContractConfig {
    BarrierContract contract;
    MarketParams market;
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double to_number(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ValidationError("bad numeric value for '" + key + "': " + v);
    }
}

}  // namespace detail

inline MonitoringPolicy parse_monitoring(const std::string& text) {
    std::string v = detail::trim(text);
    if (v == "continuous") return MonitoringPolicy::continuous();
    if (v == "daily") return MonitoringPolicy::daily();
    if (v == "weekly") return MonitoringPolicy::weekly();
    if (v.rfind("count:", 0) == 0) {
        int n = std::atoi(v.c_str() + 6);
        if (n < 1) throw ValidationError("monitoring count must be >= 1");
        return MonitoringPolicy::explicit_count(n);
    }
    throw ValidationError("unknown monitoring policy: " + v);
}

/// Parses the key/value configuration format. Unknown keys are rejected.
inline ContractConfig parse_contract_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        std::string line = text.substr(start, end == std::string::npos ? std::string::npos
                                                                       : end - start);
        start = (end == std::string::npos) ? text.size() + 1 : end + 1;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError("expected 'key = value': " + line);
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) throw ValidationError("expected 'key = value': " + line);
        kv[key] = val;
    }

    ContractConfig cfg;
    std::string barrier_type = "down";
    double barrier = 0.0, barrier_low = 0.0, barrier_high = 0.0;
    for (const auto& [key, val] : kv) {
        if (key == "strike") cfg.contract.strike = detail::to_number(key, val);
        else if (key == "expiry") cfg.contract.expiry = detail::to_number(key, val);
        else if (key == "s0") cfg.contract.spot = detail::to_number(key, val);
        else if (key == "rebate") cfg.contract.rebate = detail::to_number(key, val);
        else if (key == "r") cfg.market.r = detail::to_number(key, val);
        else if (key == "q") cfg.market.q = detail::to_number(key, val);
        else if (key == "sigma") cfg.market.sigma = detail::to_number(key, val);
        else if (key == "barrier") barrier = detail::to_number(key, val);
        else if (key == "barrier_low") barrier_low = detail::to_number(key, val);
        else if (key == "barrier_high") barrier_high = detail::to_number(key, val);
        else if (key == "barrier_type") barrier_type = val;
        else if (key == "monitoring") cfg.contract.monitoring = parse_monitoring(val);
        else throw ValidationError("unknown config key: " + key);
    }

    if (barrier_type == "down") cfg.contract.geometry = BarrierGeometry::down_and_out(barrier);
    else if (barrier_type == "up") cfg.contract.geometry = BarrierGeometry::up_and_out(barrier);
    else if (barrier_type == "double")
        cfg.contract.geometry = BarrierGeometry::double_knock_out(barrier_low, barrier_high);
    else throw ValidationError("unknown barrier_type: " + barrier_type);

    return cfg;
}

}  // namespace hobis
