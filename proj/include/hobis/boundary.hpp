#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "hobis/analytic.hpp"
#include "hobis/contracts.hpp"

namespace hobis {

/// Quantile delta at which Phi(delta) rounds to 1 at working accuracy.
/// Admissible band (3.7, 6.5); 4.2 targets roughly 1e-4 price accuracy.
struct CutoffConfig {
    double delta = 4.2;

    void check() const {
        if (!(delta > 3.7 && delta < 6.5))
            throw std::invalid_argument("delta must lie in (3.7, 6.5)");
    }
};

enum class CutoffSide { Upper, Lower };  // Upper: down-and-out; Lower: up-and-out

/// Log-moneyness level beyond which a barrier is worthless and the option
/// value is the vanilla Black-Scholes value.
struct DomainCutoff {
    double x_m = 0.0;   // cutoff in log-moneyness
    double s_m = 0.0;   // cutoff in price space, K e^{x_m}
    CutoffSide side = CutoffSide::Upper;
    bool t_p_used = false;  // whether the turning-point branch applied
};

/// mu* = (r - q) - sigma^2/2, the drift of ln S.
inline double drift_star(const MarketParams& m) {
    return m.drift() - 0.5 * m.sigma * m.sigma;
}

/// P(S_t > B) for a lognormal path started at S0:  Phi(a*),
/// a* = (ln(S0/B) + mu* t) / (sigma sqrt(t)).
inline double breach_probability_complement(double s0, double b, double t,
                                            const MarketParams& m) {
    if (!(t > 0.0)) throw std::domain_error("breach probability needs t > 0");
    const double a_star = (std::log(s0 / b) + drift_star(m) * t) / (m.sigma * std::sqrt(t));
    return norm_cdf(a_star);
}

/// Turning point of t -> delta sigma sqrt(t) - mu* t (and of its mirrored
/// up-barrier counterpart): t_p = (delta sigma / (2 mu*))^2. Empty when the
/// function is monotone (mu* = 0), treated by callers as t_p >= T.
inline std::optional<double> turning_point(double mu_star, double sigma, double delta) {
    if (mu_star == 0.0) return std::nullopt;
    const double root = delta * sigma / (2.0 * std::abs(mu_star));
    return root * root;
}

namespace detail {

inline DomainCutoff cutoff_down(double x_b, double strike, double expiry,
                                const MarketParams& m, const CutoffConfig& cfg) {
    const double mu_star = drift_star(m);
    const auto t_p = turning_point(mu_star, m.sigma, cfg.delta);
    DomainCutoff out;
    out.side = CutoffSide::Upper;
    if (mu_star <= 0.0 || !t_p || *t_p >= expiry) {
        out.x_m = x_b + cfg.delta * m.sigma * std::sqrt(expiry) - mu_star * expiry;
    } else {
        out.x_m = x_b + cfg.delta * m.sigma * std::sqrt(*t_p) - mu_star * *t_p;
        out.t_p_used = true;
    }
    out.s_m = strike * std::exp(out.x_m);
    return out;
}

inline DomainCutoff cutoff_up(double x_b, double strike, double expiry,
                              const MarketParams& m, const CutoffConfig& cfg) {
    const double mu_star = drift_star(m);
    const auto t_p = turning_point(mu_star, m.sigma, cfg.delta);
    DomainCutoff out;
    out.side = CutoffSide::Lower;
    if (mu_star >= 0.0 || !t_p || *t_p >= expiry) {
        out.x_m = x_b - cfg.delta * m.sigma * std::sqrt(expiry) - mu_star * expiry;
    } else {
        out.x_m = x_b - cfg.delta * m.sigma * std::sqrt(*t_p) - mu_star * *t_p;
        out.t_p_used = true;
    }
    out.s_m = strike * std::exp(out.x_m);
    return out;
}

}  // namespace detail

/// Optimal truncation level for a single-barrier contract. For double
/// barriers use classify_double / cutoff_for_side.
inline DomainCutoff cutoff(const BarrierContract& c, const MarketParams& m,
                           const CutoffConfig& cfg = {}) {
    cfg.check();
    const double x_b = std::log(c.geometry.lower / c.strike);
    switch (c.geometry.kind) {
        case BarrierKind::DownAndOut:
            return detail::cutoff_down(x_b, c.strike, c.expiry, m, cfg);
        case BarrierKind::UpAndOut:
            return detail::cutoff_up(x_b, c.strike, c.expiry, m, cfg);
        case BarrierKind::DoubleKnockOut:
            throw std::logic_error("cutoff() is single-barrier; see classify_double");
    }
    throw std::logic_error("unreachable");
}

/// True when the barrier cannot be reached from S0 at working accuracy, so
/// the contract prices as vanilla with zero PDE work. Boundary included.
inline bool barrier_worthless(double s0, const DomainCutoff& cut) {
    return cut.side == CutoffSide::Upper ? s0 >= cut.s_m : s0 <= cut.s_m;
}

enum class DoubleClass { BothActive, LowerOnly, UpperOnly, NeitherActive };

struct DoubleClassification {
    DoubleClass kind = DoubleClass::BothActive;
    DomainCutoff lower_cutoff;  // cutoff induced by the lower barrier (Upper side)
    DomainCutoff upper_cutoff;  // cutoff induced by the upper barrier (Lower side)
};

/// Applies the down-cutoff from B_l and the up-cutoff from B_u independently.
/// A side whose worthless region contains S0 is dropped; both dropped reduces
/// the contract to vanilla, one dropped reduces it to a single barrier.
inline DoubleClassification classify_double(const BarrierContract& c, const MarketParams& m,
                                            const CutoffConfig& cfg = {}) {
    if (c.geometry.kind != BarrierKind::DoubleKnockOut)
        throw std::logic_error("classify_double needs a double barrier");
    cfg.check();
    DoubleClassification out;
    out.lower_cutoff = detail::cutoff_down(std::log(c.geometry.lower / c.strike), c.strike,
                                           c.expiry, m, cfg);
    out.upper_cutoff = detail::cutoff_up(std::log(c.geometry.upper / c.strike), c.strike,
                                         c.expiry, m, cfg);
    const bool lower_active = !barrier_worthless(c.spot, out.lower_cutoff);
    const bool upper_active = !barrier_worthless(c.spot, out.upper_cutoff);
    if (lower_active && upper_active) out.kind = DoubleClass::BothActive;
    else if (lower_active) out.kind = DoubleClass::LowerOnly;
    else if (upper_active) out.kind = DoubleClass::UpperOnly;
    else out.kind = DoubleClass::NeitherActive;
    return out;
}

}  // namespace hobis
