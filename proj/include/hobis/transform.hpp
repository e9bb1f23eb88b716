#pragma once

#include <cmath>

#include "hobis/analytic.hpp"
#include "hobis/contracts.hpp"

namespace hobis {

/// Black-Scholes problem rewritten in heat-equation coordinates
///   x = ln(S/K),  tau = sigma^2 (T - t) / 2,
///   f(S, t) = K e^{alpha x + gamma tau} u(x, tau).
/// nu1 and nu2 are the only nondimensional parameters; nu = nu1 - nu2.
struct TransformedProblem {
    double nu = 0.0;       // 2(r - q)/sigma^2
    double nu1 = 0.0;      // 2r/sigma^2
    double nu2 = 0.0;      // 2q/sigma^2
    double alpha = 0.0;    // -(nu - 1)/2
    double gamma = 0.0;    // -(nu + 1)^2/4 - nu2
    double x_lo_barrier = 0.0;  // ln(B/K): single barrier or lower of a pair
    double x_hi_barrier = 0.0;  // ln(B_u/K) for double barriers
    double tau_max = 0.0;  // sigma^2 T / 2
    double strike = 0.0;
    double sigma = 0.0;

    /// Remaining calendar time to expiry at diffusion time tau.
    double time_left(double tau) const { return 2.0 * tau / (sigma * sigma); }

    double log_moneyness(double s) const { return std::log(s / strike); }
    double price_at(double x) const { return strike * std::exp(x); }
};

inline TransformedProblem to_heat(const BarrierContract& c, const MarketParams& m) {
    require_valid(c, m);
    TransformedProblem p;
    const double s2 = m.sigma * m.sigma;
    p.nu1 = 2.0 * m.r / s2;
    p.nu2 = 2.0 * m.q / s2;
    p.nu = p.nu1 - p.nu2;
    p.alpha = -0.5 * (p.nu - 1.0);
    p.gamma = -0.25 * (p.nu + 1.0) * (p.nu + 1.0) - p.nu2;
    p.tau_max = 0.5 * s2 * c.expiry;
    p.strike = c.strike;
    p.sigma = m.sigma;
    p.x_lo_barrier = std::log(c.geometry.lower / c.strike);
    p.x_hi_barrier = (c.geometry.kind == BarrierKind::DoubleKnockOut)
                         ? std::log(c.geometry.upper / c.strike)
                         : 0.0;
    return p;
}

/// Transformed call payoff u(x, 0) = max(e^{(nu+1)x/2} - e^{(nu-1)x/2}, 0);
/// zero for x <= 0.
inline double heat_initial_condition(double x, const TransformedProblem& p) {
    const double hi = std::exp(0.5 * (p.nu + 1.0) * x);
    const double lo = std::exp(0.5 * (p.nu - 1.0) * x);
    return std::max(hi - lo, 0.0);
}

/// Dirichlet value along a knock-out barrier located at x_b:
/// u(x_b, tau) = (Rb/K) e^{-(alpha x_b + gamma tau)}, the rebate paid at hit.
inline double barrier_boundary_value(double tau, double x_b, const TransformedProblem& p,
                                     double rebate) {
    if (rebate == 0.0) return 0.0;
    return rebate / p.strike * std::exp(-(p.alpha * x_b + p.gamma * tau));
}

/// Inverse map back to an asset-space price.
inline double from_heat(double u_value, double x, double tau, const TransformedProblem& p) {
    return p.strike * std::exp(p.alpha * x + p.gamma * tau) * u_value;
}

inline double to_heat_value(double price, double x, double tau, const TransformedProblem& p) {
    return price / (p.strike * std::exp(p.alpha * x + p.gamma * tau));
}

/// Exact Dirichlet value on a cutoff edge where the barrier is worthless:
/// the vanilla Black-Scholes value at S = K e^x with the remaining maturity
/// implied by tau, pulled back through the variable change. tau = 0 is expiry,
/// where the value degenerates to the payoff.
inline double vanilla_boundary_value(double tau, double x, const TransformedProblem& p,
                                     const MarketParams& m) {
    const double s = p.price_at(x);
    const double t_left = p.time_left(tau);
    const double price = (t_left <= 0.0) ? std::max(s - p.strike, 0.0)
                                         : vanilla_call(s, p.strike, t_left, m.r, m.q, m.sigma);
    return to_heat_value(price, x, tau, p);
}

}  // namespace hobis
