#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hobis/contracts.hpp"

namespace hobis {

/// Standard normal CDF via erfc; absolute accuracy well below 1e-12,
/// which the domain-cutoff logic relies on for deep-tail values.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

/// Truncation policy for the double-barrier image series.
struct SeriesControl {
    int max_terms = 200;
    double term_tolerance = 1e-12;
};

/// European call on a dividend-paying asset.
/// expiry == 0 is a domain error; callers wanting the payoff limit
/// should take max(S0 - K, 0) themselves.
inline double vanilla_call(double s0, double k, double expiry, double r, double q,
                           double sigma) {
    if (!(expiry > 0.0) || !(sigma > 0.0))
        throw std::domain_error("vanilla_call requires expiry > 0 and sigma > 0");
    const double v = sigma * std::sqrt(expiry);
    const double d1 = (std::log(s0 / k) + (r - q + 0.5 * sigma * sigma) * expiry) / v;
    const double d2 = d1 - v;
    return s0 * std::exp(-q * expiry) * norm_cdf(d1) - k * std::exp(-r * expiry) * norm_cdf(d2);
}

namespace detail {

// Shared pieces of the single-barrier formulas. Rebate is paid at the
// moment the barrier is hit, which is the F-term below.
struct SingleBarrierTerms {
    double s, k, b, t, r, q, sigma, rebate;
    double v, mu_hat, lam, disc_r, carry;

    SingleBarrierTerms(double s0, double k_, double b_, double t_, double r_, double q_,
                       double sigma_, double rebate_)
        : s(s0), k(k_), b(b_), t(t_), r(r_), q(q_), sigma(sigma_), rebate(rebate_) {
        if (!(t > 0.0) || !(sigma > 0.0))
            throw std::domain_error("barrier formulas require expiry > 0 and sigma > 0");
        v = sigma * std::sqrt(t);
        const double cost_of_carry = r - q;
        mu_hat = (cost_of_carry - 0.5 * sigma * sigma) / (sigma * sigma);
        lam = std::sqrt(mu_hat * mu_hat + 2.0 * r / (sigma * sigma));
        disc_r = std::exp(-r * t);
        carry = std::exp((cost_of_carry - r) * t);  // e^{-qT}
    }

    // eta = +1 for down barriers, -1 for up barriers; call options only.
    double term_a() const {
        const double x1 = std::log(s / k) / v + (1.0 + mu_hat) * v;
        return s * carry * norm_cdf(x1) - k * disc_r * norm_cdf(x1 - v);
    }
    double term_b() const {
        const double x2 = std::log(s / b) / v + (1.0 + mu_hat) * v;
        return s * carry * norm_cdf(x2) - k * disc_r * norm_cdf(x2 - v);
    }
    double term_c(double eta) const {
        const double y1 = std::log(b * b / (s * k)) / v + (1.0 + mu_hat) * v;
        return s * carry * std::pow(b / s, 2.0 * (mu_hat + 1.0)) * norm_cdf(eta * y1) -
               k * disc_r * std::pow(b / s, 2.0 * mu_hat) * norm_cdf(eta * (y1 - v));
    }
    double term_d(double eta) const {
        const double y2 = std::log(b / s) / v + (1.0 + mu_hat) * v;
        return s * carry * std::pow(b / s, 2.0 * (mu_hat + 1.0)) * norm_cdf(eta * y2) -
               k * disc_r * std::pow(b / s, 2.0 * mu_hat) * norm_cdf(eta * (y2 - v));
    }
    double rebate_at_hit(double eta) const {
        if (rebate == 0.0) return 0.0;
        const double z = std::log(b / s) / v + lam * v;
        return rebate * (std::pow(b / s, mu_hat + lam) * norm_cdf(eta * z) +
                         std::pow(b / s, mu_hat - lam) * norm_cdf(eta * (z - 2.0 * lam * v)));
    }
};

}  // namespace detail

/// Down-and-out call, rebate paid at hit. Requires S0 > B.
inline double down_and_out_call(double s0, double k, double b, double expiry, double r,
                                double q, double sigma, double rebate) {
    if (!(s0 > b)) throw std::domain_error("down_and_out_call requires S0 > B");
    detail::SingleBarrierTerms f(s0, k, b, expiry, r, q, sigma, rebate);
    const double eta = 1.0;
    double live = (k >= b) ? f.term_a() - f.term_c(eta) : f.term_b() - f.term_d(eta);
    return live + f.rebate_at_hit(eta);
}

/// Up-and-out call, rebate paid at hit. Requires S0 < B.
inline double up_and_out_call(double s0, double k, double b, double expiry, double r,
                              double q, double sigma, double rebate) {
    if (!(s0 < b)) throw std::domain_error("up_and_out_call requires S0 < B");
    detail::SingleBarrierTerms f(s0, k, b, expiry, r, q, sigma, rebate);
    const double eta = -1.0;
    double live = 0.0;
    if (k < b) live = f.term_a() - f.term_b() + f.term_c(eta) - f.term_d(eta);
    // K >= B: any in-the-money path has crossed the barrier, only the rebate remains.
    return live + f.rebate_at_hit(eta);
}

namespace detail {

// N(hi) - N(lo) with erfc differencing in the tails so that image terms
// with huge power prefactors still multiply accurate tiny probabilities.
inline double cdf_diff(double hi, double lo) {
    if (lo > 6.0 && hi > 6.0)
        return 0.5 * (std::erfc(lo / std::sqrt(2.0)) - std::erfc(hi / std::sqrt(2.0)));
    if (lo < -6.0 && hi < -6.0)
        return 0.5 * (std::erfc(-hi / std::sqrt(2.0)) - std::erfc(-lo / std::sqrt(2.0)));
    return norm_cdf(hi) - norm_cdf(lo);
}

}  // namespace detail

/// Double knock-out call on flat barriers via the image series.
/// Rebates have no closed form here and are rejected; the PDE engine is the
/// reference for rebate-bearing double barriers.
inline double double_knock_out_call(double s0, double k, double b_lo, double b_hi,
                                    double expiry, double r, double q, double sigma,
                                    double rebate, const SeriesControl& ctl = {}) {
    if (!(b_lo < s0 && s0 < b_hi))
        throw std::domain_error("double_knock_out_call requires B_l < S0 < B_u");
    if (rebate != 0.0)
        throw std::domain_error("double_knock_out_call supports zero rebate only");
    if (!(expiry > 0.0) || !(sigma > 0.0))
        throw std::domain_error("double_knock_out_call requires expiry > 0 and sigma > 0");
    if (ctl.max_terms < 1 || !(ctl.term_tolerance > 0.0))
        throw std::invalid_argument("bad SeriesControl");
    if (k >= b_hi) return 0.0;  // payoff region empty for surviving paths

    const double v = sigma * std::sqrt(expiry);
    const double b = r - q;
    const double drift_up = (b + 0.5 * sigma * sigma) * expiry;
    const double mu1 = 2.0 * b / (sigma * sigma) + 1.0;
    const double k_lim = std::max(k, b_lo);  // the surviving density lives in (B_l, B_u)
    const double log_ratio = std::log(b_hi / b_lo);

    double sum_s = 0.0, sum_k = 0.0;
    bool converged = false;
    double prev_term = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ctl.max_terms; ++i) {
        // n = 0, 1, -1, 2, -2, ...
        const int n = (i % 2 == 1) ? (i + 1) / 2 : -(i / 2);
        const double two_n_log = 2.0 * n * log_ratio;
        const double d1 = (std::log(s0 / k_lim) + two_n_log + drift_up) / v;
        const double d2 = (std::log(s0 / b_hi) + two_n_log + drift_up) / v;
        const double d3 = (std::log(b_lo * b_lo / (k_lim * s0)) - two_n_log + drift_up) / v;
        const double d4 = (std::log(b_lo * b_lo / (b_hi * s0)) - two_n_log + drift_up) / v;

        // (U/L)^{n mu1} and (L^{n+1}/(U^n S))^{mu1}, kept in log space so deep
        // image terms cannot overflow before their CDF factors underflow.
        const double log_image_base = (n + 1) * std::log(b_lo) - n * std::log(b_hi) -
                                      std::log(s0);
        const double w_direct = std::exp(n * mu1 * log_ratio);
        const double w_image = std::exp(mu1 * log_image_base);

        const double term_s = w_direct * detail::cdf_diff(d1, d2) -
                              w_image * detail::cdf_diff(d3, d4);
        const double w_direct_k = std::exp(n * (mu1 - 2.0) * log_ratio);
        const double w_image_k = std::exp((mu1 - 2.0) * log_image_base);
        const double term_k = w_direct_k * detail::cdf_diff(d1 - v, d2 - v) -
                              w_image_k * detail::cdf_diff(d3 - v, d4 - v);

        sum_s += term_s;
        sum_k += term_k;

        const double term_price = std::abs(s0 * std::exp(-q * expiry) * term_s) +
                                  std::abs(k * std::exp(-r * expiry) * term_k);
        if (i >= 2 && term_price < ctl.term_tolerance && prev_term < ctl.term_tolerance) {
            converged = true;
            break;
        }
        prev_term = term_price;
    }
    if (!converged)
        throw NumericalError("double-barrier series did not converge within max_terms");

    return s0 * std::exp(-q * expiry) * sum_s - k * std::exp(-r * expiry) * sum_k;
}

/// In + out = vanilla, valid only for zero rebate.
inline double knock_in_from_parity(double knock_out_price, double vanilla_price,
                                   double rebate = 0.0) {
    if (rebate != 0.0)
        throw std::domain_error("knock-in parity holds only for zero rebate");
    return vanilla_price - knock_out_price;
}

/// Closed-form knock-out price for a validated continuous contract, or the
/// vanilla price when no closed form applies. Used by error profiling.
inline double closed_form_knock_out(const BarrierContract& c, const MarketParams& m,
                                    const SeriesControl& ctl = {}) {
    switch (c.geometry.kind) {
        case BarrierKind::DownAndOut:
            return down_and_out_call(c.spot, c.strike, c.geometry.single_level(), c.expiry,
                                     m.r, m.q, m.sigma, c.rebate);
        case BarrierKind::UpAndOut:
            return up_and_out_call(c.spot, c.strike, c.geometry.single_level(), c.expiry,
                                   m.r, m.q, m.sigma, c.rebate);
        case BarrierKind::DoubleKnockOut:
            return double_knock_out_call(c.spot, c.strike, c.geometry.lower, c.geometry.upper,
                                         c.expiry, m.r, m.q, m.sigma, c.rebate, ctl);
    }
    throw std::logic_error("unreachable");
}

}  // namespace hobis
