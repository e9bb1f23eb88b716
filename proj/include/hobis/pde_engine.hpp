#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hobis/analytic.hpp"
#include "hobis/boundary.hpp"
#include "hobis/contracts.hpp"
#include "hobis/transform.hpp"

namespace hobis {

// ---------------------------------------------------------------------------
// Theta policy
// ---------------------------------------------------------------------------

/// theta = 1/2 - 1/(12 beta): the weighting that makes the two-level scheme
/// fourth-order in space and second-order in time. Needs beta >= 1/6 so that
/// theta >= 0; the stability bound beta <= 1/(2(1-2theta)) then holds for free.
inline double theta_from_beta(double beta) {
    if (beta < 1.0 / 6.0 - 1e-12)
        throw NumericalError("mesh ratio beta < 1/6: high-order weighting needs "
                             "(dx)^2 <= 6 dtau");
    return 0.5 - 1.0 / (12.0 * beta);
}

struct ThetaPolicy {
    enum class Kind { HighOrder, CrankNicolson, FullyImplicit, Fixed };
    Kind kind = Kind::HighOrder;
    double fixed_theta = 0.5;

    static ThetaPolicy high_order() { return {Kind::HighOrder, 0.0}; }
    static ThetaPolicy crank_nicolson() { return {Kind::CrankNicolson, 0.0}; }
    static ThetaPolicy fully_implicit() { return {Kind::FullyImplicit, 0.0}; }
    static ThetaPolicy fixed(double theta) {
        if (!(theta >= 0.0 && theta <= 1.0))
            throw std::invalid_argument("theta must lie in [0, 1]");
        return {Kind::Fixed, theta};
    }

    double resolve(double beta) const {
        switch (kind) {
            case Kind::HighOrder: return theta_from_beta(beta);
            case Kind::CrankNicolson: return 0.5;
            case Kind::FullyImplicit: return 1.0;
            case Kind::Fixed: return fixed_theta;
        }
        throw std::logic_error("unreachable");
    }
};

/// Time-step coupling used when only M is given: L = M, stretched to 1.5 M for
/// high volatilities where negative intermediary values otherwise persist.
inline int default_time_steps(int mesh_m, double sigma) {
    return sigma >= 0.35 ? static_cast<int>(std::ceil(1.5 * mesh_m)) : mesh_m;
}

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

struct Grid {
    int m = 0;           // space intervals
    int time_steps = 0;  // L
    double x_lo = 0.0, x_hi = 0.0;
    double dx = 0.0, dtau = 0.0, beta = 0.0;
    std::optional<int> aligned_index;  // node index of x0 when aligned

    double node(int j) const { return x_lo + j * dx; }
    double tau_at(int n) const { return n * dtau; }
};

enum class AdjustableEdge { Upper, Lower, None };

/// Uniform grid over [x_lo, x_hi] with the extraction point x0 lined up with a
/// node where possible. Only a cutoff edge may move, and by at most one dx;
/// barriers stay put. When no admissible adjustment exists the grid is left
/// nominal and extraction interpolates. x0 may sit on a cutoff edge, in which
/// case the reported value is the exact boundary value itself.
inline Grid build_grid(double x_lo, double x_hi, double tau_max, int mesh_m, int mesh_l,
                       double x0, AdjustableEdge adjustable) {
    if (mesh_m < 2 || mesh_l < 1) throw NumericalError("mesh must be at least 2x1");
    if (!(x_lo < x_hi)) throw NumericalError("empty solution domain");

    Grid g;
    g.m = mesh_m;
    g.time_steps = mesh_l;
    g.x_lo = x_lo;
    g.x_hi = x_hi;
    g.dx = (x_hi - x_lo) / mesh_m;
    const double span_tol = 1e-12 * (std::abs(x_lo) + std::abs(x_hi) + 1.0);
    if (x0 < x_lo - span_tol || x0 > x_hi + span_tol)
        throw NumericalError("x0 outside the solution domain");

    const double dx_nom = g.dx;
    if (adjustable == AdjustableEdge::Upper || adjustable == AdjustableEdge::Lower) {
        const double fixed = (adjustable == AdjustableEdge::Upper) ? x_lo : x_hi;
        const double dist = std::abs(x0 - fixed);
        int j = static_cast<int>(std::lround(dist / dx_nom));
        // Landing exactly on the far edge is allowed only when x0 genuinely
        // sits there; otherwise keep the extraction point interior.
        if (j >= mesh_m && std::abs(dist - (x_hi - x_lo)) > 0.1 * dx_nom) j = mesh_m - 1;
        j = std::clamp(j, 1, mesh_m);
        const double dx_adj = dist / j;
        const double adjustment = std::abs(mesh_m * dx_adj - (x_hi - x_lo));
        if (adjustment <= dx_adj * (1.0 + 1e-9) && dx_adj > 0.0) {
            g.dx = dx_adj;
            if (adjustable == AdjustableEdge::Upper) {
                g.x_hi = x_lo + mesh_m * dx_adj;
                g.aligned_index = j;
            } else {
                g.x_lo = x_hi - mesh_m * dx_adj;
                g.aligned_index = mesh_m - j;
            }
        }
    } else {
        const double pos = (x0 - x_lo) / dx_nom;
        const double nearest = std::lround(pos);
        if (std::abs(pos - nearest) < 1e-9)
            g.aligned_index = static_cast<int>(nearest);
    }

    g.dtau = tau_max / mesh_l;
    g.beta = g.dtau / (g.dx * g.dx);
    return g;
}

// ---------------------------------------------------------------------------
// Tridiagonal machinery
// ---------------------------------------------------------------------------

/// Interior-operator coefficients for one theta step with M-1 unknowns.
/// Implicit side: (1 + 2 beta theta) on the diagonal, -beta theta off it.
/// Explicit side: (1 - 2 beta (1-theta)) and +beta (1-theta).
struct TridiagonalSystem {
    std::vector<double> sub, diag, super;
    double explicit_diag = 0.0;
    double explicit_off = 0.0;
    double bc_weight = 0.0;  // beta*theta, folds known boundary values into the rhs
};

inline TridiagonalSystem assemble(double theta, double beta, int mesh_m) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta outside [0,1]");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    const int n = mesh_m - 1;
    TridiagonalSystem sys;
    sys.sub.assign(n, -beta * theta);
    sys.diag.assign(n, 1.0 + 2.0 * beta * theta);
    sys.super.assign(n, -beta * theta);
    sys.sub[0] = 0.0;
    sys.super[n - 1] = 0.0;
    sys.explicit_diag = 1.0 - 2.0 * beta * (1.0 - theta);
    sys.explicit_off = beta * (1.0 - theta);
    sys.bc_weight = beta * theta;
    return sys;
}

/// Thomas algorithm: Gaussian elimination without pivoting. Safe here because
/// every assembled system is strictly diagonally dominant for theta > 0.
inline std::vector<double> thomas_solve(const std::vector<double>& sub,
                                        const std::vector<double>& diag,
                                        const std::vector<double>& super,
                                        const std::vector<double>& rhs) {
    const size_t n = diag.size();
    if (sub.size() != n || super.size() != n || rhs.size() != n)
        throw std::invalid_argument("inconsistent tridiagonal sizes");
    std::vector<double> c(n), d(n), x(n);
    double piv = diag[0];
    if (std::abs(piv) < 1e-300) throw NumericalError("singular pivot in Thomas solve");
    c[0] = super[0] / piv;
    d[0] = rhs[0] / piv;
    for (size_t i = 1; i < n; ++i) {
        piv = diag[i] - sub[i] * c[i - 1];
        if (std::abs(piv) < 1e-300) throw NumericalError("singular pivot in Thomas solve");
        c[i] = super[i] / piv;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / piv;
    }
    x[n - 1] = d[n - 1];
    for (size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

inline std::vector<double> thomas_solve(const TridiagonalSystem& sys,
                                        const std::vector<double>& rhs) {
    return thomas_solve(sys.sub, sys.diag, sys.super, rhs);
}

namespace detail {

/// Forward-eliminated form of a constant-coefficient system, reused across
/// every time level.
struct ThomasFactorization {
    std::vector<double> c_prime;
    std::vector<double> inv_pivot;
    double sub = 0.0;

    ThomasFactorization() = default;
    explicit ThomasFactorization(const TridiagonalSystem& sys) {
        const size_t n = sys.diag.size();
        c_prime.resize(n);
        inv_pivot.resize(n);
        sub = n > 1 ? sys.sub[1] : 0.0;
        double piv = sys.diag[0];
        if (std::abs(piv) < 1e-300) throw NumericalError("singular pivot in Thomas solve");
        inv_pivot[0] = 1.0 / piv;
        c_prime[0] = sys.super[0] * inv_pivot[0];
        for (size_t i = 1; i < n; ++i) {
            piv = sys.diag[i] - sys.sub[i] * c_prime[i - 1];
            if (std::abs(piv) < 1e-300) throw NumericalError("singular pivot in Thomas solve");
            inv_pivot[i] = 1.0 / piv;
            c_prime[i] = sys.super[i] * inv_pivot[i];
        }
    }

    void solve(std::vector<double>& rhs_then_solution) const {
        const size_t n = c_prime.size();
        auto& v = rhs_then_solution;
        v[0] *= inv_pivot[0];
        for (size_t i = 1; i < n; ++i) v[i] = (v[i] - sub * v[i - 1]) * inv_pivot[i];
        for (size_t i = n - 1; i-- > 0;) v[i] -= c_prime[i] * v[i + 1];
    }
};

}  // namespace detail

/// One theta step: assembles the explicit side into the right-hand side,
/// folds in the known new-level boundary values, solves, and overwrites the
/// boundary nodes with their exact data.
inline std::vector<double> step(const std::vector<double>& u_n, const TridiagonalSystem& sys,
                                double left_next, double right_next) {
    const int n = static_cast<int>(sys.diag.size());
    if (static_cast<int>(u_n.size()) != n + 2)
        throw std::invalid_argument("field size must be M+1");
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i)
        rhs[i] = sys.explicit_off * (u_n[i] + u_n[i + 2]) + sys.explicit_diag * u_n[i + 1];
    rhs[0] += sys.bc_weight * left_next;
    rhs[n - 1] += sys.bc_weight * right_next;
    auto interior = thomas_solve(sys, rhs);
    std::vector<double> u_next(n + 2);
    u_next[0] = left_next;
    std::copy(interior.begin(), interior.end(), u_next.begin() + 1);
    u_next[n + 1] = right_next;
    return u_next;
}

// ---------------------------------------------------------------------------
// Time loop
// ---------------------------------------------------------------------------

struct HeatRunStats {
    double min_nodal = std::numeric_limits<double>::infinity();
    int steps = 0;
};

/// Marches u across all time levels. left/right give Dirichlet data as
/// functions of tau; after_step(level, tau, u) runs after each completed
/// level (monitoring projections hook in here).
template <typename LeftBC, typename RightBC, typename AfterStep>
HeatRunStats run_theta_scheme(const Grid& g, double theta, std::vector<double>& u,
                              LeftBC&& left, RightBC&& right, AfterStep&& after_step) {
    const TridiagonalSystem sys = assemble(theta, g.beta, g.m);
    const detail::ThomasFactorization fact(sys);
    const int n = g.m - 1;
    std::vector<double> rhs(n);
    HeatRunStats stats;
    auto track_min = [&stats](const std::vector<double>& v) {
        for (double x : v) stats.min_nodal = std::min(stats.min_nodal, x);
    };
    track_min(u);
    for (int lvl = 1; lvl <= g.time_steps; ++lvl) {
        const double tau = g.tau_at(lvl);
        const double bl = left(tau);
        const double br = right(tau);
        for (int i = 0; i < n; ++i)
            rhs[i] = sys.explicit_off * (u[i] + u[i + 2]) + sys.explicit_diag * u[i + 1];
        rhs[0] += sys.bc_weight * bl;
        rhs[n - 1] += sys.bc_weight * br;
        fact.solve(rhs);
        std::copy(rhs.begin(), rhs.end(), u.begin() + 1);
        u[0] = bl;
        u[g.m] = br;
        ++stats.steps;
        after_step(lvl, tau, u);
        track_min(u);
    }
    return stats;
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

/// Nodal value when x0 is aligned, otherwise a 4-point (cubic) polynomial in
/// x, matching the spatial order of the scheme; then mapped back to a price.
inline double extract_price(const std::vector<double>& u, const Grid& g, double x0,
                            const TransformedProblem& p) {
    const double tol = 1e-12 * (std::abs(g.x_lo) + std::abs(g.x_hi) + 1.0);
    if (x0 < g.x_lo - tol || x0 > g.x_hi + tol)
        throw NumericalError("extraction point outside the grid");
    if (g.aligned_index) return from_heat(u[*g.aligned_index], x0, p.tau_max, p);

    const double pos = (x0 - g.x_lo) / g.dx;
    const int points = std::min(4, g.m + 1);
    int start = static_cast<int>(std::floor(pos)) - 1;
    start = std::clamp(start, 0, g.m + 1 - points);
    double value = 0.0;
    for (int a = 0; a < points; ++a) {
        double w = 1.0;
        for (int b = 0; b < points; ++b) {
            if (a == b) continue;
            w *= (pos - (start + b)) / static_cast<double>(a - b);
        }
        value += w * u[start + a];
    }
    return from_heat(value, x0, p.tau_max, p);
}

// ---------------------------------------------------------------------------
// Continuous pricing (the optimal-boundary implicit pipeline)
// ---------------------------------------------------------------------------

enum class BoundaryMode { Optimal, Approximate, WorthlessShortCircuit };
enum class ExtractionMode { Aligned, Interpolated };

struct PriceReport {
    double value = 0.0;
    int mesh_m = 0;
    int mesh_l = 0;
    double wall_time = 0.0;  // seconds, numerical pipeline only
    BoundaryMode boundary_mode = BoundaryMode::Optimal;
    double s_max = 0.0;  // populated for approximate-boundary runs
    ExtractionMode extraction = ExtractionMode::Aligned;
    std::optional<double> error_vs_oracle;
};

/// Full final-level field of a continuous solve, for error profiling and the
/// nodal diagnostics the tests look at.
struct ContinuousField {
    Grid grid;
    TransformedProblem problem;
    std::vector<double> u;
    HeatRunStats stats;
    MarketParams market;
};

namespace detail {

class WallTimer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

/// Contract with one barrier side dropped (its cutoff says it cannot be hit).
inline BarrierContract reduce_to_single(const BarrierContract& c, BarrierKind kind) {
    BarrierContract r = c;
    r.geometry = (kind == BarrierKind::DownAndOut)
                     ? BarrierGeometry::down_and_out(c.geometry.lower)
                     : BarrierGeometry::up_and_out(c.geometry.upper);
    return r;
}

inline PriceReport vanilla_short_circuit(const BarrierContract& c, const MarketParams& m,
                                         const WallTimer& timer) {
    PriceReport rep;
    rep.value = vanilla_call(c.spot, c.strike, c.expiry, m.r, m.q, m.sigma);
    rep.boundary_mode = BoundaryMode::WorthlessShortCircuit;
    rep.extraction = ExtractionMode::Aligned;
    rep.wall_time = timer.seconds();
    return rep;
}

}  // namespace detail

/// Final-level field for a continuous knock-out on the optimally truncated
/// domain. align_x0 requests lining the extraction point up with a node.
/// Callers must have resolved worthless barriers already: the contract here
/// is priced on [barrier, cutoff] (or [B_l, B_u]) as given.
inline ContinuousField solve_continuous_field(const BarrierContract& c, const MarketParams& m,
                                              int mesh_m, int mesh_l,
                                              const ThetaPolicy& policy = {},
                                              const CutoffConfig& cfg = {},
                                              std::optional<double> align_x0 = std::nullopt) {
    require_valid(c, m);
    ContinuousField out;
    out.market = m;
    out.problem = to_heat(c, m);
    const auto& p = out.problem;
    const double x0 = align_x0.value_or(p.log_moneyness(c.spot));

    double x_lo, x_hi;
    AdjustableEdge adj;
    switch (c.geometry.kind) {
        case BarrierKind::DownAndOut: {
            auto cut = cutoff(c, m, cfg);
            x_lo = p.x_lo_barrier;
            x_hi = cut.x_m;
            adj = AdjustableEdge::Upper;
            break;
        }
        case BarrierKind::UpAndOut: {
            auto cut = cutoff(c, m, cfg);
            x_lo = cut.x_m;
            x_hi = p.x_lo_barrier;
            adj = AdjustableEdge::Lower;
            break;
        }
        case BarrierKind::DoubleKnockOut: {
            x_lo = p.x_lo_barrier;
            x_hi = p.x_hi_barrier;
            adj = AdjustableEdge::None;
            break;
        }
        default: throw std::logic_error("unreachable");
    }

    out.grid = build_grid(x_lo, x_hi, p.tau_max,
                          mesh_m, mesh_l, align_x0 ? x0 : 0.5 * (x_lo + x_hi),
                          align_x0 ? adj : AdjustableEdge::None);
    if (!align_x0) out.grid.aligned_index.reset();
    const Grid& g = out.grid;

    out.u.resize(g.m + 1);
    for (int j = 0; j <= g.m; ++j) out.u[j] = heat_initial_condition(g.node(j), p);

    auto barrier_bc = [&](double edge_x) {
        return [&p, rb = c.rebate, edge_x](double tau) {
            return barrier_boundary_value(tau, edge_x, p, rb);
        };
    };
    auto vanilla_bc = [&](double edge_x) {
        return [&p, m, edge_x](double tau) { return vanilla_boundary_value(tau, edge_x, p, m); };
    };

    std::function<double(double)> left, right;
    switch (c.geometry.kind) {
        case BarrierKind::DownAndOut:
            left = barrier_bc(g.x_lo);
            right = vanilla_bc(g.x_hi);
            break;
        case BarrierKind::UpAndOut:
            left = vanilla_bc(g.x_lo);
            right = barrier_bc(g.x_hi);
            break;
        default:
            left = barrier_bc(g.x_lo);
            right = barrier_bc(g.x_hi);
            break;
    }

    // The barrier applies up to and including expiry, so corner nodes take the
    // boundary data rather than the payoff.
    out.u[0] = left(0.0);
    out.u[g.m] = right(0.0);

    // An extraction point aligned with the cutoff edge reads exact boundary
    // data; no time stepping can change it, so none is run. This is what makes
    // boundary-adjacent spots price on meshes as small as 2x1.
    const bool edge_extraction =
        align_x0 && g.aligned_index &&
        ((adj == AdjustableEdge::Upper && *g.aligned_index == g.m) ||
         (adj == AdjustableEdge::Lower && *g.aligned_index == 0));
    if (edge_extraction) {
        const int edge = *g.aligned_index;
        out.u[edge] = (edge == 0 ? left : right)(p.tau_max);
        return out;
    }

    const double theta = policy.resolve(g.beta);
    out.stats = run_theta_scheme(g, theta, out.u, left, right,
                                 [](int, double, const std::vector<double>&) {});
    return out;
}

/// Prices a continuously monitored knock-out call with the high-order
/// optimal-boundary pipeline (or another theta policy over the same domain).
inline PriceReport price_continuous(const BarrierContract& c, const MarketParams& m,
                                    int mesh_m, int mesh_l, const ThetaPolicy& policy = {},
                                    const CutoffConfig& cfg = {}) {
    require_valid(c, m);
    if (!c.monitoring.is_continuous())
        throw ValidationError("price_continuous needs continuous monitoring");
    detail::WallTimer timer;

    BarrierContract work = c;
    if (c.geometry.kind == BarrierKind::DoubleKnockOut) {
        auto cls = classify_double(c, m, cfg);
        switch (cls.kind) {
            case DoubleClass::NeitherActive: return detail::vanilla_short_circuit(c, m, timer);
            case DoubleClass::LowerOnly:
                work = detail::reduce_to_single(c, BarrierKind::DownAndOut);
                break;
            case DoubleClass::UpperOnly:
                work = detail::reduce_to_single(c, BarrierKind::UpAndOut);
                break;
            case DoubleClass::BothActive: break;
        }
    }
    if (work.geometry.kind != BarrierKind::DoubleKnockOut) {
        auto cut = cutoff(work, m, cfg);
        if (barrier_worthless(work.spot, cut)) return detail::vanilla_short_circuit(c, m, timer);
    }

    auto field = solve_continuous_field(work, m, mesh_m, mesh_l, policy, cfg,
                                        std::log(work.spot / work.strike));
    PriceReport rep;
    rep.value = extract_price(field.u, field.grid, field.problem.log_moneyness(work.spot),
                              field.problem);
    rep.mesh_m = field.grid.m;
    rep.mesh_l = field.grid.time_steps;
    rep.boundary_mode = BoundaryMode::Optimal;
    rep.extraction = field.grid.aligned_index ? ExtractionMode::Aligned
                                              : ExtractionMode::Interpolated;
    rep.wall_time = timer.seconds();
    return rep;
}

}  // namespace hobis
