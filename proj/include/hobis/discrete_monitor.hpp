#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hobis/pde_engine.hpp"

namespace hobis {

/// Monitoring dates equally spaced over (0, T], the last one at expiry, with
/// rho diffusion steps between consecutive dates: L = N * rho time levels.
struct MonitoringSchedule {
    int dates = 0;               // N
    int steps_per_interval = 0;  // rho
    std::vector<double> times;   // years, strictly increasing, last == T

    int total_steps() const { return dates * steps_per_interval; }
};

inline MonitoringSchedule schedule(const MonitoringPolicy& policy, double expiry, int rho) {
    if (!(expiry > 0.0)) throw ValidationError("expiry must be positive");
    if (rho < 1) throw ValidationError("rho must be at least 1");
    if (policy.is_continuous())
        throw ValidationError("schedule() needs a discrete monitoring policy");
    const int n = policy.dates(expiry);
    if (n < 1) throw ValidationError("monitoring policy yields no dates");
    MonitoringSchedule s;
    s.dates = n;
    s.steps_per_interval = rho;
    s.times.resize(n);
    for (int i = 1; i <= n; ++i) s.times[i - 1] = expiry * i / n;
    return s;
}

/// Default steps-per-interval so the total step count tracks the usual L(M)
/// coupling.
inline int default_rho(int mesh_m, int dates, double sigma) {
    const int l_target = default_time_steps(mesh_m, sigma);
    return std::max(1, (l_target + dates - 1) / dates);
}

/// Which side(s) of the domain knock out, with the barrier levels in x.
struct KnockoutRegion {
    bool below = false;
    double x_down = 0.0;
    bool above = false;
    double x_up = 0.0;
};

/// Monitoring-date projection: every node beyond a barrier takes the
/// transformed rebate value (Rb/K) e^{-(alpha x + gamma tau)}; live nodes are
/// untouched. Barriers sit midway between nodes so membership is unambiguous.
inline void project_knockout(std::vector<double>& u, const Grid& g,
                             const KnockoutRegion& region, double rebate,
                             const TransformedProblem& p, double tau) {
    for (int j = 0; j <= g.m; ++j) {
        const double x = g.node(j);
        const bool out = (region.below && x <= region.x_down) ||
                         (region.above && x >= region.x_up);
        if (out) u[j] = barrier_boundary_value(tau, x, p, rebate);
    }
}

namespace detail {

/// Lattice with every barrier midway between nodes, extended past the
/// knocked-out side(s) and truncated at the continuous cutoff on a live side.
/// dx is tuned so x0 also lands on a node when that is possible without
/// distorting the requested resolution.
struct DiscreteGridSpec {
    Grid grid;
    KnockoutRegion region;
};

inline Grid lattice_between(double anchor, double dx, double want_lo, double want_hi,
                            double x0, int time_steps, double tau_max) {
    // anchor is a node of the intended lattice; snap edges outward to cover
    // [want_lo, want_hi].
    const int n_below = static_cast<int>(std::ceil((anchor - want_lo) / dx - 1e-12));
    const int n_above = static_cast<int>(std::ceil((want_hi - anchor) / dx - 1e-12));
    Grid g;
    g.m = n_below + n_above;
    g.time_steps = time_steps;
    g.dx = dx;
    g.x_lo = anchor - n_below * dx;
    g.x_hi = anchor + n_above * dx;
    g.dtau = tau_max / time_steps;
    g.beta = g.dtau / (dx * dx);
    const double pos = (x0 - g.x_lo) / dx;
    const double nearest = std::lround(pos);
    if (std::abs(pos - nearest) < 1e-9 && nearest >= 0 && nearest <= g.m)
        g.aligned_index = static_cast<int>(nearest);
    return g;
}

inline DiscreteGridSpec build_discrete_grid(const BarrierContract& c,
                                            const TransformedProblem& p,
                                            const MarketParams& m, int mesh_m,
                                            int time_steps, const CutoffConfig& cfg,
                                            double extension) {
    const double x0 = p.log_moneyness(c.spot);
    DiscreteGridSpec spec;

    if (c.geometry.kind == BarrierKind::DoubleKnockOut) {
        const double x_bl = p.x_lo_barrier;
        const double x_bu = p.x_hi_barrier;
        spec.region = {true, x_bl, true, x_bu};
        // discrete contracts may start beyond a barrier; keep x0 covered
        const double want_lo = std::min(x_bl - extension, x0);
        const double want_hi = std::max(x_bu + extension, x0);
        const double dx_nom = (want_hi - want_lo) / mesh_m;
        // both barriers midway: their separation must be a whole number of dx
        const int span_steps = std::max(1, static_cast<int>(std::lround((x_bu - x_bl) / dx_nom)));
        const double dx = (x_bu - x_bl) / span_steps;
        spec.grid = lattice_between(x_bl + 0.5 * dx, dx, want_lo, want_hi, x0, time_steps,
                                    p.tau_max);
        return spec;
    }

    const bool down = c.geometry.kind == BarrierKind::DownAndOut;
    const double x_b = p.x_lo_barrier;
    auto cut = cutoff(c, m, cfg);
    const double want_lo = down ? std::min(x_b - extension, x0) : cut.x_m;
    const double want_hi = down ? cut.x_m : std::max(x_b + extension, x0);
    spec.region = down ? KnockoutRegion{true, x_b, false, 0.0}
                       : KnockoutRegion{false, 0.0, true, x_b};

    const double dx_nom = (want_hi - want_lo) / mesh_m;
    const double dist = std::abs(x0 - x_b);
    // n + 1/2 grid increments between the barrier and x0 puts the barrier
    // midway AND x0 on a node; fall back to midway only if that would force a
    // badly distorted dx.
    const int half_steps = static_cast<int>(std::lround(dist / dx_nom - 0.5));
    double dx = dx_nom;
    double anchor = x_b + 0.5 * dx;  // a node just above the barrier
    if (half_steps >= 0) {
        const double dx_adj = dist / (half_steps + 0.5);
        if (dx_adj > 0.5 * dx_nom && dx_adj < 2.0 * dx_nom) {
            dx = dx_adj;
            anchor = x0;
        }
    }
    spec.grid = lattice_between(anchor, dx, want_lo, want_hi, x0, time_steps, p.tau_max);
    return spec;
}

}  // namespace detail

/// Full final-level field of a discretely monitored solve.
struct DiscreteField {
    Grid grid;
    TransformedProblem problem;
    std::vector<double> u;
    HeatRunStats stats;
    MonitoringSchedule monitoring;
};

inline DiscreteField solve_discrete_field(const BarrierContract& c, const MarketParams& m,
                                          int mesh_m, int rho, const ThetaPolicy& policy = {},
                                          const CutoffConfig& cfg = {},
                                          std::optional<double> extension = std::nullopt) {
    require_valid(c, m);
    if (c.monitoring.is_continuous())
        throw ValidationError("solve_discrete_field needs discrete monitoring");
    cfg.check();

    DiscreteField out;
    out.problem = to_heat(c, m);
    const auto& p = out.problem;
    out.monitoring = schedule(c.monitoring, c.expiry, rho);
    const int total_steps = out.monitoring.total_steps();
    const double ext = extension.value_or(cfg.delta * m.sigma * std::sqrt(c.expiry));

    auto spec = detail::build_discrete_grid(c, p, m, mesh_m, total_steps, cfg, ext);
    out.grid = spec.grid;
    const Grid& g = out.grid;
    const double theta = policy.resolve(g.beta);

    out.u.resize(g.m + 1);
    for (int j = 0; j <= g.m; ++j) out.u[j] = heat_initial_condition(g.node(j), p);
    // expiry itself is a monitoring date
    project_knockout(out.u, g, spec.region, c.rebate, p, 0.0);

    // Deep beyond a barrier the next monitoring date knocks the option out
    // almost surely, so a far edge carries the rebate value; a live-side edge
    // sits past the continuous cutoff and carries the exact vanilla value.
    auto edge_bc = [&](double edge_x, bool knocked_side) {
        return [&p, m, rb = c.rebate, edge_x, knocked_side](double tau) {
            return knocked_side ? barrier_boundary_value(tau, edge_x, p, rb)
                                : vanilla_boundary_value(tau, edge_x, p, m);
        };
    };
    auto left = edge_bc(g.x_lo, spec.region.below);
    auto right = edge_bc(g.x_hi, spec.region.above);

    const int rho_steps = out.monitoring.steps_per_interval;
    auto monitor_hook = [&](int lvl, double tau, std::vector<double>& u) {
        if (lvl % rho_steps == 0 && lvl < total_steps)
            project_knockout(u, g, spec.region, c.rebate, p, tau);
    };
    out.stats = run_theta_scheme(g, theta, out.u, left, right, monitor_hook);
    return out;
}

/// Prices a discretely monitored knock-out call: free diffusion between
/// monitoring dates on a domain extending past the barrier(s), knock-out
/// projection at each date, rebate paid at the breach date.
inline PriceReport price_discrete(const BarrierContract& c, const MarketParams& m, int mesh_m,
                                  int rho, const ThetaPolicy& policy = {},
                                  const CutoffConfig& cfg = {}) {
    require_valid(c, m);
    if (c.monitoring.is_continuous())
        throw ValidationError("price_discrete needs discrete monitoring");
    detail::WallTimer timer;

    // Continuous worthlessness implies discrete worthlessness, so the same
    // classification short-circuits apply.
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

    if (rho < 1) rho = default_rho(mesh_m, work.monitoring.dates(work.expiry), m.sigma);
    auto field = solve_discrete_field(work, m, mesh_m, rho, policy, cfg);

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
