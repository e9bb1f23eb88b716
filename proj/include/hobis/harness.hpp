#pragma once

#include <cstdio>
#include <functional>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hobis/discrete_monitor.hpp"
#include "hobis/reference_tables.hpp"
#include "hobis/scheme_lab.hpp"

namespace hobis {

enum class Scheme { Hobis, Habis, Obes, Mefd, CrankNicolson, FullyImplicit };

inline std::optional<Scheme> parse_scheme(const std::string& s) {
    if (s == "hobis") return Scheme::Hobis;
    if (s == "habis") return Scheme::Habis;
    if (s == "obes") return Scheme::Obes;
    if (s == "mefd") return Scheme::Mefd;
    if (s == "cn") return Scheme::CrankNicolson;
    if (s == "implicit") return Scheme::FullyImplicit;
    return std::nullopt;
}

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Hobis: return "hobis";
        case Scheme::Habis: return "habis";
        case Scheme::Obes: return "obes";
        case Scheme::Mefd: return "mefd";
        case Scheme::CrankNicolson: return "cn";
        case Scheme::FullyImplicit: return "implicit";
    }
    return "?";
}

/// One pricing dispatch shared by the CLI and the table runners.
struct RunOptions {
    Scheme scheme = Scheme::Hobis;
    int mesh_m = 100;
    int mesh_l = 0;  // 0: default coupling L(M, sigma)
    int rho = 0;     // 0: default
    CutoffConfig cutoff{};
    ExplicitConfig explicit_config{};
    SMaxRule s_max_rule = SMaxRule::TwoS0Plus200;
    double s_max_value = 0.0;
};

inline PriceReport run_scheme(const BarrierContract& c, const MarketParams& m,
                              const RunOptions& opt) {
    const int mesh_l = opt.mesh_l > 0 ? opt.mesh_l : default_time_steps(opt.mesh_m, m.sigma);
    switch (opt.scheme) {
        case Scheme::Hobis:
        case Scheme::CrankNicolson:
        case Scheme::FullyImplicit: {
            ThetaPolicy policy = opt.scheme == Scheme::Hobis ? ThetaPolicy::high_order()
                                 : opt.scheme == Scheme::CrankNicolson
                                     ? ThetaPolicy::crank_nicolson()
                                     : ThetaPolicy::fully_implicit();
            if (c.monitoring.is_continuous())
                return price_continuous(c, m, opt.mesh_m, mesh_l, policy, opt.cutoff);
            return price_discrete(c, m, opt.mesh_m, opt.rho, policy, opt.cutoff);
        }
        case Scheme::Habis:
            return price_habis(c, m, opt.mesh_m, mesh_l, opt.s_max_rule, opt.s_max_value);
        case Scheme::Obes: {
            ExplicitConfig cfg = opt.explicit_config;
            return price_obes(c, m, mesh_l, cfg, opt.cutoff);
        }
        case Scheme::Mefd: {
            ExplicitConfig cfg = opt.explicit_config;
            cfg.s_max_rule = opt.s_max_rule;
            cfg.s_max_value = opt.s_max_value;
            return price_mefd(c, m, mesh_l, cfg, opt.cutoff);
        }
    }
    throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Table reproduction
// ---------------------------------------------------------------------------

/// One audited number: computed vs reference with an explicit per-cell gate.
/// `CheckKind::Diverges` inverts the test (the reproduction point is that the
/// value is far from the reference, e.g. a non-convergent S_max choice).
struct TableCell {
    std::string id;
    std::string provenance;  // table the reference comes from
    double computed = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    enum class CheckKind { Match, AtMost, Diverges, Info } check = CheckKind::Match;
    double wall_time = 0.0;
    std::string note;

    bool pass() const {
        switch (check) {
            case CheckKind::Match: return std::abs(computed - reference) <= tolerance;
            case CheckKind::AtMost: return computed <= reference + tolerance;
            case CheckKind::Diverges: return std::abs(computed - reference) > tolerance;
            case CheckKind::Info: return true;
        }
        return false;
    }
};

struct TableResult {
    std::string table_id;
    std::vector<TableCell> cells;

    bool all_pass() const {
        for (const auto& c : cells)
            if (!c.pass()) return false;
        return true;
    }
    int failures() const {
        int n = 0;
        for (const auto& c : cells) n += !c.pass();
        return n;
    }
};

namespace detail {

inline std::vector<TableCell> run_cells(std::vector<std::function<TableCell()>>& jobs,
                                        bool parallel) {
    std::vector<TableCell> out(jobs.size());
    if (!parallel) {
        for (size_t i = 0; i < jobs.size(); ++i) out[i] = jobs[i]();
        return out;
    }
    std::vector<std::future<TableCell>> futs;
    futs.reserve(jobs.size());
    for (auto& j : jobs) futs.push_back(std::async(std::launch::async, j));
    for (size_t i = 0; i < futs.size(); ++i) out[i] = futs[i].get();
    return out;
}

inline BarrierContract t1_contract(double s0) {
    BarrierContract c;
    c.strike = 100.0;
    c.expiry = 1.0;
    c.spot = s0;
    c.geometry = BarrierGeometry::down_and_out(90.0);
    return c;
}

inline std::string fmt_cell_id(const std::string& base, int i) {
    return base + "[" + std::to_string(i) + "]";
}

}  // namespace detail

/// Search for the smallest mesh (by node count, trying L=1 then L=M per M)
/// whose price lands within tol of the reference. Inadmissible candidates are
/// skipped. Mirrors the published minimal-mesh columns, which are reproduced
/// as a procedure rather than asserted exactly.
struct MeshSearchResult {
    bool found = false;
    int mesh_m = 0, mesh_l = 0;
    double value = 0.0;
};

inline MeshSearchResult minimal_mesh(const BarrierContract& c, const MarketParams& m,
                                     double reference, double tol, Scheme scheme,
                                     const CutoffConfig& cfg = {}, int cap = 450) {
    std::vector<std::pair<int, int>> candidates;
    for (int mm = 2; mm <= cap; mm = mm < 30 ? mm + 1 : mm < 100 ? mm + 5 : mm + 15) {
        candidates.push_back({mm, 1});
        candidates.push_back({mm, mm});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) {
                         return static_cast<long>(a.first) * a.second <
                                static_cast<long>(b.first) * b.second;
                     });
    for (auto [mm, ll] : candidates) {
        try {
            PriceReport rep;
            if (scheme == Scheme::Habis)
                rep = price_habis(c, m, mm, ll);
            else
                rep = price_continuous(c, m, mm, ll, ThetaPolicy::high_order(), cfg);
            if (std::abs(rep.value - reference) <= tol) return {true, mm, ll, rep.value};
        } catch (const NumericalError&) {
            // inadmissible mesh ratio or unstable weights: not a candidate
        }
    }
    return {};
}

// --- individual table runners ----------------------------------------------

inline TableResult run_table_t1(bool parallel) {
    const MarketParams m{0.10, 0.0, 0.25};
    std::vector<std::function<TableCell()>> jobs;
    for (size_t i = 0; i < std::size(ref::kTable1); ++i) {
        const auto row = ref::kTable1[i];
        const bool anomaly = row.steps == 150;
        auto price_cell = [=](const char* tag, double s0, double reference, bool mefd,
                              SMaxRule rule, TableCell::CheckKind kind, double tol,
                              std::string note) {
            return [=]() {
                auto c = detail::t1_contract(s0);
                RunOptions opt;
                opt.scheme = mefd ? Scheme::Mefd : Scheme::Obes;
                opt.mesh_l = row.steps;
                opt.s_max_rule = rule;
                auto rep = run_scheme(c, m, opt);
                TableCell cell;
                cell.id = std::string(tag) + " L=" + std::to_string(row.steps) +
                          " S0=" + std::to_string(static_cast<int>(s0));
                cell.provenance = "T1";
                cell.computed = rep.value;
                cell.reference = reference;
                cell.tolerance = tol;
                cell.check = kind;
                cell.wall_time = rep.wall_time;
                cell.note = std::move(note);
                return cell;
            };
        };
        const double tol = anomaly ? 2e-3 : 1e-3;
        const std::string note =
            anomaly ? "printed OBES/MEFD pair disagrees by 3.2e-3 at this L" : "";
        jobs.push_back(price_cell("obes", 95.0, row.obes_95, false, SMaxRule::TwoS0Plus200,
                                  TableCell::CheckKind::Match, tol, note));
        jobs.push_back(price_cell("obes", 91.0, row.obes_91, false, SMaxRule::TwoS0Plus200,
                                  TableCell::CheckKind::Match, 1e-3, ""));
        jobs.push_back(price_cell("mefd+200", 95.0, row.mefd_plus_95, true,
                                  SMaxRule::TwoS0Plus200, TableCell::CheckKind::Match, tol,
                                  note));
        jobs.push_back(price_cell("mefd+200", 91.0, row.mefd_plus_91, true,
                                  SMaxRule::TwoS0Plus200, TableCell::CheckKind::Match, 1e-3,
                                  ""));
        // the 2 S0 rule does not converge; assert distance from the closed form
        jobs.push_back(price_cell("mefd-2s0", 95.0, ref::kT1ClosedForm95, true, SMaxRule::TwoS0,
                                  TableCell::CheckKind::Diverges, 0.5,
                                  "non-convergent S_max choice"));
    }
    TableResult out;
    out.table_id = "T1";
    out.cells = detail::run_cells(jobs, parallel);
    return out;
}

inline TableResult run_table_t2(bool parallel) {
    std::vector<std::function<TableCell()>> jobs;
    for (const auto& row : ref::kTable2) {
        const MarketParams m{0.10, 0.0, row.sigma};
        auto mk = [=](const char* tag, double reference, Scheme scheme, SMaxRule rule,
                      TableCell::CheckKind kind, double tol) {
            return [=]() {
                auto c = detail::t1_contract(95.0);
                TableCell cell;
                cell.id = std::string(tag) + " sigma=" + std::to_string(row.sigma).substr(0, 4) +
                          " L=" + std::to_string(row.steps);
                cell.provenance = "T2";
                cell.reference = reference;
                cell.tolerance = tol;
                cell.check = kind;
                if (scheme == Scheme::Hobis) {  // closed-form column
                    cell.computed = down_and_out_call(95, 100, 90, 1, 0.10, 0, row.sigma, 0);
                } else {
                    RunOptions opt;
                    opt.scheme = scheme;
                    opt.mesh_l = row.steps;
                    opt.s_max_rule = rule;
                    auto rep = run_scheme(c, m, opt);
                    cell.computed = rep.value;
                    cell.wall_time = rep.wall_time;
                }
                return cell;
            };
        };
        jobs.push_back(mk("obes", row.obes, Scheme::Obes, SMaxRule::TwoS0Plus200,
                          TableCell::CheckKind::Match, 1e-3));
        jobs.push_back(mk("mefd+200", row.mefd_plus, Scheme::Mefd, SMaxRule::TwoS0Plus200,
                          TableCell::CheckKind::Match, row.sigma > 0.27 ? 5e-3 : 1e-3));
        jobs.push_back(mk("mefd-2s0", row.closed_form, Scheme::Mefd, SMaxRule::TwoS0,
                          TableCell::CheckKind::Diverges, row.sigma > 0.35   ? 3.0
                                                          : row.sigma > 0.27 ? 1.0
                                                                             : 0.5));
        jobs.push_back(mk("closed-form", row.closed_form, Scheme::Hobis,
                          SMaxRule::TwoS0Plus200, TableCell::CheckKind::Match, 5e-4));
    }
    TableResult out;
    out.table_id = "T2";
    out.cells = detail::run_cells(jobs, parallel);
    return out;
}

inline TableResult run_table_t3(bool parallel) {
    std::vector<std::function<TableCell()>> jobs;
    for (const auto& row : ref::kTable3) {
        const MarketParams m = row.set == 1 ? MarketParams{0.05, 0.0, 0.20}
                                            : MarketParams{0.07, 0.0, 0.45};
        const double expiry = row.set == 1 ? 0.25 : 1.0;
        const CutoffConfig cfg{row.set == 1 ? 4.2 : 4.4};
        auto contract = [=]() {
            BarrierContract c;
            c.strike = 150.0;
            c.expiry = expiry;
            c.spot = row.s0;
            c.geometry = BarrierGeometry::down_and_out(180.0);
            return c;
        };
        jobs.push_back([=]() {
            TableCell cell;
            cell.id = "closed-form set" + std::to_string(row.set) + " S0=" +
                      std::to_string(row.s0).substr(0, 8);
            cell.provenance = "T3";
            cell.computed = down_and_out_call(row.s0, 150, 180, expiry, m.r, 0, m.sigma, 0);
            cell.reference = row.closed_form;
            cell.tolerance = 2e-3;
            if (row.misprint) {
                cell.check = TableCell::CheckKind::Info;
                cell.note = "printed value duplicates the previous row; formula gives the "
                            "computed value";
            }
            return cell;
        });
        jobs.push_back([=]() {
            auto c = contract();
            auto rep = price_continuous(c, m, row.mesh_m, row.mesh_l, ThetaPolicy::high_order(),
                                        cfg);
            TableCell cell;
            cell.id = "hobis set" + std::to_string(row.set) + " S0=" +
                      std::to_string(row.s0).substr(0, 8) + " " + std::to_string(row.mesh_m) +
                      "x" + std::to_string(row.mesh_l);
            cell.provenance = "T3";
            cell.computed = rep.value;
            cell.reference = down_and_out_call(row.s0, 150, 180, expiry, m.r, 0, m.sigma, 0);
            cell.tolerance = 1.5e-3;
            cell.wall_time = rep.wall_time;
            cell.note = "published minimal mesh vs closed form";
            return cell;
        });
    }
    // mesh-search comparison on the set-1 rows with published HABIS meshes
    for (const auto& hrow : ref::kTable3Habis) {
        jobs.push_back([=]() {
            const MarketParams m{0.05, 0.0, 0.20};
            BarrierContract c;
            c.strike = 150.0;
            c.expiry = 0.25;
            c.spot = hrow.s0;
            c.geometry = BarrierGeometry::down_and_out(180.0);
            const double cf = down_and_out_call(hrow.s0, 150, 180, 0.25, 0.05, 0, 0.20, 0);
            const double tol = std::max(5e-4, 2e-5 * std::abs(cf));
            auto ho = minimal_mesh(c, m, cf, tol, Scheme::Hobis, CutoffConfig{4.2});
            auto ha = minimal_mesh(c, m, cf, tol, Scheme::Habis, CutoffConfig{4.2});
            TableCell cell;
            cell.id = "mesh-search S0=" + std::to_string(hrow.s0).substr(0, 8);
            cell.provenance = "T3";
            cell.computed = ho.found ? ho.mesh_m : 1e9;
            cell.reference = ha.found ? ha.mesh_m : -1e9;
            cell.tolerance = 0;
            // the optimal boundary must not need a finer mesh than the
            // approximate one
            cell.check = TableCell::CheckKind::AtMost;
            cell.note = "minimal mesh M: optimal boundary (computed) vs approximate "
                        "(reference); published " +
                        std::to_string(hrow.habis_mesh) + " for the approximate column";
            return cell;
        });
    }
    TableResult out;
    out.table_id = "T3";
    out.cells = detail::run_cells(jobs, parallel);
    return out;
}

inline TableResult run_table_t4(bool parallel) {
    std::vector<std::function<TableCell()>> jobs;
    for (const auto& row : ref::kTable4) {
        jobs.push_back([=]() {
            BarrierContract c;
            c.strike = 100.0;
            c.expiry = row.expiry;
            c.rebate = row.rebate;
            c.geometry = row.double_barrier ? BarrierGeometry::double_knock_out(75, 125)
                                            : BarrierGeometry::down_and_out(90);
            c.spot = row.double_barrier ? 100.0 : 95.0;
            const MarketParams m{0.10, 0.0, row.sigma};
            auto prof = error_profile(c, m, row.mesh, row.mesh);
            TableCell cell;
            cell.id = std::string(row.double_barrier ? "dko" : "down") +
                      " sigma=" + std::to_string(row.sigma).substr(0, 4) +
                      " T=" + std::to_string(row.expiry).substr(0, 4) +
                      (row.rebate > 0 ? " Rb=3" : "") + " " + std::to_string(row.mesh) + "x" +
                      std::to_string(row.mesh);
            cell.provenance = "T4";
            cell.computed = prof.max_abs;
            cell.reference = row.max_error;
            // tighter gates where the published error is sharp, otherwise a
            // same-order gate
            if (!row.double_barrier && row.mesh == 20)
                cell.tolerance = 5e-3;
            else if (!row.double_barrier && row.mesh == 100 && row.expiry == 0.5)
                cell.tolerance = 1e-4;
            else if (row.double_barrier && row.mesh == 100)
                cell.tolerance = 1e-2;
            else
                cell.tolerance = 6.0 * row.max_error;
            cell.check = TableCell::CheckKind::AtMost;
            cell.reference = 0.0;
            cell.note = "max-abs nodal error; published " + std::to_string(row.max_error);
            return cell;
        });
    }
    TableResult out;
    out.table_id = "T4";
    out.cells = detail::run_cells(jobs, parallel);
    return out;
}

inline TableResult run_table_t5(bool parallel) {
    std::vector<std::function<TableCell()>> jobs;
    for (const auto& row : ref::kTable5) {
        auto mk = [=](bool dbl, double reference) {
            return [=]() {
                BarrierContract c;
                c.strike = 100.0;
                c.expiry = 0.5;
                c.spot = 100.0;
                c.geometry = dbl ? BarrierGeometry::double_knock_out(95, 125)
                                 : BarrierGeometry::down_and_out(99.9);
                const MarketParams m{0.10, 0.0, 0.20};
                TableCell cell;
                cell.id = std::string(dbl ? "dko" : "down") + " " + row.frequency;
                cell.provenance = "T5";
                cell.reference = reference;
                if (row.dates == 0) {
                    c.monitoring = MonitoringPolicy::continuous();
                    auto rep = price_continuous(c, m, 200, 200);
                    cell.computed = rep.value;
                    cell.tolerance = 2e-3;
                    cell.wall_time = rep.wall_time;
                } else {
                    c.monitoring = MonitoringPolicy::explicit_count(row.dates);
                    auto rep = price_discrete(c, m, 3000, (12000 + row.dates - 1) / row.dates);
                    cell.computed = rep.value;
                    cell.tolerance = 5e-3;
                    cell.wall_time = rep.wall_time;
                }
                return cell;
            };
        };
        jobs.push_back(mk(false, row.down));
        jobs.push_back(mk(true, row.dko));
    }
    TableResult out;
    out.table_id = "T5";
    out.cells = detail::run_cells(jobs, parallel);
    return out;
}

inline TableResult run_table_t6(bool parallel) {
    std::vector<std::function<TableCell()>> jobs;
    for (const auto& row : ref::kTable6) {
        auto run = [=]() {
            BarrierContract c;
            c.strike = 100.0;
            c.expiry = 0.5;
            c.spot = 100.0;
            c.geometry = BarrierGeometry::down_and_out(row.barrier);
            c.monitoring = MonitoringPolicy::explicit_count(row.dates);
            const MarketParams m{0.10, 0.0, 0.20};
            return price_discrete(c, m, 3000, (12000 + row.dates - 1) / row.dates);
        };
        jobs.push_back([=]() {
            auto rep = run();
            TableCell cell;
            cell.id = "N=" + std::to_string(row.dates) + " B=" +
                      std::to_string(row.barrier).substr(0, 5) + " vs published";
            cell.provenance = "T6";
            cell.computed = rep.value;
            cell.reference = row.hobis;
            cell.tolerance = 5e-3;
            cell.wall_time = rep.wall_time;
            return cell;
        });
        jobs.push_back([=]() {
            auto rep = run();
            TableCell cell;
            cell.id = "N=" + std::to_string(row.dates) + " B=" +
                      std::to_string(row.barrier).substr(0, 5) + " vs wiener-hopf";
            cell.provenance = "T6";
            cell.computed = rep.value;
            cell.reference = row.wiener_hopf;
            cell.tolerance = 1e-2;
            cell.wall_time = rep.wall_time;
            return cell;
        });
    }
    TableResult out;
    out.table_id = "T6";
    out.cells = detail::run_cells(jobs, parallel);
    return out;
}

inline TableResult run_table_t7(bool parallel) {
    std::vector<std::function<TableCell()>> jobs;
    int idx = 0;
    for (const auto& row : ref::kTable7) {
        ++idx;
        auto contract = [=](bool discrete) {
            BarrierContract c;
            c.strike = 100.0;
            c.expiry = 0.5;
            c.spot = 100.0;
            c.rebate = row.rebate;
            if (row.kind == 0) c.geometry = BarrierGeometry::down_and_out(row.b_lo);
            else if (row.kind == 1) c.geometry = BarrierGeometry::up_and_out(row.b_lo);
            else c.geometry = BarrierGeometry::double_knock_out(row.b_lo, row.b_hi);
            if (discrete) c.monitoring = MonitoringPolicy::explicit_count(25);
            return c;
        };
        const MarketParams m{0.10, row.q, 0.20};
        const char* kind_tag = row.kind == 0 ? "down" : row.kind == 1 ? "up" : "dko";
        jobs.push_back([=]() {
            auto rep = price_continuous(contract(false), m, 200, 200);
            TableCell cell;
            cell.id = std::string(kind_tag) + "#" + std::to_string(idx) + " continuous";
            cell.provenance = "T7";
            cell.computed = rep.value;
            cell.reference = row.continuous_value;
            cell.tolerance = 5e-3;
            cell.wall_time = rep.wall_time;
            return cell;
        });
        jobs.push_back([=]() {
            auto rep = price_discrete(contract(true), m, 1500, 240);
            TableCell cell;
            cell.id = std::string(kind_tag) + "#" + std::to_string(idx) + " discrete N=25";
            cell.provenance = "T7";
            cell.computed = rep.value;
            cell.reference = row.discrete_value;
            cell.tolerance = 5e-3;
            cell.check = TableCell::CheckKind::Info;  // discrete column is informational
            cell.wall_time = rep.wall_time;
            return cell;
        });
    }
    TableResult out;
    out.table_id = "T7";
    out.cells = detail::run_cells(jobs, parallel);
    return out;
}

namespace detail {

inline void append_profile_samples(TableResult& table, const ErrorProfile& prof,
                                   const std::string& tag) {
    for (size_t j = 0; j < prof.spot.size(); ++j) {
        char buf[48];
        std::snprintf(buf, sizeof buf, " S=%.6g", prof.spot[j]);
        TableCell cell;
        cell.id = tag + buf;
        cell.provenance = table.table_id;
        cell.computed = prof.error[j];
        cell.check = TableCell::CheckKind::Info;
        cell.note = "error sample";
        table.cells.push_back(std::move(cell));
    }
}

}  // namespace detail

/// F1: double knock-out convergence; emits the per-node error samples for
/// plotting plus one gated max-error cell per mesh.
inline TableResult run_table_f1(bool) {
    TableResult out;
    out.table_id = "F1";
    BarrierContract c;
    c.strike = 100.0;
    c.expiry = 0.5;
    c.spot = 100.0;
    c.geometry = BarrierGeometry::double_knock_out(75, 125);
    const MarketParams m{0.10, 0.0, 0.20};
    for (size_t i = 0; i < std::size(ref::kF1Meshes); ++i) {
        const int mesh = ref::kF1Meshes[i];
        auto prof = error_profile(c, m, mesh, mesh);
        TableCell cell;
        cell.id = "dko 75/125 max-abs error " + std::to_string(mesh) + "x" +
                  std::to_string(mesh);
        cell.provenance = "F1";
        cell.computed = prof.max_abs;
        cell.reference = 0.0;
        cell.tolerance = ref::kF1Gate[i];
        cell.check = TableCell::CheckKind::AtMost;
        out.cells.push_back(std::move(cell));
        detail::append_profile_samples(out, prof,
                                       std::to_string(mesh) + "x" + std::to_string(mesh));
    }
    return out;
}

/// F2 = three-scheme error profile, F3 = the two best schemes (a zoomed view
/// of the same data). One gated max-error cell per scheme plus the node-level
/// error samples.
inline TableResult run_table_f2(bool, bool two_schemes = false) {
    TableResult out;
    out.table_id = two_schemes ? "F3" : "F2";
    const ThetaPolicy policies[] = {ThetaPolicy::high_order(), ThetaPolicy::crank_nicolson(),
                                    ThetaPolicy::fully_implicit()};
    const char* names[] = {"high-order", "crank-nicolson", "fully-implicit"};
    const int n_schemes = two_schemes ? 2 : 3;
    BarrierContract c;
    c.strike = 100.0;
    c.expiry = 0.5;
    c.spot = 95.0;
    c.geometry = BarrierGeometry::down_and_out(90.0);
    const MarketParams m{0.10, 0.0, 0.20};
    for (int s = 0; s < n_schemes; ++s) {
        auto prof = error_profile(c, m, 40, 40, policies[s], CutoffConfig{ref::kF2Delta});
        TableCell cell;
        cell.id = std::string(names[s]) + " 40x40 max-abs error";
        cell.provenance = out.table_id;
        cell.computed = prof.max_abs;
        cell.reference = ref::kF2MaxError[s];
        cell.tolerance = ref::kF2MaxError[s];  // within a factor of 2
        out.cells.push_back(std::move(cell));
        detail::append_profile_samples(out, prof, names[s]);
    }
    return out;
}

inline TableResult run_table(const std::string& id, bool parallel = false) {
    if (id == "T1") return run_table_t1(parallel);
    if (id == "T2") return run_table_t2(parallel);
    if (id == "T3") return run_table_t3(parallel);
    if (id == "T4") return run_table_t4(parallel);
    if (id == "T5") return run_table_t5(parallel);
    if (id == "T6") return run_table_t6(parallel);
    if (id == "T7") return run_table_t7(parallel);
    if (id == "F1") return run_table_f1(parallel);
    if (id == "F2") return run_table_f2(parallel);
    if (id == "F3") return run_table_f2(parallel, true);
    throw std::invalid_argument("unknown table id: " + id);
}

// ---------------------------------------------------------------------------
// Convergence ladders and scheme comparison
// ---------------------------------------------------------------------------

struct ConvergenceRow {
    int mesh_m = 0, mesh_l = 0;
    double value = 0.0;
    double abs_error = 0.0;  // NaN when no reference is available
    double wall_time = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    std::optional<double> observed_order;
};

/// Prices the same contract over a ladder of meshes. With a reference, the
/// observed order comes from the error ratio of the last doubling; otherwise
/// from the Richardson ratio of the last three values.
inline ConvergenceReport converge(const BarrierContract& c, const MarketParams& m,
                                  const std::vector<int>& levels,
                                  std::optional<double> reference, const RunOptions& base) {
    ConvergenceReport rep;
    for (int level : levels) {
        RunOptions opt = base;
        if (opt.scheme == Scheme::Obes || opt.scheme == Scheme::Mefd) {
            opt.mesh_l = level;
        } else {
            opt.mesh_m = level;
            opt.mesh_l = base.mesh_l > 0 ? base.mesh_l : 0;
        }
        auto r = run_scheme(c, m, opt);
        ConvergenceRow row;
        row.mesh_m = r.mesh_m;
        row.mesh_l = r.mesh_l;
        row.value = r.value;
        row.abs_error = reference ? std::abs(r.value - *reference)
                                  : std::numeric_limits<double>::quiet_NaN();
        row.wall_time = r.wall_time;
        rep.rows.push_back(row);
    }
    const auto& rows = rep.rows;
    if (reference && rows.size() >= 2) {
        const double e0 = rows[rows.size() - 2].abs_error;
        const double e1 = rows[rows.size() - 1].abs_error;
        if (e0 > 0 && e1 > 0) rep.observed_order = std::log2(e0 / e1);
    } else if (rows.size() >= 3) {
        const double d0 = std::abs(rows[rows.size() - 2].value - rows[rows.size() - 3].value);
        const double d1 = std::abs(rows[rows.size() - 1].value - rows[rows.size() - 2].value);
        if (d0 > 0 && d1 > 0) rep.observed_order = std::log2(d0 / d1);
    }
    return rep;
}

struct CompareRow {
    std::string scheme;
    double value = 0.0;
    double max_error = 0.0;  // NaN when no closed form is available
    double wall_time = 0.0;
};

/// One row per scheme at a fixed contract and mesh; max_error comes from the
/// whole-grid profile when the implicit pipeline and a closed form apply.
inline std::vector<CompareRow> compare_schemes(const BarrierContract& c, const MarketParams& m,
                                               const std::vector<Scheme>& schemes,
                                               const RunOptions& base) {
    std::vector<CompareRow> rows;
    for (Scheme s : schemes) {
        RunOptions opt = base;
        opt.scheme = s;
        CompareRow row;
        row.scheme = scheme_name(s);
        auto rep = run_scheme(c, m, opt);
        row.value = rep.value;
        row.wall_time = rep.wall_time;
        row.max_error = std::numeric_limits<double>::quiet_NaN();
        if (c.monitoring.is_continuous() &&
            (s == Scheme::Hobis || s == Scheme::CrankNicolson || s == Scheme::FullyImplicit)) {
            ThetaPolicy policy = s == Scheme::Hobis ? ThetaPolicy::high_order()
                                 : s == Scheme::CrankNicolson ? ThetaPolicy::crank_nicolson()
                                                              : ThetaPolicy::fully_implicit();
            const int mesh_l =
                base.mesh_l > 0 ? base.mesh_l : default_time_steps(base.mesh_m, m.sigma);
            row.max_error =
                error_profile(c, m, base.mesh_m, mesh_l, policy, base.cutoff).max_abs;
        }
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// CSV assembly: header row, '.' decimal, 6 significant digits for prices,
// 3 for errors.
// ---------------------------------------------------------------------------

namespace csv {

inline std::string num(double v, int significant = 6) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant, v);
    return buf;
}

inline std::string quote(const std::string& s) {
    if (s.find(',') == std::string::npos && s.find('"') == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

}  // namespace csv

inline std::string to_csv(const TableResult& table) {
    std::ostringstream os;
    os << "table,cell,provenance,computed,reference,tolerance,check,pass,wall_time,note\n";
    for (const auto& c : table.cells) {
        const char* kind = c.check == TableCell::CheckKind::Match      ? "match"
                           : c.check == TableCell::CheckKind::Diverges ? "diverges"
                                                                       : "info";
        os << table.table_id << ',' << csv::quote(c.id) << ',' << c.provenance << ','
           << csv::num(c.computed) << ',' << csv::num(c.reference) << ','
           << csv::num(c.tolerance, 3) << ',' << kind << ',' << (c.pass() ? "1" : "0") << ','
           << csv::num(c.wall_time, 3) << ',' << csv::quote(c.note) << '\n';
    }
    return os.str();
}

inline std::string to_csv(const ConvergenceReport& rep) {
    std::ostringstream os;
    os << "mesh_m,mesh_l,value,abs_error,wall_time\n";
    for (const auto& r : rep.rows)
        os << r.mesh_m << ',' << r.mesh_l << ',' << csv::num(r.value) << ','
           << csv::num(r.abs_error, 3) << ',' << csv::num(r.wall_time, 3) << '\n';
    if (rep.observed_order)
        os << "observed_order,,," << csv::num(*rep.observed_order, 3) << ",\n";
    return os.str();
}

inline std::string to_csv(const std::vector<CompareRow>& rows) {
    std::ostringstream os;
    os << "scheme,value,max_error,wall_time\n";
    for (const auto& r : rows)
        os << r.scheme << ',' << csv::num(r.value) << ',' << csv::num(r.max_error, 3) << ','
           << csv::num(r.wall_time, 3) << '\n';
    return os.str();
}

}  // namespace hobis
