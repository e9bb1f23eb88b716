// Command-line pricer and reproduction harness for the barrier-option engine.
//
// Subcommands:
//   price     price one contract with a chosen scheme
//   converge  mesh ladder with errors and the observed convergence order
//   table     reproduce a published benchmark table (T1..T7, F1..F3) as CSV
//   compare   several schemes on the same contract and mesh
//
// Exit codes: 0 ok, 1 usage, 2 validation error, 3 numerical failure,
// 4 table-reproduction failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "hobis/harness.hpp"

namespace {

struct ContractFlags {
    std::string config_path;
    double s0 = 0, strike = 0, expiry = 0, barrier = 0, barrier_low = 0, barrier_high = 0;
    double rebate = 0, r = 0, q = 0, sigma = 0;
    std::string type = "down";
    std::string monitoring = "continuous";
};

void add_contract_flags(CLI::App* cmd, ContractFlags& f) {
    cmd->add_option("--config", f.config_path, "contract file (key = value lines)");
    cmd->add_option("--s0", f.s0, "initial asset price");
    cmd->add_option("--k", f.strike, "strike");
    cmd->add_option("--t", f.expiry, "expiry in years");
    cmd->add_option("--type", f.type, "barrier type: down|up|double")
        ->check(CLI::IsMember({"down", "up", "double"}));
    cmd->add_option("--b", f.barrier, "barrier level (single-barrier types)");
    cmd->add_option("--bl", f.barrier_low, "lower barrier (double)");
    cmd->add_option("--bu", f.barrier_high, "upper barrier (double)");
    cmd->add_option("--rebate", f.rebate, "rebate paid at knock-out");
    cmd->add_option("--r", f.r, "risk-free rate");
    cmd->add_option("--q", f.q, "dividend yield");
    cmd->add_option("--sigma", f.sigma, "volatility")->required(false);
    cmd->add_option("--monitoring", f.monitoring,
                    "continuous|daily|weekly|count:N (default continuous)");
}

hobis::ContractConfig resolve_contract(const ContractFlags& f) {
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw hobis::ValidationError("cannot open config file: " + f.config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        return hobis::parse_contract_config(ss.str());
    }
    hobis::ContractConfig cfg;
    cfg.contract.spot = f.s0;
    cfg.contract.strike = f.strike;
    cfg.contract.expiry = f.expiry;
    cfg.contract.rebate = f.rebate;
    cfg.market = {f.r, f.q, f.sigma};
    if (f.type == "down") cfg.contract.geometry = hobis::BarrierGeometry::down_and_out(f.barrier);
    else if (f.type == "up") cfg.contract.geometry = hobis::BarrierGeometry::up_and_out(f.barrier);
    else cfg.contract.geometry =
             hobis::BarrierGeometry::double_knock_out(f.barrier_low, f.barrier_high);
    cfg.contract.monitoring = hobis::parse_monitoring(f.monitoring);
    if (f.sigma == 0) throw hobis::ValidationError("sigma is required");
    return cfg;
}

struct MeshFlag {
    int m = 100;
    int l = 0;  // 0 = default coupling
};

MeshFlag parse_mesh(const std::string& text) {
    MeshFlag mesh;
    auto x = text.find('x');
    try {
        if (x == std::string::npos) {
            mesh.m = std::stoi(text);
        } else {
            mesh.m = std::stoi(text.substr(0, x));
            mesh.l = std::stoi(text.substr(x + 1));
        }
    } catch (const std::exception&) {
        throw CLI::ValidationError("--mesh", "expected M or MxL");
    }
    if (mesh.m < 2 || mesh.l < 0) throw CLI::ValidationError("--mesh", "expected M or MxL");
    return mesh;
}

hobis::SMaxRule parse_smax(const std::string& text, double& explicit_value) {
    if (text == "2s0+200") return hobis::SMaxRule::TwoS0Plus200;
    if (text == "2s0") return hobis::SMaxRule::TwoS0;
    if (text == "s0+100") return hobis::SMaxRule::S0Plus100;
    try {
        explicit_value = std::stod(text);
    } catch (const std::exception&) {
        throw CLI::ValidationError("--smax", "expected 2s0+200|2s0|s0+100|<price>");
    }
    return hobis::SMaxRule::Explicit;
}

void write_out(const std::string& csv_text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << csv_text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw hobis::ValidationError("cannot open output file: " + out_path);
    out << csv_text;
}

const char* boundary_mode_name(const hobis::PriceReport& rep) {
    switch (rep.boundary_mode) {
        case hobis::BoundaryMode::Optimal: return "optimal";
        case hobis::BoundaryMode::Approximate: return "approximate";
        case hobis::BoundaryMode::WorthlessShortCircuit:
            return "worthless-barrier short-circuit";
    }
    return "?";
}

std::vector<int> parse_levels(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--levels", "expected a comma-separated integer list");
        }
    }
    if (out.empty()) throw CLI::ValidationError("--levels", "no levels given");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"barrier-option pricing engine (high-order implicit scheme with "
                 "probability-based optimal boundaries)"};
    app.require_subcommand(1);

    ContractFlags flags;
    std::string mesh_text = "100";
    std::string scheme_text = "hobis";
    std::string smax_text = "2s0+200";
    std::string out_path;
    std::string levels_text;
    std::string schemes_text = "hobis,cn,implicit";
    std::string table_id;
    double delta = 4.2;
    int rho = 0;
    bool parallel = false;
    std::optional<double> reference;

    auto add_run_flags = [&](CLI::App* cmd) {
        add_contract_flags(cmd, flags);
        cmd->add_option("--mesh", mesh_text, "mesh as M or MxL (default L couples to M)");
        cmd->add_option("--scheme", scheme_text, "hobis|habis|obes|mefd|cn|implicit")
            ->check(CLI::IsMember({"hobis", "habis", "obes", "mefd", "cn", "implicit"}));
        cmd->add_option("--delta", delta, "cutoff quantile in (3.7, 6.5), default 4.2");
        cmd->add_option("--rho", rho, "time steps per monitoring interval (discrete)");
        cmd->add_option("--smax", smax_text, "S_max rule for mefd/habis");
        cmd->add_option("--out", out_path, "write CSV here instead of stdout");
    };

    auto* price_cmd = app.add_subcommand("price", "price one contract");
    add_run_flags(price_cmd);

    auto* converge_cmd = app.add_subcommand("converge", "mesh ladder with observed order");
    add_run_flags(converge_cmd);
    converge_cmd->add_option("--levels", levels_text,
                             "comma-separated mesh ladder (M for implicit schemes, L for "
                             "explicit)")
        ->required();
    converge_cmd->add_option("--reference", reference,
                             "reference value (default: closed form when available)");

    auto* table_cmd = app.add_subcommand("table", "reproduce a benchmark table");
    table_cmd->add_option("id", table_id, "T1..T7 or F1..F3")->required();
    table_cmd->add_option("--out", out_path, "write CSV here instead of stdout");
    table_cmd->add_flag("--parallel", parallel, "price independent cells concurrently");

    auto* compare_cmd = app.add_subcommand("compare", "several schemes, one contract");
    add_run_flags(compare_cmd);
    compare_cmd->add_option("--schemes", schemes_text, "comma-separated scheme list");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        hobis::RunOptions opt;
        opt.cutoff.delta = delta;
        opt.rho = rho;
        if (auto s = hobis::parse_scheme(scheme_text)) opt.scheme = *s;
        opt.s_max_rule = parse_smax(smax_text, opt.s_max_value);
        MeshFlag mesh = parse_mesh(mesh_text);
        opt.mesh_m = mesh.m;
        opt.mesh_l = mesh.l;

        if (price_cmd->parsed()) {
            auto cfg = resolve_contract(flags);
            hobis::require_valid(cfg.contract, cfg.market);
            auto rep = hobis::run_scheme(cfg.contract, cfg.market, opt);
            std::printf("value=%.6g mesh=%dx%d boundary=%s extraction=%s wall=%.3gs",
                        rep.value, rep.mesh_m, rep.mesh_l, boundary_mode_name(rep),
                        rep.extraction == hobis::ExtractionMode::Aligned ? "aligned"
                                                                         : "interpolated",
                        rep.wall_time);
            if (rep.boundary_mode == hobis::BoundaryMode::Approximate)
                std::printf(" s_max=%.6g", rep.s_max);
            std::printf("\n");
            if (!out_path.empty()) {
                std::ostringstream os;
                os << "value,mesh_m,mesh_l,boundary,extraction,wall_time\n"
                   << hobis::csv::num(rep.value) << ',' << rep.mesh_m << ',' << rep.mesh_l
                   << ',' << boundary_mode_name(rep) << ','
                   << (rep.extraction == hobis::ExtractionMode::Aligned ? "aligned"
                                                                        : "interpolated")
                   << ',' << hobis::csv::num(rep.wall_time, 3) << '\n';
                write_out(os.str(), out_path);
            }
            return 0;
        }

        if (converge_cmd->parsed()) {
            auto cfg = resolve_contract(flags);
            hobis::require_valid(cfg.contract, cfg.market);
            auto levels = parse_levels(levels_text);
            std::optional<double> ref_value = reference;
            if (!ref_value && cfg.contract.monitoring.is_continuous()) {
                const bool dbl =
                    cfg.contract.geometry.kind == hobis::BarrierKind::DoubleKnockOut;
                if (!dbl || cfg.contract.rebate == 0.0)
                    ref_value = hobis::closed_form_knock_out(cfg.contract, cfg.market);
            }
            auto rep = hobis::converge(cfg.contract, cfg.market, levels, ref_value, opt);
            write_out(hobis::to_csv(rep), out_path);
            return 0;
        }

        if (table_cmd->parsed()) {
            auto result = hobis::run_table(table_id, parallel);
            write_out(hobis::to_csv(result), out_path);
            std::fprintf(stderr, "%s: %zu cells, %d failures\n", result.table_id.c_str(),
                         result.cells.size(), result.failures());
            return result.all_pass() ? 0 : 4;
        }

        if (compare_cmd->parsed()) {
            auto cfg = resolve_contract(flags);
            hobis::require_valid(cfg.contract, cfg.market);
            std::vector<hobis::Scheme> schemes;
            std::stringstream ss(schemes_text);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                auto s = hobis::parse_scheme(tok);
                if (!s) throw hobis::ValidationError("unknown scheme: " + tok);
                schemes.push_back(*s);
            }
            if (schemes.size() < 2)
                throw hobis::ValidationError("compare needs at least two schemes");
            auto rows = hobis::compare_schemes(cfg.contract, cfg.market, schemes, opt);
            write_out(hobis::to_csv(rows), out_path);
            return 0;
        }
    } catch (const hobis::ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const hobis::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 0;
}
