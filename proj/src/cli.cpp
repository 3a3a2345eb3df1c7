#include "curverec/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "curverec/covariance.hpp"
#include "curverec/csv.hpp"
#include "curverec/errors.hpp"
#include "curverec/hierarchy.hpp"
#include "curverec/market.hpp"
#include "curverec/reconcile.hpp"
#include "curverec/simulation.hpp"

namespace curverec {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitNoEquilibrium = 3;
constexpr int kExitUsage = 64;

int exit_code_for(const Error& e) {
    if (dynamic_cast<const NoEquilibriumError*>(&e) != nullptr) return kExitNoEquilibrium;
    if (dynamic_cast<const SingularMatrixError*>(&e) != nullptr ||
        dynamic_cast<const DivisionError*>(&e) != nullptr ||
        dynamic_cast<const ConvergenceError*>(&e) != nullptr ||
        dynamic_cast<const InsufficientDataError*>(&e) != nullptr)
        return kExitNumeric;
    return kExitParse;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return in;
}

// A usage problem detected after CLI11 parsing (bad token values, missing
// conditional inputs).
struct UsageError {
    std::string message;
};

struct ReconcileOptions {
    std::string forecast_path;
    std::string method_token;
    std::string residuals_path;
    std::size_t k = 1;
    double rho = 0.1;
    bool center = false;
};

int cmd_reconcile(const ReconcileOptions& opt, std::ostream& out) {
    const auto method = method_from_token(opt.method_token);
    if (!method) throw UsageError{"unknown method '" + opt.method_token + "'"};

    auto in = open_input(opt.forecast_path);
    const csv::ForecastFile forecast = csv::read_forecast(in);
    const std::size_t n = (forecast.values.size() + 1) / 2;
    const HierarchyVector y_hat(forecast.values, 1);
    const Matrix summation = summation_matrix(n, 1);

    std::optional<csv::PanelFile> panel;
    if (!opt.residuals_path.empty()) {
        auto rin = open_input(opt.residuals_path);
        panel = csv::read_panel(rin);
        if (panel->values.cols() != y_hat.size())
            throw ParseError("residual panel width does not match the forecast");
    }
    if ((needs_history(*method) || needs_residuals(*method)) && !panel)
        throw UsageError{std::string("method '") + opt.method_token + "' needs --residuals"};

    if (opt.k < 1 || opt.k > n) throw UsageError{"--k must lie in [1, n]"};

    std::vector<double> y_tilde;
    if (opt.k == 1) {
        MethodContext ctx;
        ctx.glasso_rho = opt.rho;
        ctx.center = opt.center;
        if (panel) {
            ctx.level_history = &panel->values;
            ctx.residuals = &panel->values;
        }
        const MappingMatrix mapping = make_mapping(*method, y_hat, summation, ctx);
        y_tilde = reconcile(mapping, summation, y_hat).y_tilde;
    } else {
        if (!is_optimal(*method))
            throw UsageError{"--k above 1 is only defined for the op* methods"};
        std::optional<ResidualPanel> residuals;
        if (panel && needs_residuals(*method)) residuals.emplace(panel->values);
        const CovEstimate w = estimate_covariance(*method, residuals ? &*residuals : nullptr, n,
                                                  summation, opt.rho, opt.center);
        // Rotate the problem into representation k; by construction the
        // rotated pair satisfies the invariance hypotheses, so the canonical
        // image reproduces the k = 1 result.
        const Matrix basis = basis_change_matrix(n, opt.k);
        const Matrix basis_t = transpose(basis);
        const Matrix w_k = matmul(basis_t, matmul(w.w, basis));
        const HierarchyVector y_hat_k(matvec(basis_t, y_hat.values), opt.k);
        y_tilde = reconcile_in_representation(y_hat_k, w_k).canonical.y_tilde;
    }
    csv::write_forecast(out, forecast.labels, y_tilde);
    return kExitOk;
}

struct EstimateCovOptions {
    std::string residuals_path;
    std::string scheme_token;
    double rho = 0.1;
    bool center = false;
};

int cmd_estimate_cov(const EstimateCovOptions& opt, std::ostream& out) {
    const auto scheme = method_from_token(opt.scheme_token);
    if (!scheme || !is_optimal(*scheme))
        throw UsageError{"unknown covariance scheme '" + opt.scheme_token + "'"};
    auto in = open_input(opt.residuals_path);
    const csv::PanelFile panel = csv::read_panel(in);
    const std::size_t n = (panel.values.cols() + 1) / 2;
    const Matrix summation = summation_matrix(n, 1);
    std::optional<ResidualPanel> residuals;
    if (needs_residuals(*scheme)) residuals.emplace(panel.values);
    const CovEstimate w = estimate_covariance(*scheme, residuals ? &*residuals : nullptr, n,
                                              summation, opt.rho, opt.center);
    csv::write_matrix(out, panel.labels, w.w);
    return kExitOk;
}

struct SimulateOptions {
    std::vector<std::size_t> n_values{4, 16, 64};
    std::vector<std::size_t> history_values{16, 64, 256};
    double phi = 0.7;
    std::size_t reps = 1000;
    std::uint64_t seed = 1;
    std::string cov = "id";
    std::string transform = "none";
    std::vector<std::string> method_tokens;
    bool drop_outliers = false;
    std::string dump_path;
};

int cmd_simulate(const SimulateOptions& opt, std::ostream& out) {
    std::vector<Method> methods;
    for (const std::string& token : opt.method_tokens) {
        const auto m = method_from_token(token);
        if (!m) throw UsageError{"unknown method '" + token + "'"};
        methods.push_back(*m);
    }
    if (opt.cov != "id" && opt.cov != "corr") throw UsageError{"--cov must be 'id' or 'corr'"};
    if (opt.transform != "none" && opt.transform != "square")
        throw UsageError{"--transform must be 'none' or 'square'"};
    if (opt.n_values.empty() || opt.history_values.empty())
        throw UsageError{"--n and --N need at least one value"};

    SimConfig base;
    base.phi = opt.phi;
    base.replications = opt.reps;
    base.seed = opt.seed;
    base.error_cov = opt.cov == "corr" ? ErrorCovKind::correlated : ErrorCovKind::identity;
    base.transform = opt.transform == "square" ? TransformKind::square : TransformKind::none;
    base.methods = methods;

    std::vector<std::string> row_names{"base"};
    for (Method m : methods.empty() ? all_methods() : methods)
        row_names.push_back(method_token(m));

    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t n : opt.n_values)
        for (std::size_t hist : opt.history_values) cells.emplace_back(n, hist);

    std::vector<SimResult> results;
    results.reserve(cells.size());
    for (const auto& [n, hist] : cells) {
        SimConfig config = base;
        config.bottom_dim = n;
        config.history_len = hist;
        validate(config);
        results.push_back(run_experiment(config));
    }

    out << "method";
    for (const auto& [n, hist] : cells) out << ",n" << n << "_N" << hist;
    out << '\n';
    for (const std::string& name : row_names) {
        out << name;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const MethodResult* mr = results[c].find(name);
            const double value =
                mr == nullptr ? std::numeric_limits<double>::quiet_NaN()
                              : (opt.drop_outliers ? mr->rmse_filtered : mr->rmse);
            out << ',' << csv::format_double(value);
        }
        out << '\n';
    }

    if (!opt.dump_path.empty()) {
        std::ofstream dump(opt.dump_path);
        if (!dump) throw ParseError("cannot open '" + opt.dump_path + "' for writing");
        dump << "n,N,rep,level,value\n";
        for (const auto& [n, hist] : cells) {
            SimConfig config = base;
            config.bottom_dim = n;
            config.history_len = hist;
            const auto labels = csv::level_labels(n);
            for (std::size_t rep = 0; rep < config.replications; ++rep) {
                Matrix bottom = simulate_var1(config, rep);
                if (config.transform == TransformKind::square)
                    for (std::size_t j = 0; j < n; ++j)
                        bottom(hist, j) *= bottom(hist, j);
                std::vector<double> b(n);
                for (std::size_t j = 0; j < n; ++j) b[j] = bottom(hist, j);
                const HierarchyVector target = hierarchy_from_bottom(BottomSeries(b, 1));
                for (std::size_t l = 0; l < target.size(); ++l)
                    dump << n << ',' << hist << ',' << rep << ',' << labels[l] << ','
                         << csv::format_double(target.values[l]) << '\n';
            }
        }
    }
    return kExitOk;
}

struct CurvesOptions {
    std::string bids_path;
    std::string side = "supply";
    std::size_t class_count = 20;
    std::string grid_path;
    std::string subcommand;
};

Side parse_side(const std::string& token) {
    if (token == "supply") return Side::supply;
    if (token == "demand") return Side::demand;
    throw UsageError{"--side must be 'supply' or 'demand'"};
}

int cmd_curves(const CurvesOptions& opt, std::ostream& out) {
    auto in = open_input(opt.bids_path);
    const csv::BidsFile bids = csv::read_bids(in);

    if (opt.subcommand == "intersect") {
        const StepCurve supply = build_step_curve(make_ladder(Side::supply, bids.supply));
        const StepCurve demand = build_step_curve(make_ladder(Side::demand, bids.demand));
        const Equilibrium eq = intersect(supply, demand);
        out << "price,volume\n"
            << csv::format_double(eq.price) << ',' << csv::format_double(eq.volume) << '\n';
        return kExitOk;
    }

    const Side side = parse_side(opt.side);
    const BidLadder ladder =
        make_ladder(side, side == Side::supply ? bids.supply : bids.demand);
    const StepCurve curve = build_step_curve(ladder);

    if (opt.subcommand == "aggregate") {
        out << "price,cum_volume\n";
        for (const auto& [price, volume] : curve.points)
            out << csv::format_double(price) << ',' << csv::format_double(volume) << '\n';
        return kExitOk;
    }

    PriceClassGrid grid;
    if (!opt.grid_path.empty()) {
        auto gin = open_input(opt.grid_path);
        const auto rows = csv::read_rows(gin);
        if (rows.empty() || rows[0].size() != 1 || rows[0][0] != "boundary")
            throw ParseError("grid: expected header 'boundary'");
        for (std::size_t r = 1; r < rows.size(); ++r)
            grid.boundaries.push_back(csv::parse_double(rows[r][0], "grid"));
    } else {
        grid = make_price_classes(curve, opt.class_count);
    }

    if (opt.subcommand == "classes") {
        out << "boundary\n";
        for (double b : grid.boundaries) out << csv::format_double(b) << '\n';
        return kExitOk;
    }
    if (opt.subcommand == "bin") {
        const BottomSeries binned = bin_volumes(ladder, grid);
        csv::write_series(out, binned.values);
        return kExitOk;
    }
    throw UsageError{"curves: missing subcommand"};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"hierarchical reconciliation toolkit for aggregated curves"};
    app.require_subcommand(1);

    ReconcileOptions rec;
    CLI::App* reconcile_cmd =
        app.add_subcommand("reconcile", "reconcile a base forecast of all hierarchy levels");
    reconcile_cmd->add_option("--forecast", rec.forecast_path, "level,value CSV of base forecasts")
        ->required();
    reconcile_cmd->add_option("--method", rec.method_token, "method token (bu, tdfo, opols, ...)")
        ->required();
    reconcile_cmd->add_option("--residuals", rec.residuals_path,
                              "panel CSV; forecast errors for op*, observed history for ar/ra");
    reconcile_cmd->add_option("--k", rec.k, "representation index for op* methods");
    reconcile_cmd->add_option("--rho", rec.rho, "graphical lasso penalty");
    reconcile_cmd->add_flag("--center", rec.center, "center residual columns");

    EstimateCovOptions cov;
    CLI::App* cov_cmd =
        app.add_subcommand("estimate-cov", "estimate the base-forecast error covariance");
    cov_cmd->add_option("--residuals", cov.residuals_path, "panel CSV of forecast errors")
        ->required();
    cov_cmd->add_option("--scheme", cov.scheme_token, "estimator token (opols ... opglasso)")
        ->required();
    cov_cmd->add_option("--rho", cov.rho, "graphical lasso penalty");
    cov_cmd->add_flag("--center", cov.center, "center residual columns");

    SimulateOptions sim;
    CLI::App* sim_cmd =
        app.add_subcommand("simulate", "Monte-Carlo accuracy study on simulated hierarchies");
    sim_cmd->add_option("--n", sim.n_values, "bottom dimensions")->delimiter(',');
    sim_cmd->add_option("--N", sim.history_values, "history lengths")->delimiter(',');
    sim_cmd->add_option("--phi", sim.phi, "VAR(1) coefficient");
    sim_cmd->add_option("--reps", sim.reps, "replications per cell");
    sim_cmd->add_option("--seed", sim.seed, "random seed");
    sim_cmd->add_option("--cov", sim.cov, "error covariance: id or corr");
    sim_cmd->add_option("--transform", sim.transform, "none or square");
    sim_cmd->add_option("--methods", sim.method_tokens, "method tokens (default: all)")
        ->delimiter(',');
    sim_cmd->add_flag("--drop-outliers", sim.drop_outliers, "report outlier-filtered RMSE");
    sim_cmd->add_option("--dump", sim.dump_path, "write simulated targets to this CSV");

    CurvesOptions cur;
    CLI::App* curves_cmd = app.add_subcommand("curves", "auction bid curve tooling");
    curves_cmd->require_subcommand(1);
    curves_cmd->add_option("--bids", cur.bids_path, "side,price,volume CSV")->required();
    CLI::App* aggregate_cmd =
        curves_cmd->add_subcommand("aggregate", "cumulative step curve of one side");
    aggregate_cmd->add_option("--side", cur.side, "supply or demand");
    CLI::App* classes_cmd =
        curves_cmd->add_subcommand("classes", "price-class boundaries by volume inversion");
    classes_cmd->add_option("--side", cur.side, "supply or demand");
    classes_cmd->add_option("--m", cur.class_count, "number of classes");
    CLI::App* bin_cmd = curves_cmd->add_subcommand("bin", "volume per price class");
    bin_cmd->add_option("--side", cur.side, "supply or demand");
    bin_cmd->add_option("--m", cur.class_count, "number of classes");
    bin_cmd->add_option("--grid", cur.grid_path, "boundary CSV from a previous 'classes' run");
    CLI::App* intersect_cmd =
        curves_cmd->add_subcommand("intersect", "market clearing price and volume");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("curverec");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (reconcile_cmd->parsed()) return cmd_reconcile(rec, out);
        if (cov_cmd->parsed()) return cmd_estimate_cov(cov, out);
        if (sim_cmd->parsed()) return cmd_simulate(sim, out);
        if (curves_cmd->parsed()) {
            if (aggregate_cmd->parsed()) cur.subcommand = "aggregate";
            if (classes_cmd->parsed()) cur.subcommand = "classes";
            if (bin_cmd->parsed()) cur.subcommand = "bin";
            if (intersect_cmd->parsed()) cur.subcommand = "intersect";
            return cmd_curves(cur, out);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.message << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    err << "usage error: no command given\n";
    return kExitUsage;
}

}  // namespace curverec
