// Command-line interface for bandlimited graph-signal reconstruction by
// seeding and annihilating graph filters.
//
// Exit codes: 0 success, 1 infeasible instance (rank/condition/expressibility
// failures), 2 usage or input errors.

#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gsr/errors.hpp"
#include "gsr/experiments.hpp"
#include "gsr/filters.hpp"
#include "gsr/generators.hpp"
#include "gsr/imperfect.hpp"
#include "gsr/io.hpp"
#include "gsr/rng.hpp"
#include "gsr/seeding.hpp"

namespace {

using namespace gsr;

struct GraphOptions {
    std::string file;
    std::string gen;
    int n = 10;
    double edge_prob = 0.3;
    bool directed = false;
    std::uint64_t seed = 0;
    std::string shift = "adjacency";
    double alpha_raw = std::numeric_limits<double>::quiet_NaN();

    std::optional<double> alpha() const {
        if (std::isnan(alpha_raw)) return std::nullopt;
        return alpha_raw;
    }
};

void add_graph_options(CLI::App* cmd, GraphOptions& opts) {
    cmd->add_option("--graph", opts.file, "graph file (.json or edge-list CSV)");
    cmd->add_option("--gen", opts.gen, "generator: er | cycle | karate")
        ->check(CLI::IsMember({"er", "cycle", "karate"}));
    cmd->add_option("--n", opts.n, "node count for generated graphs");
    cmd->add_option("--edge-prob", opts.edge_prob, "edge probability for er");
    cmd->add_flag("--directed", opts.directed, "treat CSV edges as directed");
    cmd->add_option("--graph-seed", opts.seed, "RNG seed for generated graphs");
    cmd->add_option("--shift", opts.shift, "adjacency | laplacian | normalized-laplacian")
        ->check(CLI::IsMember({"adjacency", "laplacian", "normalized-laplacian"}));
    cmd->add_option("--alpha", opts.alpha_raw,
                    "diffusion rate for the normalized Laplacian shift (default 1/lambda_max)");
}

Graph load_graph(const GraphOptions& opts) {
    if (!opts.file.empty()) return read_graph_file(opts.file, opts.directed);
    if (opts.gen == "cycle") return gen_cycle(opts.n);
    if (opts.gen == "karate") return karate();
    if (opts.gen == "er") {
        Rng rng(opts.seed);
        return gen_er(opts.n, opts.edge_prob, rng);
    }
    throw InvalidArgument("no graph given: use --graph FILE or --gen NAME");
}

ShiftOperator load_shift(const GraphOptions& opts) {
    return build_shift(load_graph(opts), shift_kind_from_name(opts.shift), opts.alpha());
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-")
        std::cout << text << "\n";
    else
        write_text_file(out_path, text);
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    return out;
}

SelectionPattern parse_pattern(const std::string& text, int tau_hint) {
    SelectionPattern pat;
    int max_time = 0;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos)
            throw InvalidArgument("pattern entries are node:time pairs, got '" + tok + "'");
        const int node = std::stoi(tok.substr(0, colon));
        const int time = std::stoi(tok.substr(colon + 1));
        max_time = std::max(max_time, time);
        pat.pairs.emplace_back(node, time);
    }
    pat.tau = tau_hint > 0 ? tau_hint : max_time + 1;
    return pat;
}

std::string trace_csv(const ReconstructionTrace& trace) {
    std::ostringstream os;
    os.precision(17);
    os << "phase,step,node,re,im\n";
    for (std::size_t t = 0; t < trace.seeding_states.size(); ++t)
        for (int i = 0; i < trace.seeding_states[t].size(); ++i)
            os << "seeding," << t << "," << i << "," << trace.seeding_states[t][i].real()
               << "," << trace.seeding_states[t][i].imag() << "\n";
    for (std::size_t l = 0; l < trace.filter_states.size(); ++l)
        for (int i = 0; i < trace.filter_states[l].size(); ++i)
            os << "filter," << l << "," << i << "," << trace.filter_states[l][i].real()
               << "," << trace.filter_states[l][i].imag() << "\n";
    return os.str();
}

int cmd_decompose(const GraphOptions& gopts, int K, int node, double residual_tol,
                  const std::string& out) {
    const ShiftOperator shift = load_shift(gopts);
    const SpectralBasis basis = decompose(shift, residual_tol);
    std::ostringstream os;
    os.precision(17);
    os << "{\n  \"eigenvalues\": [";
    for (int k = 0; k < basis.n(); ++k) {
        os << (k ? ", " : "") << "[" << basis.eigenvalues[k].real() << ", "
           << basis.eigenvalues[k].imag() << "]";
    }
    os << "],\n  \"cond_v\": " << basis.cond_V << ",\n  \"residual\": " << basis.residual;
    if (K > 0) {
        const SpectrumCensus c = spectrum_census(
            basis, K, node >= 0 ? std::optional<int>(node) : std::nullopt);
        os << ",\n  \"census\": {\"K\": " << K << ", \"D\": " << c.D << ", \"D1\": " << c.D1
           << ", \"D2\": " << c.D2 << ", \"U1\": " << c.U1 << ", \"U2\": " << c.U2 << "}";
        os << ",\n  \"condition_i\": " << (condition_i_holds(basis, K) ? "true" : "false");
        os << ",\n  \"bandwidth_tie\": " << (basis.bandwidth_tie(K) ? "true" : "false");
    }
    os << "\n}";
    emit(os.str(), out);
    return 0;
}

int cmd_design(const GraphOptions& gopts, const std::string& scheme, int K,
               const std::string& target_file, const std::string& nodes_csv, int node, int P,
               const std::string& pattern_csv, int tau, bool degree_reduced, bool ideal,
               bool product, const std::string& out) {
    const ShiftOperator shift = load_shift(gopts);
    const SpectralBasis basis = decompose(shift);
    const Vector y = read_signal_csv(target_file);
    if (y.size() != basis.n())
        throw InvalidArgument("target signal length does not match the graph");
    const Vector yhat = basis.Vinv * y;
    const Vector yhatK = yhat.head(K);
    if (basis.n() > K) {
        const double out_of_band = yhat.tail(basis.n() - K).norm();
        if (out_of_band > 1e-6 * yhat.norm())
            std::cerr << "warning: target is not K-bandlimited (out-of-band energy "
                      << out_of_band / yhat.norm() << ")\n";
    }

    SelectionPattern pattern;
    if (scheme == "mnst") {
        if (nodes_csv.empty()) throw InvalidArgument("mnst needs --nodes");
        pattern = SelectionPattern::single_time(parse_int_list(nodes_csv));
    } else if (scheme == "snmt") {
        if (node < 0) throw InvalidArgument("snmt needs --node");
        pattern = SelectionPattern::single_node(node, P > 0 ? P : K);
    } else {
        if (pattern_csv.empty()) throw InvalidArgument("mnmt needs --pattern node:time,...");
        pattern = parse_pattern(pattern_csv, tau);
    }

    ReconstructionPlan plan;
    if (degree_reduced) {
        plan = degree_reduced_design(basis, K, scheme_from_name(scheme), pattern, yhatK);
    } else {
        FilterDesign chosen_filter;
        const FilterDesign* filter = nullptr;
        if (ideal && product)
            throw InvalidArgument("choose at most one of --ideal-filter / --product-filter");
        if (ideal) {
            chosen_filter = design_ideal_lowpass(basis, K);
            filter = &chosen_filter;
        } else if (product) {
            std::vector<int> kill;
            for (int k = K; k < basis.n(); ++k) kill.push_back(k);
            chosen_filter = design_annihilating_product(basis, kill);
            filter = &chosen_filter;
        }
        if (scheme == "mnst") {
            std::vector<int> nodes;
            for (auto& [nd, t] : pattern.pairs) nodes.push_back(nd);
            plan = mnst_design(basis, K, nodes, yhatK, filter);
        } else if (scheme == "snmt") {
            plan = snmt_design(basis, K, node, pattern.P(), yhatK, filter);
        } else {
            plan = mnmt_design(basis, K, pattern, yhatK, filter);
        }
    }
    emit(plan_to_json_text(plan), out);
    return 0;
}

int cmd_reconstruct(const GraphOptions& gopts, const std::string& plan_file,
                    const std::string& target_file, const std::string& trace_file,
                    const std::string& out) {
    const ShiftOperator shift = load_shift(gopts);
    const SpectralBasis basis = decompose(shift);
    const ReconstructionPlan plan = plan_from_json_text(read_text_file(plan_file));
    Vector y = Vector::Zero(basis.n());
    if (!target_file.empty()) {
        y = read_signal_csv(target_file);
        if (y.size() != basis.n())
            throw InvalidArgument("target signal length does not match the graph");
    }
    const ReconstructionReport report =
        reconstruct(shift, basis, plan, y, /*record_trace=*/!trace_file.empty());
    if (!trace_file.empty() && report.trace) write_text_file(trace_file, trace_csv(*report.trace));
    emit(report_to_json_text(report), out);
    return 0;
}

int cmd_select(const GraphOptions& gopts, const std::string& objective, int K, int P, int tau,
               const std::string& strategy, bool ideal, const std::string& out) {
    const ShiftOperator shift = load_shift(gopts);
    const SpectralBasis basis = decompose(shift);
    ReconstructionOperator op;
    if (ideal) {
        op = ReconstructionOperator::build_ideal(basis, K, tau);
    } else {
        const FilterDesign filter = design_lowpass_kernel(basis, K);
        op = ReconstructionOperator::build(basis, filter, K, tau);
    }
    const SelectionMethod method = strategy == "exhaustive" ? SelectionMethod::Exhaustive
                                                            : SelectionMethod::GreedyForward;
    const SelectionResult result = objective == "fixed-power"
                                       ? select_fixed_noise(op, P, method)
                                       : select_constant_snr(op, P, method);
    emit(selection_to_json_text(result), out);
    return 0;
}

struct ExperimentOverrides {
    std::uint64_t seed = 0;
    bool seed_set = false;
    double tol_recovery = 0.0;
    bool tol_recovery_set = false;
    double tol_cond = 0.0;
    bool tol_cond_set = false;
};

int cmd_experiment(const std::string& config_file, const std::string& outdir,
                   const ExperimentOverrides& ov) {
    ExperimentConfig cfg = ExperimentConfig::from_json_text(read_text_file(config_file));
    if (ov.seed_set) cfg.seed = ov.seed;
    if (ov.tol_recovery_set) cfg.recovery_tol = ov.tol_recovery;
    if (ov.tol_cond_set) cfg.cond_max = ov.tol_cond;
    const ExperimentSummary summary = run_experiment(cfg);
    std::filesystem::create_directories(outdir);
    write_text_file(outdir + "/summary.json", summary.to_json_text());
    write_text_file(outdir + "/trials.csv", summary.trials_csv());
    if (!summary.curves.empty()) write_text_file(outdir + "/curves.csv", summary.curves_csv());
    std::cout << summary.to_json_text() << "\n";
    return 0;
}

int cmd_demo_cycle(int n, int K, const std::string& out) {
    std::ostringstream os;
    os.precision(12);
    const SpectralBasis basis = decompose(build_shift(gen_cycle(n), ShiftKind::Adjacency));
    const ReconstructionOperator op = ReconstructionOperator::build_ideal(basis, K, 1);

    os << "directed cycle N=" << n << ", K=" << K
       << ": constant-SNR seeding-selection objectives (tau=1)\n";
    const SelectionResult ex = select_constant_snr(op, K, SelectionMethod::Exhaustive);
    const SelectionResult gr = select_constant_snr(op, K, SelectionMethod::GreedyForward);
    os << "exhaustive over " << ex.candidates_evaluated << " patterns: best objective "
       << ex.objective << " at nodes";
    for (auto& [node, t] : ex.pattern.pairs) os << " " << node;
    os << "\ngreedy objective " << gr.objective << " (gap " << gr.objective - ex.objective
       << ")\n";

    // score every pattern; report the ranking of the uniform ones
    std::vector<std::pair<double, std::string>> table;
    std::vector<int> c(K);
    for (int i = 0; i < K; ++i) c[i] = i;
    while (true) {
        SelectionPattern pat = SelectionPattern::single_time(c);
        std::ostringstream name;
        for (std::size_t i = 0; i < c.size(); ++i) name << (i ? " " : "") << c[i];
        table.emplace_back(constant_snr_objective(op, pat), name.str());
        int i = K - 1;
        while (i >= 0 && c[i] == n - K + i) --i;
        if (i < 0) break;
        ++c[i];
        for (int j = i + 1; j < K; ++j) c[j] = c[j - 1] + 1;
    }
    std::sort(table.begin(), table.end());
    os << "pattern ranking (best 5):\n";
    for (int i = 0; i < 5 && i < static_cast<int>(table.size()); ++i)
        os << "  {" << table[i].second << "}  objective " << table[i].first << "\n";
    const Matrix B = op.restricted(ex.pattern);
    os << "trace(M) at the optimum = " << (B * B.adjoint()).trace().real()
       << " (K^2/N = " << double(K) * K / n << ")\n";
    emit(os.str(), out);
    return 0;
}

int cmd_demo_er(int n, int K, std::uint64_t seed, const std::string& out) {
    std::ostringstream os;
    os.precision(6);
    Rng rng(seed);
    for (int attempt = 0;; ++attempt) {
        Rng sub = rng.substream(attempt);
        ShiftOperator shift;
        SpectralBasis basis;
        try {
            shift = build_shift(gen_er(n, 0.3, sub), ShiftKind::Adjacency);
            basis = decompose(shift);
        } catch (const NonDiagonalizable&) {
            continue;
        }
        if (!condition_i_holds(basis, K)) continue;
        Vector yhatK;
        const Vector y = random_bandlimited(basis, K, sub, SpectrumLaw::UnitGaussian, &yhatK);
        SelectionPattern pat;
        pat.tau = 2;
        pat.pairs = {{0, 1}, {0, 0}, {1, 1}, {1, 0}};
        std::vector<int> kill;
        for (int k = K; k < n; ++k) kill.push_back(k);
        const FilterDesign product = design_annihilating_product(basis, kill);
        ReconstructionPlan plan;
        try {
            plan = mnmt_design(basis, K, pat, yhatK, &product);
        } catch (const FeasibilityError&) {
            continue;
        }
        if (plan.solver_cond > 1e6) continue;
        const ReconstructionReport rep = reconstruct(shift, basis, plan, y, true);
        os << "ER graph (N=" << n << ", p=0.3), K=" << K
           << ": MN-MT seeding at nodes 0,1 for t in {0,1}\n";
        os << "seeding values:";
        for (int i = 0; i < plan.schedule.values.size(); ++i)
            os << " " << plan.schedule.values[i].real();
        os << "\nper-stage annihilation (|zhat_k| after each filter factor):\n";
        for (std::size_t l = 0; l < rep.trace->filter_states.size(); ++l) {
            const Vector zh = basis.Vinv * rep.trace->filter_states[l];
            os << "  stage " << l + 1 << " kills frequency "
               << rep.trace->annihilated_frequency[l] << ": |zhat| =";
            for (int k = 0; k < n; ++k) os << " " << std::abs(zh[k]);
            os << "\n";
        }
        os << "relative error: " << rep.relative_error << "\n";
        emit(os.str(), out);
        return 0;
    }
}

int cmd_demo_karate(int K, std::uint64_t seed, const std::string& out) {
    ExperimentConfig cfg;
    cfg.kind = "insufficient_seeding";
    cfg.generator = "karate";
    cfg.shift = "normalized-laplacian";
    cfg.K = K;
    cfg.signals = 10;
    cfg.seed = seed;
    const ExperimentSummary summary = run_insufficient_seeding(cfg);
    std::ostringstream os;
    os.precision(6);
    os << "karate club, K=" << K << ", mean best reconstruction error over "
       << cfg.signals << " signals:\n";
    os << "P";
    for (const auto& s : cfg.schemes) os << "\t" << s;
    os << "\n";
    for (int P = 1; P <= K; ++P) {
        os << P;
        for (const auto& s : cfg.schemes) {
            for (const CurvePoint& pt : summary.curves)
                if (pt.P == P && pt.scheme == s) os << "\t" << pt.mean_min_error;
        }
        os << "\n";
    }
    emit(os.str(), out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bandlimited graph-signal reconstruction by seeding and graph filters"};
    app.require_subcommand(1);

    GraphOptions gopts;
    std::string out;
    app.add_option("-o,--output", out, "output file (default: stdout)");

    // decompose
    auto* dec = app.add_subcommand("decompose", "eigendecomposition and spectrum census");
    GraphOptions dec_g;
    int dec_k = 0, dec_node = -1;
    double dec_tol = tol::kEigenResidual;
    std::string dec_out;
    add_graph_options(dec, dec_g);
    dec->add_option("--k", dec_k, "bandwidth for the census");
    dec->add_option("--node", dec_node, "node for U1/U2/D2 census");
    dec->add_option("--tol-eigen-residual", dec_tol, "diagonalizability residual tolerance");
    dec->add_option("-o,--output", dec_out, "output file");

    // design
    auto* des = app.add_subcommand("design", "seeding-value design for exact recovery");
    GraphOptions des_g;
    std::string des_scheme, des_target, des_nodes, des_pattern, des_out;
    int des_k = 1, des_node = -1, des_p = 0, des_tau = 0;
    bool des_reduced = false, des_ideal = false, des_product = false;
    add_graph_options(des, des_g);
    des->add_option("--scheme", des_scheme, "mnst | snmt | mnmt")
        ->required()
        ->check(CLI::IsMember({"mnst", "snmt", "mnmt"}));
    des->add_option("--k", des_k, "bandwidth K")->required();
    des->add_option("--target", des_target, "target signal CSV")->required();
    des->add_option("--nodes", des_nodes, "mnst seed nodes, e.g. 0,2,4");
    des->add_option("--node", des_node, "snmt seeding node");
    des->add_option("--p", des_p, "number of seeding values");
    des->add_option("--pattern", des_pattern, "mnmt pattern node:time,...");
    des->add_option("--tau", des_tau, "seeding phase length (mnmt)");
    des->add_flag("--degree-reduced", des_reduced, "use extra values to reduce filter degree");
    des->add_flag("--ideal-filter", des_ideal, "use the ideal low-pass response");
    des->add_flag("--product-filter", des_product,
                  "use the product-form annihilating filter (factored, applied stage-wise)");
    des->add_option("-o,--output", des_out, "output file");

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "run a plan and report the error");
    GraphOptions rec_g;
    std::string rec_plan, rec_target, rec_trace, rec_out;
    add_graph_options(rec, rec_g);
    rec->add_option("--plan", rec_plan, "plan JSON from `design`")->required();
    rec->add_option("--target", rec_target, "target signal CSV for the error metric");
    rec->add_option("--trace", rec_trace, "write per-step states to this CSV");
    rec->add_option("-o,--output", rec_out, "output file");

    // select
    auto* sel = app.add_subcommand("select", "noise-robust seeding location selection");
    GraphOptions sel_g;
    std::string sel_obj = "constant-snr", sel_strategy = "greedy", sel_out;
    int sel_k = 1, sel_p = 1, sel_tau = 1;
    bool sel_ideal = false;
    add_graph_options(sel, sel_g);
    sel->add_option("--objective", sel_obj, "constant-snr | fixed-power")
        ->check(CLI::IsMember({"constant-snr", "fixed-power"}));
    sel->add_option("--k", sel_k, "bandwidth K")->required();
    sel->add_option("--p", sel_p, "number of seeding slots")->required();
    sel->add_option("--tau", sel_tau, "seeding phase length");
    sel->add_option("--strategy", sel_strategy, "exhaustive | greedy")
        ->check(CLI::IsMember({"exhaustive", "greedy"}));
    sel->add_flag("--ideal-filter", sel_ideal, "use the ideal low-pass response");
    sel->add_option("-o,--output", sel_out, "output file");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a Monte-Carlo experiment config");
    std::string exp_config, exp_outdir = ".";
    ExperimentOverrides exp_ov;
    exp->add_option("config", exp_config, "experiment config JSON")->required();
    exp->add_option("--outdir", exp_outdir, "directory for summary.json/trials.csv/curves.csv");
    exp->add_option("--seed", exp_ov.seed, "override the config RNG seed")
        ->each([&exp_ov](const std::string&) { exp_ov.seed_set = true; });
    exp->add_option("--tol-recovery", exp_ov.tol_recovery,
                    "override the perfect-recovery error threshold")
        ->each([&exp_ov](const std::string&) { exp_ov.tol_recovery_set = true; });
    exp->add_option("--tol-cond", exp_ov.tol_cond,
                    "override the solver condition-number cutoff")
        ->each([&exp_ov](const std::string&) { exp_ov.tol_cond_set = true; });

    // demo
    auto* demo = app.add_subcommand("demo", "canned demonstrations");
    std::string demo_name, demo_out;
    int demo_n = 8, demo_k = 4;
    std::uint64_t demo_seed = 0;
    demo->add_option("name", demo_name, "cycle | er | karate")
        ->required()
        ->check(CLI::IsMember({"cycle", "er", "karate"}));
    demo->add_option("--n", demo_n, "graph size");
    demo->add_option("--k", demo_k, "bandwidth");
    demo->add_option("--seed", demo_seed, "RNG seed");
    demo->add_option("-o,--output", demo_out, "output file");

    try {
        app.parse(argc, argv);
        if (dec->parsed()) return cmd_decompose(dec_g, dec_k, dec_node, dec_tol, dec_out);
        if (des->parsed())
            return cmd_design(des_g, des_scheme, des_k, des_target, des_nodes, des_node,
                              des_p, des_pattern, des_tau, des_reduced, des_ideal,
                              des_product, des_out);
        if (rec->parsed()) return cmd_reconstruct(rec_g, rec_plan, rec_target, rec_trace, rec_out);
        if (sel->parsed())
            return cmd_select(sel_g, sel_obj, sel_k, sel_p, sel_tau, sel_strategy, sel_ideal,
                              sel_out);
        if (exp->parsed()) return cmd_experiment(exp_config, exp_outdir, exp_ov);
        if (demo->parsed()) {
            if (demo_name == "cycle") return cmd_demo_cycle(demo_n, demo_k, demo_out);
            if (demo_name == "er")
                return cmd_demo_er(demo_n == 8 ? 10 : demo_n, demo_k, demo_seed, demo_out);
            return cmd_demo_karate(demo_k == 4 ? 5 : demo_k, demo_seed, demo_out);
        }
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    } catch (const FeasibilityError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
