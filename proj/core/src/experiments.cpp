#include "gsr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "gsr/errors.hpp"
#include "gsr/filters.hpp"
#include "gsr/generators.hpp"
#include "gsr/imperfect.hpp"
#include "gsr/io.hpp"
#include "gsr/rng.hpp"
#include "gsr/seeding.hpp"

namespace gsr {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename Fn>
void for_each_subset(int slots, int P, Fn&& fn) {
    std::vector<int> c(P);
    std::iota(c.begin(), c.end(), 0);
    while (true) {
        fn(c);
        int i = P - 1;
        while (i >= 0 && c[i] == slots - P + i) --i;
        if (i < 0) break;
        ++c[i];
        for (int j = i + 1; j < P; ++j) c[j] = c[j - 1] + 1;
    }
}

double median(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }),
            v.end());
    if (v.empty()) return kNaN;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Graph make_graph(const ExperimentConfig& cfg, double p, Rng& rng) {
    if (cfg.generator == "er") return gen_er(cfg.n, p, rng);
    if (cfg.generator == "cycle") return gen_cycle(cfg.n);
    if (cfg.generator == "karate") return karate();
    if (cfg.generator == "file") return read_graph_file(cfg.graph_path);
    throw InvalidArgument("unknown graph generator: " + cfg.generator);
}

/// Rescales the shift (and the eigenvalues with it) to spectral radius 1,
/// so repeated percolation is non-expansive.
void normalize_spectral_radius(ShiftOperator& shift, SpectralBasis& basis) {
    const double rho = basis.eig_scale;
    if (rho <= 0.0 || std::abs(rho - 1.0) < 1e-15) return;
    shift.matrix /= rho;
    shift.graph = shift.graph.scaled(1.0 / rho);
    basis.eigenvalues /= rho;
    basis.eig_scale = basis.eigenvalues.cwiseAbs().maxCoeff();
}

struct Instance {
    Graph graph;
    ShiftOperator shift;
    SpectralBasis basis;
    FilterDesign filter;
    double p = 0.0;
};

/// Draws until the graph is connected (when required), diagonalizable, and
/// free of active/inactive eigenvalue collisions.
Instance draw_instance(const ExperimentConfig& cfg, Rng& rng, ExperimentSummary& summary) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Instance inst;
        inst.p = cfg.p_range ? rng.uniform(cfg.p_lo, cfg.p_hi) : cfg.p;
        inst.graph = make_graph(cfg, inst.p, rng);
        if (cfg.require_connected && !inst.graph.is_connected()) {
            ++summary.redraw_disconnected;
            continue;
        }
        inst.shift = build_shift(inst.graph, shift_kind_from_name(cfg.shift));
        try {
            inst.basis = decompose(inst.shift);
        } catch (const NonDiagonalizable&) {
            ++summary.redraw_nondiagonalizable;
            continue;
        }
        if (cfg.normalize_shift && cfg.shift == "adjacency")
            normalize_spectral_radius(inst.shift, inst.basis);
        if (!condition_i_holds(inst.basis, cfg.K)) {
            ++summary.redraw_condition;
            continue;
        }
        try {
            inst.filter = design_lowpass_kernel(inst.basis, cfg.K);
        } catch (const FeasibilityError&) {
            ++summary.redraw_condition;
            continue;
        }
        return inst;
    }
    throw Infeasible("no feasible graph after 1000 draws; check the configuration");
}

std::vector<SelectionPattern> scheme_patterns(const std::string& scheme, int n, int K,
                                              const ExperimentConfig& cfg) {
    std::vector<SelectionPattern> out;
    if (scheme == "mnst") {
        for_each_subset(n, K, [&](const std::vector<int>& nodes) {
            out.push_back(SelectionPattern::single_time(nodes));
        });
    } else if (scheme == "snmt") {
        for (int i = 0; i < n; ++i) out.push_back(SelectionPattern::single_node(i, K));
    } else if (scheme == "mnmt") {
        for_each_subset(n, cfg.mnmt_nodes, [&](const std::vector<int>& nodes) {
            SelectionPattern p;
            p.tau = cfg.mnmt_times;
            for (int node : nodes)
                for (int t = cfg.mnmt_times - 1; t >= 0; --t) p.pairs.emplace_back(node, t);
            out.push_back(p);
        });
    } else {
        throw InvalidArgument("unknown scheme: " + scheme);
    }
    return out;
}

ReconstructionPlan design_for(const std::string& scheme, const Instance& inst, int K,
                              const SelectionPattern& pattern, const Vector& yhatK) {
    if (scheme == "snmt")
        return snmt_design(inst.basis, K, pattern.pairs.front().first, pattern.P(), yhatK,
                           &inst.filter);
    if (scheme == "mnst") {
        std::vector<int> nodes;
        for (const auto& [node, t] : pattern.pairs) nodes.push_back(node);
        return mnst_design(inst.basis, K, nodes, yhatK, &inst.filter);
    }
    return mnmt_design(inst.basis, K, pattern, yhatK, &inst.filter);
}

}  // namespace

ExperimentSummary run_recovery_comparison(const ExperimentConfig& cfg) {
    ExperimentSummary summary;
    summary.config = cfg;
    const bool noisy = cfg.noise != "none";
    NoiseModel noise;
    noise.sigma = cfg.sigma;
    noise.kind = cfg.noise == "fixed-power" ? NoiseKind::FixedPower : NoiseKind::ConstantSNR;

    const Rng master(cfg.seed);
    std::map<std::string, std::vector<double>> recovery, min_err, med_err;

    for (int trial = 0; trial < cfg.trials; ++trial) {
        Rng rng = master.substream(trial);
        Instance inst = draw_instance(cfg, rng, summary);
        Vector yhatK;
        const Vector y = random_bandlimited(inst.basis, cfg.K, rng,
                                            SpectrumLaw::UnitGaussian, &yhatK);

        for (const std::string& scheme : cfg.schemes) {
            const auto patterns = scheme_patterns(scheme, inst.graph.n, cfg.K, cfg);
            int feasible = 0;
            int recovered = 0;
            double max_cond = 0.0;
            std::vector<double> errors;
            for (const SelectionPattern& pattern : patterns) {
                ReconstructionPlan plan;
                try {
                    plan = design_for(scheme, inst, cfg.K, pattern, yhatK);
                } catch (const FeasibilityError&) {
                    continue;
                }
                ++feasible;
                max_cond = std::max(max_cond, plan.solver_cond);
                const ReconstructionReport clean = reconstruct(inst.shift, inst.basis, plan, y);
                if (clean.relative_error <= cfg.recovery_tol &&
                    plan.solver_cond <= cfg.cond_max)
                    ++recovered;
                if (noisy) {
                    const double std_entry = noise.entry_std(plan.schedule.values);
                    ReconstructionPlan corrupted = plan;
                    for (int k = 0; k < corrupted.schedule.values.size(); ++k)
                        corrupted.schedule.values[k] += Complex(rng.normal() * std_entry, 0.0);
                    const ReconstructionReport rep =
                        reconstruct(inst.shift, inst.basis, corrupted, y);
                    errors.push_back(rep.relative_error);
                }
            }
            TrialRecord rec;
            rec.graph_index = trial;
            rec.p = inst.p;
            rec.scheme = scheme;
            rec.patterns = static_cast<int>(patterns.size());
            rec.feasible = feasible;
            rec.recovered = recovered;
            rec.max_cond = max_cond;
            rec.min_error = errors.empty() ? kNaN : *std::min_element(errors.begin(), errors.end());
            rec.median_error = errors.empty() ? kNaN : median(errors);
            summary.trials.push_back(rec);

            recovery[scheme].push_back(100.0 * recovered / static_cast<double>(patterns.size()));
            min_err[scheme].push_back(rec.min_error);
            med_err[scheme].push_back(rec.median_error);
        }
    }

    for (const std::string& scheme : cfg.schemes) {
        SchemeStats stats;
        const auto& r = recovery[scheme];
        stats.recovery_pct = std::accumulate(r.begin(), r.end(), 0.0) / r.size();
        stats.min_error_median = median(min_err[scheme]);
        stats.median_error_median = median(med_err[scheme]);
        summary.by_scheme[scheme] = stats;
    }
    return summary;
}

namespace {

/// Orthonormal basis of the column space of B (rank-revealing).
Matrix column_space_basis(const Matrix& B) {
    Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU);
    const RealVector sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol::kRank * std::max(smax, 1e-300)) ++rank;
    return svd.matrixU().leftCols(rank);
}

double ls_residual(const Matrix& Q, const Vector& b) {
    const double r2 = b.squaredNorm() - (Q.adjoint() * b).squaredNorm();
    return std::sqrt(std::max(r2, 0.0));
}

std::string pattern_string(const SelectionPattern& p) {
    std::ostringstream os;
    for (int k = 0; k < p.P(); ++k) {
        if (k) os << " ";
        os << p.pairs[k].first << ":" << p.pairs[k].second;
    }
    return os.str();
}

/// Greedy forward selection of `P` columns of op.phi minimizing the LS
/// residual against b, optionally warm-started.
SelectionPattern greedy_columns(const ReconstructionOperator& op, const Vector& b, int P,
                                std::vector<int> chosen = {}) {
    const int slots = op.n * op.tau;
    Matrix Q(op.K, 0);
    Vector r = b;
    for (int c : chosen) {
        Vector col = op.phi.col(c);
        if (Q.cols() > 0) col -= Q * (Q.adjoint() * col).eval();
        const double nn = col.norm();
        if (nn > 1e-12) {
            Q.conservativeResize(op.K, Q.cols() + 1);
            Q.col(Q.cols() - 1) = col / nn;
            r -= Q.col(Q.cols() - 1) * Q.col(Q.cols() - 1).dot(r);
        }
    }
    while (static_cast<int>(chosen.size()) < P) {
        int best = -1;
        double best_gain = -1.0;
        Vector best_q;
        for (int c = 0; c < slots; ++c) {
            if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
            Vector col = op.phi.col(c);
            if (Q.cols() > 0) col -= Q * (Q.adjoint() * col).eval();
            const double n2 = col.squaredNorm();
            const double gain = n2 > 1e-24 ? std::norm(col.dot(r)) / n2 : 0.0;
            if (gain > best_gain) {
                best_gain = gain;
                best = c;
                best_q = n2 > 1e-24 ? (col / std::sqrt(n2)).eval() : Vector();
            }
        }
        if (best < 0) break;  // selected columns already span the space
        chosen.push_back(best);
        if (best_q.size() > 0) {
            Q.conservativeResize(op.K, Q.cols() + 1);
            Q.col(Q.cols() - 1) = best_q;
            r -= best_q * best_q.dot(r);
        }
    }
    std::sort(chosen.begin(), chosen.end());
    SelectionPattern pat;
    pat.tau = op.tau;
    for (int c : chosen) pat.pairs.emplace_back(c / op.tau, op.tau - 1 - (c % op.tau));
    return pat;
}

}  // namespace

ExperimentSummary run_insufficient_seeding(const ExperimentConfig& cfg) {
    ExperimentSummary summary;
    summary.config = cfg;

    const Rng master(cfg.seed);
    Rng graph_rng = master.substream(0xC0FFEE);
    Instance inst;
    inst.p = cfg.p;
    inst.graph = make_graph(cfg, cfg.p, graph_rng);
    inst.shift = build_shift(inst.graph, shift_kind_from_name(cfg.shift));
    inst.basis = decompose(inst.shift);
    if (cfg.normalize_shift && cfg.shift == "adjacency")
        normalize_spectral_radius(inst.shift, inst.basis);
    const int n = inst.graph.n;
    const int K = cfg.K;

    // Candidate locations are ranked by the error of the ideal bandwidth-K
    // interpolator; the response weighting of any concrete low-pass filter
    // is invertible on the active band, and the ideal response keeps the
    // search numerically clean even at P = K.
    std::vector<int> budgets = cfg.budgets;
    if (budgets.empty())
        for (int P = 1; P <= K; ++P) budgets.push_back(P);

    const int S = cfg.signals;
    Matrix rhs(K, S);
    RealVector rhs_norm(S);
    for (int s = 0; s < S; ++s) {
        Rng rng = master.substream(s + 1);
        Vector yhatK;
        const Vector y = random_bandlimited(inst.basis, K, rng, SpectrumLaw::UnitGaussian,
                                            &yhatK);
        rhs.col(s) = inst.basis.V.leftCols(K).adjoint() * y;
        rhs_norm[s] = rhs.col(s).norm();
    }

    std::map<int, ReconstructionOperator> ops;  // per tau
    auto op_for = [&](int tau) -> const ReconstructionOperator& {
        auto it = ops.find(tau);
        if (it == ops.end())
            it = ops.emplace(tau, ReconstructionOperator::build_ideal(inst.basis, K, tau)).first;
        return it->second;
    };

    struct Best {
        double err = std::numeric_limits<double>::infinity();
        SelectionPattern pattern;
    };

    std::map<std::string, std::map<int, std::vector<Best>>> best;  // scheme -> P -> signal
    std::map<int, std::vector<Best>> best_mnmt_prev;

    for (int P : budgets) {
        for (const std::string& scheme : cfg.schemes) {
            std::vector<Best> per_signal(S);
            auto consider = [&](const ReconstructionOperator& op,
                                const SelectionPattern& pattern) {
                const Matrix Q = column_space_basis(op.restricted(pattern));
                const Matrix G = Q.adjoint() * rhs;  // one product for all signals
                for (int s = 0; s < S; ++s) {
                    const double r2 =
                        rhs_norm[s] * rhs_norm[s] - G.col(s).squaredNorm();
                    const double err = std::sqrt(std::max(r2, 0.0)) / rhs_norm[s];
                    if (err < per_signal[s].err) {
                        per_signal[s].err = err;
                        per_signal[s].pattern = pattern;
                    }
                }
            };

            if (scheme == "mnst") {
                const auto& op = op_for(1);
                for_each_subset(n, P, [&](const std::vector<int>& nodes) {
                    consider(op, SelectionPattern::single_time(nodes));
                });
            } else if (scheme == "snmt") {
                const auto& op = op_for(P);
                for (int i = 0; i < n; ++i) consider(op, SelectionPattern::single_node(i, P));
            } else if (scheme == "mnmt") {
                const auto& op = op_for(P);
                const long count = pattern_candidate_count(n * P, P);
                if (count <= cfg.exhaustive_guard) {
                    for_each_subset(n * P, P, [&](const std::vector<int>& cols) {
                        SelectionPattern pat;
                        pat.tau = P;
                        for (int c : cols) pat.pairs.emplace_back(c / P, P - 1 - (c % P));
                        consider(op, pat);
                    });
                } else {
                    // Beyond the guard: per-signal greedy forward selection,
                    // extension of the previous best pattern, and the
                    // embedded MN-ST / SN-MT optima (all legal MN-MT
                    // patterns, so the reported error stays achievable).
                    for (int s = 0; s < S; ++s) {
                        auto try_pattern = [&](const SelectionPattern& pattern) {
                            const Matrix Q = column_space_basis(op.restricted(pattern));
                            const double err =
                                ls_residual(Q, rhs.col(s)) / rhs_norm[s];
                            if (err < per_signal[s].err) {
                                per_signal[s].err = err;
                                per_signal[s].pattern = pattern;
                            }
                        };
                        try_pattern(greedy_columns(op, rhs.col(s), P));
                        if (auto it = best_mnmt_prev.find(P - 1); it != best_mnmt_prev.end()) {
                            std::vector<int> warm;
                            const SelectionPattern& prev = it->second[s].pattern;
                            for (int k = 0; k < prev.P(); ++k) {
                                const auto& [node, t_prev] = prev.pairs[k];
                                // keep the injection at the same distance from
                                // the end of the phase: the column is identical
                                const int l = (prev.tau - 1) - t_prev;
                                warm.push_back(node * P + std::min(l, P - 1));
                            }
                            std::sort(warm.begin(), warm.end());
                            warm.erase(std::unique(warm.begin(), warm.end()), warm.end());
                            if (static_cast<int>(warm.size()) < P)
                                try_pattern(greedy_columns(op, rhs.col(s), P, warm));
                        }
                        if (best.count("mnst") && best["mnst"].count(P)) {
                            const SelectionPattern& m = best["mnst"][P][s].pattern;
                            SelectionPattern embedded;
                            embedded.tau = P;
                            for (const auto& [node, t] : m.pairs)
                                embedded.pairs.emplace_back(node, P - 1);
                            try_pattern(embedded);
                        }
                        if (best.count("snmt") && best["snmt"].count(P)) {
                            const SelectionPattern& m = best["snmt"][P][s].pattern;
                            try_pattern(m);
                        }
                    }
                }
                best_mnmt_prev[P] = per_signal;
            } else {
                throw InvalidArgument("unknown scheme: " + scheme);
            }

            double mean = 0.0;
            for (int s = 0; s < S; ++s) {
                mean += per_signal[s].err;
                SignalRecord rec;
                rec.signal_index = s;
                rec.P = P;
                rec.scheme = scheme;
                rec.min_error = per_signal[s].err;
                rec.argmin_pattern = pattern_string(per_signal[s].pattern);
                summary.signals.push_back(rec);
            }
            summary.curves.push_back({P, scheme, mean / S});
            best[scheme][P] = std::move(per_signal);
        }
    }
    return summary;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    if (cfg.kind == "recovery_comparison") return run_recovery_comparison(cfg);
    if (cfg.kind == "insufficient_seeding") return run_insufficient_seeding(cfg);
    throw InvalidArgument("unknown experiment kind: " + cfg.kind);
}

// ---------------------------------------------------------------------------
// serialization

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        cfg.kind = j.value("kind", cfg.kind);
        if (j.contains("graph")) {
            const json& g = j["graph"];
            cfg.generator = g.value("generator", cfg.generator);
            cfg.graph_path = g.value("path", cfg.graph_path);
            cfg.n = g.value("n", cfg.n);
            if (g.contains("p")) {
                cfg.p = g["p"].get<double>();
                cfg.p_range = false;
            }
            if (g.contains("p_range")) {
                cfg.p_lo = g["p_range"][0].get<double>();
                cfg.p_hi = g["p_range"][1].get<double>();
                cfg.p_range = true;
            }
            cfg.require_connected = g.value("require_connected", cfg.require_connected);
        }
        cfg.shift = j.value("shift", cfg.shift);
        cfg.normalize_shift = j.value("normalize_shift", cfg.normalize_shift);
        cfg.K = j.value("k", cfg.K);
        if (j.contains("schemes")) cfg.schemes = j["schemes"].get<std::vector<std::string>>();
        cfg.trials = j.value("trials", cfg.trials);
        cfg.mnmt_nodes = j.value("mnmt_nodes", cfg.mnmt_nodes);
        cfg.mnmt_times = j.value("mnmt_times", cfg.mnmt_times);
        if (j.contains("noise")) {
            const json& nj = j["noise"];
            cfg.noise = nj.value("model", cfg.noise);
            cfg.sigma = nj.value("sigma", cfg.sigma);
        }
        cfg.signals = j.value("signals", cfg.signals);
        if (j.contains("budgets")) cfg.budgets = j["budgets"].get<std::vector<int>>();
        cfg.seed = j.value("seed", cfg.seed);
        cfg.recovery_tol = j.value("recovery_tol", cfg.recovery_tol);
        cfg.cond_max = j.value("cond_max", cfg.cond_max);
        cfg.exhaustive_guard = j.value("exhaustive_guard", cfg.exhaustive_guard);
    } catch (const json::exception& e) {
        throw IoError(std::string("config field error: ") + e.what());
    }
    return cfg;
}

std::string ExperimentConfig::to_json_text() const {
    json j;
    j["kind"] = kind;
    json g;
    g["generator"] = generator;
    if (!graph_path.empty()) g["path"] = graph_path;
    g["n"] = n;
    if (p_range)
        g["p_range"] = {p_lo, p_hi};
    else
        g["p"] = p;
    g["require_connected"] = require_connected;
    j["graph"] = g;
    j["shift"] = shift;
    j["normalize_shift"] = normalize_shift;
    j["k"] = K;
    j["schemes"] = schemes;
    j["trials"] = trials;
    j["mnmt_nodes"] = mnmt_nodes;
    j["mnmt_times"] = mnmt_times;
    j["noise"] = {{"model", noise}, {"sigma", sigma}};
    j["signals"] = signals;
    if (!budgets.empty()) j["budgets"] = budgets;
    j["seed"] = seed;
    j["recovery_tol"] = recovery_tol;
    j["cond_max"] = cond_max;
    j["exhaustive_guard"] = exhaustive_guard;
    return j.dump(2);
}

namespace {

json nan_to_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

}  // namespace

std::string ExperimentSummary::to_json_text() const {
    json j;
    j["config"] = json::parse(config.to_json_text());
    json schemes;
    for (const auto& [name, stats] : by_scheme) {
        schemes[name] = {{"recovery_pct", stats.recovery_pct},
                         {"min_error_median", nan_to_null(stats.min_error_median)},
                         {"median_error_median", nan_to_null(stats.median_error_median)}};
    }
    j["schemes"] = schemes;
    j["redraws"] = {{"disconnected", redraw_disconnected},
                    {"non_diagonalizable", redraw_nondiagonalizable},
                    {"condition_violation", redraw_condition}};
    if (!curves.empty()) {
        json c = json::array();
        for (const CurvePoint& pt : curves)
            c.push_back({{"P", pt.P}, {"scheme", pt.scheme}, {"mean_min_error", pt.mean_min_error}});
        j["curves"] = c;
    }
    return j.dump(2);
}

std::string ExperimentSummary::trials_csv() const {
    std::ostringstream os;
    if (!trials.empty()) {
        os << "graph_index,p,scheme,patterns,feasible,recovered,min_error,median_error,max_cond\n";
        for (const TrialRecord& r : trials) {
            os << r.graph_index << "," << r.p << "," << r.scheme << "," << r.patterns << ","
               << r.feasible << "," << r.recovered << ",";
            if (std::isnan(r.min_error))
                os << ",";
            else
                os << r.min_error << ",";
            if (std::isnan(r.median_error))
                os << ",";
            else
                os << r.median_error << ",";
            os << r.max_cond << "\n";
        }
    } else {
        os << "signal_index,P,scheme,min_error,argmin_pattern\n";
        for (const SignalRecord& r : signals)
            os << r.signal_index << "," << r.P << "," << r.scheme << "," << r.min_error << ",\""
               << r.argmin_pattern << "\"\n";
    }
    return os.str();
}

std::string ExperimentSummary::curves_csv() const {
    std::ostringstream os;
    os << "P,scheme,mean_min_error\n";
    for (const CurvePoint& pt : curves)
        os << pt.P << "," << pt.scheme << "," << pt.mean_min_error << "\n";
    return os.str();
}

}  // namespace gsr
