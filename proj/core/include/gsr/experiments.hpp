#ifndef GSR_EXPERIMENTS_HPP
#define GSR_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gsr/types.hpp"

namespace gsr {

/// Everything a Monte-Carlo run needs; parsed from / serialized to JSON so
/// a summary always carries the exact configuration that produced it.
struct ExperimentConfig {
    std::string kind = "recovery_comparison";  // or "insufficient_seeding"

    // graph source
    std::string generator = "er";  // er | cycle | karate | file
    std::string graph_path;
    int n = 10;
    double p = 0.3;
    bool p_range = true;  // draw p uniformly in [p_lo, p_hi] per graph
    double p_lo = 0.2;
    double p_hi = 0.4;
    bool require_connected = true;

    std::string shift = "adjacency";
    /// Rescale edge weights by 1/spectral-radius so the percolation is
    /// non-expansive (adjacency shifts only).
    bool normalize_shift = true;

    int K = 4;
    std::vector<std::string> schemes = {"mnst", "snmt", "mnmt"};

    // recovery_comparison
    int trials = 1000;
    int mnmt_nodes = 2;
    int mnmt_times = 2;
    std::string noise = "constant-snr";  // none | constant-snr | fixed-power
    double sigma = 1e-3;

    // insufficient_seeding
    int signals = 100;
    std::vector<int> budgets;  // P values; default 1..K

    std::uint64_t seed = 0;
    double recovery_tol = tol::kRecovery;
    double cond_max = tol::kCondMax;
    long exhaustive_guard = 1000000;

    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json_text() const;
};

struct SchemeStats {
    double recovery_pct = 0.0;        // mean over graphs of per-graph %
    double min_error_median = 0.0;    // median over graphs of per-graph min
    double median_error_median = 0.0; // median over graphs of per-graph median
};

struct TrialRecord {
    int graph_index = 0;
    double p = 0.0;
    std::string scheme;
    int patterns = 0;
    int feasible = 0;
    int recovered = 0;
    double min_error = 0.0;
    double median_error = 0.0;
    double max_cond = 0.0;
};

struct CurvePoint {
    int P = 0;
    std::string scheme;
    double mean_min_error = 0.0;
};

struct SignalRecord {
    int signal_index = 0;
    int P = 0;
    std::string scheme;
    double min_error = 0.0;
    std::string argmin_pattern;  // "node:time ..." of the best pattern
};

struct ExperimentSummary {
    ExperimentConfig config;
    std::map<std::string, SchemeStats> by_scheme;
    std::vector<TrialRecord> trials;    // recovery_comparison
    std::vector<CurvePoint> curves;     // insufficient_seeding
    std::vector<SignalRecord> signals;  // insufficient_seeding
    int redraw_disconnected = 0;
    int redraw_nondiagonalizable = 0;
    int redraw_condition = 0;

    std::string to_json_text() const;
    std::string trials_csv() const;
    std::string curves_csv() const;
};

/// Recovery-percentage census: per graph and random K-bandlimited signal, every
/// seeding-location choice of each scheme is designed and run noiselessly
/// (perfect-recovery census) and, with a noise model set, once more with
/// corrupted injections (min/median error per graph).
ExperimentSummary run_recovery_comparison(const ExperimentConfig& cfg);

/// Under-seeded curves: for each budget P and scheme, the best achievable
/// LS error over all seeding-location choices, averaged over random
/// bandlimited signals. MN-MT is unrestricted; above the exhaustive guard
/// its search combines greedy forward selection, extension of the best
/// smaller pattern, and the embedded MN-ST/SN-MT optima.
ExperimentSummary run_insufficient_seeding(const ExperimentConfig& cfg);

ExperimentSummary run_experiment(const ExperimentConfig& cfg);

}  // namespace gsr

#endif  // GSR_EXPERIMENTS_HPP
