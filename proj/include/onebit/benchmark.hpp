#pragma once

#include "onebit/gamp.hpp"
#include "onebit/sim.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace onebit {

enum class Algorithm { Noisy1bG, LaplacianSI, GaussianSI, SupportSI, SignGampBaseline };

std::string_view algorithm_name(Algorithm a);
/// Throws std::invalid_argument for unknown names.
Algorithm parse_algorithm(std::string_view name);

/// Scenario knob varied across a sweep. `FlipProb` is 1 - gamma.
enum class SweepParam { None, FlipProb, M, N, NoiseVar, SiNoiseVar, Lambda, FlipFrac, SupportErrorFrac };

std::string_view sweep_param_name(SweepParam p);
SweepParam parse_sweep_param(std::string_view name);

struct Sweep {
    SweepParam param = SweepParam::None;
    std::vector<double> values;
};

struct ExperimentConfig {
    ScenarioConfig scenario;
    std::vector<Algorithm> algorithms{Algorithm::Noisy1bG};
    Sweep sweep;
    int trials = 50;
    GampConfig gamp;
    /// Starting points of the EM loop.
    double initial_vs = 1.0;
    double initial_beta = 0.9;
    /// Slow-varying runs only: re-estimate v_s / beta by EM at every epoch.
    /// Off by default; the SI parameters then stay at the initial values.
    bool sequential_em = false;
    int threads = 1;
    /// Off by default so that output files are byte-reproducible.
    bool timing = false;

    /// Scenario with the sweep value applied. Throws if the value is illegal.
    ScenarioConfig scenario_at(double sweep_value) const;
    void validate() const;
};

/// One algorithm on one trial (and one epoch for sequential runs).
struct TrialRecord {
    std::size_t sweep_index = 0;
    int trial = 0;
    int epoch = 0;
    Algorithm algorithm = Algorithm::Noisy1bG;
    double nmse = 0.0;
    double runtime_ms = 0.0;
    /// NaN when the algorithm has no EM parameter.
    double estimated_param = 0.0;
    bool failed = false;
    std::string error;
    /// FNV-1a over the trial's x, A, y and side information; equal for all
    /// algorithms of one trial.
    std::uint64_t data_digest = 0;
};

struct ResultRow {
    std::string sweep_param;
    double sweep_value = 0.0;
    Algorithm algorithm = Algorithm::Noisy1bG;
    int trials = 0;
    double mean_nmse = 0.0;
    double std_err = 0.0;
    double mean_runtime_ms = 0.0;
    double mean_estimated_param = 0.0;
    int failures = 0;
};

struct ResultTable {
    std::vector<ResultRow> rows;
    /// Ordered by (sweep value, trial, epoch, algorithm list order).
    std::vector<TrialRecord> records;
};

/// Mean and standard error (sample standard deviation / sqrt(n)) of `xs`;
/// the error is 0 for fewer than two values.
struct MeanSe {
    double mean = 0.0;
    double std_err = 0.0;
    int n = 0;
};
MeanSe mean_se(const std::vector<double>& xs);

/// Runs one algorithm on one trial's data.
GampResult run_algorithm(Algorithm alg, const TrialData& data, const ScenarioConfig& sc, const ExperimentConfig& cfg);

/// Monte-Carlo sweep: every trial draws its data once and every algorithm
/// sees the same data. Trial t uses stream t of the scenario seed for every
/// sweep value.
ResultTable run_experiment(const ExperimentConfig& cfg);

/// Slow-varying scenario: epoch 0 is reconstructed without side information;
/// from epoch 1 on each SI algorithm uses its own previous estimate. Rows are
/// keyed by epoch (sweep_param = "epoch").
ResultTable run_sequential_experiment(const ExperimentConfig& cfg);

/// Dispatches on the scenario's side-information protocol.
ResultTable run(const ExperimentConfig& cfg);

inline constexpr std::string_view kCsvHeader =
    "sweep_param,sweep_value,algorithm,trials,mean_nmse,std_err,mean_runtime_ms,mean_estimated_param,failures";

/// CSV with LF line endings and 17 significant digits.
void write_csv(const ResultTable& table, std::ostream& os);
std::string to_csv(const ResultTable& table);

std::uint64_t digest(const TrialData& data);

/// Support labels from an estimate: +1 where |x| > 1e-3 max|x|.
SignVec threshold_support(const Vec& x_hat);

}  // namespace onebit
