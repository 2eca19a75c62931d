#include "onebit/benchmark.hpp"
#include "onebit/em.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace onebit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct NamedAlgorithm {
    Algorithm alg;
    std::string_view name;
};

constexpr NamedAlgorithm kAlgorithms[] = {
    {Algorithm::Noisy1bG, "Noisy1bG"},       {Algorithm::LaplacianSI, "LaplacianSI"},
    {Algorithm::GaussianSI, "GaussianSI"},   {Algorithm::SupportSI, "SupportSI"},
    {Algorithm::SignGampBaseline, "SignGampBaseline"},
};

struct NamedSweep {
    SweepParam param;
    std::string_view name;
};

constexpr NamedSweep kSweeps[] = {
    {SweepParam::None, "none"},
    {SweepParam::FlipProb, "flip_prob"},
    {SweepParam::M, "M"},
    {SweepParam::N, "N"},
    {SweepParam::NoiseVar, "noise_var"},
    {SweepParam::SiNoiseVar, "si_noise_var"},
    {SweepParam::Lambda, "lambda"},
    {SweepParam::FlipFrac, "flip_frac"},
    {SweepParam::SupportErrorFrac, "support_error_frac"},
};

bool uses_si(Algorithm a) {
    return a == Algorithm::LaplacianSI || a == Algorithm::GaussianSI || a == Algorithm::SupportSI;
}

bool uses_amplitude(Algorithm a) { return a == Algorithm::LaplacianSI || a == Algorithm::GaussianSI; }

int to_count(double v, const char* what) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
        throw std::invalid_argument(std::string(what) + " sweep values must be positive integers");
    }
    return static_cast<int>(v);
}

template <typename T>
T& protocol_as(SiProtocol& p, const char* what) {
    T* out = std::get_if<T>(&p);
    if (out == nullptr) {
        throw std::invalid_argument(std::string("sweep over ") + what + " needs a matching side-information protocol");
    }
    return *out;
}

// Parallel for over [0, n) with a fixed number of workers. Every index writes
// only its own output slot, so the result does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

class Stopwatch {
public:
    explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        if (!enabled_) return kNaN;
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    bool enabled_;
    std::chrono::steady_clock::time_point start_;
};

void score(TrialRecord& rec, const Vec& truth, const GampResult& res) {
    rec.estimated_param = res.estimated_param.value_or(kNaN);
    const Nmse e = nmse(truth, res.x_hat);
    rec.nmse = e.value;
    if (!std::isfinite(rec.nmse)) {
        rec.failed = true;
        rec.error = "non-finite NMSE";
    }
}

class Fnv {
public:
    template <typename Derived>
    void add(const Eigen::DenseBase<Derived>& m) {
        const auto* p = reinterpret_cast<const unsigned char*>(m.derived().data());
        const std::size_t n = static_cast<std::size_t>(m.size()) * sizeof(typename Derived::Scalar);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001B3ULL;
        }
    }
    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 0xCBF29CE484222325ULL;
};

void fail(TrialRecord& rec, const std::string& what) {
    rec.failed = true;
    rec.error = what;
    rec.nmse = kNaN;
    rec.estimated_param = kNaN;
}

std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, const ScenarioConfig& sc, std::size_t sweep_index,
                                   int trial) {
    Rng rng = make_stream(sc.seed, static_cast<std::uint64_t>(trial));
    const TrialData data = gen_trial(sc, rng);
    const std::uint64_t dig = digest(data);
    std::vector<TrialRecord> out;
    for (Algorithm alg : cfg.algorithms) {
        TrialRecord rec;
        rec.data_digest = dig;
        rec.sweep_index = sweep_index;
        rec.trial = trial;
        rec.algorithm = alg;
        const Stopwatch watch(cfg.timing);
        try {
            const GampResult res = run_algorithm(alg, data, sc, cfg);
            rec.runtime_ms = watch.ms();
            score(rec, data.x_true, res);
        } catch (const std::exception& e) {
            fail(rec, e.what());
            rec.runtime_ms = watch.ms();
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<TrialRecord> run_sequential_trial(const ExperimentConfig& cfg, const ScenarioConfig& sc, int trial) {
    Rng rng = make_stream(sc.seed, static_cast<std::uint64_t>(trial));
    const TrialData data = gen_trial(sc, rng);
    const std::size_t epochs = data.epoch_signals.size();
    const std::size_t n_alg = cfg.algorithms.size();
    const std::uint64_t dig = digest(data);

    // Previous-epoch estimate of every algorithm; empty after a failure.
    std::vector<std::optional<Vec>> prev(n_alg);
    GampConfig si_gamp = cfg.gamp;
    si_gamp.em_enabled = cfg.gamp.em_enabled && cfg.sequential_em;
    std::vector<TrialRecord> out;
    std::optional<GampResult> first;
    std::string first_error;
    double first_ms = kNaN;

    for (std::size_t e = 0; e < epochs; ++e) {
        const Vec& truth = data.epoch_signals[e];
        const SignVec& y = data.epoch_measurements[e];
        for (std::size_t k = 0; k < n_alg; ++k) {
            const Algorithm alg = cfg.algorithms[k];
            TrialRecord rec;
            rec.trial = trial;
            rec.epoch = static_cast<int>(e);
            rec.data_digest = dig;
            rec.algorithm = alg;
            const Stopwatch watch(cfg.timing);
            try {
                GampResult res;
                if (e == 0 && uses_si(alg)) {
                    // Nothing to lean on yet: every SI algorithm starts from the
                    // plain reconstruction, computed once per trial.
                    if (!first && first_error.empty()) {
                        const Stopwatch w0(cfg.timing);
                        try {
                            first = run_noisy1bg(data.a, y, sc.prior, sc.ch, cfg.gamp);
                        } catch (const std::exception& ex) {
                            first_error = ex.what();
                        }
                        first_ms = w0.ms();
                    }
                    if (!first) throw std::runtime_error(first_error);
                    res = *first;
                    rec.runtime_ms = first_ms;
                    res.estimated_param.reset();
                } else if (uses_si(alg)) {
                    if (!prev[k]) throw std::runtime_error("previous epoch failed");
                    SideInfo si;
                    if (alg == Algorithm::LaplacianSI) {
                        si = AmplitudeLaplacian{*prev[k], cfg.initial_vs};
                    } else if (alg == Algorithm::GaussianSI) {
                        si = AmplitudeGaussian{*prev[k], cfg.initial_vs};
                    } else {
                        si = SupportSideInfo{threshold_support(*prev[k]), cfg.initial_beta};
                    }
                    res = run_with_si(data.a, y, sc.prior, sc.ch, si, si_gamp);
                    rec.runtime_ms = watch.ms();
                } else {
                    const ChannelParams ch = alg == Algorithm::SignGampBaseline ? ChannelParams::noiseless() : sc.ch;
                    res = run_noisy1bg(data.a, y, sc.prior, ch, cfg.gamp);
                    rec.runtime_ms = watch.ms();
                }
                prev[k] = res.x_hat;
                score(rec, truth, res);
            } catch (const std::exception& ex) {
                prev[k].reset();
                fail(rec, ex.what());
                rec.runtime_ms = watch.ms();
            }
            out.push_back(std::move(rec));
        }
    }
    return out;
}

double mean_of_finite(const std::vector<double>& xs) {
    double acc = 0.0;
    int n = 0;
    for (double x : xs) {
        if (std::isfinite(x)) {
            acc += x;
            ++n;
        }
    }
    return n > 0 ? acc / n : kNaN;
}

ResultRow aggregate(const std::string& param, double value, Algorithm alg, const std::vector<const TrialRecord*>& recs) {
    ResultRow row;
    row.sweep_param = param;
    row.sweep_value = value;
    row.algorithm = alg;
    std::vector<double> err, ms, est;
    for (const TrialRecord* r : recs) {
        if (r->failed) {
            ++row.failures;
            continue;
        }
        err.push_back(r->nmse);
        ms.push_back(r->runtime_ms);
        est.push_back(r->estimated_param);
    }
    const MeanSe m = mean_se(err);
    row.trials = m.n;
    row.mean_nmse = m.n > 0 ? m.mean : kNaN;
    row.std_err = m.std_err;
    row.mean_runtime_ms = mean_of_finite(ms);
    row.mean_estimated_param = mean_of_finite(est);
    return row;
}

void format_double(std::ostream& os, double v) {
    if (std::isnan(v)) {
        os << "nan";
    } else if (std::isinf(v)) {
        os << (v > 0 ? "inf" : "-inf");
    } else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    }
}

}  // namespace

std::string_view algorithm_name(Algorithm a) {
    for (const auto& n : kAlgorithms) {
        if (n.alg == a) return n.name;
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name) {
    for (const auto& n : kAlgorithms) {
        if (n.name == name) return n.alg;
    }
    throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

std::string_view sweep_param_name(SweepParam p) {
    for (const auto& n : kSweeps) {
        if (n.param == p) return n.name;
    }
    return "?";
}

SweepParam parse_sweep_param(std::string_view name) {
    for (const auto& n : kSweeps) {
        if (n.name == name) return n.param;
    }
    throw std::invalid_argument("unknown sweep parameter '" + std::string(name) + "'");
}

ScenarioConfig ExperimentConfig::scenario_at(double v) const {
    ScenarioConfig sc = scenario;
    switch (sweep.param) {
        case SweepParam::None:
            break;
        case SweepParam::FlipProb:
            sc.ch = ChannelParams(sc.ch.noise_var(), 1.0 - v);
            break;
        case SweepParam::M:
            sc.m = to_count(v, "M");
            break;
        case SweepParam::N:
            sc.n = to_count(v, "N");
            break;
        case SweepParam::NoiseVar:
            sc.ch = ChannelParams(v, sc.ch.gamma());
            break;
        case SweepParam::SiNoiseVar:
            protocol_as<NoisyAmplitude>(sc.si_protocol, "si_noise_var").add_noise_var = v;
            break;
        case SweepParam::Lambda:
            sc.prior = SignalPrior(v, sc.prior.v_x());
            break;
        case SweepParam::FlipFrac:
            protocol_as<NoisySupport>(sc.si_protocol, "flip_frac").flip_frac = v;
            break;
        case SweepParam::SupportErrorFrac:
            protocol_as<NoisyAmplitude>(sc.si_protocol, "support_error_frac").support_error_frac = v;
            break;
    }
    sc.validate();
    return sc;
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (algorithms.empty()) throw std::invalid_argument("at least one algorithm is required");
    if (!(initial_vs >= kVsMin && initial_vs <= kVsMax)) throw std::invalid_argument("initial_vs out of range");
    if (!(initial_beta > 0.5 && initial_beta <= 1.0)) throw std::invalid_argument("initial_beta must lie in (0.5, 1]");
    gamp.validate();
    scenario.validate();
    if (sweep.param == SweepParam::None && !sweep.values.empty()) {
        throw std::invalid_argument("sweep values given without a sweep parameter");
    }
    if (sweep.param != SweepParam::None && sweep.values.empty()) {
        throw std::invalid_argument("sweep parameter given without values");
    }
    for (double v : sweep.values) scenario_at(v);

    const bool sequential = std::holds_alternative<SlowVarying>(scenario.si_protocol);
    if (sequential && sweep.param != SweepParam::None) {
        throw std::invalid_argument("slow-varying experiments are keyed by epoch and take no sweep");
    }
    for (Algorithm a : algorithms) {
        if (!uses_si(a) || sequential) continue;
        if (std::holds_alternative<NoSiProtocol>(scenario.si_protocol)) {
            throw std::invalid_argument(std::string(algorithm_name(a)) + " needs a side-information protocol");
        }
        if (uses_amplitude(a) && std::holds_alternative<NoisySupport>(scenario.si_protocol)) {
            throw std::invalid_argument(std::string(algorithm_name(a)) + " needs amplitude side information");
        }
    }
}

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe out;
    out.n = static_cast<int>(xs.size());
    if (xs.empty()) return out;
    double acc = 0.0;
    for (double x : xs) acc += x;
    out.mean = acc / static_cast<double>(xs.size());
    if (xs.size() < 2) return out;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    const double n = static_cast<double>(xs.size());
    out.std_err = std::sqrt(ss / (n - 1.0) / n);
    return out;
}

std::uint64_t digest(const TrialData& data) {
    Fnv h;
    h.add(data.x_true);
    h.add(data.a);
    h.add(data.y);
    if (data.si.amplitude) h.add(*data.si.amplitude);
    if (data.si.support) h.add(*data.si.support);
    for (const Vec& x : data.epoch_signals) h.add(x);
    for (const SignVec& y : data.epoch_measurements) h.add(y);
    return h.value();
}

SignVec threshold_support(const Vec& x_hat) {
    const double cut = 1e-3 * (x_hat.size() > 0 ? x_hat.cwiseAbs().maxCoeff() : 0.0);
    SignVec s(x_hat.size());
    for (Eigen::Index i = 0; i < x_hat.size(); ++i) s[i] = std::abs(x_hat[i]) > cut ? 1 : -1;
    return s;
}

GampResult run_algorithm(Algorithm alg, const TrialData& data, const ScenarioConfig& sc, const ExperimentConfig& cfg) {
    switch (alg) {
        case Algorithm::Noisy1bG:
            return run_noisy1bg(data.a, data.y, sc.prior, sc.ch, cfg.gamp);
        case Algorithm::SignGampBaseline:
            return run_noisy1bg(data.a, data.y, sc.prior, ChannelParams::noiseless(), cfg.gamp);
        case Algorithm::LaplacianSI:
        case Algorithm::GaussianSI: {
            if (!data.si.amplitude) throw std::invalid_argument("trial carries no amplitude side information");
            SideInfo si = AmplitudeGaussian{*data.si.amplitude, cfg.initial_vs};
            if (alg == Algorithm::LaplacianSI) si = AmplitudeLaplacian{*data.si.amplitude, cfg.initial_vs};
            return run_with_si(data.a, data.y, sc.prior, sc.ch, si, cfg.gamp);
        }
        case Algorithm::SupportSI:
            if (!data.si.support) throw std::invalid_argument("trial carries no support side information");
            return run_with_si(data.a, data.y, sc.prior, sc.ch, SupportSideInfo{*data.si.support, cfg.initial_beta},
                               cfg.gamp);
    }
    throw std::invalid_argument("unknown algorithm");
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (std::holds_alternative<SlowVarying>(cfg.scenario.si_protocol)) {
        throw std::invalid_argument("run_experiment: use run_sequential_experiment for slow-varying scenarios");
    }
    const std::vector<double> values =
        cfg.sweep.param == SweepParam::None ? std::vector<double>{0.0} : cfg.sweep.values;
    std::vector<ScenarioConfig> scenarios;
    for (double v : values) scenarios.push_back(cfg.scenario_at(v));

    const auto trials = static_cast<std::size_t>(cfg.trials);
    std::vector<std::vector<TrialRecord>> slots(values.size() * trials);
    parallel_for(slots.size(), cfg.threads, [&](std::size_t job) {
        const std::size_t s = job / trials;
        slots[job] = run_trial(cfg, scenarios[s], s, static_cast<int>(job % trials));
    });

    ResultTable table;
    for (auto& slot : slots) {
        for (auto& r : slot) table.records.push_back(std::move(r));
    }
    const std::string param(sweep_param_name(cfg.sweep.param));
    for (std::size_t s = 0; s < values.size(); ++s) {
        for (Algorithm alg : cfg.algorithms) {
            std::vector<const TrialRecord*> recs;
            for (const auto& r : table.records) {
                if (r.sweep_index == s && r.algorithm == alg) recs.push_back(&r);
            }
            table.rows.push_back(aggregate(param, values[s], alg, recs));
        }
    }
    return table;
}

ResultTable run_sequential_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto* sv = std::get_if<SlowVarying>(&cfg.scenario.si_protocol);
    if (sv == nullptr) throw std::invalid_argument("run_sequential_experiment: scenario is not slow-varying");

    const ScenarioConfig sc = cfg.scenario_at(0.0);
    std::vector<std::vector<TrialRecord>> slots(static_cast<std::size_t>(cfg.trials));
    parallel_for(slots.size(), cfg.threads,
                 [&](std::size_t t) { slots[t] = run_sequential_trial(cfg, sc, static_cast<int>(t)); });

    ResultTable table;
    for (auto& slot : slots) {
        for (auto& r : slot) table.records.push_back(std::move(r));
    }
    for (int e = 0; e < sv->epochs; ++e) {
        for (Algorithm alg : cfg.algorithms) {
            std::vector<const TrialRecord*> recs;
            for (const auto& r : table.records) {
                if (r.epoch == e && r.algorithm == alg) recs.push_back(&r);
            }
            table.rows.push_back(aggregate("epoch", e, alg, recs));
        }
    }
    return table;
}

ResultTable run(const ExperimentConfig& cfg) {
    if (std::holds_alternative<SlowVarying>(cfg.scenario.si_protocol)) return run_sequential_experiment(cfg);
    return run_experiment(cfg);
}

void write_csv(const ResultTable& table, std::ostream& os) {
    os << kCsvHeader << '\n';
    for (const auto& r : table.rows) {
        os << r.sweep_param << ',';
        format_double(os, r.sweep_value);
        os << ',' << algorithm_name(r.algorithm) << ',' << r.trials << ',';
        format_double(os, r.mean_nmse);
        os << ',';
        format_double(os, r.std_err);
        os << ',';
        format_double(os, r.mean_runtime_ms);
        os << ',';
        format_double(os, r.mean_estimated_param);
        os << ',' << r.failures << '\n';
    }
}

std::string to_csv(const ResultTable& table) {
    std::ostringstream os;
    write_csv(table, os);
    return os.str();
}

}  // namespace onebit
