// Acceptance checks. Prints one PASS/FAIL line per criterion; exits 1 if any fails.

#include "onebit/benchmark.hpp"
#include "onebit/oracles.hpp"
#include "onebit/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

using namespace onebit;
namespace val = onebit::validation;

namespace {

constexpr std::uint64_t kSeed = 2026;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

const ResultRow& row(const ResultTable& t, double sweep_value, Algorithm a) {
    for (const ResultRow& r : t.rows) {
        if (r.sweep_value == sweep_value && r.algorithm == a) return r;
    }
    throw std::runtime_error("missing row");
}

double pooled(const ResultRow& a, const ResultRow& b) { return std::hypot(a.std_err, b.std_err); }

// lhs below rhs by at least `k` pooled standard errors; appends a note.
bool below(const ResultRow& lhs, const ResultRow& rhs, double k, std::string& note) {
    const double gap = rhs.mean_nmse - lhs.mean_nmse;
    const double se = pooled(lhs, rhs);
    const bool ok = lhs.failures == 0 && rhs.failures == 0 && gap > 0.0 && gap >= k * se;
    note += std::string(" ") + std::string(algorithm_name(lhs.algorithm)) + "<" +
            std::string(algorithm_name(rhs.algorithm)) + fmt(":%.2fse", se > 0.0 ? gap / se : 0.0) +
            (ok ? "" : "(x)");
    return ok;
}

Outcome criterion1() {
    const auto checks = val::run_oracle_suite(kSeed, 500, 1e-6);
    int failed = 0, cases = 0;
    double worst = 0.0;
    for (const auto& c : checks) {
        failed += !c.passed() || c.cases < 500;
        cases += c.cases;
        worst = std::max(worst, c.worst_error);
    }
    return {failed == 0, std::to_string(checks.size()) + " formulas, " + std::to_string(cases) +
                             " comparisons" + fmt(", worst rel error %.2e", worst)};
}

Outcome criterion2() {
    ScenarioConfig sc;
    sc.n = 100;
    sc.m = 400;
    sc.si_protocol = NoisyAmplitude{};
    sc.seed = kSeed;
    GampConfig cfg;
    cfg.em_enabled = false;
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        Rng rng = make_stream(sc.seed, i);
        const TrialData d = gen_trial(sc, rng);
        const Vec base = run_noisy1bg(d.a, d.y, sc.prior, sc.ch, cfg).x_hat;
        const SideInfo sis[] = {AmplitudeLaplacian{*d.si.amplitude, 1e8}, AmplitudeGaussian{*d.si.amplitude, 1e8},
                                SupportSideInfo{*d.si.support, 0.5 + 1e-9}};
        for (const SideInfo& si : sis) {
            const Vec x = run_with_si(d.a, d.y, sc.prior, sc.ch, si, cfg).x_hat;
            worst = std::max(worst, (x - base).cwiseAbs().maxCoeff());
        }
    }
    return {worst <= 1e-3, fmt("worst l_inf gap %.3e over 10 instances x 3 variants", worst)};
}

Outcome criterion3() {
    ExperimentConfig cfg;
    cfg.scenario.n = 50;
    cfg.scenario.m = 300;
    cfg.scenario.prior = SignalPrior(0.15, cfg.scenario.prior.v_x());
    cfg.scenario.ch = ChannelParams(0.15, 1.0);
    cfg.scenario.seed = kSeed;
    cfg.algorithms = {Algorithm::Noisy1bG, Algorithm::SignGampBaseline};
    cfg.sweep = {SweepParam::FlipProb, {0.0, 0.05, 0.10, 0.15}};
    cfg.trials = 50;
    const ResultTable t = run_experiment(cfg);
    bool ok = true;
    std::string note;
    for (double f : {0.05, 0.10, 0.15}) {
        const ResultRow& a = row(t, f, Algorithm::Noisy1bG);
        const ResultRow& b = row(t, f, Algorithm::SignGampBaseline);
        note += fmt(" flip %.2f: %.4f vs %.4f", f, a.mean_nmse, b.mean_nmse);
        ok = ok && a.failures == 0 && b.failures == 0 && a.mean_nmse < b.mean_nmse;
    }
    std::string gap;
    ok = below(row(t, 0.15, Algorithm::Noisy1bG), row(t, 0.15, Algorithm::SignGampBaseline), 2.0, gap) && ok;
    return {ok, note.substr(1) + ";" + gap};
}

Outcome criterion4() {
    ExperimentConfig cfg;
    cfg.scenario.n = 200;
    cfg.scenario.prior = SignalPrior(0.15, cfg.scenario.prior.v_x());
    cfg.scenario.ch = ChannelParams(0.15, 0.85);
    cfg.scenario.si_protocol = NoisyAmplitude{0.1, 0.15, NoiseKind::Gaussian};
    cfg.scenario.seed = kSeed;
    cfg.algorithms = {Algorithm::Noisy1bG, Algorithm::LaplacianSI, Algorithm::GaussianSI, Algorithm::SupportSI};
    cfg.sweep = {SweepParam::M, {400, 600, 800}};
    cfg.trials = 50;
    const ResultTable t = run_experiment(cfg);
    bool ok = true;
    std::string note;
    for (double m : cfg.sweep.values) {
        note += fmt(" M=%.0f:", m);
        const ResultRow& noisy = row(t, m, Algorithm::Noisy1bG);
        const ResultRow& lap = row(t, m, Algorithm::LaplacianSI);
        const ResultRow& gau = row(t, m, Algorithm::GaussianSI);
        const ResultRow& sup = row(t, m, Algorithm::SupportSI);
        ok = below(lap, gau, 1.0, note) && ok;
        ok = below(sup, gau, 1.0, note) && ok;
        for (const ResultRow* r : {&lap, &gau, &sup}) ok = below(*r, noisy, 1.0, note) && ok;
    }
    return {ok, note.substr(1)};
}

Outcome criterion5() {
    ExperimentConfig cfg;
    cfg.scenario.n = 200;
    cfg.scenario.m = 600;
    cfg.scenario.prior = SignalPrior(0.1, cfg.scenario.prior.v_x());
    cfg.scenario.ch = ChannelParams(0.15, 0.85);
    cfg.scenario.si_protocol = NoisyAmplitude{0.1, 0.15, NoiseKind::Gaussian};
    cfg.scenario.seed = kSeed;
    cfg.algorithms = {Algorithm::Noisy1bG, Algorithm::LaplacianSI, Algorithm::SupportSI};
    cfg.sweep = {SweepParam::SiNoiseVar, {0.01, 0.1, 1.0, 10.0}};
    cfg.trials = 50;
    const ResultTable t = run_experiment(cfg);

    auto spread = [&](Algorithm a) {
        double lo = INFINITY, hi = 0.0;
        for (double v : cfg.sweep.values) {
            lo = std::min(lo, row(t, v, a).mean_nmse);
            hi = std::max(hi, row(t, v, a).mean_nmse);
        }
        return (hi - lo) / lo;
    };
    const double s_noisy = spread(Algorithm::Noisy1bG);
    const double s_sup = spread(Algorithm::SupportSI);
    bool mono = true;
    std::string lap = " LaplacianSI";
    for (std::size_t i = 0; i < cfg.sweep.values.size(); ++i) {
        const double v = row(t, cfg.sweep.values[i], Algorithm::LaplacianSI).mean_nmse;
        lap += fmt(" %.4f", v);
        if (i > 0) mono = mono && v >= row(t, cfg.sweep.values[i - 1], Algorithm::LaplacianSI).mean_nmse;
    }
    const double lap_hi = row(t, 10.0, Algorithm::LaplacianSI).mean_nmse;
    const double sup_hi = row(t, 10.0, Algorithm::SupportSI).mean_nmse;
    int failures = 0;
    for (const ResultRow& r : t.rows) failures += r.failures;
    const bool ok = failures == 0 && s_noisy < 0.15 && s_sup < 0.15 && mono && lap_hi > sup_hi;
    return {ok, fmt("spread Noisy1bG %.3f SupportSI %.3f;", s_noisy, s_sup) + lap +
                    fmt("; at 10: LaplacianSI %.4f vs SupportSI %.4f", lap_hi, sup_hi)};
}

Outcome criterion6() {
    ExperimentConfig cfg;
    cfg.scenario.n = 200;
    cfg.scenario.m = 600;
    cfg.scenario.prior = SignalPrior(0.1, cfg.scenario.prior.v_x());
    cfg.scenario.ch = ChannelParams(0.15, 0.85);
    cfg.scenario.si_protocol = SlowVarying{0.1, 0.1, 10};
    cfg.scenario.seed = kSeed;
    cfg.algorithms = {Algorithm::Noisy1bG, Algorithm::LaplacianSI, Algorithm::GaussianSI};
    cfg.trials = 50;
    const ResultTable t = run_sequential_experiment(cfg);

    // Per-trial average over epochs >= 2, then mean and standard error across trials.
    std::map<Algorithm, std::vector<double>> sums;
    std::map<Algorithm, std::vector<int>> counts;
    int failures = 0;
    for (const TrialRecord& r : t.records) {
        auto& s = sums[r.algorithm];
        auto& c = counts[r.algorithm];
        s.resize(cfg.trials, 0.0);
        c.resize(cfg.trials, 0);
        if (r.epoch < 2) continue;
        if (r.failed) {
            ++failures;
            continue;
        }
        s[r.trial] += r.nmse;
        ++c[r.trial];
    }
    std::map<Algorithm, ResultRow> rows;
    for (Algorithm a : cfg.algorithms) {
        std::vector<double> avg;
        for (int i = 0; i < cfg.trials; ++i) {
            if (counts[a][i] > 0) avg.push_back(sums[a][i] / counts[a][i]);
        }
        const MeanSe m = mean_se(avg);
        ResultRow r;
        r.algorithm = a;
        r.mean_nmse = m.mean;
        r.std_err = m.std_err;
        rows[a] = r;
    }
    std::string note = fmt("Noisy1bG %.4f GaussianSI %.4f LaplacianSI %.4f;", rows[Algorithm::Noisy1bG].mean_nmse,
                           rows[Algorithm::GaussianSI].mean_nmse, rows[Algorithm::LaplacianSI].mean_nmse);
    bool ok = failures == 0;
    ok = below(rows[Algorithm::LaplacianSI], rows[Algorithm::GaussianSI], 1.0, note) && ok;
    ok = below(rows[Algorithm::GaussianSI], rows[Algorithm::Noisy1bG], 1.0, note) && ok;
    return {ok, note};
}

Outcome criterion7() {
    ExperimentConfig cfg;
    cfg.scenario.n = 200;
    cfg.scenario.m = 800;
    cfg.scenario.seed = kSeed;
    cfg.trials = 100;

    std::string note;
    bool ok = true;
    auto fraction = [](const ResultTable& t, const std::function<bool(double)>& inside) {
        int hit = 0, total = 0;
        for (const TrialRecord& r : t.records) {
            ++total;
            hit += !r.failed && std::isfinite(r.estimated_param) && inside(r.estimated_param);
        }
        return static_cast<double>(hit) / total;
    };

    cfg.algorithms = {Algorithm::LaplacianSI};
    for (double vs : {0.1, 0.5}) {
        cfg.scenario.si_protocol = NoisyAmplitude{0.0, vs, NoiseKind::Laplacian};
        const double f = fraction(run_experiment(cfg), [vs](double e) { return e >= vs / 2 && e <= 2 * vs; });
        note += fmt("v_s*=%.1f: %.0f%% within x2; ", vs, 100 * f);
        ok = ok && f >= 0.8;
    }

    cfg.algorithms = {Algorithm::SupportSI};
    cfg.scenario.si_protocol = NoisySupport{0.1};
    const double f = fraction(run_experiment(cfg), [](double b) { return 1 - b >= 0.05 && 1 - b <= 0.15; });
    note += fmt("flip 0.1: %.0f%% with 1-beta in [0.05, 0.15]", 100 * f);
    ok = ok && f >= 0.8;
    return {ok, note};
}

Outcome criterion8() {
    ExperimentConfig sweep;
    sweep.scenario.n = 60;
    sweep.scenario.m = 180;
    sweep.scenario.si_protocol = NoisyAmplitude{};
    sweep.scenario.seed = kSeed;
    sweep.algorithms = {Algorithm::Noisy1bG, Algorithm::LaplacianSI, Algorithm::GaussianSI, Algorithm::SupportSI,
                        Algorithm::SignGampBaseline};
    sweep.sweep = {SweepParam::FlipProb, {0.05, 0.15}};
    sweep.trials = 6;

    ExperimentConfig seq = sweep;
    seq.sweep = {};
    seq.scenario.si_protocol = SlowVarying{0.1, 0.1, 3};
    seq.algorithms = {Algorithm::Noisy1bG, Algorithm::LaplacianSI, Algorithm::SupportSI};

    int runs = 0;
    bool ok = true;
    for (ExperimentConfig* c : {&sweep, &seq}) {
        for (int threads : {1, 2}) {
            c->threads = threads;
            ok = ok && to_csv(run(*c)) == to_csv(run(*c));
            runs += 2;
        }
    }
    return {ok, std::to_string(runs) + " runs compared pairwise (sweep and sequential, 1 and 2 threads)"};
}

Outcome criterion9() {
    const SignalPrior prior(0.5, 5.5);
    const ChannelParams ch(0.15, 1.0);
    int hits = 0;
    double worst = 0.0;
    const int instances = 50;
    for (int i = 0; i < instances; ++i) {
        Rng rng = make_stream(kSeed + 9, i);
        const Mat a = gen_matrix(200, 2, rng);
        const Vec x = gen_signal(prior, 2, rng);
        const SignVec y = gen_measurements(x, a, ch, rng);
        const Vec gamp = run_noisy1bg(a, y, prior, ch).x_hat;
        const Vec exact = val::oracle_posterior_mean_2d(a, y, prior, ch);
        const double err = (gamp - exact).cwiseAbs().maxCoeff();
        worst = std::max(worst, err);
        hits += err <= 0.1;
    }
    return {hits >= 45, std::to_string(hits) + "/" + std::to_string(instances) + fmt(" within 0.1, worst %.3f", worst)};
}

}  // namespace

int main() {
    const std::function<Outcome()> criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                 criterion6, criterion7, criterion8, criterion9};
    int failed = 0;
    for (int i = 0; i < 9; ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
