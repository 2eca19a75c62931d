#include "onebit/gamp.hpp"

#include "onebit/em.hpp"
#include "onebit/errors.hpp"
#include "onebit/sim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace onebit {

namespace {

void require_dims(const Mat& a, const GampState& s) {
    if (s.x_hat.size() != a.cols() || s.tau_x.size() != a.cols() || s.s_hat.size() != a.rows()) {
        throw std::invalid_argument("GAMP: state dimensions do not match the measurement matrix");
    }
}

void measurement_step(const Mat& a, const Mat& a2, GampState& st, double floor) {
    st.tau_p = (a2 * st.tau_x).cwiseMax(floor);
    st.p_hat = a * st.x_hat - st.tau_p.cwiseProduct(st.s_hat);
}

void estimation_step(const Mat& a, const Mat& a2, GampState& st, double floor) {
    const Vec energy = a2.transpose() * st.tau_s;
    st.tau_r = energy.cwiseInverse().cwiseMax(floor).cwiseMin(1.0 / floor);
    for (Eigen::Index i = 0; i < st.tau_r.size(); ++i) {
        if (!(energy[i] > 0.0)) st.tau_r[i] = 1.0 / floor;
    }
    st.r_hat = st.x_hat + st.tau_r.cwiseProduct(a.transpose() * st.s_hat);
}

class Engine {
public:
    Engine(const Mat& a, const SignVec& y, const SignalPrior& prior, const ChannelParams& ch,
           const GampConfig& cfg, const std::optional<Vec>& truth)
        : a_(a), a2_(a.cwiseAbs2()), y_(y), prior_(prior), ch_(ch), cfg_(cfg), truth_(truth) {
        cfg_.validate();
        if (y.size() != a.rows()) {
            throw std::invalid_argument("GAMP: y has " + std::to_string(y.size()) + " entries but A has " +
                                        std::to_string(a.rows()) + " rows");
        }
        require_signs(y);
        if (truth_ && truth_->size() != a.cols()) {
            throw std::invalid_argument("GAMP: truth length does not match A");
        }
    }

    GampState initial() const { return GampState::initial(a_.rows(), a_.cols(), prior_); }

    // Runs up to max_inner_iters iterations from `st`; returns the last denoiser output.
    DenoiserOutput inner(GampState& st, const SideInfo& si, GampResult& res) const {
        const double d = cfg_.damping;
        DenoiserOutput out;
        for (int t = 0; t < cfg_.max_inner_iters; ++t) {
            measurement_step(a_, a2_, st, cfg_.tau_floor);
            FUpdate f = f_update(y_, st.p_hat, st.tau_p, ch_, cfg_.tau_s_floor);
            st.s_hat = d * f.s_hat + (1.0 - d) * st.s_hat;
            st.tau_s = std::move(f.tau_s);
            estimation_step(a_, a2_, st, cfg_.tau_floor);

            out = denoise(st.r_hat, st.tau_r, prior_, si);
            Vec x_new = d * out.mean + (1.0 - d) * st.x_hat;
            st.tau_x = out.variance.cwiseMax(cfg_.tau_floor);
            ++st.iteration;
            ++res.inner_iterations_used;

            if (!x_new.allFinite() || !st.tau_x.allFinite() || !st.s_hat.allFinite() ||
                !st.r_hat.allFinite()) {
                throw NumericalError("GAMP produced non-finite values at iteration " +
                                     std::to_string(st.iteration));
            }
            const double step = (x_new - st.x_hat).norm();
            const double scale = x_new.norm();
            st.x_hat = std::move(x_new);
            if (truth_) res.trajectory.push_back(nmse(*truth_, st.x_hat).value);
            if (step <= cfg_.convergence_tol * scale) break;
        }
        return out;
    }

    void finish(const GampState& st, const DenoiserOutput& out, GampResult& res) const {
        res.x_hat = st.x_hat;
        res.tau_x = st.tau_x;
        res.active_prob = out.active_prob.size() == st.x_hat.size() ? out.active_prob
                                                                    : Vec::Constant(st.x_hat.size(), prior_.lambda());
    }

    const SignalPrior& prior() const { return prior_; }
    const GampConfig& cfg() const { return cfg_; }

private:
    const Mat& a_;
    Mat a2_;
    const SignVec& y_;
    SignalPrior prior_;
    ChannelParams ch_;
    GampConfig cfg_;
    const std::optional<Vec>& truth_;
};

double si_param(const SideInfo& si) {
    if (const auto* s = std::get_if<AmplitudeLaplacian>(&si)) return s->v_s;
    if (const auto* s = std::get_if<AmplitudeGaussian>(&si)) return s->v_s;
    if (const auto* s = std::get_if<SupportSideInfo>(&si)) return s->beta;
    return 0.0;
}

ParamUpdate em_step(const GampState& st, const DenoiserOutput& out, const SignalPrior& prior,
                    SideInfo& si) {
    EmInputs in{st.r_hat, st.tau_r, out.active_prob, prior, si};
    if (auto* s = std::get_if<AmplitudeLaplacian>(&si)) {
        const ParamUpdate u = update_vs_laplacian(in);
        s->v_s = u.value;
        return u;
    }
    if (auto* s = std::get_if<AmplitudeGaussian>(&si)) {
        const ParamUpdate u = update_vs_gaussian(in);
        s->v_s = u.value;
        return u;
    }
    auto& s = std::get<SupportSideInfo>(si);
    const ParamUpdate u = update_beta(in);
    s.beta = u.value;
    return u;
}

}  // namespace

GampState GampState::initial(Eigen::Index m, Eigen::Index n, const SignalPrior& prior) {
    GampState s;
    s.x_hat = Vec::Zero(n);
    s.tau_x = Vec::Constant(n, prior.variance());
    s.s_hat = Vec::Zero(m);
    s.tau_s = Vec::Zero(m);
    s.p_hat = Vec::Zero(m);
    s.tau_p = Vec::Zero(m);
    s.r_hat = Vec::Zero(n);
    s.tau_r = Vec::Zero(n);
    return s;
}

void GampConfig::validate() const {
    if (max_inner_iters < 1) throw std::invalid_argument("GampConfig: max_inner_iters must be >= 1");
    if (max_outer_iters < 1) throw std::invalid_argument("GampConfig: max_outer_iters must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("GampConfig: damping must lie in (0, 1]");
    if (!(tau_floor > 0.0 && tau_floor < 1.0)) throw std::invalid_argument("GampConfig: tau_floor must lie in (0, 1)");
    if (!(tau_s_floor >= 0.0)) throw std::invalid_argument("GampConfig: tau_s_floor must be >= 0");
    if (!(convergence_tol >= 0.0)) throw std::invalid_argument("GampConfig: convergence_tol must be >= 0");
}

void linear_measurement_step(const Mat& a, GampState& state, double tau_floor) {
    require_dims(a, state);
    measurement_step(a, a.cwiseAbs2(), state, tau_floor);
}

void linear_estimation_step(const Mat& a, GampState& state, double tau_floor) {
    require_dims(a, state);
    if (state.tau_s.size() != a.rows()) {
        throw std::invalid_argument("GAMP: tau_s length does not match A");
    }
    estimation_step(a, a.cwiseAbs2(), state, tau_floor);
}

GampResult run_noisy1bg(const Mat& a, const SignVec& y, const SignalPrior& prior, const ChannelParams& ch,
                        const GampConfig& cfg, const std::optional<Vec>& truth) {
    const Engine engine(a, y, prior, ch, cfg, truth);
    GampResult res;
    GampState st = engine.initial();
    const DenoiserOutput out = engine.inner(st, NoSideInfo{}, res);
    res.outer_iterations_used = 1;
    engine.finish(st, out, res);
    return res;
}

GampResult run_with_si(const Mat& a, const SignVec& y, const SignalPrior& prior, const ChannelParams& ch,
                       const SideInfo& si, const GampConfig& cfg, const std::optional<Vec>& truth) {
    if (std::holds_alternative<NoSideInfo>(si)) {
        throw std::invalid_argument("run_with_si: side information must not be None");
    }
    validate_side_info(si, a.cols());
    const Engine engine(a, y, prior, ch, cfg, truth);

    GampResult res;
    SideInfo current = si;
    GampState st = engine.initial();
    DenoiserOutput out;
    const int outer = engine.cfg().em_enabled ? engine.cfg().max_outer_iters : 1;
    for (int l = 0; l < outer; ++l) {
        if (l > 0 && !engine.cfg().warm_start) st = engine.initial();
        out = engine.inner(st, current, res);
        ++res.outer_iterations_used;
        if (!engine.cfg().em_enabled) break;

        const double before = si_param(current);
        const ParamUpdate u = em_step(st, out, engine.prior(), current);
        res.estimated_param = u.value;
        if (u.clamped) {
            res.warnings.push_back("EM update at outer iteration " + std::to_string(l + 1) + " gave " +
                                   std::to_string(u.raw) + "; clamped to " + std::to_string(u.value));
        }
        if (std::abs(u.value - before) <= engine.cfg().convergence_tol * std::abs(before)) break;
    }
    engine.finish(st, out, res);
    return res;
}

}  // namespace onebit
