#include "onebit/config.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace onebit {

namespace {

using nlohmann::json;

// Reads keys out of one JSON object and remembers which ones were used, so
// that leftovers can be reported as unknown.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + " must be an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    const json& at(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
        return v.get<double>();
    }

    int integer(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(where(key) + " must be an integer");
        const auto x = v.get<long long>();
        if (x < -2147483647LL || x > 2147483647LL) throw ConfigError(where(key) + " is out of range");
        return static_cast<int>(x);
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_unsigned()) throw ConfigError(where(key) + " must be a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(where(key) + " must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
        return v.get<std::string>();
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) throw ConfigError("unknown key " + where(key));
        }
    }

    std::string where(const std::string& key = {}) const {
        if (key.empty()) return path_.empty() ? "<root>" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string_view noise_kind_name(NoiseKind k) { return k == NoiseKind::Gaussian ? "gaussian" : "laplacian"; }

NoiseKind parse_noise_kind(const std::string& s) {
    if (s == "gaussian") return NoiseKind::Gaussian;
    if (s == "laplacian") return NoiseKind::Laplacian;
    throw ConfigError("scenario.side_info.noise_kind must be \"gaussian\" or \"laplacian\"");
}

SiProtocol parse_side_info(Section& s) {
    const std::string kind = s.string("kind", "none");
    if (kind == "none") return NoSiProtocol{};
    if (kind == "noisy_amplitude") {
        NoisyAmplitude p;
        p.support_error_frac = s.number("support_error_frac", p.support_error_frac);
        p.add_noise_var = s.number("add_noise_var", p.add_noise_var);
        p.noise_kind = parse_noise_kind(s.string("noise_kind", std::string(noise_kind_name(p.noise_kind))));
        return p;
    }
    if (kind == "noisy_support") {
        NoisySupport p;
        p.flip_frac = s.number("flip_frac", p.flip_frac);
        return p;
    }
    if (kind == "slow_varying") {
        SlowVarying p;
        p.support_change_frac = s.number("support_change_frac", p.support_change_frac);
        p.amp_innovation_var = s.number("amp_innovation_var", p.amp_innovation_var);
        p.epochs = s.integer("epochs", p.epochs);
        return p;
    }
    throw ConfigError("unknown side_info kind '" + kind + "'");
}

ScenarioConfig parse_scenario(Section& s, std::uint64_t seed) {
    ScenarioConfig sc;
    sc.seed = seed;
    sc.n = s.integer("n", sc.n);
    sc.m = s.integer("m", sc.m);
    const double lambda = s.number("lambda", sc.prior.lambda());
    const double v_x = s.number("v_x", sc.prior.v_x());
    const double noise_var = s.number("noise_var", sc.ch.noise_var());
    const double flip_prob = s.number("flip_prob", sc.ch.flip_prob());
    try {
        sc.prior = SignalPrior(lambda, v_x);
        sc.ch = ChannelParams(noise_var, 1.0 - flip_prob);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    if (s.has("side_info")) {
        Section si(s.at("side_info"), s.where("side_info"));
        sc.si_protocol = parse_side_info(si);
        si.finish();
    }
    return sc;
}

GampConfig parse_gamp(Section& s) {
    GampConfig g;
    g.max_inner_iters = s.integer("max_inner_iters", g.max_inner_iters);
    g.max_outer_iters = s.integer("max_outer_iters", g.max_outer_iters);
    g.damping = s.number("damping", g.damping);
    g.tau_floor = s.number("tau_floor", g.tau_floor);
    g.tau_s_floor = s.number("tau_s_floor", g.tau_s_floor);
    g.convergence_tol = s.number("convergence_tol", g.convergence_tol);
    g.warm_start = s.boolean("warm_start", g.warm_start);
    return g;
}

json side_info_json(const SiProtocol& p) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, NoSiProtocol>) {
                return {{"kind", "none"}};
            } else if constexpr (std::is_same_v<T, NoisyAmplitude>) {
                return {{"kind", "noisy_amplitude"},
                        {"support_error_frac", v.support_error_frac},
                        {"add_noise_var", v.add_noise_var},
                        {"noise_kind", noise_kind_name(v.noise_kind)}};
            } else if constexpr (std::is_same_v<T, NoisySupport>) {
                return {{"kind", "noisy_support"}, {"flip_frac", v.flip_frac}};
            } else {
                return {{"kind", "slow_varying"},
                        {"support_change_frac", v.support_change_frac},
                        {"amp_innovation_var", v.amp_innovation_var},
                        {"epochs", v.epochs}};
            }
        },
        p);
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    Section top(root, "");
    ExperimentConfig cfg;
    const std::uint64_t seed = top.unsigned_integer("seed", cfg.scenario.seed);
    cfg.trials = top.integer("trials", cfg.trials);
    cfg.threads = top.integer("threads", cfg.threads);
    cfg.timing = top.boolean("timing", cfg.timing);

    if (top.has("scenario")) {
        Section s(top.at("scenario"), "scenario");
        cfg.scenario = parse_scenario(s, seed);
        s.finish();
    } else {
        cfg.scenario.seed = seed;
    }

    if (top.has("algorithms")) {
        const json& algs = top.at("algorithms");
        if (!algs.is_array()) throw ConfigError("algorithms must be a list of names");
        cfg.algorithms.clear();
        for (const json& a : algs) {
            if (!a.is_string()) throw ConfigError("algorithms must be a list of names");
            try {
                cfg.algorithms.push_back(parse_algorithm(a.get<std::string>()));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
    }

    if (top.has("sweep")) {
        Section s(top.at("sweep"), "sweep");
        try {
            cfg.sweep.param = parse_sweep_param(s.string("param", "none"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (s.has("values")) {
            const json& vals = s.at("values");
            if (!vals.is_array()) throw ConfigError("sweep.values must be a list of numbers");
            for (const json& v : vals) {
                if (!v.is_number()) throw ConfigError("sweep.values must be a list of numbers");
                cfg.sweep.values.push_back(v.get<double>());
            }
        }
        s.finish();
    }

    if (top.has("gamp")) {
        Section s(top.at("gamp"), "gamp");
        const bool em = cfg.gamp.em_enabled;
        cfg.gamp = parse_gamp(s);
        cfg.gamp.em_enabled = em;
        s.finish();
    }

    if (top.has("em")) {
        Section s(top.at("em"), "em");
        cfg.gamp.em_enabled = s.boolean("enabled", cfg.gamp.em_enabled);
        cfg.initial_vs = s.number("initial_vs", cfg.initial_vs);
        cfg.initial_beta = s.number("initial_beta", cfg.initial_beta);
        cfg.sequential_em = s.boolean("sequential", cfg.sequential_em);
        s.finish();
    }
    top.finish();

    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
    const ScenarioConfig& sc = cfg.scenario;
    json algs = json::array();
    for (Algorithm a : cfg.algorithms) algs.push_back(algorithm_name(a));

    json root = {
        {"seed", sc.seed},
        {"trials", cfg.trials},
        {"threads", cfg.threads},
        {"timing", cfg.timing},
        {"scenario",
         {{"n", sc.n},
          {"m", sc.m},
          {"lambda", sc.prior.lambda()},
          {"v_x", sc.prior.v_x()},
          {"noise_var", sc.ch.noise_var()},
          {"flip_prob", sc.ch.flip_prob()},
          {"side_info", side_info_json(sc.si_protocol)}}},
        {"algorithms", algs},
        {"gamp",
         {{"max_inner_iters", cfg.gamp.max_inner_iters},
          {"max_outer_iters", cfg.gamp.max_outer_iters},
          {"damping", cfg.gamp.damping},
          {"tau_floor", cfg.gamp.tau_floor},
          {"tau_s_floor", cfg.gamp.tau_s_floor},
          {"convergence_tol", cfg.gamp.convergence_tol},
          {"warm_start", cfg.gamp.warm_start}}},
        {"em", {{"enabled", cfg.gamp.em_enabled}, {"initial_vs", cfg.initial_vs}, {"initial_beta", cfg.initial_beta},
                {"sequential", cfg.sequential_em}}},
    };
    if (cfg.sweep.param != SweepParam::None) {
        root["sweep"] = {{"param", sweep_param_name(cfg.sweep.param)}, {"values", cfg.sweep.values}};
    }
    return root.dump(2) + "\n";
}

}  // namespace onebit
