#include "mde/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "mde/asymptotics.hpp"
#include "mde/dynamics.hpp"
#include "mde/estimator.hpp"
#include "mde/gibbs.hpp"
#include "mde/simd.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace mde::expt {

namespace {

const std::set<std::string> kExperiments = {
    "langevin1d", "langevin1d_quartic", "langevin2d",
    "fcn",        "normality",          "rates"};

const std::set<std::string> kKeys = {
    "experiment", "alpha",       "sigma",       "eps",        "T",
    "dt",         "beta",        "init",        "x0",         "replications",
    "master_seed", "output_dir", "A",           "B",          "lambda",
    "eps_ladder", "u",           "f_scale"};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(d)) throw std::invalid_argument("non-finite");
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "': bad number '" + v + "'");
    }
}

long long parse_integer(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long d = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "': bad integer '" + v + "'");
    }
}

std::vector<double> parse_ladder(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double(key, item));
    }
    if (out.size() < 2)
        throw std::runtime_error("config: key '" + key + "': need at least 2 values");
    return out;
}

void apply_defaults(ExperimentConfig& c) {
    if (c.experiment == "langevin1d") {
        c.alpha = 2.0; c.sigma = 1.0; c.eps = 0.1; c.T = 2000.0;
        c.init = 10.0; c.x0 = 10.0; c.replications = 50;
    } else if (c.experiment == "langevin1d_quartic") {
        c.alpha = 2.0; c.sigma = 1.0; c.eps = 0.1; c.T = 2000.0;
        c.init = 10.0; c.x0 = 10.0; c.replications = 30;
    } else if (c.experiment == "normality") {
        c.alpha = 2.0; c.sigma = 1.0; c.eps = 0.1; c.T = 1000.0;
        c.init = 10.0; c.x0 = 10.0; c.replications = 200;
    } else if (c.experiment == "langevin2d") {
        c.alpha = 1.0; c.sigma = 1.5; c.eps = 0.1; c.T = 1000.0;
        c.x0 = 10.0; c.replications = 20;
    } else if (c.experiment == "fcn") {
        c.A = -1.0; c.B = 0.0; c.lambda = 2.0 / 45.0;
        c.eps = std::pow(10.0, -1.5); c.T = 500.0; c.init = 0.8; c.x0 = 1.0;
        c.replications = 1;
    } else if (c.experiment == "rates") {
        c.alpha = 2.0; c.sigma = 1.0;
        c.eps_ladder = {0.4, 0.2, 0.1, 0.05};
        c.u = 1.0; c.f_scale = 1.0; c.replications = 1;
    }
}

void finalize(ExperimentConfig& c) {
    if (!kExperiments.count(c.experiment))
        throw std::runtime_error("config: unknown experiment '" + c.experiment + "'");
    if (c.replications < 1)
        throw std::runtime_error("config: replications must be >= 1");
    if (c.beta <= 0.0) throw std::runtime_error("config: beta must be positive");

    if (c.experiment == "rates") {
        for (double e : c.eps_ladder)
            if (!(e > 0.0 && e <= 0.5))
                throw std::runtime_error("config: eps_ladder values must lie in (0, 0.5]");
        if (c.f_scale <= 0.0) throw std::runtime_error("config: f_scale must be positive");
        return;
    }

    if (c.eps <= 0.0) throw std::runtime_error("config: eps must be positive");
    if (c.T <= 0.0) throw std::runtime_error("config: T must be positive");
    if (c.sigma <= 0.0) throw std::runtime_error("config: sigma must be positive");

    if (c.experiment == "fcn") {
        const double cap = c.eps * c.eps / 10.0;
        if (c.dt_auto && c.dt == 0.0) c.dt = std::min(1e-3, cap);
        if (!(c.dt > 0.0 && c.dt <= cap * (1.0 + 1e-12)))
            throw std::runtime_error("config: fcn requires 0 < dt <= eps^2/10");
    } else {
        const double cap = c.eps * c.eps * c.eps;
        if (c.dt_auto && c.dt == 0.0) c.dt = 0.5 * cap;
        if (!(c.dt > 0.0 && c.dt < cap))
            throw std::runtime_error(
                "config: multiscale simulation requires 0 < dt < eps^3");
        if (c.alpha <= 0.0) throw std::runtime_error("config: alpha must be positive");
    }
    if (c.dt > c.T) throw std::runtime_error("config: dt exceeds T");
}

// ---------------------------------------------------------------------------
// Replication machinery

struct Study {
    est::EstimationProblem prob;
    std::function<dyn::Trajectory(std::uint64_t)> simulate;
    int theta_len = 1;
    json reference;  // number, 4-array, or null
    double theta0 = 0.0;     // scalar truth (normality centering)
    double sigma_bar = 0.0;  // homogenized diffusivity (normality overlay)
};

Study make_study(const ExperimentConfig& c) {
    Study st;
    st.prob.beta = c.beta;
    if (c.experiment == "langevin1d" || c.experiment == "normality" ||
        c.experiment == "langevin1d_quartic") {
        const bool quartic = c.experiment == "langevin1d_quartic";
        gibbs::SinPerturbation pert{1.0, 1.0};
        const double K = gibbs::homogenization_factor(pert, c.sigma);
        st.prob.kind = est::ProblemKind::langevin1d_drift;
        st.prob.pot.kind =
            quartic ? gibbs::PotentialKind::quartic : gibbs::PotentialKind::quadratic;
        st.prob.sigma_bar = c.sigma * K;
        st.prob.init = c.init;
        st.prob.use_fft = quartic;
        st.theta0 = c.alpha * K;
        st.sigma_bar = c.sigma * K;
        st.reference = st.theta0;
        dyn::Sde1D sde{st.prob.pot, c.alpha, c.sigma, true, pert, c.eps};
        const double x0 = c.x0, T = c.T, dt = c.dt;
        st.simulate = [sde, x0, T, dt](std::uint64_t seed) {
            return dyn::euler_maruyama(sde, x0, T, dt, seed);
        };
    } else if (c.experiment == "langevin2d") {
        gibbs::Model2D model;
        model.alpha = c.alpha;
        model.sigma = c.sigma;
        const auto k = gibbs::homogenization_factor_2d(model);
        st.prob.kind = est::ProblemKind::langevin2d_drift;
        st.prob.Sigma = {{{c.sigma * k[0], 0.0}, {0.0, c.sigma * k[1]}}};
        st.theta_len = 4;
        st.reference = json::array();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                st.reference.push_back(c.alpha * k[i] * model.M[i][j]);
        dyn::Sde2D sde{model, true, c.eps, {{{0, 0}, {0, 0}}}, {k[0], k[1]}};
        const double x0 = c.x0, T = c.T, dt = c.dt;
        st.simulate = [sde, x0, T, dt](std::uint64_t seed) {
            return dyn::euler_maruyama(sde, {x0, x0}, T, dt, seed);
        };
    } else if (c.experiment == "fcn") {
        st.prob.kind = est::ProblemKind::fcn_diffusion;
        st.prob.drift_A = c.A;
        st.prob.drift_B = c.B;
        st.prob.init = c.init;
        st.reference = nullptr;
        dyn::FcnSpec spec{c.A, c.B, c.lambda, c.eps};
        const double x0 = c.x0, T = c.T, dt = c.dt;
        st.simulate = [spec, x0, T, dt](std::uint64_t) {
            return dyn::rk4_fcn(spec, {x0, 1.0, 1.0, 1.0}, T, dt);
        };
    } else {
        throw std::logic_error("make_study: not a replication experiment");
    }
    return st;
}

struct RepRecord {
    std::uint64_t seed = 0;
    est::EstimateResult res;
    bool failed = false;
    std::string error;
    double wall_s = 0.0;
};

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + p.string());
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Sample mean / standard deviation (n-1 normalization) of one theta component
// over the selected records.
std::pair<double, double> component_stats(const std::vector<RepRecord>& recs,
                                          int comp, bool converged_only) {
    std::vector<double> v;
    for (const auto& r : recs) {
        if (r.failed) continue;
        if (converged_only && !r.res.converged) continue;
        v.push_back(r.res.theta[comp]);
    }
    if (v.empty()) return {std::nan(""), std::nan("")};
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    s = v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0;
    return {m, s};
}

json stats_json(const std::vector<RepRecord>& recs, int len, bool converged_only,
                bool want_std) {
    if (len == 1) {
        const auto [m, s] = component_stats(recs, 0, converged_only);
        const double v = want_std ? s : m;
        return std::isnan(v) ? json(nullptr) : json(v);
    }
    json arr = json::array();
    for (int c = 0; c < len; ++c) {
        const auto [m, s] = component_stats(recs, c, converged_only);
        const double v = want_std ? s : m;
        arr.push_back(std::isnan(v) ? json(nullptr) : json(v));
    }
    return arr;
}

json config_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["alpha"] = c.alpha;
    j["sigma"] = c.sigma;
    j["eps"] = c.eps;
    j["T"] = c.T;
    j["dt"] = c.dt;
    j["dt_auto"] = c.dt_auto;
    j["beta"] = c.beta;
    j["init"] = c.init;
    j["x0"] = c.x0;
    j["replications"] = c.replications;
    j["master_seed"] = c.master_seed;
    j["output_dir"] = c.output_dir;
    j["A"] = c.A;
    j["B"] = c.B;
    j["lambda"] = c.lambda;
    j["eps_ladder"] = c.eps_ladder;
    j["u"] = c.u;
    j["f_scale"] = c.f_scale;
    return j;
}

void write_manifest(const ExperimentConfig& c, const std::vector<std::uint64_t>& seeds,
                    double wall_total) {
    json m;
    m["version"] = kVersion;
    m["isa"] = simd::isa_name(simd::active_isa());
    m["wall_clock_total_s"] = wall_total;
    m["config"] = config_json(c);
    m["seeds"] = seeds;
    write_file(fs::path(c.output_dir) / "manifest.json", m.dump(2) + "\n");
}

int run_rates(const ExperimentConfig& c, std::chrono::steady_clock::time_point t0) {
    asym::MultiscaleModel model;
    model.alpha = c.alpha;
    model.sigma = c.sigma;
    model.pot.kind = gibbs::PotentialKind::quadratic;
    model.pert = gibbs::SinPerturbation{1.0, 1.0};

    const asym::RateFit cf = asym::cf_gap_ladder(c.eps_ladder, c.u, model);
    const asym::RateFit osc =
        asym::oscillatory_gap_ladder(c.eps_ladder, asym::GaussianTestFn{c.f_scale},
                                     model.pert);

    write_file(fs::path(c.output_dir) / "cf_rates.csv", asym::rate_csv(cf));
    write_file(fs::path(c.output_dir) / "oscillatory_rates.csv", asym::rate_csv(osc));

    json s;
    s["experiment"] = c.experiment;
    s["eps_ladder"] = c.eps_ladder;
    s["cf_gaps"] = cf.gap;
    s["cf_slope"] = cf.slope;
    s["oscillatory_gaps"] = osc.gap;
    s["oscillatory_slope"] = osc.slope;
    write_file(fs::path(c.output_dir) / "summary.json", s.dump(2) + "\n");

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(c, {}, wall);
    return 0;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": empty key or value");
        if (!kKeys.count(key))
            throw std::runtime_error("config: unknown key '" + key + "'");
        if (kv.count(key))
            throw std::runtime_error("config: duplicate key '" + key + "'");
        kv[key] = val;
    }
    if (!kv.count("experiment"))
        throw std::runtime_error("config: missing required key 'experiment'");

    ExperimentConfig c;
    c.experiment = kv["experiment"];
    if (!kExperiments.count(c.experiment))
        throw std::runtime_error("config: unknown experiment '" + c.experiment + "'");
    apply_defaults(c);

    for (const auto& [key, val] : kv) {
        if (key == "experiment") continue;
        if (key == "alpha") c.alpha = parse_double(key, val);
        else if (key == "sigma") c.sigma = parse_double(key, val);
        else if (key == "eps") c.eps = parse_double(key, val);
        else if (key == "T") c.T = parse_double(key, val);
        else if (key == "dt") {
            if (val == "auto") { c.dt_auto = true; c.dt = 0.0; }
            else { c.dt_auto = false; c.dt = parse_double(key, val); }
        } else if (key == "beta") c.beta = parse_double(key, val);
        else if (key == "init") c.init = parse_double(key, val);
        else if (key == "x0") c.x0 = parse_double(key, val);
        else if (key == "replications") {
            const long long r = parse_integer(key, val);
            if (r < 1 || r > 1000000)
                throw std::runtime_error("config: replications out of range");
            c.replications = static_cast<int>(r);
        } else if (key == "master_seed") {
            c.master_seed = static_cast<std::uint64_t>(parse_integer(key, val));
        } else if (key == "output_dir") c.output_dir = val;
        else if (key == "A") c.A = parse_double(key, val);
        else if (key == "B") c.B = parse_double(key, val);
        else if (key == "lambda") c.lambda = parse_double(key, val);
        else if (key == "eps_ladder") c.eps_ladder = parse_ladder(key, val);
        else if (key == "u") c.u = parse_double(key, val);
        else if (key == "f_scale") c.f_scale = parse_double(key, val);
    }
    finalize(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string text = ss.str();

    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json m;
        try {
            m = json::parse(text);
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("manifest parse error: ") + e.what());
        }
        if (!m.contains("config"))
            throw std::runtime_error("manifest missing 'config' object");
        const json& cj = m["config"];
        ExperimentConfig c;
        try {
            c.experiment = cj.at("experiment").get<std::string>();
            c.alpha = cj.at("alpha").get<double>();
            c.sigma = cj.at("sigma").get<double>();
            c.eps = cj.at("eps").get<double>();
            c.T = cj.at("T").get<double>();
            c.dt = cj.at("dt").get<double>();
            c.dt_auto = cj.at("dt_auto").get<bool>();
            c.beta = cj.at("beta").get<double>();
            c.init = cj.at("init").get<double>();
            c.x0 = cj.at("x0").get<double>();
            c.replications = cj.at("replications").get<int>();
            c.master_seed = cj.at("master_seed").get<std::uint64_t>();
            c.output_dir = cj.at("output_dir").get<std::string>();
            c.A = cj.at("A").get<double>();
            c.B = cj.at("B").get<double>();
            c.lambda = cj.at("lambda").get<double>();
            c.eps_ladder = cj.at("eps_ladder").get<std::vector<double>>();
            c.u = cj.at("u").get<double>();
            c.f_scale = cj.at("f_scale").get<double>();
            if (m.contains("seeds"))
                c.seeds = m["seeds"].get<std::vector<std::uint64_t>>();
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("manifest field error: ") + e.what());
        }
        finalize(c);
        return c;
    }
    return parse_config_text(text);
}

FdBins freedman_diaconis_bins(const std::vector<double>& samples) {
    if (samples.size() < 4)
        throw std::invalid_argument("freedman_diaconis_bins: need at least 4 samples");
    std::vector<double> s(samples);
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    auto quantile = [&](double p) {
        const double h = static_cast<double>(n - 1) * p;
        const std::size_t lo = static_cast<std::size_t>(h);
        const double fr = h - static_cast<double>(lo);
        return lo + 1 < n ? s[lo] + fr * (s[lo + 1] - s[lo]) : s[lo];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    const double range = s.back() - s.front();
    FdBins b;
    const double width =
        2.0 * iqr * std::pow(static_cast<double>(n), -1.0 / 3.0);
    if (width <= 0.0) {
        b.sturges_fallback = true;
        b.count = static_cast<int>(
                      std::ceil(std::log2(static_cast<double>(n)))) + 1;
        b.width = range > 0.0 ? range / b.count : 1.0 / b.count;
    } else {
        b.width = width;
        b.count = std::max(1, static_cast<int>(std::ceil(range / width)));
    }
    return b;
}

int run_experiment(const ExperimentConfig& cfg_in, int threads) {
    ExperimentConfig cfg = cfg_in;
    finalize(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(cfg.output_dir);

    if (cfg.experiment == "rates") return run_rates(cfg, t0);

    const Study st = make_study(cfg);
    const int R = cfg.replications;

    std::vector<std::uint64_t> seeds(R);
    const bool replay_seeds = cfg.seeds.size() == static_cast<std::size_t>(R);
    for (int r = 0; r < R; ++r)
        seeds[r] = replay_seeds ? cfg.seeds[r] : cfg.master_seed + r;

    std::vector<RepRecord> recs(R);
    auto process = [&](int r) {
        RepRecord& rec = recs[r];
        rec.seed = seeds[r];
        const auto w0 = std::chrono::steady_clock::now();
        try {
            const dyn::Trajectory traj = st.simulate(seeds[r]);
            rec.res = est::estimate(st.prob, traj);
            rec.res.seed = seeds[r];
        } catch (const std::exception& e) {
            rec.failed = true;
            rec.error = e.what();
            rec.res.theta.assign(st.theta_len, std::nan(""));
        }
        rec.wall_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - w0)
                .count();
    };

    int nt = threads <= 0 ? static_cast<int>(std::thread::hardware_concurrency())
                          : threads;
    nt = std::clamp(nt, 1, R);
    if (nt == 1) {
        for (int r = 0; r < R; ++r) process(r);
    } else {
        std::atomic<int> next{0};
        auto work = [&] {
            for (int r; (r = next.fetch_add(1)) < R;) process(r);
        };
        std::vector<std::thread> pool;
        for (int i = 0; i < nt; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // estimates.csv
    std::string csv = "rep,seed,";
    if (st.theta_len == 1)
        csv += "theta_hat,";
    else
        csv += "theta_hat_11,theta_hat_12,theta_hat_21,theta_hat_22,";
    csv += "objective,iterations,converged,failed,wall_time\n";
    for (int r = 0; r < R; ++r) {
        const RepRecord& rec = recs[r];
        csv += std::to_string(r) + "," + std::to_string(rec.seed) + ",";
        for (int c = 0; c < st.theta_len; ++c) csv += fmt(rec.res.theta[c]) + ",";
        csv += fmt(rec.res.objective) + "," + std::to_string(rec.res.iterations) +
               "," + (rec.res.converged ? "1" : "0") + "," +
               (rec.failed ? "1" : "0") + "," + fmt(rec.wall_s) + "\n";
    }
    write_file(fs::path(cfg.output_dir) / "estimates.csv", csv);

    int failures = 0, converged = 0;
    for (const auto& r : recs) {
        if (r.failed) ++failures;
        else if (r.res.converged) ++converged;
    }

    json summary;
    summary["experiment"] = cfg.experiment;
    summary["replications"] = R;
    summary["failures"] = failures;
    summary["converged_count"] = converged;
    summary["reference"] = st.reference;
    summary["mean_all"] = stats_json(recs, st.theta_len, false, false);
    summary["std_all"] = stats_json(recs, st.theta_len, false, true);
    summary["mean_converged"] = stats_json(recs, st.theta_len, true, false);
    summary["std_converged"] = stats_json(recs, st.theta_len, true, true);
    json errors = json::array();
    for (int r = 0; r < R; ++r)
        if (recs[r].failed) errors.push_back({{"rep", r}, {"error", recs[r].error}});
    summary["failure_messages"] = errors;

    if (cfg.experiment == "normality") {
        std::vector<double> z;
        for (const auto& r : recs)
            if (!r.failed && r.res.converged)
                z.push_back(std::sqrt(cfg.T) * (r.res.theta[0] - st.theta0));
        if (z.size() < 4)
            throw std::runtime_error(
                "normality: fewer than 4 converged estimates, cannot bin");

        const FdBins bins = freedman_diaconis_bins(z);
        const double zmin = *std::min_element(z.begin(), z.end());
        const double zmax = *std::max_element(z.begin(), z.end());
        const double lo = zmax > zmin ? zmin : zmin - 0.5;
        std::vector<int> counts(bins.count, 0);
        for (double v : z) {
            int idx = static_cast<int>((v - lo) / bins.width);
            idx = std::clamp(idx, 0, bins.count - 1);
            ++counts[idx];
        }
        std::string hist = "bin_left,bin_right,count,normalized_height\n";
        for (int i = 0; i < bins.count; ++i) {
            const double l = lo + i * bins.width;
            hist += fmt(l) + "," + fmt(l + bins.width) + "," +
                    std::to_string(counts[i]) + "," +
                    fmt(counts[i] /
                        (static_cast<double>(z.size()) * bins.width)) +
                    "\n";
        }
        write_file(fs::path(cfg.output_dir) / "hist.csv", hist);

        const asym::AsymptoticStats as =
            asym::tau_squared(st.theta0, st.sigma_bar, cfg.beta);
        const double sd = std::sqrt(as.ratio);
        std::string overlay = "x,density\n";
        const int n = 2001;
        for (int i = 0; i < n; ++i) {
            const double x = -8.0 * sd + 16.0 * sd * i / (n - 1);
            const double d = std::exp(-0.5 * x * x / (sd * sd)) /
                             (sd * std::sqrt(2.0 * 3.14159265358979323846));
            overlay += fmt(x) + "," + fmt(d) + "\n";
        }
        write_file(fs::path(cfg.output_dir) / "overlay.csv", overlay);

        double zm = 0.0;
        for (double v : z) zm += v;
        zm /= static_cast<double>(z.size());
        double zv = 0.0;
        for (double v : z) zv += (v - zm) * (v - zm);
        zv = z.size() > 1 ? zv / static_cast<double>(z.size() - 1) : 0.0;
        summary["theta0"] = st.theta0;
        summary["sigma_bar"] = st.sigma_bar;
        summary["sample_count"] = z.size();
        summary["sample_mean"] = zm;
        summary["sample_variance"] = zv;
        summary["predicted_variance"] = as.ratio;
        summary["sturges_fallback"] = bins.sturges_fallback;
    }

    write_file(fs::path(cfg.output_dir) / "summary.json", summary.dump(2) + "\n");

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(cfg, seeds, wall);

    return failures * 5 > R ? 2 : 0;
}

}  // namespace mde::expt
