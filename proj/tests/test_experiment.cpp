#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "mde/experiment.hpp"
#include "mde/rng.hpp"
#include "oracles.hpp"

using namespace mde::expt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// estimates.csv with the trailing wall_time field removed from every row.
std::string strip_last_column(const std::string& csv) {
    std::string out;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        const auto comma = line.rfind(',');
        out += line.substr(0, comma);
        out += '\n';
    }
    return out;
}

// manifest.json with the wall-clock line removed.
std::string strip_wall_clock(const std::string& text) {
    std::string out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find("wall_clock_total_s") != std::string::npos) continue;
        out += line;
        out += '\n';
    }
    return out;
}

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::path("tmp_test") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config text: defaults per study and dt resolution") {
    const ExperimentConfig c = parse_config_text("experiment = langevin1d\n");
    CHECK(c.experiment == "langevin1d");
    CHECK(c.alpha == 2.0);
    CHECK(c.sigma == 1.0);
    CHECK(c.eps == 0.1);
    CHECK(c.T == 2000.0);
    CHECK(c.replications == 50);
    CHECK(c.dt_auto);
    CHECK(c.dt == doctest::Approx(0.5 * 1e-3).epsilon(1e-12));  // eps^3/2

    const ExperimentConfig f = parse_config_text("experiment = fcn\n");
    // eps = 10^{-1.5}: auto dt = min(1e-3, eps^2/10) = 1e-4
    CHECK(f.dt == doctest::Approx(1e-4).epsilon(1e-9));
    CHECK(f.A == -1.0);
    CHECK(f.B == 0.0);
    CHECK(f.replications == 1);
}

TEST_CASE("config text: comments, blank lines, explicit keys") {
    const std::string text =
        "# study selection\n"
        "experiment = langevin1d   # trailing comment\n"
        "\n"
        "eps = 0.25\n"
        "T = 100\n"
        "dt = 1e-3\n"
        "replications = 4\n"
        "master_seed = 99\n"
        "output_dir = some/dir\n";
    const ExperimentConfig c = parse_config_text(text);
    CHECK(c.eps == 0.25);
    CHECK(c.T == 100.0);
    CHECK_FALSE(c.dt_auto);
    CHECK(c.dt == 1e-3);
    CHECK(c.replications == 4);
    CHECK(c.master_seed == 99);
    CHECK(c.output_dir == "some/dir");

    const ExperimentConfig r =
        parse_config_text("experiment = rates\neps_ladder = 0.4, 0.2, 0.1\n");
    REQUIRE(r.eps_ladder.size() == 3);
    CHECK(r.eps_ladder[1] == 0.2);
}

TEST_CASE("config text: structural errors carry line numbers") {
    CHECK(error_of([] { parse_config_text("experiment = langevin1d\nT 100\n"); })
              .find("line 2") != std::string::npos);
    CHECK(error_of([] { parse_config_text("experiment = langevin1d\nT =\n"); })
              .find("line 2") != std::string::npos);
    CHECK(error_of([] { parse_config_text("bogus = 1\n"); })
              .find("unknown key") != std::string::npos);
    CHECK(error_of([] { parse_config_text("eps = 0.1\n"); })
              .find("experiment") != std::string::npos);
    CHECK(error_of([] {
              parse_config_text("experiment = langevin1d\nT = 1\nT = 2\n");
          }).find("duplicate") != std::string::npos);
    CHECK(error_of([] { parse_config_text("experiment = warp_drive\n"); })
              .find("unknown experiment") != std::string::npos);
    CHECK(error_of([] { parse_config_text("experiment = langevin1d\nT = abc\n"); })
              .find("bad number") != std::string::npos);
}

TEST_CASE("config text: physical validation") {
    CHECK_THROWS_AS(
        parse_config_text("experiment = langevin1d\nreplications = 0\n"),
        std::runtime_error);
    // multiscale integration needs dt < eps^3
    CHECK_THROWS_AS(
        parse_config_text("experiment = langevin1d\neps = 0.1\ndt = 2e-3\n"),
        std::runtime_error);
    // fcn step cap dt <= eps^2/10
    CHECK_THROWS_AS(
        parse_config_text("experiment = fcn\neps = 0.1\ndt = 5e-3\n"),
        std::runtime_error);
    CHECK_THROWS_AS(parse_config_text("experiment = langevin1d\nbeta = 0\n"),
                    std::runtime_error);
    CHECK_THROWS_AS(
        parse_config_text("experiment = rates\neps_ladder = 0.7, 0.2\n"),
        std::runtime_error);
}

TEST_CASE("histogram binning: worked example and degenerate fallback") {
    // Data 1..8: IQR = 3.5 and 8^{-1/3} = 1/2, so width = 3.5 and the range
    // of 7 needs 2 bins.
    const std::vector<double> ladder = {1, 2, 3, 4, 5, 6, 7, 8};
    const FdBins b = freedman_diaconis_bins(ladder);
    CHECK(b.width == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(b.count == 2);
    CHECK_FALSE(b.sturges_fallback);

    const FdBins s = freedman_diaconis_bins({2.5, 2.5, 2.5, 2.5, 2.5, 2.5, 2.5, 2.5});
    CHECK(s.sturges_fallback);
    CHECK(s.count == 4);  // ceil(log2 8) + 1

    CHECK_THROWS_AS(freedman_diaconis_bins({1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("histogram binning agrees with a reference implementation") {
    for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
        std::vector<double> data;
        mde::rng::NormalStream g(seed);
        for (int i = 0; i < 1000; ++i) data.push_back(3.0 + 0.7 * g.next());
        const FdBins got = freedman_diaconis_bins(data);
        const oracle::FdBinsRef ref = oracle::fd_bins_reference(data);
        CHECK_FALSE(got.sturges_fallback);
        CHECK_FALSE(ref.sturges);
        CHECK(got.width == doctest::Approx(ref.width).epsilon(1e-12));
        CHECK(got.count == static_cast<int>(ref.count));
    }
}

TEST_CASE("small replication study: artifacts, seeds, exit code") {
    TempDir dir("study");
    ExperimentConfig c = parse_config_text(
        "experiment = langevin1d\neps = 0.25\nT = 20\nreplications = 3\n"
        "master_seed = 7\n");
    c.output_dir = (dir.path / "out").string();
    const int code = run_experiment(c, 2);
    CHECK(code == 0);

    const fs::path out(c.output_dir);
    REQUIRE(fs::exists(out / "estimates.csv"));
    REQUIRE(fs::exists(out / "summary.json"));
    REQUIRE(fs::exists(out / "manifest.json"));

    // Header plus one row per replication; seeds are master_seed + r.
    std::istringstream csv(slurp(out / "estimates.csv"));
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(csv, line)) rows.push_back(line);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].rfind("rep,seed,", 0) == 0);
    CHECK(rows[1].rfind("0,7,", 0) == 0);
    CHECK(rows[2].rfind("1,8,", 0) == 0);
    CHECK(rows[3].rfind("2,9,", 0) == 0);

    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest.contains("version"));
    CHECK(manifest.contains("isa"));
    CHECK(manifest.contains("wall_clock_total_s"));
    CHECK(manifest.at("config").at("experiment") == "langevin1d");
    REQUIRE(manifest.at("seeds").size() == 3);
    CHECK(manifest.at("seeds")[0] == 7);

    const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
    CHECK(summary.contains("mean_converged"));
    CHECK(summary.contains("std_converged"));
}

TEST_CASE("manifest replay reproduces every artifact byte for byte") {
    TempDir dir("replay");
    ExperimentConfig c = parse_config_text(
        "experiment = langevin1d\neps = 0.25\nT = 20\nreplications = 3\n"
        "master_seed = 21\n");
    c.output_dir = (dir.path / "a").string();
    REQUIRE(run_experiment(c, 2) == 0);

    ExperimentConfig replay = load_config((fs::path(c.output_dir) / "manifest.json").string());
    CHECK(replay.T == c.T);
    CHECK(replay.seeds.size() == 3);
    replay.output_dir = (dir.path / "b").string();
    REQUIRE(run_experiment(replay, 1) == 0);  // thread count must not matter

    const fs::path a(c.output_dir), b(replay.output_dir);
    CHECK(strip_last_column(slurp(a / "estimates.csv")) ==
          strip_last_column(slurp(b / "estimates.csv")));
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
    // Manifests differ in wall clock and output_dir; mask both.
    auto canon = [&](const fs::path& p, const std::string& dirname) {
        std::string m = strip_wall_clock(slurp(p / "manifest.json"));
        const std::string needle = "\"" + (fs::path("tmp_test") / "replay" / dirname).string() + "\"";
        const auto at = m.find(needle);
        if (at != std::string::npos) m.replace(at, needle.size(), "\"X\"");
        return m;
    };
    CHECK(canon(a, "a") == canon(b, "b"));
}

TEST_CASE("normality study needs at least four usable estimates") {
    TempDir dir("norm_small");
    ExperimentConfig c = parse_config_text(
        "experiment = normality\neps = 0.25\nT = 50\nreplications = 3\n");
    c.output_dir = (dir.path / "out").string();
    CHECK_THROWS_AS(run_experiment(c, 2), std::runtime_error);
}

TEST_CASE("normality study writes histogram and overlay artifacts") {
    TempDir dir("norm");
    ExperimentConfig c = parse_config_text(
        "experiment = normality\neps = 0.25\nT = 50\nreplications = 6\n"
        "master_seed = 3\n");
    c.output_dir = (dir.path / "out").string();
    REQUIRE(run_experiment(c, 2) == 0);
    const fs::path out(c.output_dir);
    CHECK(fs::exists(out / "hist.csv"));
    CHECK(fs::exists(out / "overlay.csv"));
    CHECK(slurp(out / "hist.csv").rfind("bin_left,bin_right,count,", 0) == 0);
}

TEST_CASE("rates study writes both ladder reports") {
    TempDir dir("rates");
    ExperimentConfig c = parse_config_text(
        "experiment = rates\nf_scale = 0.05\nu = 1.0\n");
    c.output_dir = (dir.path / "out").string();
    REQUIRE(run_experiment(c, 1) == 0);
    const fs::path out(c.output_dir);
    REQUIRE(fs::exists(out / "cf_rates.csv"));
    REQUIRE(fs::exists(out / "oscillatory_rates.csv"));
    CHECK(slurp(out / "cf_rates.csv").rfind("eps,gap,fitted_slope\n", 0) == 0);
    CHECK(fs::exists(out / "summary.json"));
    CHECK(fs::exists(out / "manifest.json"));
}

}  // TEST_SUITE
