#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mde::expt {

inline constexpr char kVersion[] = "0.1.0";

// A parsed experiment description.  Source format is a flat text file with one
// `key = value` per line ('#' starts a comment); `experiment` selects the
// study and unrecognized keys are rejected.  A manifest.json produced by a
// previous run is accepted in place of a config file and replays it.
struct ExperimentConfig {
    std::string experiment;  // langevin1d | langevin1d_quartic | langevin2d |
                             // fcn | normality | rates

    double alpha = 2.0;
    double sigma = 1.0;
    double eps = 0.1;
    double T = 2000.0;
    double dt = 0.0;      // resolved value; see dt_auto
    bool dt_auto = true;  // dt = eps^3/2 (Langevin), min(1e-3, eps^2/10) (fcn)
    double beta = 1.0;
    double init = 10.0;  // optimizer start (scalar problems)
    double x0 = 10.0;    // trajectory start (per component in 2D; slow var for fcn)
    int replications = 50;
    std::uint64_t master_seed = 1;
    std::string output_dir = "out";

    // fcn drift and coupling
    double A = -1.0;
    double B = 0.0;
    double lambda = 2.0 / 45.0;

    // rates ladders
    std::vector<double> eps_ladder = {0.4, 0.2, 0.1, 0.05};
    double u = 1.0;       // characteristic-function argument for the cf ladder
    double f_scale = 1.0; // Gaussian test-function scale for the oscillatory ladder

    // Seeds recorded by a manifest; used verbatim on replay when the length
    // matches `replications`, otherwise seeds are master_seed + r.
    std::vector<std::uint64_t> seeds;
};

// Parse / validate.  Both throw std::runtime_error with a line- or key-level
// message on malformed input; load_config dispatches on the leading '{' to
// the manifest reader.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Histogram binning: width = 2 IQR n^{-1/3} (quantiles by linear
// interpolation), count = ceil(range/width); degenerate IQR falls back to
// Sturges' count with the flag set.
struct FdBins {
    double width = 0.0;
    int count = 0;
    bool sturges_fallback = false;
};

FdBins freedman_diaconis_bins(const std::vector<double>& samples);

// Execute the configured study and write its artifact set (estimates.csv,
// summary.json, manifest.json, plus hist.csv/overlay.csv for normality and
// the two rate CSVs for rates) under cfg.output_dir.  Returns the process
// exit code: 0 on success, 2 when more than 20% of replications failed.
// threads <= 0 selects the hardware concurrency.
int run_experiment(const ExperimentConfig& cfg, int threads = 0);

}  // namespace mde::expt
