#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "idf/optics.hpp"
#include "idf/synth.hpp"

namespace idf {

struct IrisParams {
    int radial_samples = 20;
    int angular_samples = 240;
    double log_gabor_f0_cpp = 0.19;
    double log_gabor_sigma_over_f0 = 0.5;
    int max_shift_columns = 8;
    double hd_auth = 0.37;
    bool oracle_segmentation = false;
};

struct ThresholdPolicy {
    double max_fpr = 0.0;
    double resolution = 0.001;
};

struct GazeParams {
    double screen_distance_mm = 570.0;
    double screen_pixel_mm = 0.5;
    double target_span_deg = 7.0;
    int frames_per_target = 10;
    double tremor_px = 0.3;
    std::vector<double> sigma_levels = {0, 1, 3, 4.4, 5, 8};
    std::vector<double> distance_sweep_mm;
};

struct ExperimentConfig {
    uint64_t master_seed = 42;
    std::string output_dir;  // empty: env IRISDEFOCUS_OUT or "out"
    int jobs = 0;            // 0 = hardware concurrency
    synth::DatasetSpec dataset;
    double reference_distance_mm = 25.1;
    optics::OpticalConfig optics = optics::OpticalConfig::from_reference(1.014, 1.05, 0.003, 25.1);
    IrisParams iris;
    ThresholdPolicy threshold;
    GazeParams gaze;
};

// Parses the JSON config, rejecting unknown keys at every level (the error
// names the offending key). Missing keys fall back to the defaults above.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

// Resolved output directory: explicit flag > config > $IRISDEFOCUS_OUT > "out".
std::string resolve_output_dir(const ExperimentConfig& cfg, const std::string& flag_value);

}  // namespace idf
