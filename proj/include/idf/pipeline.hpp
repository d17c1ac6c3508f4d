#pragma once

#include <optional>
#include <string>
#include <vector>

#include "idf/config.hpp"
#include "idf/gazeutil.hpp"
#include "idf/iris.hpp"
#include "idf/psycho.hpp"
#include "idf/synth.hpp"

namespace idf::pipeline {

struct SigmaAuthRow {
    double sigma_px = 0.0;
    int n_codes = 0;
    int n_segmentation_failed = 0;
    int n_excluded = 0;
    long intra_pairs = 0;
    long inter_pairs = 0;
    std::optional<double> crr_at_selected;  // percent; empty when undefined
    std::optional<double> crr_at_hd_auth;
    double mean_intra_hd = 0.0;
    double mean_inter_hd = 0.0;
    double min_inter_hd = 1.0;
};

struct AuthReport {
    iris::ThresholdSelection threshold;  // selected on the in-focus distributions
    double hd_auth = 0.37;
    std::vector<SigmaAuthRow> rows;
    std::vector<iris::MeanHdMatrix> matrices;                       // per sigma level
    std::vector<std::vector<std::optional<double>>> crr_identity;   // [sigma][identity]
    long matrix_false_positives = 0;   // off-diagonal mean-HD cells below threshold, any sigma
    long pair_false_positives_infocus = 0;
    std::vector<double> intra_infocus;  // HD samples at sigma = 0
    std::vector<double> inter_infocus;
};

struct GazeSigmaRow {
    double sigma_px = 0.0;
    double detection_rate = 0.0;
    double mean_error_deg = 0.0;
    double precision_deg = 0.0;
    double calibration_residual_px = 0.0;
    bool ok = false;  // calibration succeeded
};

struct GazeReport {
    std::vector<GazeSigmaRow> rows;
    std::optional<gazeutil::SigmoidFit> distance_fit;
    std::vector<gazeutil::CrrPoint> distance_points;
};

struct PsychoReport {
    std::vector<std::string> excluded;
    struct ParticipantFit {
        std::string participant;
        psycho::PsychometricFit fit;
        bool ok = false;
        std::string error;
    };
    std::vector<ParticipantFit> fits;
    double mean_pse = 0.0;
    double mean_dt = 0.0;
    std::optional<psycho::PsychometricFit> pooled;
    struct AttributeStats {
        std::string attribute;
        stats::FriedmanResult friedman;
        std::vector<psycho::PairwiseComparison> pairwise;
    };
    std::vector<AttributeStats> attributes;
};

// synth: dataset + manifest under dir
synth::Manifest run_synth(const ExperimentConfig& cfg, const std::string& dir);

// auth: CRR/HD analysis of the dataset in dir; CSV reports under dir/report.
// save_codes additionally writes one .iriscode file per usable frame under
// dir/codes.
AuthReport run_auth(const ExperimentConfig& cfg, const std::string& dir, bool save_codes = false);

// gaze: synthetic target-viewing utility per sigma (+ optional distance sweep)
GazeReport run_gaze(const ExperimentConfig& cfg, const std::string& dir);

// psycho: analyses over response/Likert CSVs; reports under dir/report
PsychoReport run_psycho(const ExperimentConfig& cfg, const std::string& responses_csv,
                        const std::string& likert_csv, const std::string& dir);

// plot: SVG analogs from the CSV reports in dir/report; returns files written
int run_plot(const std::string& dir);

void run_all(const ExperimentConfig& cfg, const std::string& dir,
             const std::string& responses_csv = "", const std::string& likert_csv = "");

}  // namespace idf::pipeline
