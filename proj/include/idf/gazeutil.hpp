#pragma once

#include <array>
#include <vector>

#include "idf/image.hpp"

namespace idf::gazeutil {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

struct PupilObservation {
    bool found = false;
    Point center;
    double radius = 0.0;
    double confidence = 0.0;  // circularity of the detected blob
};

struct DetectorConfig {
    double threshold_percentile = 0.10;
    double min_area_px = 200.0;
    double max_area_px = 20000.0;
    double min_circularity = 0.6;
    double presmooth_sigma = 1.5;
    // when the coarse blob spans more than this intensity range it holds both
    // the pupil and dark iris; a second cut at the mid-intensity isolates the
    // dark mode
    double bimodal_spread = 40.0;
};

// Degree-2 bivariate polynomial per screen axis: 12 coefficients over the
// basis {1, x, y, x^2, x*y, y^2}. Coordinates are normalized internally for
// conditioning; the stored coefficients apply to raw pixels.
struct GazeMapping {
    std::array<double, 6> coef_x{};
    std::array<double, 6> coef_y{};
    double residual_rms = 0.0;

    Point map(const Point& pupil) const;
};

struct ScreenGeometry {
    double screen_distance_mm = 570.0;
    double pixel_size_mm = 0.5;
};

struct SigmoidFit {
    double a = 0.0;
    double b = 0.0;
    bool distance_domain = true;  // false = sigma domain
    double evaluate(double x) const;
};

struct CrrPoint {
    double distance_mm = 0.0;
    int matches = 0;
    int trials = 0;
};

// Threshold at the dark intensity percentile, take the largest connected
// component with plausible area and circularity >= 0.6. A miss is found=false,
// not an error.
PupilObservation detect_pupil(const EyeImage& image, const DetectorConfig& cfg = {});

// Least-squares degree-2 polynomial calibration pupil -> screen.
GazeMapping calibrate_polynomial(const std::vector<Point>& pupil_centers,
                                 const std::vector<Point>& targets);

// Visual angle between two on-screen points seen from the eye.
double angular_error(const Point& gaze_px, const Point& target_px, const ScreenGeometry& geom);

// RMS of angular deviations between consecutive samples.
double precision_rms(const std::vector<Point>& gaze_samples, const ScreenGeometry& geom);

double detection_rate(const std::vector<PupilObservation>& observations);

// Binomial MLE logistic fit of match counts against distance (shared fitter
// with the psychometric module).
SigmoidFit fit_crr_sigmoid(const std::vector<CrrPoint>& points);

// Offset a gaze sample so the reference direction maps to straight ahead.
Vec3 gaze_retarget(const Vec3& reference, const Vec3& sample);

}  // namespace idf::gazeutil
