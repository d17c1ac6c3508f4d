#include "idf/gazeutil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "idf/errors.hpp"
#include "idf/logistic.hpp"
#include "idf/optics.hpp"

namespace idf::gazeutil {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kRadToDeg = 180.0 / kPi;
}  // namespace

namespace {

struct Blob {
    int area = 0;
    double cx = 0, cy = 0;
    long perimeter = 0;
    std::vector<int> pixels;  // linear indices
};

// largest connected component (4-neighborhood) of the given binary mask
Blob largest_component(const std::vector<uint8_t>& in, int w, int h) {
    std::vector<uint8_t> seen(in.size(), 0);
    std::vector<int> stack;
    Blob best;
    for (int start = 0; start < w * h; ++start) {
        if (seen[static_cast<size_t>(start)] || !in[static_cast<size_t>(start)]) continue;
        Blob blob;
        long sx = 0, sy = 0;
        stack.push_back(start);
        seen[static_cast<size_t>(start)] = 1;
        while (!stack.empty()) {
            int idx = stack.back();
            stack.pop_back();
            blob.pixels.push_back(idx);
            int x = idx % w, y = idx / w;
            ++blob.area;
            sx += x;
            sy += y;
            const int nx[4] = {x - 1, x + 1, x, x};
            const int ny[4] = {y, y, y - 1, y + 1};
            for (int k = 0; k < 4; ++k) {
                if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) {
                    ++blob.perimeter;
                    continue;
                }
                int nidx = ny[k] * w + nx[k];
                if (!in[static_cast<size_t>(nidx)]) {
                    ++blob.perimeter;
                    continue;
                }
                if (!seen[static_cast<size_t>(nidx)]) {
                    seen[static_cast<size_t>(nidx)] = 1;
                    stack.push_back(nidx);
                }
            }
        }
        blob.cx = static_cast<double>(sx) / blob.area;
        blob.cy = static_cast<double>(sy) / blob.area;
        if (blob.area > best.area) best = std::move(blob);
    }
    return best;
}

}  // namespace

PupilObservation detect_pupil(const EyeImage& image, const DetectorConfig& cfg) {
    if (image.empty()) throw std::invalid_argument("detect_pupil: empty image");
    PupilObservation obs;
    const int w = image.width, h = image.height;

    ImageF smooth = cfg.presmooth_sigma > 0
                        ? optics::blur(to_float(image), cfg.presmooth_sigma, optics::Border::Replicate)
                        : to_float(image);

    // dark-percentile threshold
    std::vector<double> sorted = smooth.v;
    size_t k = static_cast<size_t>(cfg.threshold_percentile * static_cast<double>(sorted.size()));
    if (k >= sorted.size()) k = sorted.size() - 1;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<ptrdiff_t>(k), sorted.end());
    double threshold = sorted[k];

    std::vector<uint8_t> mask(smooth.v.size());
    for (size_t i = 0; i < mask.size(); ++i) mask[i] = smooth.v[i] <= threshold;
    Blob blob = largest_component(mask, w, h);
    if (blob.area < cfg.min_area_px || blob.area > cfg.max_area_px) return obs;

    // when the dark percentile lands inside the iris the coarse blob holds
    // both the pupil and dark iris texture; cut again at the mid intensity
    std::vector<double> vals;
    vals.reserve(blob.pixels.size());
    for (int idx : blob.pixels) vals.push_back(smooth.v[static_cast<size_t>(idx)]);
    size_t p5 = vals.size() / 20;
    size_t p95 = vals.size() - 1 - vals.size() / 20;
    std::nth_element(vals.begin(), vals.begin() + static_cast<ptrdiff_t>(p5), vals.end());
    double lo = vals[p5];
    std::nth_element(vals.begin(), vals.begin() + static_cast<ptrdiff_t>(p95), vals.end());
    double hi = vals[p95];
    if (hi - lo > cfg.bimodal_spread) {
        double split = 0.5 * (lo + hi);
        std::vector<uint8_t> inner(mask.size(), 0);
        for (int idx : blob.pixels)
            inner[static_cast<size_t>(idx)] = smooth.v[static_cast<size_t>(idx)] <= split;
        Blob refined = largest_component(inner, w, h);
        if (refined.area >= cfg.min_area_px) blob = std::move(refined);
    }
    if (blob.area < cfg.min_area_px || blob.area > cfg.max_area_px) return obs;

    // isoperimetric circularity 4*pi*A/P^2 (1 for a disk)
    double circularity =
        blob.perimeter > 0
            ? 4.0 * kPi * blob.area / (static_cast<double>(blob.perimeter) * blob.perimeter)
            : 0.0;
    if (circularity < cfg.min_circularity) return obs;

    obs.found = true;
    obs.center = {blob.cx, blob.cy};
    obs.radius = std::sqrt(blob.area / kPi);
    obs.confidence = std::min(1.0, circularity);
    return obs;
}

Point GazeMapping::map(const Point& p) const {
    double basis[6] = {1.0, p.x, p.y, p.x * p.x, p.x * p.y, p.y * p.y};
    Point out;
    for (int i = 0; i < 6; ++i) {
        out.x += coef_x[static_cast<size_t>(i)] * basis[i];
        out.y += coef_y[static_cast<size_t>(i)] * basis[i];
    }
    return out;
}

namespace {

// solves the 6x6 normal equations by Gaussian elimination with partial
// pivoting; returns false when rank-deficient
bool solve6(double A[6][6], double b[6], double out[6]) {
    int piv[6];
    for (int i = 0; i < 6; ++i) piv[i] = i;
    for (int col = 0; col < 6; ++col) {
        int best = col;
        for (int r = col + 1; r < 6; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[best][col])) best = r;
        if (std::fabs(A[best][col]) < 1e-10) return false;
        std::swap_ranges(A[col], A[col] + 6, A[best]);
        std::swap(b[col], b[best]);
        std::swap(piv[col], piv[best]);
        for (int r = col + 1; r < 6; ++r) {
            double f = A[r][col] / A[col][col];
            for (int c = col; c < 6; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int r = 5; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < 6; ++c) s -= A[r][c] * out[c];
        out[r] = s / A[r][r];
    }
    return true;
}

}  // namespace

GazeMapping calibrate_polynomial(const std::vector<Point>& pupil_centers,
                                 const std::vector<Point>& targets) {
    if (pupil_centers.size() != targets.size())
        throw std::invalid_argument("calibrate_polynomial: list sizes differ");
    if (pupil_centers.size() < 6)
        throw CalibrationFailed("calibrate_polynomial: need at least 6 correspondences");

    // normalize pupil coordinates for conditioning
    double mx = 0, my = 0;
    for (const auto& p : pupil_centers) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(pupil_centers.size());
    my /= static_cast<double>(pupil_centers.size());
    double scale = 0;
    for (const auto& p : pupil_centers) scale += std::hypot(p.x - mx, p.y - my);
    scale /= static_cast<double>(pupil_centers.size());
    if (scale < 1e-12) throw CalibrationFailed("calibrate_polynomial: degenerate pupil positions");

    auto basis = [&](const Point& p, double out[6]) {
        double x = (p.x - mx) / scale, y = (p.y - my) / scale;
        out[0] = 1.0;
        out[1] = x;
        out[2] = y;
        out[3] = x * x;
        out[4] = x * y;
        out[5] = y * y;
    };

    double AtA[6][6] = {};
    double Atx[6] = {}, Aty[6] = {};
    for (size_t k = 0; k < pupil_centers.size(); ++k) {
        double row[6];
        basis(pupil_centers[k], row);
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) AtA[i][j] += row[i] * row[j];
            Atx[i] += row[i] * targets[k].x;
            Aty[i] += row[i] * targets[k].y;
        }
    }

    double cx[6], cy[6];
    double A1[6][6], A2[6][6];
    std::copy(&AtA[0][0], &AtA[0][0] + 36, &A1[0][0]);
    std::copy(&AtA[0][0], &AtA[0][0] + 36, &A2[0][0]);
    if (!solve6(A1, Atx, cx) || !solve6(A2, Aty, cy))
        throw CalibrationFailed("calibrate_polynomial: rank-deficient design matrix");

    // expand normalized-basis coefficients back to raw pixel coordinates
    GazeMapping g;
    auto expand = [&](const double c[6], std::array<double, 6>& out) {
        double s = 1.0 / scale, s2 = s * s;
        out[0] = c[0] - c[1] * mx * s - c[2] * my * s + c[3] * mx * mx * s2 +
                 c[4] * mx * my * s2 + c[5] * my * my * s2;
        out[1] = c[1] * s - 2 * c[3] * mx * s2 - c[4] * my * s2;
        out[2] = c[2] * s - 2 * c[5] * my * s2 - c[4] * mx * s2;
        out[3] = c[3] * s2;
        out[4] = c[4] * s2;
        out[5] = c[5] * s2;
    };
    expand(cx, g.coef_x);
    expand(cy, g.coef_y);

    double sse = 0;
    for (size_t k = 0; k < pupil_centers.size(); ++k) {
        Point m = g.map(pupil_centers[k]);
        sse += (m.x - targets[k].x) * (m.x - targets[k].x) +
               (m.y - targets[k].y) * (m.y - targets[k].y);
    }
    g.residual_rms = std::sqrt(sse / static_cast<double>(pupil_centers.size()));
    return g;
}

double angular_error(const Point& gaze_px, const Point& target_px, const ScreenGeometry& geom) {
    if (geom.screen_distance_mm <= 0 || geom.pixel_size_mm <= 0)
        throw std::invalid_argument("angular_error: geometry must be positive");
    double dx = (gaze_px.x - target_px.x) * geom.pixel_size_mm;
    double dy = (gaze_px.y - target_px.y) * geom.pixel_size_mm;
    return std::atan2(std::hypot(dx, dy), geom.screen_distance_mm) * kRadToDeg;
}

double precision_rms(const std::vector<Point>& gaze_samples, const ScreenGeometry& geom) {
    if (gaze_samples.size() < 2)
        throw std::invalid_argument("precision_rms: need at least 2 samples");
    double acc = 0;
    for (size_t i = 1; i < gaze_samples.size(); ++i) {
        double d = angular_error(gaze_samples[i], gaze_samples[i - 1], geom);
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(gaze_samples.size() - 1));
}

double detection_rate(const std::vector<PupilObservation>& observations) {
    if (observations.empty()) throw std::invalid_argument("detection_rate: empty list");
    long found = 0;
    for (const auto& o : observations) found += o.found ? 1 : 0;
    return static_cast<double>(found) / static_cast<double>(observations.size());
}

double SigmoidFit::evaluate(double x) const { return logistic::sigmoid(a, b, x); }

SigmoidFit fit_crr_sigmoid(const std::vector<CrrPoint>& points) {
    if (points.size() < 2) throw std::invalid_argument("fit_crr_sigmoid: need >= 2 points");
    std::vector<logistic::BinomialPoint> pts;
    pts.reserve(points.size());
    for (const auto& p : points) {
        if (p.trials < 1) throw std::invalid_argument("fit_crr_sigmoid: trials must be >= 1");
        if (p.matches < 0 || p.matches > p.trials)
            throw std::invalid_argument("fit_crr_sigmoid: matches outside [0, trials]");
        pts.push_back({p.distance_mm, static_cast<double>(p.matches), static_cast<double>(p.trials)});
    }
    logistic::Fit f = logistic::fit_binomial(pts);
    SigmoidFit s;
    s.a = f.a;
    s.b = f.b;
    s.distance_domain = true;
    return s;
}

Vec3 gaze_retarget(const Vec3& reference, const Vec3& sample) {
    return {sample.x - reference.x, sample.y - reference.y, sample.z};
}

}  // namespace idf::gazeutil
