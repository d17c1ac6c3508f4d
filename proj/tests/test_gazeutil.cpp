#include <doctest.h>

#include <cmath>

#include "idf/errors.hpp"
#include "idf/gazeutil.hpp"
#include "idf/optics.hpp"
#include "idf/rng.hpp"
#include "idf/synth.hpp"

using namespace idf;
using namespace idf::gazeutil;

namespace {

EyeImage gaze_frame(uint64_t seed, double sigma, double dx = 0, double dy = 0) {
    synth::IrisIdentity ident;
    ident.identity_id = 0;
    ident.texture_seed = 321;
    synth::EyeScene scene;
    scene.pupil_cx += dx;
    scene.pupil_cy += dy;
    EyeImage img = synth::render_eye_image(ident, scene, seed);
    if (sigma > 0) img = optics::gaussian_blur(img, sigma);
    return img;
}

}  // namespace

TEST_CASE("detect_pupil: in-focus and blurred synthetic frames") {
    for (double sigma : {0.0, 3.0}) {
        EyeImage img = gaze_frame(5, sigma);
        PupilObservation o = detect_pupil(img);
        REQUIRE(o.found);
        double tol = sigma == 0.0 ? 2.0 : 3.0;
        CHECK(std::fabs(o.center.x - img.truth->pupil.cx) <= tol);
        CHECK(std::fabs(o.center.y - img.truth->pupil.cy) <= tol);
        CHECK(o.confidence >= 0.6);
    }
}

TEST_CASE("detect_pupil: all-white image has no blob") {
    EyeImage white;
    white.width = 320;
    white.height = 240;
    white.pixels.assign(320 * 240, 255);
    PupilObservation o = detect_pupil(white);
    CHECK_FALSE(o.found);
}

TEST_CASE("calibrate_polynomial: identity data reproduces inputs exactly") {
    std::vector<Point> pts;
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) pts.push_back({100.0 + 30.0 * x, 80.0 + 25.0 * y});
    GazeMapping g = calibrate_polynomial(pts, pts);
    CHECK(g.residual_rms <= 1e-9);
    for (const auto& p : pts) {
        Point m = g.map(p);
        CHECK(m.x == doctest::Approx(p.x).epsilon(1e-9));
        CHECK(m.y == doctest::Approx(p.y).epsilon(1e-9));
    }
}

TEST_CASE("calibrate_polynomial: recovers an affine map on a 9-point grid") {
    std::vector<Point> pupil, screen;
    for (int y = -1; y <= 1; ++y) {
        for (int x = -1; x <= 1; ++x) {
            Point p{160.0 + 10.0 * x, 120.0 + 9.0 * y};
            pupil.push_back(p);
            screen.push_back({40.0 + 7.1 * p.x - 0.8 * p.y, -20.0 + 0.6 * p.x + 6.4 * p.y});
        }
    }
    GazeMapping g = calibrate_polynomial(pupil, screen);
    CHECK(g.residual_rms <= 1e-6);
    Point probe{163.7, 115.2};
    Point expect{40.0 + 7.1 * probe.x - 0.8 * probe.y, -20.0 + 0.6 * probe.x + 6.4 * probe.y};
    Point got = g.map(probe);
    CHECK(got.x == doctest::Approx(expect.x).epsilon(1e-6));
    CHECK(got.y == doctest::Approx(expect.y).epsilon(1e-6));
}

TEST_CASE("calibrate_polynomial: too few or degenerate points fail") {
    std::vector<Point> five(5, Point{1, 2});
    CHECK_THROWS_AS(calibrate_polynomial(five, five), CalibrationFailed);
    std::vector<Point> collinear;
    for (int i = 0; i < 8; ++i) collinear.push_back({static_cast<double>(i), 2.0 * i});
    CHECK_THROWS_AS(calibrate_polynomial(collinear, collinear), CalibrationFailed);
}

TEST_CASE("angular_error: closed forms") {
    ScreenGeometry geom{570.0, 0.5};
    CHECK(angular_error({100, 100}, {100, 100}, geom) == 0.0);
    CHECK(angular_error({119.9, 100}, {100, 100}, geom) == doctest::Approx(1.0).epsilon(1e-3));
    // small-angle linearity within 1%
    double one = angular_error({110, 100}, {100, 100}, geom);
    double two = angular_error({120, 100}, {100, 100}, geom);
    CHECK(two == doctest::Approx(2 * one).epsilon(0.01));
    // symmetry, zero iff coincident
    CHECK(angular_error({3, 9}, {40, 2}, geom) == doctest::Approx(angular_error({40, 2}, {3, 9}, geom)));
    CHECK(angular_error({3, 9}, {3, 9.001}, geom) > 0);
}

TEST_CASE("precision_rms") {
    ScreenGeometry geom{570.0, 0.5};
    std::vector<Point> constant(5, Point{50, 50});
    CHECK(precision_rms(constant, geom) == 0.0);

    // alternating +-10 px: every consecutive step is 20 px
    std::vector<Point> alt;
    for (int i = 0; i < 8; ++i) alt.push_back({i % 2 ? 60.0 : 40.0, 50.0});
    double step = angular_error({60, 50}, {40, 50}, geom);
    CHECK(precision_rms(alt, geom) == doctest::Approx(step).epsilon(1e-9));
    CHECK(step == doctest::Approx(1.005).epsilon(1e-3));

    // duplicating the final sample never increases the RMS
    std::vector<Point> wander = {{0, 0}, {5, 1}, {9, 4}, {12, 2}};
    double before = precision_rms(wander, geom);
    wander.push_back(wander.back());
    CHECK(precision_rms(wander, geom) <= before);

    std::vector<Point> one = {{1, 1}};
    CHECK_THROWS_AS(precision_rms(one, geom), std::invalid_argument);
}

TEST_CASE("detection_rate") {
    std::vector<PupilObservation> obs(5);
    for (auto& o : obs) o.found = true;
    CHECK(detection_rate(obs) == 1.0);
    for (auto& o : obs) o.found = false;
    CHECK(detection_rate(obs) == 0.0);
    obs[0].found = obs[2].found = obs[4].found = true;
    CHECK(detection_rate(obs) == doctest::Approx(0.6));
    CHECK_THROWS_AS(detection_rate({}), std::invalid_argument);
}

TEST_CASE("fit_crr_sigmoid: paper parameters and recovery") {
    SigmoidFit paper;
    paper.a = -0.43;
    paper.b = 12.10;
    CHECK(paper.evaluate(-paper.b / paper.a) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(-paper.b / paper.a == doctest::Approx(28.1395).epsilon(1e-4));
    CHECK(paper.evaluate(35.0) == doctest::Approx(0.050).epsilon(0.02));

    // generate-and-refit at a = -0.4, b = 11, 200 trials per distance
    Rng rng(2026);
    std::vector<CrrPoint> pts;
    for (double d : {24.0, 28.0, 32.0, 36.0}) {
        double p = 1.0 / (1.0 + std::exp(-(-0.4 * d + 11.0)));
        int matches = 0;
        for (int t = 0; t < 200; ++t)
            if (rng.uniform() < p) ++matches;
        pts.push_back({d, matches, 200});
    }
    SigmoidFit fit = fit_crr_sigmoid(pts);
    CHECK(std::fabs(fit.a - (-0.4)) <= 0.05);

    // complete separation raises
    std::vector<CrrPoint> split = {{20, 50, 50}, {25, 50, 50}, {30, 0, 50}, {35, 0, 50}};
    CHECK_THROWS_AS(fit_crr_sigmoid(split), SeparationError);
}

TEST_CASE("gaze_retarget") {
    Vec3 ref{0.1, -0.2, 0.97};
    Vec3 fwd = gaze_retarget(ref, ref);
    CHECK(fwd.x == doctest::Approx(0.0));
    CHECK(fwd.y == doctest::Approx(0.0));
    CHECK(fwd.z == doctest::Approx(0.97));

    Vec3 unchanged = gaze_retarget({0, 0, 1}, {0.3, 0.1, 0.95});
    CHECK(unchanged.x == doctest::Approx(0.3));
    CHECK(unchanged.y == doctest::Approx(0.1));

    Vec3 moved = gaze_retarget(ref, {0.15, -0.2, 0.97});
    CHECK(moved.x == doctest::Approx(0.05));
    CHECK(moved.y == doctest::Approx(0.0));
    CHECK(moved.z == doctest::Approx(0.97));
}
