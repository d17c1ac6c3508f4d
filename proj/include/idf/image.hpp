#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace idf {

struct Circle {
    double cx = 0.0;
    double cy = 0.0;
    double r = 0.0;
};

// Ground-truth annotation carried by synthetic frames.
struct EyeTruth {
    int identity_id = -1;
    Circle pupil;
    Circle limbus;
    double eyelid_coverage = 0.0;
};

// 8-bit grayscale raster, row-major.
struct EyeImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;
    std::optional<EyeTruth> truth;

    uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    uint8_t& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    bool empty() const { return width <= 0 || height <= 0 || pixels.empty(); }
};

// Double-precision raster used for all intermediate arithmetic.
struct ImageF {
    int width = 0;
    int height = 0;
    std::vector<double> v;

    ImageF() = default;
    ImageF(int w, int h, double fill = 0.0)
        : width(w), height(h), v(static_cast<size_t>(w) * h, fill) {}

    double at(int x, int y) const { return v[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return v[static_cast<size_t>(y) * width + x]; }

    // bilinear read; caller guarantees 0 <= x <= width-1, 0 <= y <= height-1
    double sample(double x, double y) const;
};

ImageF to_float(const EyeImage& img);

// Clamp to [0,255] and round half-to-even; the single place float rasters
// become 8-bit.
EyeImage to_eight_bit(const ImageF& img);

// Binary portable graymap (P5), maxval 255.
void write_pgm(const std::string& path, const EyeImage& img);
EyeImage read_pgm(const std::string& path);

}  // namespace idf
