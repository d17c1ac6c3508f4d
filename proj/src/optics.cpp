#include "idf/optics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "idf/dft.hpp"

namespace idf::optics {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPiSq = 2.0 * kPi * kPi;
}  // namespace

void OpticalConfig::validate() const {
    if (focal_length_mm <= 0 || lens_diameter_mm <= 0 || pixel_pitch_mm <= 0 ||
        sensor_to_lens_mm <= 0 || iris_width_mm <= 0)
        throw std::invalid_argument("OpticalConfig: all lengths must be positive");
    if (sensor_to_lens_mm <= focal_length_mm)
        throw std::invalid_argument("OpticalConfig: sensor_to_lens_mm must exceed focal length");
}

OpticalConfig OpticalConfig::from_reference(double focal_length_mm, double lens_diameter_mm,
                                            double pixel_pitch_mm, double reference_distance_mm,
                                            double iris_width_mm) {
    OpticalConfig c;
    c.focal_length_mm = focal_length_mm;
    c.lens_diameter_mm = lens_diameter_mm;
    c.pixel_pitch_mm = pixel_pitch_mm;
    c.iris_width_mm = iris_width_mm;
    c.sensor_to_lens_mm = solve_lens_equation(focal_length_mm, reference_distance_mm);
    c.validate();
    return c;
}

void SeparabilityModel::validate() const {
    if (!(band_lo_cpp > 0 && band_lo_cpp < band_hi_cpp && band_hi_cpp <= 0.5))
        throw std::invalid_argument("SeparabilityModel: need 0 < band_lo < band_hi <= 0.5");
    if (sigma_c_px <= 0) throw std::invalid_argument("SeparabilityModel: sigma_c_px must be positive");
}

double SeparabilityModel::feature_energy_retained(double blur_sigma_px) const {
    double sc2 = sigma_c_px * sigma_c_px;
    return sc2 / (sc2 + blur_sigma_px * blur_sigma_px);
}

double estimate_eye_distance(double iris_width_px, const OpticalConfig& config) {
    config.validate();
    if (iris_width_px <= 0)
        throw std::invalid_argument("estimate_eye_distance: iris width must be positive");
    double w_img_mm = iris_width_px * config.pixel_pitch_mm;
    return config.iris_width_mm * config.sensor_to_lens_mm / w_img_mm;
}

double solve_lens_equation(double focal_length_mm, double object_distance_mm) {
    if (focal_length_mm <= 0)
        throw std::invalid_argument("solve_lens_equation: focal length must be positive");
    if (object_distance_mm <= focal_length_mm)
        throw std::invalid_argument("solve_lens_equation: no real image for d <= f");
    return 1.0 / (1.0 / focal_length_mm - 1.0 / object_distance_mm);
}

DefocusResult defocus_sigma(const OpticalConfig& config, double secure_distance_mm) {
    config.validate();
    double u_prime = solve_lens_equation(config.focal_length_mm, secure_distance_mm);
    DefocusResult r;
    r.eye_distance_mm = secure_distance_mm;
    r.conjugate_plane_mm = u_prime;
    double sigma = config.lens_diameter_mm * (config.sensor_to_lens_mm - u_prime) / u_prime;
    if (sigma < 0) {
        // blur-disk size is symmetric about the focal plane
        sigma = -sigma;
        r.closer_than_reference = true;
    }
    r.sigma_mm = sigma;
    r.sigma_px = sigma / config.pixel_pitch_mm;
    return r;
}

Kernel gaussian_kernel(double sigma_px) {
    if (sigma_px < 0) throw std::invalid_argument("gaussian_kernel: sigma must be >= 0");
    Kernel k;
    if (sigma_px == 0.0) {
        k.taps = {1.0};
        k.radius = 0;
        return k;
    }
    k.radius = static_cast<int>(std::ceil(4.0 * sigma_px));
    k.taps.resize(static_cast<size_t>(2 * k.radius + 1));
    double sum = 0.0;
    for (int i = -k.radius; i <= k.radius; ++i) {
        double t = std::exp(-0.5 * (i / sigma_px) * (i / sigma_px));
        k.taps[static_cast<size_t>(i + k.radius)] = t;
        sum += t;
    }
    for (auto& t : k.taps) t /= sum;
    return k;
}

namespace {

// One horizontal pass; transpose-free vertical pass runs the same code on a
// transposed view by swapping strides.
void convolve_pass(const double* src, double* dst, int n_lines, int line_len, int stride_line,
                   int stride_elem, const Kernel& k, Border border) {
    const int r = k.radius;
    for (int line = 0; line < n_lines; ++line) {
        const double* s = src + static_cast<size_t>(line) * stride_line;
        double* d = dst + static_cast<size_t>(line) * stride_line;
        for (int i = 0; i < line_len; ++i) {
            double acc = 0.0;
            for (int j = -r; j <= r; ++j) {
                int idx = i + j;
                if (border == Border::Replicate) {
                    if (idx < 0) idx = 0;
                    if (idx >= line_len) idx = line_len - 1;
                } else {
                    idx %= line_len;
                    if (idx < 0) idx += line_len;
                }
                acc += k.taps[static_cast<size_t>(j + r)] * s[static_cast<size_t>(idx) * stride_elem];
            }
            d[static_cast<size_t>(i) * stride_elem] = acc;
        }
    }
}

}  // namespace

ImageF blur(const ImageF& img, double sigma_px, Border border) {
    if (img.width <= 0 || img.height <= 0) throw std::invalid_argument("blur: empty image");
    Kernel k = gaussian_kernel(sigma_px);
    if (k.radius == 0) return img;
    ImageF tmp(img.width, img.height);
    ImageF out(img.width, img.height);
    // horizontal: lines are rows
    convolve_pass(img.v.data(), tmp.v.data(), img.height, img.width, img.width, 1, k, border);
    // vertical: lines are columns
    convolve_pass(tmp.v.data(), out.v.data(), img.width, img.height, 1, img.width, k, border);
    return out;
}

EyeImage gaussian_blur(const EyeImage& img, double sigma_px) {
    if (img.empty()) throw std::invalid_argument("gaussian_blur: empty image");
    if (sigma_px < 0) throw std::invalid_argument("gaussian_blur: sigma must be >= 0");
    if (sigma_px == 0.0) return img;
    EyeImage out = to_eight_bit(blur(to_float(img), sigma_px, Border::Replicate));
    out.truth = img.truth;
    return out;
}

double spectral_attenuation(double sigma_px, double freq_cpp) {
    if (sigma_px < 0) throw std::invalid_argument("spectral_attenuation: sigma must be >= 0");
    if (freq_cpp < 0 || freq_cpp > 0.5)
        throw std::invalid_argument("spectral_attenuation: frequency outside [0, 0.5]");
    return std::exp(-kTwoPiSq * sigma_px * sigma_px * freq_cpp * freq_cpp);
}

BandEnergy band_energy_fraction(const ImageF& img, double cutoff_cpp) {
    if (img.width < 16 || img.height < 16)
        throw std::invalid_argument("band_energy_fraction: image must be at least 16x16");
    if (!(cutoff_cpp > 0 && cutoff_cpp < 0.5))
        throw std::invalid_argument("band_energy_fraction: cutoff outside (0, 0.5)");
    const int w = img.width, h = img.height;
    std::vector<std::complex<double>> spec(img.v.begin(), img.v.end());
    dft::transform2d(spec, w, h, false);
    double total = 0.0, above = 0.0;
    for (int y = 0; y < h; ++y) {
        double fy = static_cast<double>(std::min(y, h - y)) / h;
        for (int x = 0; x < w; ++x) {
            if (x == 0 && y == 0) continue;  // DC
            double fx = static_cast<double>(std::min(x, w - x)) / w;
            double p = std::norm(spec[static_cast<size_t>(y) * w + x]);
            total += p;
            if (std::sqrt(fx * fx + fy * fy) > cutoff_cpp) above += p;
        }
    }
    BandEnergy r;
    if (total <= 1e-9) {
        r.degenerate = true;
        r.fraction = 0.0;
    } else {
        r.fraction = above / total;
    }
    return r;
}

BandEnergy band_energy_fraction(const EyeImage& img, double cutoff_cpp) {
    if (img.empty()) throw std::invalid_argument("band_energy_fraction: empty image");
    return band_energy_fraction(to_float(img), cutoff_cpp);
}

}  // namespace idf::optics
