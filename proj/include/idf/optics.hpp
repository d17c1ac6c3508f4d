#pragma once

#include <vector>

#include "idf/image.hpp"

namespace idf::optics {

// Camera constants of the eye-tracker imaging system. sensor_to_lens_mm is
// normally derived from the in-focus reference distance via the lens
// equation, see from_reference().
struct OpticalConfig {
    double focal_length_mm = 1.014;
    double lens_diameter_mm = 1.05;
    double pixel_pitch_mm = 0.003;
    double sensor_to_lens_mm = 0.0;
    double iris_width_mm = 11.0;

    void validate() const;

    static OpticalConfig from_reference(double focal_length_mm, double lens_diameter_mm,
                                        double pixel_pitch_mm, double reference_distance_mm,
                                        double iris_width_mm = 11.0);
};

struct DefocusResult {
    double eye_distance_mm = 0.0;
    double conjugate_plane_mm = 0.0;  // u' for the displaced eye
    double sigma_mm = 0.0;
    double sigma_px = 0.0;
    bool closer_than_reference = false;  // sigma was negative and clamped to |sigma|
};

// Frequency-band description used by the separability analysis. epsilon is
// the smallest transformed-Gaussian spread still considered detectable; it is
// reported, never branched on.
struct SeparabilityModel {
    double sigma_c_px = 15.0;
    double band_lo_cpp = 0.1;
    double band_hi_cpp = 0.5;
    double epsilon = 1e-3;

    void validate() const;

    // Fraction of the tracking feature's spectral energy surviving a blur of
    // blur_sigma_px (2-D closed form sigma_c^2 / (sigma_c^2 + sigma_b^2)).
    double feature_energy_retained(double blur_sigma_px) const;
};

struct Kernel {
    std::vector<double> taps;  // size 2*radius+1, sums to 1
    int radius = 0;
};

enum class Border { Replicate, Periodic };

struct BandEnergy {
    double fraction = 0.0;
    bool degenerate = false;  // image had no non-DC energy
};

// d = W_world * u / (W_img * pitch)
double estimate_eye_distance(double iris_width_px, const OpticalConfig& config);

// u = 1 / (1/f - 1/d); throws for d <= f (no real image)
double solve_lens_equation(double focal_length_mm, double object_distance_mm);

// Blur-disk spread on the sensor for an eye moved to secure_distance_mm,
// relative to the in-focus plane baked into config.sensor_to_lens_mm.
DefocusResult defocus_sigma(const OpticalConfig& config, double secure_distance_mm);

// Sampled, truncated (radius = ceil(4 sigma)), renormalized Gaussian.
Kernel gaussian_kernel(double sigma_px);

// Separable blur in double precision; no rounding.
ImageF blur(const ImageF& img, double sigma_px, Border border = Border::Replicate);

// Replicate-border blur, rounded half-to-even to 8 bit once at the end.
// Truth annotation is carried through unchanged.
EyeImage gaussian_blur(const EyeImage& img, double sigma_px);

// Continuous transfer function of Gaussian blur, cycles/pixel convention.
double spectral_attenuation(double sigma_px, double freq_cpp);

// Fraction of non-DC 2-D spectral power above the radial cutoff.
BandEnergy band_energy_fraction(const EyeImage& img, double cutoff_cpp);
BandEnergy band_energy_fraction(const ImageF& img, double cutoff_cpp);

}  // namespace idf::optics
