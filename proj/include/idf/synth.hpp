#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "idf/image.hpp"

namespace idf::synth {

struct IrisIdentity {
    int identity_id = 0;
    uint64_t texture_seed = 0;
    double band_lo_cpp = 0.16;
    double band_hi_cpp = 0.40;
    double contrast = 0.12;  // texture amplitude as a fraction of full scale

    void validate() const;
};

struct EyeScene {
    int image_w = 320;
    int image_h = 240;
    double pupil_cx = 160.0;
    double pupil_cy = 120.0;
    double pupil_radius_px = 28.0;
    double iris_radius_px = 55.0;
    double eyelid_coverage = 0.15;   // fraction of the iris annulus occluded from the top
    double sensor_noise_sigma = 2.0; // gray levels

    void validate() const;
};

struct RenderPalette {
    double pupil_gray = 30.0;
    double iris_gray = 110.0;
    double sclera_gray = 220.0;
    double eyelid_gray = 190.0;
    // texture rows spanned by the annulus radially; small values keep the
    // radial pattern coherent under segmentation error
    double radial_span_px = 4.0;
};

// Band-limited seeded noise raster, zero mean, unit standard deviation.
// The spectral mask keeps the radial annulus [band_lo, band_hi] restricted to
// angular (column) frequencies >= band_lo, so rows of the raster carry no
// content below band_lo along the angular axis (see README on why the code
// band must track the blur floor).
ImageF generate_iris_texture(const IrisIdentity& identity, int size);

// Composite pupil/iris/sclera/eyelid frame with additive sensor noise, truth
// annotation filled in. The iris annulus samples `texture` in polar
// coordinates anchored to the pupil center, so the pattern is rigid under
// pupil translation. Passing a pre-generated texture avoids regenerating it
// per frame; it must come from generate_iris_texture(identity, ...).
EyeImage render_eye_image(const IrisIdentity& identity, const EyeScene& scene,
                          uint64_t frame_seed, const ImageF* texture = nullptr,
                          const RenderPalette& palette = {});

// y of the horizontal chord above which the given fraction of the iris
// annulus area lies (the eyelid edge).
double eyelid_chord_y(const EyeScene& scene);

struct DatasetSpec {
    int n_identities = 10;
    int frames_per_config = 20;
    std::vector<double> sigma_levels = {0, 1, 3, 5, 8};
    EyeScene scene;                // base scene; centers/radii are jittered per frame
    int center_jitter_px = 3;
    int radius_jitter_px = 2;
    int texture_size = 256;
    double band_lo_cpp = 0.16;
    double band_hi_cpp = 0.40;
    double contrast = 0.12;
    RenderPalette palette;

    void validate() const;
};

struct FrameRecord {
    std::string path;      // relative to the dataset directory
    int identity_id = 0;
    int sigma_index = 0;
    double sigma_px = 0.0;
    int frame_index = 0;
    uint64_t frame_seed = 0;
    EyeTruth truth;
};

struct Manifest {
    uint64_t master_seed = 0;
    int n_identities = 0;
    int frames_per_config = 0;
    std::vector<double> sigma_levels;
    std::vector<FrameRecord> frames;
};

// Renders n_identities x sigma_levels x frames_per_config frames, blurs each
// at its sigma level, writes P5 graymaps under dir/images and a manifest at
// dir/manifest.txt. Per-frame seeds are mix64(master, id, sigma_idx, frame),
// so generation is order-independent and parallel-safe.
Manifest generate_dataset(const DatasetSpec& spec, uint64_t master_seed,
                          const std::string& dir, int jobs = 1);

}  // namespace idf::synth
