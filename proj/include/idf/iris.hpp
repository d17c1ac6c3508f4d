#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "idf/image.hpp"

namespace idf::iris {

struct IrisBoundary {
    Circle pupil;
    Circle limbus;
    double confidence = 0.0;

    void validate() const;
};

// Rubber-sheet raster: rows = radial fractions (pupil edge -> limbus),
// columns = angle. mask true = usable iris sample.
struct NormalizedIris {
    int rows = 0;
    int cols = 0;
    std::vector<double> raster;
    std::vector<uint8_t> mask;

    double at(int r, int c) const { return raster[static_cast<size_t>(r) * cols + c]; }
    bool ok(int r, int c) const { return mask[static_cast<size_t>(r) * cols + c] != 0; }
};

// Packed 2-bit-per-sample phase code. Bit index (row*cols + col)*2 + part,
// part 0 = sign of the real response, 1 = imaginary. Bits are packed
// little-endian (bit i lives in word i/64 at position i%64).
class IrisCode {
  public:
    IrisCode() = default;
    IrisCode(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    uint64_t size_bits() const { return static_cast<uint64_t>(rows_) * cols_ * 2; }

    bool bit(uint64_t i) const { return (bits_[i >> 6] >> (i & 63)) & 1; }
    bool mask_bit(uint64_t i) const { return (mask_[i >> 6] >> (i & 63)) & 1; }
    void set_bit(uint64_t i, bool v);
    void set_mask(uint64_t i, bool v);

    uint64_t usable_count() const;
    double noise_fraction() const;

    // circular column rotation by k (sample at output column c comes from
    // input column (c - k) mod cols)
    IrisCode rotated(int k) const;

    const std::vector<uint64_t>& bit_words() const { return bits_; }
    const std::vector<uint64_t>& mask_words() const { return mask_; }

    friend struct CodeOps;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<uint64_t> bits_;
    std::vector<uint64_t> mask_;
};

struct MatchReport {
    double hd = 0.0;
    uint64_t usable_bits = 0;
    bool authenticated = false;
    int shift_applied = 0;
};

struct SegmentConfig {
    double pupil_radius_min = 12.0;
    double pupil_radius_max = 45.0;
    double limbus_margin_min = 8.0;   // limbus radius >= pupil radius + this
    double limbus_radius_max = 90.0;
    double concentric_tolerance_px = 5.0;
    double response_floor = 1.0;      // gray/px; below this -> segmentation-failed
    double presmooth_sigma = 1.0;
};

inline constexpr double kHdAuthDefault = 0.37;

// Daugman integro-differential operator, coarse-to-fine with sub-pixel
// refinement. Pupil (dark-to-mid) first, then limbus (mid-to-bright)
// constrained concentric. Throws SegmentationFailed when the best response
// is under the floor.
IrisBoundary segment_iris(const EyeImage& image, const SegmentConfig& cfg = {});

// Oracle segmentation from ground truth (isolates encoder/matcher tests).
IrisBoundary boundary_from_truth(const EyeImage& image);

NormalizedIris normalize(const EyeImage& image, const IrisBoundary& boundary,
                         int h_radial, int w_angular);

// 1-D Log-Gabor phase quantization per angular row. Masked samples are
// bridged by circular linear interpolation before filtering so occluders do
// not ring into usable bits.
IrisCode encode(const NormalizedIris& normalized, double f0_cpp = 0.19,
                double sigma_over_f0 = 0.5);

// Minimum masked fractional Hamming distance over circular column shifts in
// [-max_shift, +max_shift]. max_shift = 0 reproduces the plain masked HD.
MatchReport hamming_distance(const IrisCode& source, const IrisCode& target, int max_shift,
                             double auth_threshold = kHdAuthDefault);

// Precomputed rotations of a target code; makes repeated matching against
// many sources cheap (word-level popcount only).
class ShiftedCode {
  public:
    ShiftedCode(const IrisCode& code, int max_shift);
    // same result as hamming_distance(source, code, max_shift); nullopt when
    // no shift has comparable bits
    std::optional<MatchReport> match(const IrisCode& source,
                                     double auth_threshold = kHdAuthDefault) const;
    bool excluded() const { return excluded_; }

  private:
    std::vector<IrisCode> variants_;
    std::vector<int> shifts_;
    bool excluded_ = false;
};

// true = excluded (>= 75% of bits are noise)
bool exclude_noisy(const IrisCode& code);

// Percentage of (source, target) pairs with HD < threshold. Codes failing
// exclude_noisy are dropped first. same_collection skips self-pairs.
double crr(const std::vector<IrisCode>& source_frames, const std::vector<IrisCode>& target_frames,
           double threshold, int max_shift, bool same_collection);

struct MeanHdMatrix {
    int n = 0;
    std::vector<std::optional<double>> mean_hd;  // row-major n x n
    std::optional<double> at(int i, int j) const { return mean_hd[static_cast<size_t>(i) * n + j]; }
};

MeanHdMatrix mean_hd_matrix(const std::vector<std::vector<IrisCode>>& groups, int max_shift);

struct ThresholdSelection {
    double threshold = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
    double tnr = 0.0;
    double fnr = 0.0;
};

// Largest grid threshold whose conservative false-positive rate over `inter`
// (counting ties) stays within max_fpr. Reported rates use the strict
// authentication rule hd < threshold.
ThresholdSelection select_threshold(const std::vector<double>& intra,
                                    const std::vector<double>& inter, double max_fpr,
                                    double resolution = 0.001);

// Bit-exact file format, see README ("iris-code files").
void write_iris_code(const std::string& path, const IrisCode& code, uint8_t shift_policy);
IrisCode read_iris_code(const std::string& path, uint8_t* shift_policy = nullptr);

}  // namespace idf::iris
