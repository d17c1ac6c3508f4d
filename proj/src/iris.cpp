#include "idf/iris.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>

#include "idf/dft.hpp"
#include "idf/errors.hpp"
#include "idf/optics.hpp"

namespace idf::iris {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

void IrisBoundary::validate() const {
    if (pupil.r <= 0 || limbus.r <= 0) throw std::invalid_argument("IrisBoundary: radii must be positive");
    if (pupil.r >= limbus.r)
        throw std::invalid_argument("IrisBoundary: pupil radius must be below limbus radius");
    double d = std::hypot(pupil.cx - limbus.cx, pupil.cy - limbus.cy);
    if (d >= limbus.r) throw std::invalid_argument("IrisBoundary: pupil center outside limbus circle");
}

// ---------------------------------------------------------------------------
// segmentation
// ---------------------------------------------------------------------------

namespace {

struct AngleTable {
    std::vector<double> cs, sn;
    explicit AngleTable(int n, bool skip_top) {
        // skip_top drops a 120 degree wedge around the upward direction
        // (screen y grows downward), where the eyelid sits
        for (int i = 0; i < n; ++i) {
            double th = kTwoPi * i / n;
            if (skip_top) {
                double upness = std::sin(th);  // < 0 means the ray points up
                if (upness < -0.5) continue;
            }
            cs.push_back(std::cos(th));
            sn.push_back(std::sin(th));
        }
    }
};

double ring_mean(const ImageF& img, double cx, double cy, double r, const AngleTable& ang) {
    double acc = 0.0;
    int n = 0;
    const double w1 = img.width - 1.0, h1 = img.height - 1.0;
    for (size_t i = 0; i < ang.cs.size(); ++i) {
        double x = cx + r * ang.cs[i];
        double y = cy + r * ang.sn[i];
        if (x < 0 || y < 0 || x > w1 || y > h1) continue;
        acc += img.sample(x, y);
        ++n;
    }
    return n > 0 ? acc / n : 0.0;
}

struct CircleFit {
    double cx = 0, cy = 0, r = 0;
    double response = 0;  // smoothed radial derivative of the ring mean, gray/px
};

// best positive radial derivative over centers x radii
CircleFit search_circles(const ImageF& img, const std::vector<std::pair<double, double>>& centers,
                         double r_lo, double r_hi, double r_step, const AngleTable& ang) {
    CircleFit best;
    int nr = static_cast<int>((r_hi - r_lo) / r_step) + 1;
    std::vector<double> means(static_cast<size_t>(nr));
    for (auto [cx, cy] : centers) {
        for (int k = 0; k < nr; ++k) means[static_cast<size_t>(k)] = ring_mean(img, cx, cy, r_lo + k * r_step, ang);
        // derivative of a 3-sample smoothed profile
        for (int k = 2; k < nr - 2; ++k) {
            double inner = (means[k - 2] + means[k - 1] + means[k]) / 3.0;
            double outer = (means[k] + means[k + 1] + means[k + 2]) / 3.0;
            double resp = (outer - inner) / (2.0 * r_step);
            if (resp > best.response) best = {cx, cy, r_lo + k * r_step, resp};
        }
    }
    return best;
}

std::vector<std::pair<double, double>> grid_centers(double cx0, double cy0, double half_span,
                                                    double step) {
    std::vector<std::pair<double, double>> out;
    for (double dy = -half_span; dy <= half_span + 1e-9; dy += step)
        for (double dx = -half_span; dx <= half_span + 1e-9; dx += step)
            out.emplace_back(cx0 + dx, cy0 + dy);
    return out;
}

CircleFit refine(const ImageF& img, CircleFit seed, double span, double step, double r_span,
                 double r_step, const AngleTable& ang, double r_min, double r_max) {
    auto centers = grid_centers(seed.cx, seed.cy, span, step);
    double lo = std::max(r_min, seed.r - r_span);
    double hi = std::min(r_max, seed.r + r_span);
    CircleFit f = search_circles(img, centers, lo - 2 * r_step, hi + 2 * r_step, r_step, ang);
    return f.response > 0 ? f : seed;
}

}  // namespace

IrisBoundary segment_iris(const EyeImage& image, const SegmentConfig& cfg) {
    if (image.width < 64 || image.height < 64)
        throw std::invalid_argument("segment_iris: image must be at least 64x64");
    ImageF img = cfg.presmooth_sigma > 0
                     ? optics::blur(to_float(image), cfg.presmooth_sigma, optics::Border::Replicate)
                     : to_float(image);

    AngleTable ang_full(48, false);
    AngleTable ang_lower(64, true);

    // pupil: coarse grid over the interior, dark-to-mid transition
    std::vector<std::pair<double, double>> coarse;
    const double margin = cfg.pupil_radius_min;
    for (double y = margin; y < image.height - margin; y += 4)
        for (double x = margin; x < image.width - margin; x += 4) coarse.emplace_back(x, y);
    CircleFit pupil =
        search_circles(img, coarse, cfg.pupil_radius_min, cfg.pupil_radius_max, 2.0, ang_full);
    if (pupil.response < cfg.response_floor)
        throw SegmentationFailed("segment_iris: no pupil edge above response floor");
    pupil = refine(img, pupil, 3.0, 1.0, 3.0, 1.0, ang_full, cfg.pupil_radius_min, cfg.pupil_radius_max);
    pupil = refine(img, pupil, 1.0, 0.25, 1.5, 0.25, ang_full, cfg.pupil_radius_min, cfg.pupil_radius_max);

    // limbus: concentric within tolerance, mid-to-bright, eyelid wedge skipped
    double lim_lo = pupil.r + cfg.limbus_margin_min;
    double lim_hi = cfg.limbus_radius_max;
    CircleFit limbus = search_circles(
        img, grid_centers(pupil.cx, pupil.cy, cfg.concentric_tolerance_px, 2.0), lim_lo, lim_hi,
        2.0, ang_lower);
    if (limbus.response < cfg.response_floor)
        throw SegmentationFailed("segment_iris: no limbus edge above response floor");
    limbus = refine(img, limbus, 1.0, 0.5, 3.0, 0.5, ang_lower, lim_lo, lim_hi);
    limbus = refine(img, limbus, 0.5, 0.25, 1.0, 0.25, ang_lower, lim_lo, lim_hi);
    // keep within the concentric constraint
    double dx = limbus.cx - pupil.cx, dy = limbus.cy - pupil.cy;
    double d = std::hypot(dx, dy);
    if (d > cfg.concentric_tolerance_px) {
        double s = cfg.concentric_tolerance_px / d;
        limbus.cx = pupil.cx + dx * s;
        limbus.cy = pupil.cy + dy * s;
    }

    IrisBoundary b;
    b.pupil = {pupil.cx, pupil.cy, pupil.r};
    b.limbus = {limbus.cx, limbus.cy, limbus.r};
    b.confidence = std::min(1.0, std::min(pupil.response, limbus.response) / 30.0);
    b.validate();
    return b;
}

IrisBoundary boundary_from_truth(const EyeImage& image) {
    if (!image.truth) throw std::invalid_argument("boundary_from_truth: image carries no truth");
    IrisBoundary b;
    b.pupil = image.truth->pupil;
    b.limbus = image.truth->limbus;
    b.confidence = 1.0;
    b.validate();
    return b;
}

// ---------------------------------------------------------------------------
// normalization
// ---------------------------------------------------------------------------

NormalizedIris normalize(const EyeImage& image, const IrisBoundary& boundary, int h_radial,
                         int w_angular) {
    if (image.empty()) throw std::invalid_argument("normalize: empty image");
    boundary.validate();
    if (h_radial < 8 || w_angular < 64)
        throw std::invalid_argument("normalize: need h_radial >= 8 and w_angular >= 64");
    if (boundary.pupil.cx < 0 || boundary.pupil.cx >= image.width || boundary.pupil.cy < 0 ||
        boundary.pupil.cy >= image.height)
        throw std::invalid_argument("normalize: boundary outside the image");

    ImageF img = to_float(image);
    NormalizedIris out;
    out.rows = h_radial;
    out.cols = w_angular;
    out.raster.assign(static_cast<size_t>(h_radial) * w_angular, 0.0);
    out.mask.assign(out.raster.size(), 1);

    std::vector<double> cs(static_cast<size_t>(w_angular)), sn(cs.size());
    for (int j = 0; j < w_angular; ++j) {
        double th = kTwoPi * j / w_angular;
        cs[static_cast<size_t>(j)] = std::cos(th);
        sn[static_cast<size_t>(j)] = std::sin(th);
    }

    const double w1 = image.width - 1.0, h1 = image.height - 1.0;
    for (int j = 0; j < w_angular; ++j) {
        double px = boundary.pupil.cx + boundary.pupil.r * cs[static_cast<size_t>(j)];
        double py = boundary.pupil.cy + boundary.pupil.r * sn[static_cast<size_t>(j)];
        double lx = boundary.limbus.cx + boundary.limbus.r * cs[static_cast<size_t>(j)];
        double ly = boundary.limbus.cy + boundary.limbus.r * sn[static_cast<size_t>(j)];
        for (int i = 0; i < h_radial; ++i) {
            double rho = (i + 0.5) / h_radial;
            double x = px + rho * (lx - px);
            double y = py + rho * (ly - py);
            size_t idx = static_cast<size_t>(i) * w_angular + static_cast<size_t>(j);
            if (x < 0 || y < 0 || x > w1 || y > h1) {
                out.mask[idx] = 0;  // never extrapolated
                continue;
            }
            out.raster[idx] = img.sample(x, y);
        }
    }

    // eyelid threshold from the lower half-annulus (median + 2 * 1.4826 MAD;
    // robust to bright bleed). Only the inner radial half enters the
    // estimate: under heavy blur the outer rows carry smeared sclera, which
    // would inflate the spread and let occluder bleed through.
    std::vector<double> lower;
    lower.reserve(out.raster.size() / 4);
    for (int j = 0; j < w_angular; ++j) {
        if (sn[static_cast<size_t>(j)] <= 0.1) continue;
        for (int i = 0; i < h_radial / 2; ++i)
            if (out.ok(i, j)) lower.push_back(out.at(i, j));
    }
    if (!lower.empty()) {
        auto median_of = [](std::vector<double>& v) {
            size_t m = v.size() / 2;
            std::nth_element(v.begin(), v.begin() + static_cast<ptrdiff_t>(m), v.end());
            return v[m];
        };
        double med = median_of(lower);
        std::vector<double> dev(lower.size());
        for (size_t k = 0; k < lower.size(); ++k) dev[k] = std::fabs(lower[k] - med);
        double mad = median_of(dev);
        double thr = med + 2.0 * std::max(1.4826 * mad, 1.0);
        for (size_t idx = 0; idx < out.raster.size(); ++idx)
            if (out.mask[idx] && out.raster[idx] > thr) out.mask[idx] = 0;
    }

    // curtain: on upward rays the eyelid enters from the limbus side; once a
    // sample is masked, everything outward of it is unusable too, with a
    // two-row safety margin for sub-threshold bleed
    for (int j = 0; j < w_angular; ++j) {
        if (sn[static_cast<size_t>(j)] >= 0.05) continue;
        int first = -1;
        for (int i = 0; i < h_radial; ++i)
            if (!out.ok(i, j)) {
                first = i;
                break;
            }
        if (first >= 0)
            for (int i = std::max(0, first - 2); i < h_radial; ++i)
                out.mask[static_cast<size_t>(i) * w_angular + static_cast<size_t>(j)] = 0;
    }

    // dilate the masked-out set two columns sideways (blur smears occluders)
    std::vector<uint8_t> dil = out.mask;
    for (int i = 0; i < h_radial; ++i) {
        for (int j = 0; j < w_angular; ++j) {
            if (out.ok(i, j)) continue;
            for (int d : {-2, -1, 1, 2}) {
                int jj = (j + d + w_angular) % w_angular;
                dil[static_cast<size_t>(i) * w_angular + static_cast<size_t>(jj)] = 0;
            }
        }
    }
    out.mask = std::move(dil);
    return out;
}

// ---------------------------------------------------------------------------
// encoding
// ---------------------------------------------------------------------------

IrisCode::IrisCode(int rows, int cols) : rows_(rows), cols_(cols) {
    size_t words = (size_bits() + 63) / 64;
    bits_.assign(words, 0);
    mask_.assign(words, 0);
}

void IrisCode::set_bit(uint64_t i, bool v) {
    if (v)
        bits_[i >> 6] |= (1ULL << (i & 63));
    else
        bits_[i >> 6] &= ~(1ULL << (i & 63));
}

void IrisCode::set_mask(uint64_t i, bool v) {
    if (v)
        mask_[i >> 6] |= (1ULL << (i & 63));
    else
        mask_[i >> 6] &= ~(1ULL << (i & 63));
}

uint64_t IrisCode::usable_count() const {
    uint64_t n = 0;
    for (uint64_t w : mask_) n += static_cast<uint64_t>(std::popcount(w));
    return n;
}

double IrisCode::noise_fraction() const {
    if (size_bits() == 0) return 1.0;
    return 1.0 - static_cast<double>(usable_count()) / static_cast<double>(size_bits());
}

IrisCode IrisCode::rotated(int k) const {
    IrisCode out(rows_, cols_);
    int w = cols_;
    int kk = ((k % w) + w) % w;
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < w; ++c) {
            int src = (c - kk + w) % w;
            uint64_t di = (static_cast<uint64_t>(r) * w + static_cast<uint64_t>(c)) * 2;
            uint64_t si = (static_cast<uint64_t>(r) * w + static_cast<uint64_t>(src)) * 2;
            out.set_bit(di, bit(si));
            out.set_bit(di + 1, bit(si + 1));
            out.set_mask(di, mask_bit(si));
            out.set_mask(di + 1, mask_bit(si + 1));
        }
    }
    return out;
}

IrisCode encode(const NormalizedIris& normalized, double f0_cpp, double sigma_over_f0) {
    if (normalized.rows <= 0 || normalized.cols <= 0)
        throw std::invalid_argument("encode: empty normalized iris");
    if (!(f0_cpp > 0 && f0_cpp < 0.5))
        throw std::invalid_argument("encode: f0 outside (0, 0.5)");
    if (!(sigma_over_f0 > 0 && sigma_over_f0 < 1))
        throw std::invalid_argument("encode: sigma_over_f0 outside (0, 1)");

    const int w = normalized.cols, h = normalized.rows;
    IrisCode code(h, w);

    // one-sided Log-Gabor transfer (zero DC and negative frequencies), so the
    // filtered row is an analytic signal
    std::vector<double> gain(static_cast<size_t>(w), 0.0);
    const double denom = 2.0 * std::log(sigma_over_f0) * std::log(sigma_over_f0);
    for (int k = 1; k <= w / 2; ++k) {
        double f = static_cast<double>(k) / w;
        double l = std::log(f / f0_cpp);
        gain[static_cast<size_t>(k)] = std::exp(-l * l / denom);
    }

    std::vector<std::complex<double>> row(static_cast<size_t>(w));
    for (int i = 0; i < h; ++i) {
        const double* src = &normalized.raster[static_cast<size_t>(i) * w];
        const uint8_t* msk = &normalized.mask[static_cast<size_t>(i) * w];

        int good = 0;
        for (int j = 0; j < w; ++j) good += msk[j] ? 1 : 0;
        if (good == 0) {
            // fully masked row; bits stay 0, mask stays 0
            continue;
        }
        if (good == w) {
            for (int j = 0; j < w; ++j) row[static_cast<size_t>(j)] = src[j];
        } else {
            // bridge masked runs by circular linear interpolation
            for (int j = 0; j < w; ++j) row[static_cast<size_t>(j)] = src[j];
            int j = 0;
            while (j < w) {
                if (msk[j]) {
                    ++j;
                    continue;
                }
                int run_start = j;
                int before = (run_start - 1 + w) % w;
                while (!msk[before]) before = (before - 1 + w) % w;
                int after = run_start;
                int run_len = 0;
                while (!msk[after % w]) {
                    ++after;
                    ++run_len;
                }
                after %= w;
                for (int t = 0; t < run_len; ++t) {
                    double a = static_cast<double>(t + 1) / (run_len + 1);
                    row[static_cast<size_t>((run_start + t) % w)] =
                        (1.0 - a) * src[before] + a * src[after];
                }
                j = run_start + run_len;
            }
        }

        dft::transform(row, false);
        for (int k = 0; k < w; ++k) row[static_cast<size_t>(k)] *= gain[static_cast<size_t>(k)];
        dft::transform(row, true);

        double rms = 0.0;
        for (int j = 0; j < w; ++j) rms += std::norm(row[static_cast<size_t>(j)]);
        rms = std::sqrt(rms / w);
        const double floor = rms > 1e-12 ? 1e-3 * rms : -1.0;  // rms ~ 0: mask whole row

        for (int j = 0; j < w; ++j) {
            uint64_t bi = (static_cast<uint64_t>(i) * w + static_cast<uint64_t>(j)) * 2;
            const auto& z = row[static_cast<size_t>(j)];
            code.set_bit(bi, z.real() > 0);
            code.set_bit(bi + 1, z.imag() > 0);
            bool usable = msk[j] && floor > 0 && std::abs(z) >= floor;
            code.set_mask(bi, usable);
            code.set_mask(bi + 1, usable);
        }
    }
    return code;
}

// ---------------------------------------------------------------------------
// matching
// ---------------------------------------------------------------------------

namespace {

// Eq-style masked HD between aligned codes; returns false when no bits are
// comparable.
bool masked_hd(const IrisCode& a, const IrisCode& b, double* hd, uint64_t* usable) {
    const auto& ab = a.bit_words();
    const auto& bb = b.bit_words();
    const auto& am = a.mask_words();
    const auto& bm = b.mask_words();
    uint64_t disagree = 0, n = 0;
    for (size_t w = 0; w < ab.size(); ++w) {
        uint64_t m = am[w] & bm[w];
        disagree += static_cast<uint64_t>(std::popcount((ab[w] ^ bb[w]) & m));
        n += static_cast<uint64_t>(std::popcount(m));
    }
    if (n == 0) return false;
    *hd = static_cast<double>(disagree) / static_cast<double>(n);
    *usable = n;
    return true;
}

}  // namespace

MatchReport hamming_distance(const IrisCode& source, const IrisCode& target, int max_shift,
                             double auth_threshold) {
    if (source.rows() != target.rows() || source.cols() != target.cols())
        throw std::invalid_argument("hamming_distance: code dimensions differ");
    if (max_shift < 0) throw std::invalid_argument("hamming_distance: negative max_shift");

    MatchReport best;
    bool found = false;
    for (int s = -max_shift; s <= max_shift; ++s) {
        IrisCode shifted = s == 0 ? target : target.rotated(s);
        double hd;
        uint64_t usable;
        if (!masked_hd(source, shifted, &hd, &usable)) continue;
        bool better = !found || hd < best.hd ||
                      (hd == best.hd && std::abs(s) < std::abs(best.shift_applied));
        if (better) {
            best.hd = hd;
            best.usable_bits = usable;
            best.shift_applied = s;
            found = true;
        }
    }
    if (!found) throw NoComparableBits("hamming_distance: zero usable bits at every shift");
    best.authenticated = best.hd < auth_threshold && !exclude_noisy(source) && !exclude_noisy(target);
    return best;
}

ShiftedCode::ShiftedCode(const IrisCode& code, int max_shift) {
    if (max_shift < 0) throw std::invalid_argument("ShiftedCode: negative max_shift");
    excluded_ = exclude_noisy(code);
    variants_.reserve(static_cast<size_t>(2 * max_shift + 1));
    // |s| ascending so the first equal-HD hit wins the smallest-shift tie rule
    shifts_.push_back(0);
    for (int s = 1; s <= max_shift; ++s) {
        shifts_.push_back(-s);
        shifts_.push_back(s);
    }
    for (int s : shifts_) variants_.push_back(s == 0 ? code : code.rotated(s));
}

std::optional<MatchReport> ShiftedCode::match(const IrisCode& source,
                                              double auth_threshold) const {
    MatchReport best;
    bool found = false;
    for (size_t k = 0; k < variants_.size(); ++k) {
        double hd;
        uint64_t usable;
        if (!masked_hd(source, variants_[k], &hd, &usable)) continue;
        // shifts_ is ordered by |s|, so a strict < keeps the smallest shift
        if (!found || hd < best.hd) {
            best.hd = hd;
            best.usable_bits = usable;
            best.shift_applied = shifts_[k];
            found = true;
        }
    }
    if (!found) return std::nullopt;
    best.authenticated = best.hd < auth_threshold && !exclude_noisy(source) && !excluded_;
    return best;
}

bool exclude_noisy(const IrisCode& code) { return code.noise_fraction() >= 0.75; }

double crr(const std::vector<IrisCode>& source_frames, const std::vector<IrisCode>& target_frames,
           double threshold, int max_shift, bool same_collection) {
    std::vector<const IrisCode*> src;
    for (const auto& c : source_frames)
        if (!exclude_noisy(c)) src.push_back(&c);
    std::vector<const IrisCode*> tgt_ptr;
    std::vector<ShiftedCode> tgt;
    for (const auto& c : target_frames) {
        if (exclude_noisy(c)) continue;
        tgt_ptr.push_back(&c);
        tgt.emplace_back(c, max_shift);
    }
    if (src.empty() || tgt.empty())
        throw UndefinedCrr("crr: all frames excluded by the noise rule");

    long compared = 0, matched = 0;
    for (size_t i = 0; i < src.size(); ++i) {
        for (size_t j = 0; j < tgt.size(); ++j) {
            if (same_collection && src[i] == tgt_ptr[j]) continue;
            auto r = tgt[j].match(*src[i]);
            if (!r) continue;  // no comparable bits for this pair
            ++compared;
            if (r->hd < threshold) ++matched;
        }
    }
    if (compared == 0) throw UndefinedCrr("crr: no comparable pairs");
    return 100.0 * static_cast<double>(matched) / static_cast<double>(compared);
}

MeanHdMatrix mean_hd_matrix(const std::vector<std::vector<IrisCode>>& groups, int max_shift) {
    if (groups.size() < 2) throw std::invalid_argument("mean_hd_matrix: need at least 2 identities");
    MeanHdMatrix m;
    m.n = static_cast<int>(groups.size());
    m.mean_hd.assign(static_cast<size_t>(m.n) * m.n, std::nullopt);

    std::vector<std::vector<const IrisCode*>> kept(groups.size());
    std::vector<std::vector<ShiftedCode>> shifted(groups.size());
    for (size_t g = 0; g < groups.size(); ++g) {
        for (const auto& c : groups[g]) {
            if (exclude_noisy(c)) continue;
            kept[g].push_back(&c);
            shifted[g].emplace_back(c, max_shift);
        }
    }

    for (int i = 0; i < m.n; ++i) {
        for (int j = 0; j < m.n; ++j) {
            double acc = 0.0;
            long cnt = 0;
            for (size_t a = 0; a < kept[static_cast<size_t>(i)].size(); ++a) {
                for (size_t b = 0; b < shifted[static_cast<size_t>(j)].size(); ++b) {
                    if (i == j && kept[static_cast<size_t>(i)][a] == kept[static_cast<size_t>(j)][b])
                        continue;
                    auto r = shifted[static_cast<size_t>(j)][b].match(*kept[static_cast<size_t>(i)][a]);
                    if (r) {
                        acc += r->hd;
                        ++cnt;
                    }
                }
            }
            if (cnt > 0) m.mean_hd[static_cast<size_t>(i) * m.n + j] = acc / static_cast<double>(cnt);
        }
    }
    return m;
}

ThresholdSelection select_threshold(const std::vector<double>& intra,
                                    const std::vector<double>& inter, double max_fpr,
                                    double resolution) {
    if (intra.empty() || inter.empty())
        throw std::invalid_argument("select_threshold: empty distance lists");
    if (resolution <= 0 || resolution > 0.5)
        throw std::invalid_argument("select_threshold: bad resolution");

    const int n_steps = static_cast<int>(std::llround(1.0 / resolution));
    double best = -1.0;
    for (int i = 0; i <= n_steps; ++i) {
        double t = i * resolution;
        long fp = 0;
        for (double v : inter)
            if (v <= t) ++fp;  // conservative: a tie counts as a false positive
        if (static_cast<double>(fp) / static_cast<double>(inter.size()) <= max_fpr) best = t;
    }
    if (best <= 0.0)
        throw ThresholdSelectionFailed("select_threshold: no usable threshold above zero");

    ThresholdSelection s;
    s.threshold = best;
    long tp = 0, fp = 0;
    for (double v : intra)
        if (v < best) ++tp;
    for (double v : inter)
        if (v < best) ++fp;
    s.tpr = static_cast<double>(tp) / static_cast<double>(intra.size());
    s.fnr = 1.0 - s.tpr;
    s.fpr = static_cast<double>(fp) / static_cast<double>(inter.size());
    s.tnr = 1.0 - s.fpr;
    return s;
}

// ---------------------------------------------------------------------------
// code files
// ---------------------------------------------------------------------------

namespace {

void pack_bits_le(const IrisCode& code, bool mask, std::vector<uint8_t>& out) {
    uint64_t n = code.size_bits();
    out.assign((n + 7) / 8, 0);
    for (uint64_t i = 0; i < n; ++i) {
        bool v = mask ? code.mask_bit(i) : code.bit(i);
        if (v) out[i >> 3] |= static_cast<uint8_t>(1u << (i & 7));
    }
}

}  // namespace

void write_iris_code(const std::string& path, const IrisCode& code, uint8_t shift_policy) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("write_iris_code: cannot open " + path);
    uint8_t header[16] = {};
    std::memcpy(header, "IRIS", 4);
    header[4] = 1;  // version
    header[5] = static_cast<uint8_t>(code.rows() & 0xff);
    header[6] = static_cast<uint8_t>((code.rows() >> 8) & 0xff);
    header[7] = static_cast<uint8_t>(code.cols() & 0xff);
    header[8] = static_cast<uint8_t>((code.cols() >> 8) & 0xff);
    header[9] = shift_policy;
    f.write(reinterpret_cast<const char*>(header), sizeof header);
    std::vector<uint8_t> buf;
    pack_bits_le(code, false, buf);
    f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    pack_bits_le(code, true, buf);
    f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!f) throw IoError("write_iris_code: write failed for " + path);
}

IrisCode read_iris_code(const std::string& path, uint8_t* shift_policy) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("read_iris_code: cannot open " + path);
    uint8_t header[16];
    f.read(reinterpret_cast<char*>(header), sizeof header);
    if (f.gcount() != sizeof header || std::memcmp(header, "IRIS", 4) != 0)
        throw IoError("read_iris_code: bad magic in " + path);
    if (header[4] != 1) throw IoError("read_iris_code: unsupported version in " + path);
    int rows = header[5] | (header[6] << 8);
    int cols = header[7] | (header[8] << 8);
    if (shift_policy) *shift_policy = header[9];
    IrisCode code(rows, cols);
    uint64_t n = code.size_bits();
    std::vector<uint8_t> buf((n + 7) / 8);
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (f.gcount() != static_cast<std::streamsize>(buf.size()))
        throw IoError("read_iris_code: truncated bits in " + path);
    for (uint64_t i = 0; i < n; ++i) code.set_bit(i, (buf[i >> 3] >> (i & 7)) & 1);
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (f.gcount() != static_cast<std::streamsize>(buf.size()))
        throw IoError("read_iris_code: truncated mask in " + path);
    for (uint64_t i = 0; i < n; ++i) code.set_mask(i, (buf[i >> 3] >> (i & 7)) & 1);
    return code;
}

}  // namespace idf::iris
