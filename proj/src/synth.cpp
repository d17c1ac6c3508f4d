#include "idf/synth.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "idf/dft.hpp"
#include "idf/errors.hpp"
#include "idf/manifest.hpp"
#include "idf/optics.hpp"
#include "idf/parallel.hpp"
#include "idf/rng.hpp"

namespace idf::synth {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

void IrisIdentity::validate() const {
    if (!(band_lo_cpp > 0 && band_lo_cpp < band_hi_cpp && band_hi_cpp <= 0.5))
        throw std::invalid_argument("IrisIdentity: need 0 < band_lo < band_hi <= 0.5");
    if (!(contrast > 0 && contrast <= 1))
        throw std::invalid_argument("IrisIdentity: contrast must be in (0, 1]");
}

void EyeScene::validate() const {
    if (image_w <= 0 || image_h <= 0) throw std::invalid_argument("EyeScene: empty image");
    if (pupil_radius_px <= 0 || iris_radius_px <= 0)
        throw std::invalid_argument("EyeScene: radii must be positive");
    if (pupil_radius_px >= iris_radius_px)
        throw std::invalid_argument("EyeScene: pupil radius must be below iris radius");
    if (pupil_cx - iris_radius_px < 0 || pupil_cx + iris_radius_px >= image_w ||
        pupil_cy - iris_radius_px < 0 || pupil_cy + iris_radius_px >= image_h)
        throw std::invalid_argument("EyeScene: circles must fit within the image");
    if (eyelid_coverage < 0 || eyelid_coverage >= 0.75)
        throw std::invalid_argument("EyeScene: eyelid coverage must be in [0, 0.75)");
    if (sensor_noise_sigma < 0)
        throw std::invalid_argument("EyeScene: noise sigma must be >= 0");
}

void DatasetSpec::validate() const {
    if (n_identities < 2) throw std::invalid_argument("DatasetSpec: need at least 2 identities");
    if (frames_per_config < 2) throw std::invalid_argument("DatasetSpec: need at least 2 frames");
    if (sigma_levels.empty()) throw std::invalid_argument("DatasetSpec: no sigma levels");
    for (double s : sigma_levels)
        if (s < 0) throw std::invalid_argument("DatasetSpec: negative sigma level");
    if (texture_size < 64) throw std::invalid_argument("DatasetSpec: texture size below 64");
    scene.validate();
}

ImageF generate_iris_texture(const IrisIdentity& identity, int size) {
    identity.validate();
    if (size < 64) throw std::invalid_argument("generate_iris_texture: size must be >= 64");

    Rng rng(identity.texture_seed);
    std::vector<std::complex<double>> spec(static_cast<size_t>(size) * size);
    for (auto& z : spec) z = rng.gaussian();

    dft::transform2d(spec, size, size, false);

    const double lo = identity.band_lo_cpp, hi = identity.band_hi_cpp;
    for (int y = 0; y < size; ++y) {
        double fv = static_cast<double>(std::min(y, size - y)) / size;
        for (int x = 0; x < size; ++x) {
            double fu = static_cast<double>(std::min(x, size - x)) / size;  // angular axis
            double rad = std::sqrt(fu * fu + fv * fv);
            bool keep = rad >= lo && rad <= hi && fu >= lo;
            if (!keep) spec[static_cast<size_t>(y) * size + x] = 0.0;
        }
    }

    dft::transform2d(spec, size, size, true);

    ImageF tex(size, size);
    double mean = 0.0;
    for (size_t i = 0; i < tex.v.size(); ++i) {
        tex.v[i] = spec[i].real();
        mean += tex.v[i];
    }
    mean /= static_cast<double>(tex.v.size());
    double var = 0.0;
    for (auto& t : tex.v) {
        t -= mean;
        var += t * t;
    }
    var /= static_cast<double>(tex.v.size());
    double inv_sd = var > 0 ? 1.0 / std::sqrt(var) : 0.0;
    for (auto& t : tex.v) t *= inv_sd;
    return tex;
}

namespace {

// cap area of circle (center cy, radius R) above the horizontal line y = t
double cap_area(double cy, double R, double t) {
    double d = cy - t;
    if (d >= R) return 0.0;
    if (d <= -R) return 3.14159265358979323846 * R * R;
    return R * R * std::acos(d / R) - d * std::sqrt(R * R - d * d);
}

double sample_polar(const ImageF& tex, double u, double v) {
    const int n = tex.width;
    u -= std::floor(u / n) * n;  // wrap angular axis
    if (v < 0) v = 0;
    if (v > tex.height - 1.000001) v = tex.height - 1.000001;
    int u0 = static_cast<int>(u);
    int v0 = static_cast<int>(v);
    if (u0 >= n) u0 = n - 1;
    int u1 = (u0 + 1) % n;
    double fu = u - u0, fv = v - v0;
    return tex.at(u0, v0) * (1 - fu) * (1 - fv) + tex.at(u1, v0) * fu * (1 - fv) +
           tex.at(u0, v0 + 1) * (1 - fu) * fv + tex.at(u1, v0 + 1) * fu * fv;
}

}  // namespace

double eyelid_chord_y(const EyeScene& scene) {
    double annulus = cap_area(scene.pupil_cy, scene.iris_radius_px, scene.pupil_cy + scene.iris_radius_px) -
                     cap_area(scene.pupil_cy, scene.pupil_radius_px, scene.pupil_cy + scene.pupil_radius_px);
    double target = scene.eyelid_coverage * annulus;
    double lo = scene.pupil_cy - scene.iris_radius_px;
    double hi = scene.pupil_cy + scene.iris_radius_px;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        double a = cap_area(scene.pupil_cy, scene.iris_radius_px, mid) -
                   cap_area(scene.pupil_cy, scene.pupil_radius_px, mid);
        if (a < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

EyeImage render_eye_image(const IrisIdentity& identity, const EyeScene& scene,
                          uint64_t frame_seed, const ImageF* texture,
                          const RenderPalette& palette) {
    identity.validate();
    scene.validate();
    ImageF own_tex;
    if (!texture) {
        own_tex = generate_iris_texture(identity, 256);
        texture = &own_tex;
    }

    const double amp = identity.contrast * 255.0;
    ImageF img(scene.image_w, scene.image_h, palette.sclera_gray);
    const double rp = scene.pupil_radius_px, rl = scene.iris_radius_px;
    for (int y = 0; y < scene.image_h; ++y) {
        double dy = y - scene.pupil_cy;
        for (int x = 0; x < scene.image_w; ++x) {
            double dx = x - scene.pupil_cx;
            double r = std::sqrt(dx * dx + dy * dy);
            if (r < rp) {
                img.at(x, y) = palette.pupil_gray;
            } else if (r < rl) {
                double theta = std::atan2(dy, dx);
                if (theta < 0) theta += kTwoPi;
                double rho = (r - rp) / (rl - rp);
                double u = theta / kTwoPi * texture->width;
                double v = rho * palette.radial_span_px;
                img.at(x, y) = palette.iris_gray + amp * sample_polar(*texture, u, v);
            }
        }
    }

    if (scene.eyelid_coverage > 0) {
        double chord = eyelid_chord_y(scene);
        int y_end = static_cast<int>(std::ceil(chord));
        if (y_end > scene.image_h) y_end = scene.image_h;
        for (int y = 0; y < y_end; ++y)
            for (int x = 0; x < scene.image_w; ++x)
                if (y < chord) img.at(x, y) = palette.eyelid_gray;
    }

    if (scene.sensor_noise_sigma > 0) {
        Rng rng(frame_seed);
        for (auto& p : img.v) p += scene.sensor_noise_sigma * rng.gaussian();
    }

    EyeImage out = to_eight_bit(img);
    EyeTruth truth;
    truth.identity_id = identity.identity_id;
    truth.pupil = {scene.pupil_cx, scene.pupil_cy, rp};
    truth.limbus = {scene.pupil_cx, scene.pupil_cy, rl};
    truth.eyelid_coverage = scene.eyelid_coverage;
    out.truth = truth;
    return out;
}

Manifest generate_dataset(const DatasetSpec& spec, uint64_t master_seed,
                          const std::string& dir, int jobs) {
    spec.validate();
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(dir) / "images", ec);
    if (ec) throw IoError("generate_dataset: cannot create " + dir + ": " + ec.message());

    // per-identity textures (identity seed derives from the master seed)
    std::vector<IrisIdentity> identities(static_cast<size_t>(spec.n_identities));
    std::vector<ImageF> textures(identities.size());
    for (int i = 0; i < spec.n_identities; ++i) {
        IrisIdentity id;
        id.identity_id = i;
        id.texture_seed = mix64(master_seed, 0x7465787475726573ULL, static_cast<uint64_t>(i), 0);
        id.band_lo_cpp = spec.band_lo_cpp;
        id.band_hi_cpp = spec.band_hi_cpp;
        id.contrast = spec.contrast;
        identities[static_cast<size_t>(i)] = id;
    }
    parallel_for(spec.n_identities, jobs, [&](int i) {
        textures[static_cast<size_t>(i)] =
            generate_iris_texture(identities[static_cast<size_t>(i)], spec.texture_size);
    });

    const int n_sigma = static_cast<int>(spec.sigma_levels.size());
    const int total = spec.n_identities * n_sigma * spec.frames_per_config;
    Manifest m;
    m.master_seed = master_seed;
    m.n_identities = spec.n_identities;
    m.frames_per_config = spec.frames_per_config;
    m.sigma_levels = spec.sigma_levels;
    m.frames.resize(static_cast<size_t>(total));

    parallel_for(total, jobs, [&](int t) {
        int frame = t % spec.frames_per_config;
        int si = (t / spec.frames_per_config) % n_sigma;
        int id = t / (spec.frames_per_config * n_sigma);
        uint64_t seed = mix64(master_seed, static_cast<uint64_t>(id),
                              static_cast<uint64_t>(si), static_cast<uint64_t>(frame));
        Rng jitter(mix64(seed, 0x6a69747465720000ULL));

        EyeScene sc = spec.scene;
        sc.pupil_cx += jitter.uniform_int(-spec.center_jitter_px, spec.center_jitter_px);
        sc.pupil_cy += jitter.uniform_int(-spec.center_jitter_px, spec.center_jitter_px);
        // identity-specific base pupil size plus per-frame jitter
        sc.pupil_radius_px += (id % 5) - 2 +
                              jitter.uniform_int(-spec.radius_jitter_px, spec.radius_jitter_px);

        EyeImage img = render_eye_image(identities[static_cast<size_t>(id)], sc, seed,
                                        &textures[static_cast<size_t>(id)], spec.palette);
        double sigma = spec.sigma_levels[static_cast<size_t>(si)];
        if (sigma > 0) img = optics::gaussian_blur(img, sigma);

        char name[64];
        std::snprintf(name, sizeof name, "images/id%02d_s%d_f%03d.pgm", id, si, frame);
        write_pgm((fs::path(dir) / name).string(), img);

        FrameRecord rec;
        rec.path = name;
        rec.identity_id = id;
        rec.sigma_index = si;
        rec.sigma_px = sigma;
        rec.frame_index = frame;
        rec.frame_seed = seed;
        rec.truth = *img.truth;
        m.frames[static_cast<size_t>(t)] = rec;
    });

    write_manifest((fs::path(dir) / "manifest.txt").string(), m);
    return m;
}

}  // namespace idf::synth
