#include "idf/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "idf/errors.hpp"

namespace idf {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& scope, const std::set<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key()))
            throw SchemaError("config: unknown key '" + scope + it.key() + "'");
    }
}

template <typename T>
void get(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) {
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception& e) {
            throw SchemaError(std::string("config: bad value for '") + key + "': " + e.what());
        }
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("config: parse error: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("config: top level must be an object");

    ExperimentConfig cfg;
    reject_unknown(j, "", {"master_seed", "output_dir", "jobs", "dataset", "optics", "iris",
                           "threshold", "gaze", "sigma_levels"});
    get(j, "master_seed", cfg.master_seed);
    get(j, "output_dir", cfg.output_dir);
    get(j, "jobs", cfg.jobs);
    get(j, "sigma_levels", cfg.dataset.sigma_levels);

    if (j.contains("dataset")) {
        const json& d = j.at("dataset");
        reject_unknown(d, "dataset.",
                       {"identities", "frames_per_config", "image_width", "image_height",
                        "pupil_radius_px", "iris_radius_px", "center_jitter_px", "radius_jitter_px",
                        "eyelid_coverage", "sensor_noise_sigma", "contrast", "texture_size",
                        "band_lo_cpp", "band_hi_cpp", "texture_radial_span_px"});
        get(d, "identities", cfg.dataset.n_identities);
        get(d, "frames_per_config", cfg.dataset.frames_per_config);
        get(d, "image_width", cfg.dataset.scene.image_w);
        get(d, "image_height", cfg.dataset.scene.image_h);
        get(d, "pupil_radius_px", cfg.dataset.scene.pupil_radius_px);
        get(d, "iris_radius_px", cfg.dataset.scene.iris_radius_px);
        get(d, "center_jitter_px", cfg.dataset.center_jitter_px);
        get(d, "radius_jitter_px", cfg.dataset.radius_jitter_px);
        get(d, "eyelid_coverage", cfg.dataset.scene.eyelid_coverage);
        get(d, "sensor_noise_sigma", cfg.dataset.scene.sensor_noise_sigma);
        get(d, "contrast", cfg.dataset.contrast);
        get(d, "texture_size", cfg.dataset.texture_size);
        get(d, "band_lo_cpp", cfg.dataset.band_lo_cpp);
        get(d, "band_hi_cpp", cfg.dataset.band_hi_cpp);
        get(d, "texture_radial_span_px", cfg.dataset.palette.radial_span_px);
        cfg.dataset.scene.pupil_cx = cfg.dataset.scene.image_w / 2.0;
        cfg.dataset.scene.pupil_cy = cfg.dataset.scene.image_h / 2.0;
    }

    if (j.contains("optics")) {
        const json& o = j.at("optics");
        reject_unknown(o, "optics.",
                       {"focal_length_mm", "lens_diameter_mm", "pixel_pitch_mm",
                        "reference_distance_mm", "iris_width_mm"});
        double f = cfg.optics.focal_length_mm, D = cfg.optics.lens_diameter_mm;
        double pitch = cfg.optics.pixel_pitch_mm, w = cfg.optics.iris_width_mm;
        double ref = cfg.reference_distance_mm;
        get(o, "focal_length_mm", f);
        get(o, "lens_diameter_mm", D);
        get(o, "pixel_pitch_mm", pitch);
        get(o, "reference_distance_mm", ref);
        get(o, "iris_width_mm", w);
        try {
            cfg.optics = optics::OpticalConfig::from_reference(f, D, pitch, ref, w);
        } catch (const std::invalid_argument& e) {
            throw SchemaError(std::string("config: optics: ") + e.what());
        }
        cfg.reference_distance_mm = ref;
    }

    if (j.contains("iris")) {
        const json& i = j.at("iris");
        reject_unknown(i, "iris.",
                       {"radial_samples", "angular_samples", "log_gabor_f0_cpp",
                        "log_gabor_sigma_over_f0", "max_shift_columns", "hd_auth",
                        "oracle_segmentation"});
        get(i, "radial_samples", cfg.iris.radial_samples);
        get(i, "angular_samples", cfg.iris.angular_samples);
        get(i, "log_gabor_f0_cpp", cfg.iris.log_gabor_f0_cpp);
        get(i, "log_gabor_sigma_over_f0", cfg.iris.log_gabor_sigma_over_f0);
        get(i, "max_shift_columns", cfg.iris.max_shift_columns);
        get(i, "hd_auth", cfg.iris.hd_auth);
        get(i, "oracle_segmentation", cfg.iris.oracle_segmentation);
    }

    if (j.contains("threshold")) {
        const json& t = j.at("threshold");
        reject_unknown(t, "threshold.", {"max_fpr", "resolution"});
        get(t, "max_fpr", cfg.threshold.max_fpr);
        get(t, "resolution", cfg.threshold.resolution);
    }

    if (j.contains("gaze")) {
        const json& g = j.at("gaze");
        reject_unknown(g, "gaze.",
                       {"screen_distance_mm", "screen_pixel_mm", "target_span_deg",
                        "frames_per_target", "tremor_px", "sigma_levels", "distance_sweep_mm"});
        get(g, "screen_distance_mm", cfg.gaze.screen_distance_mm);
        get(g, "screen_pixel_mm", cfg.gaze.screen_pixel_mm);
        get(g, "target_span_deg", cfg.gaze.target_span_deg);
        get(g, "frames_per_target", cfg.gaze.frames_per_target);
        get(g, "tremor_px", cfg.gaze.tremor_px);
        get(g, "sigma_levels", cfg.gaze.sigma_levels);
        get(g, "distance_sweep_mm", cfg.gaze.distance_sweep_mm);
    }

    try {
        cfg.dataset.validate();
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("config: dataset: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw SchemaError("config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string resolve_output_dir(const ExperimentConfig& cfg, const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    if (const char* env = std::getenv("IRISDEFOCUS_OUT"); env && *env) return env;
    return "out";
}

}  // namespace idf
