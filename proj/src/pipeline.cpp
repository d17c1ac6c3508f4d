#include "idf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include "idf/csv.hpp"
#include "idf/errors.hpp"
#include "idf/logistic.hpp"
#include "idf/manifest.hpp"
#include "idf/optics.hpp"
#include "idf/parallel.hpp"
#include "idf/rng.hpp"
#include "idf/svg.hpp"

namespace idf::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string report_dir(const std::string& dir) {
    fs::path p = fs::path(dir) / "report";
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create report directory " + p.string());
    return p.string();
}

std::string nan_or(const std::optional<double>& v) {
    if (!v) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
}

}  // namespace

synth::Manifest run_synth(const ExperimentConfig& cfg, const std::string& dir) {
    return synth::generate_dataset(cfg.dataset, cfg.master_seed, dir, resolve_jobs(cfg.jobs));
}

// ---------------------------------------------------------------------------
// auth
// ---------------------------------------------------------------------------

AuthReport run_auth(const ExperimentConfig& cfg, const std::string& dir, bool save_codes) {
    fs::path manifest_path = fs::path(dir) / "manifest.txt";
    if (!fs::exists(manifest_path))
        throw SchemaError("auth: dataset manifest not found at " + manifest_path.string());
    synth::Manifest m = synth::read_manifest(manifest_path.string());
    if (m.frames.empty()) throw SchemaError("auth: dataset is empty");

    const int jobs = resolve_jobs(cfg.jobs);
    const int n_frames = static_cast<int>(m.frames.size());
    const int n_sigma = static_cast<int>(m.sigma_levels.size());
    const int n_id = m.n_identities;

    struct Encoded {
        std::optional<iris::IrisCode> code;
        bool seg_failed = false;
    };
    std::vector<Encoded> enc(static_cast<size_t>(n_frames));

    parallel_for(n_frames, jobs, [&](int i) {
        const auto& rec = m.frames[static_cast<size_t>(i)];
        EyeImage img = read_pgm((fs::path(dir) / rec.path).string());
        img.truth = rec.truth;
        iris::IrisBoundary boundary;
        try {
            boundary = cfg.iris.oracle_segmentation ? iris::boundary_from_truth(img)
                                                    : iris::segment_iris(img);
        } catch (const SegmentationFailed&) {
            enc[static_cast<size_t>(i)].seg_failed = true;  // frame skipped
            return;
        }
        iris::NormalizedIris norm =
            iris::normalize(img, boundary, cfg.iris.radial_samples, cfg.iris.angular_samples);
        enc[static_cast<size_t>(i)].code =
            iris::encode(norm, cfg.iris.log_gabor_f0_cpp, cfg.iris.log_gabor_sigma_over_f0);
    });

    if (save_codes) {
        fs::path codes_dir = fs::path(dir) / "codes";
        std::error_code ec;
        fs::create_directories(codes_dir, ec);
        if (ec) throw IoError("auth: cannot create " + codes_dir.string());
        for (int i = 0; i < n_frames; ++i) {
            if (!enc[static_cast<size_t>(i)].code) continue;
            fs::path name = fs::path(m.frames[static_cast<size_t>(i)].path).filename();
            name.replace_extension(".iriscode");
            iris::write_iris_code((codes_dir / name).string(), *enc[static_cast<size_t>(i)].code,
                                  static_cast<uint8_t>(cfg.iris.max_shift_columns));
        }
    }

    // group usable codes by (sigma, identity)
    std::vector<std::vector<std::vector<const iris::IrisCode*>>> groups(
        static_cast<size_t>(n_sigma),
        std::vector<std::vector<const iris::IrisCode*>>(static_cast<size_t>(n_id)));
    std::vector<int> seg_failed(static_cast<size_t>(n_sigma), 0);
    std::vector<int> excluded(static_cast<size_t>(n_sigma), 0);
    for (int i = 0; i < n_frames; ++i) {
        const auto& rec = m.frames[static_cast<size_t>(i)];
        auto& e = enc[static_cast<size_t>(i)];
        if (e.seg_failed) {
            ++seg_failed[static_cast<size_t>(rec.sigma_index)];
            continue;
        }
        if (!e.code) continue;
        if (iris::exclude_noisy(*e.code)) {
            ++excluded[static_cast<size_t>(rec.sigma_index)];
            continue;
        }
        groups[static_cast<size_t>(rec.sigma_index)][static_cast<size_t>(rec.identity_id)]
            .push_back(&*e.code);
    }

    AuthReport rep;
    rep.hd_auth = cfg.iris.hd_auth;
    rep.rows.resize(static_cast<size_t>(n_sigma));
    rep.crr_identity.assign(static_cast<size_t>(n_sigma),
                            std::vector<std::optional<double>>(static_cast<size_t>(n_id)));

    // pairwise HD lists per sigma
    struct SigmaPairs {
        std::vector<double> intra;                 // all intra pairs
        std::vector<std::vector<double>> by_id;    // intra split by identity
        std::vector<double> inter;
        std::vector<std::vector<double>> inter_cells;  // n_id x n_id means accumulators
        std::vector<long> inter_counts;
    };
    std::vector<SigmaPairs> pairs(static_cast<size_t>(n_sigma));

    for (int si = 0; si < n_sigma; ++si) {
        auto& g = groups[static_cast<size_t>(si)];
        auto& sp = pairs[static_cast<size_t>(si)];
        sp.by_id.resize(static_cast<size_t>(n_id));
        sp.inter_cells.assign(static_cast<size_t>(n_id) * n_id, {});
        sp.inter_counts.assign(static_cast<size_t>(n_id) * n_id, 0);

        // flatten codes of this sigma level
        std::vector<const iris::IrisCode*> codes;
        std::vector<int> owner;
        for (int id = 0; id < n_id; ++id)
            for (const auto* c : g[static_cast<size_t>(id)]) {
                codes.push_back(c);
                owner.push_back(id);
            }
        const int n = static_cast<int>(codes.size());
        if (n < 2) continue;

        std::vector<iris::ShiftedCode> shifted;
        shifted.reserve(static_cast<size_t>(n));
        for (const auto* c : codes) shifted.emplace_back(*c, cfg.iris.max_shift_columns);

        // upper-triangle HDs, parallel over rows, deterministic aggregation
        std::vector<std::vector<std::pair<int, double>>> rows_hd(static_cast<size_t>(n));
        parallel_for(n, jobs, [&](int a) {
            auto& out = rows_hd[static_cast<size_t>(a)];
            for (int b = a + 1; b < n; ++b) {
                auto r = shifted[static_cast<size_t>(b)].match(*codes[static_cast<size_t>(a)],
                                                               cfg.iris.hd_auth);
                if (r) out.emplace_back(b, r->hd);
            }
        });
        for (int a = 0; a < n; ++a) {
            for (auto [b, hd] : rows_hd[static_cast<size_t>(a)]) {
                int ia = owner[static_cast<size_t>(a)], ib = owner[static_cast<size_t>(b)];
                if (ia == ib) {
                    sp.intra.push_back(hd);
                    sp.by_id[static_cast<size_t>(ia)].push_back(hd);
                } else {
                    sp.inter.push_back(hd);
                }
                size_t cell = static_cast<size_t>(std::min(ia, ib)) * n_id + std::max(ia, ib);
                sp.inter_cells[cell].push_back(hd);
                ++sp.inter_counts[cell];
            }
        }
    }

    // threshold from the in-focus distributions (sigma index with level 0 if
    // present, else the lowest level)
    int si0 = 0;
    for (int si = 0; si < n_sigma; ++si)
        if (m.sigma_levels[static_cast<size_t>(si)] <
            m.sigma_levels[static_cast<size_t>(si0)])
            si0 = si;
    const auto& p0 = pairs[static_cast<size_t>(si0)];
    if (p0.intra.empty() || p0.inter.empty())
        throw UndefinedCrr("auth: in-focus distributions are empty; cannot select a threshold");
    rep.threshold =
        iris::select_threshold(p0.intra, p0.inter, cfg.threshold.max_fpr, cfg.threshold.resolution);
    rep.intra_infocus = p0.intra;
    rep.inter_infocus = p0.inter;
    for (double v : p0.inter)
        if (v < rep.threshold.threshold) ++rep.pair_false_positives_infocus;

    // per-sigma rows, matrices, identity CRRs
    for (int si = 0; si < n_sigma; ++si) {
        auto& sp = pairs[static_cast<size_t>(si)];
        auto& row = rep.rows[static_cast<size_t>(si)];
        row.sigma_px = m.sigma_levels[static_cast<size_t>(si)];
        row.n_segmentation_failed = seg_failed[static_cast<size_t>(si)];
        row.n_excluded = excluded[static_cast<size_t>(si)];
        int n_codes = 0;
        for (int id = 0; id < n_id; ++id)
            n_codes += static_cast<int>(groups[static_cast<size_t>(si)][static_cast<size_t>(id)].size());
        row.n_codes = n_codes;
        row.intra_pairs = static_cast<long>(sp.intra.size());
        row.inter_pairs = static_cast<long>(sp.inter.size());
        if (!sp.intra.empty()) {
            long m1 = 0, m2 = 0;
            double acc = 0;
            for (double v : sp.intra) {
                acc += v;
                if (v < rep.threshold.threshold) ++m1;
                if (v < cfg.iris.hd_auth) ++m2;
            }
            row.crr_at_selected = 100.0 * static_cast<double>(m1) / static_cast<double>(sp.intra.size());
            row.crr_at_hd_auth = 100.0 * static_cast<double>(m2) / static_cast<double>(sp.intra.size());
            row.mean_intra_hd = acc / static_cast<double>(sp.intra.size());
        }
        if (!sp.inter.empty()) {
            double acc = 0;
            for (double v : sp.inter) {
                acc += v;
                row.min_inter_hd = std::min(row.min_inter_hd, v);
            }
            row.mean_inter_hd = acc / static_cast<double>(sp.inter.size());
        }
        for (int id = 0; id < n_id; ++id) {
            const auto& lst = sp.by_id[static_cast<size_t>(id)];
            if (lst.empty()) continue;
            long mm = 0;
            for (double v : lst)
                if (v < rep.threshold.threshold) ++mm;
            rep.crr_identity[static_cast<size_t>(si)][static_cast<size_t>(id)] =
                100.0 * static_cast<double>(mm) / static_cast<double>(lst.size());
        }

        iris::MeanHdMatrix mat;
        mat.n = n_id;
        mat.mean_hd.assign(static_cast<size_t>(n_id) * n_id, std::nullopt);
        for (int i = 0; i < n_id; ++i) {
            for (int jj = i; jj < n_id; ++jj) {
                const auto& cell = sp.inter_cells[static_cast<size_t>(i) * n_id + jj];
                if (cell.empty()) continue;
                double acc = 0;
                for (double v : cell) acc += v;
                double mean = acc / static_cast<double>(cell.size());
                mat.mean_hd[static_cast<size_t>(i) * n_id + jj] = mean;
                mat.mean_hd[static_cast<size_t>(jj) * n_id + i] = mean;
                if (i != jj && mean < rep.threshold.threshold) ++rep.matrix_false_positives;
            }
        }
        rep.matrices.push_back(std::move(mat));
    }

    // ---- CSV reports ----
    std::string rd = report_dir(dir);
    {
        csv::Writer w(rd + "/crr_by_sigma.csv",
                      {"sigma_px", "codes", "seg_failed", "excluded", "intra_pairs", "inter_pairs",
                       "crr_selected_pct", "crr_hd_auth_pct", "mean_intra_hd", "mean_inter_hd",
                       "min_inter_hd"});
        for (const auto& r : rep.rows) {
            w.field(r.sigma_px)
                .field(r.n_codes)
                .field(r.n_segmentation_failed)
                .field(r.n_excluded)
                .field(r.intra_pairs)
                .field(r.inter_pairs)
                .field(nan_or(r.crr_at_selected))
                .field(nan_or(r.crr_at_hd_auth))
                .field(r.mean_intra_hd)
                .field(r.mean_inter_hd)
                .field(r.min_inter_hd);
            w.end_row();
        }
    }
    {
        csv::Writer w(rd + "/threshold.csv",
                      {"threshold", "tpr", "fpr", "tnr", "fnr", "hd_auth",
                       "pair_false_positives_infocus", "matrix_false_positives"});
        w.field(rep.threshold.threshold)
            .field(rep.threshold.tpr)
            .field(rep.threshold.fpr)
            .field(rep.threshold.tnr)
            .field(rep.threshold.fnr)
            .field(rep.hd_auth)
            .field(rep.pair_false_positives_infocus)
            .field(rep.matrix_false_positives);
        w.end_row();
    }
    {
        csv::Writer w(rd + "/crr_by_identity.csv", {"sigma_px", "identity", "crr_selected_pct"});
        for (int si = 0; si < n_sigma; ++si)
            for (int id = 0; id < n_id; ++id) {
                w.field(m.sigma_levels[static_cast<size_t>(si)])
                    .field(id)
                    .field(nan_or(rep.crr_identity[static_cast<size_t>(si)][static_cast<size_t>(id)]));
                w.end_row();
            }
    }
    for (int si = 0; si < n_sigma; ++si) {
        char name[64];
        std::snprintf(name, sizeof name, "/hd_matrix_s%d.csv", si);
        std::vector<std::string> hdr = {"identity"};
        for (int id = 0; id < n_id; ++id) hdr.push_back("id" + std::to_string(id));
        csv::Writer w(rd + name, hdr);
        for (int i = 0; i < n_id; ++i) {
            w.field(i);
            for (int jj = 0; jj < n_id; ++jj)
                w.field(nan_or(rep.matrices[static_cast<size_t>(si)].at(i, jj)));
            w.end_row();
        }
    }
    {
        // binned in-focus HD histogram for the plot stage
        const int bins = 50;
        std::vector<long> hi(bins, 0), he(bins, 0);
        for (double v : rep.intra_infocus)
            ++hi[std::min(bins - 1, static_cast<int>(v * bins))];
        for (double v : rep.inter_infocus)
            ++he[std::min(bins - 1, static_cast<int>(v * bins))];
        csv::Writer w(rd + "/hd_histogram.csv", {"bin_lo", "intra_count", "inter_count"});
        for (int bIdx = 0; bIdx < bins; ++bIdx) {
            w.field(static_cast<double>(bIdx) / bins).field(hi[static_cast<size_t>(bIdx)]).field(he[static_cast<size_t>(bIdx)]);
            w.end_row();
        }
    }
    {
        // separability analysis: iris-band attenuation vs tracking-feature
        // energy retention at each blur level
        optics::SeparabilityModel sep;
        sep.band_lo_cpp = cfg.dataset.band_lo_cpp;
        sep.band_hi_cpp = std::min(0.5, cfg.dataset.band_hi_cpp);
        csv::Writer w(rd + "/separability.csv",
                      {"sigma_px", "attenuation_at_band_lo", "feature_energy_retained", "epsilon"});
        for (double s : m.sigma_levels) {
            w.field(s)
                .field(optics::spectral_attenuation(s, sep.band_lo_cpp))
                .field(sep.feature_energy_retained(s))
                .field(sep.epsilon);
            w.end_row();
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// gaze
// ---------------------------------------------------------------------------

namespace {

struct GazeSim {
    std::vector<gazeutil::Point> targets_px;  // screen coordinates
    double eye_gain = 0.0;                    // eye px per screen px
};

GazeSim make_gaze_sim(const ExperimentConfig& cfg) {
    GazeSim sim;
    double half_deg = cfg.gaze.target_span_deg / 2.0;
    double half_px = std::tan(half_deg * kPi / 180.0) * cfg.gaze.screen_distance_mm /
                     cfg.gaze.screen_pixel_mm;
    for (int gy = -1; gy <= 1; ++gy)
        for (int gx = -1; gx <= 1; ++gx)
            sim.targets_px.push_back({gx * half_px, gy * half_px});
    sim.eye_gain = 10.0 / half_px;  // +-10 px of pupil travel across the grid
    return sim;
}

}  // namespace

GazeReport run_gaze(const ExperimentConfig& cfg, const std::string& dir) {
    GazeReport rep;
    const int jobs = resolve_jobs(cfg.jobs);
    GazeSim sim = make_gaze_sim(cfg);
    gazeutil::ScreenGeometry geom{cfg.gaze.screen_distance_mm, cfg.gaze.screen_pixel_mm};

    synth::IrisIdentity identity;
    identity.identity_id = 0;
    identity.texture_seed = mix64(cfg.master_seed, 0x7465787475726573ULL, 0, 0);
    identity.band_lo_cpp = cfg.dataset.band_lo_cpp;
    identity.band_hi_cpp = cfg.dataset.band_hi_cpp;
    identity.contrast = cfg.dataset.contrast;
    ImageF texture = synth::generate_iris_texture(identity, cfg.dataset.texture_size);

    const int n_targets = static_cast<int>(sim.targets_px.size());
    const int fpt = cfg.gaze.frames_per_target;

    for (size_t si = 0; si < cfg.gaze.sigma_levels.size(); ++si) {
        double sigma = cfg.gaze.sigma_levels[si];
        GazeSigmaRow row;
        row.sigma_px = sigma;

        const int total = n_targets * fpt;
        std::vector<gazeutil::PupilObservation> obs(static_cast<size_t>(total));
        std::vector<gazeutil::Point> truth_target(static_cast<size_t>(total));
        parallel_for(total, jobs, [&](int t) {
            int target = t / fpt;
            int frame = t % fpt;
            uint64_t seed = mix64(cfg.master_seed, 0x67617a65ULL ^ static_cast<uint64_t>(si),
                                  static_cast<uint64_t>(target), static_cast<uint64_t>(frame));
            Rng rng(seed);
            synth::EyeScene sc = cfg.dataset.scene;
            sc.pupil_cx += sim.targets_px[static_cast<size_t>(target)].x * sim.eye_gain +
                           cfg.gaze.tremor_px * rng.gaussian();
            sc.pupil_cy += sim.targets_px[static_cast<size_t>(target)].y * sim.eye_gain +
                           cfg.gaze.tremor_px * rng.gaussian();
            EyeImage img = synth::render_eye_image(identity, sc, seed, &texture, cfg.dataset.palette);
            if (sigma > 0) img = optics::gaussian_blur(img, sigma);
            obs[static_cast<size_t>(t)] = gazeutil::detect_pupil(img);
            truth_target[static_cast<size_t>(t)] = sim.targets_px[static_cast<size_t>(target)];
        });

        row.detection_rate = gazeutil::detection_rate(obs);

        // calibrate on per-target mean detected centers
        std::vector<gazeutil::Point> calib_pupil, calib_target;
        for (int target = 0; target < n_targets; ++target) {
            double sx = 0, sy = 0;
            int n = 0;
            for (int frame = 0; frame < fpt; ++frame) {
                const auto& o = obs[static_cast<size_t>(target * fpt + frame)];
                if (!o.found) continue;
                sx += o.center.x;
                sy += o.center.y;
                ++n;
            }
            if (n == 0) continue;
            calib_pupil.push_back({sx / n, sy / n});
            calib_target.push_back(sim.targets_px[static_cast<size_t>(target)]);
        }
        try {
            gazeutil::GazeMapping map = gazeutil::calibrate_polynomial(calib_pupil, calib_target);
            row.calibration_residual_px = map.residual_rms;
            double err_acc = 0;
            int err_n = 0;
            double prec_acc = 0;
            int prec_n = 0;
            for (int target = 0; target < n_targets; ++target) {
                std::vector<gazeutil::Point> gaze;
                for (int frame = 0; frame < fpt; ++frame) {
                    const auto& o = obs[static_cast<size_t>(target * fpt + frame)];
                    if (!o.found) continue;
                    gazeutil::Point g = map.map(o.center);
                    gaze.push_back(g);
                    err_acc += gazeutil::angular_error(g, sim.targets_px[static_cast<size_t>(target)], geom);
                    ++err_n;
                }
                if (gaze.size() >= 2) {
                    prec_acc += gazeutil::precision_rms(gaze, geom);
                    ++prec_n;
                }
            }
            row.mean_error_deg = err_n > 0 ? err_acc / err_n : 0.0;
            row.precision_deg = prec_n > 0 ? prec_acc / prec_n : 0.0;
            row.ok = err_n > 0;
        } catch (const CalibrationFailed&) {
            row.ok = false;  // per-sigma row marked failed
        }
        rep.rows.push_back(row);
    }

    // distance sweep: enrollment at the reference distance, probes blurred by
    // the defocus the lens model predicts for each distance
    if (!cfg.gaze.distance_sweep_mm.empty()) {
        const int sweep_ids = std::min(4, cfg.dataset.n_identities);
        const int sweep_frames = 6;
        std::vector<synth::IrisIdentity> ids(static_cast<size_t>(sweep_ids));
        std::vector<ImageF> texs(ids.size());
        for (int i = 0; i < sweep_ids; ++i) {
            ids[static_cast<size_t>(i)].identity_id = i;
            ids[static_cast<size_t>(i)].texture_seed =
                mix64(cfg.master_seed, 0x7465787475726573ULL, static_cast<uint64_t>(i), 0);
            ids[static_cast<size_t>(i)].band_lo_cpp = cfg.dataset.band_lo_cpp;
            ids[static_cast<size_t>(i)].band_hi_cpp = cfg.dataset.band_hi_cpp;
            ids[static_cast<size_t>(i)].contrast = cfg.dataset.contrast;
            texs[static_cast<size_t>(i)] =
                synth::generate_iris_texture(ids[static_cast<size_t>(i)], cfg.dataset.texture_size);
        }

        auto make_codes = [&](double sigma, uint64_t tag) {
            std::vector<std::vector<iris::IrisCode>> codes(static_cast<size_t>(sweep_ids));
            for (int i = 0; i < sweep_ids; ++i) {
                for (int fIdx = 0; fIdx < sweep_frames; ++fIdx) {
                    uint64_t seed = mix64(cfg.master_seed, tag, static_cast<uint64_t>(i),
                                          static_cast<uint64_t>(fIdx));
                    Rng rng(mix64(seed, 0x6a69747465720000ULL));
                    synth::EyeScene sc = cfg.dataset.scene;
                    sc.pupil_cx += rng.uniform_int(-cfg.dataset.center_jitter_px, cfg.dataset.center_jitter_px);
                    sc.pupil_cy += rng.uniform_int(-cfg.dataset.center_jitter_px, cfg.dataset.center_jitter_px);
                    sc.pupil_radius_px += rng.uniform_int(-cfg.dataset.radius_jitter_px, cfg.dataset.radius_jitter_px);
                    EyeImage img = synth::render_eye_image(ids[static_cast<size_t>(i)], sc, seed,
                                                           &texs[static_cast<size_t>(i)], cfg.dataset.palette);
                    if (sigma > 0) img = optics::gaussian_blur(img, sigma);
                    try {
                        iris::IrisBoundary b = cfg.iris.oracle_segmentation
                                                   ? iris::boundary_from_truth(img)
                                                   : iris::segment_iris(img);
                        iris::NormalizedIris norm = iris::normalize(img, b, cfg.iris.radial_samples,
                                                                    cfg.iris.angular_samples);
                        codes[static_cast<size_t>(i)].push_back(iris::encode(
                            norm, cfg.iris.log_gabor_f0_cpp, cfg.iris.log_gabor_sigma_over_f0));
                    } catch (const SegmentationFailed&) {
                    }
                }
            }
            return codes;
        };

        auto enroll = make_codes(0.0, 0x656e726f6c6cULL);
        for (double d : cfg.gaze.distance_sweep_mm) {
            double sigma = optics::defocus_sigma(cfg.optics, d).sigma_px;
            auto probe = make_codes(sigma, 0x70726f6265ULL ^ static_cast<uint64_t>(std::llround(d * 100)));
            gazeutil::CrrPoint pt;
            pt.distance_mm = d;
            for (int i = 0; i < sweep_ids; ++i) {
                for (const auto& pc : probe[static_cast<size_t>(i)]) {
                    for (const auto& ec : enroll[static_cast<size_t>(i)]) {
                        try {
                            auto r = iris::hamming_distance(pc, ec, cfg.iris.max_shift_columns,
                                                            cfg.iris.hd_auth);
                            ++pt.trials;
                            if (r.hd < cfg.iris.hd_auth) ++pt.matches;
                        } catch (const NoComparableBits&) {
                        }
                    }
                }
            }
            if (pt.trials > 0) rep.distance_points.push_back(pt);
        }
        if (rep.distance_points.size() >= 2) {
            try {
                rep.distance_fit = gazeutil::fit_crr_sigmoid(rep.distance_points);
            } catch (const std::exception& e) {
                std::cerr << "gaze: distance sigmoid fit failed: " << e.what() << "\n";
            }
        }
    }

    // ---- CSV reports ----
    std::string rd = report_dir(dir);
    {
        csv::Writer w(rd + "/gaze_by_sigma.csv",
                      {"sigma_px", "detection_rate", "mean_error_deg", "precision_deg",
                       "calibration_residual_px", "status"});
        for (const auto& r : rep.rows) {
            w.field(r.sigma_px)
                .field(r.detection_rate)
                .field(r.mean_error_deg)
                .field(r.precision_deg)
                .field(r.calibration_residual_px)
                .field(r.ok ? "ok" : "failed");
            w.end_row();
        }
    }
    if (!rep.distance_points.empty()) {
        csv::Writer w(rd + "/crr_vs_distance.csv", {"distance_mm", "matches", "trials", "rate"});
        for (const auto& p : rep.distance_points) {
            w.field(p.distance_mm)
                .field(p.matches)
                .field(p.trials)
                .field(static_cast<double>(p.matches) / static_cast<double>(p.trials));
            w.end_row();
        }
    }
    if (rep.distance_fit) {
        csv::Writer w(rd + "/sigmoid_fit.csv", {"a", "b", "midpoint_mm"});
        w.field(rep.distance_fit->a)
            .field(rep.distance_fit->b)
            .field(-rep.distance_fit->b / rep.distance_fit->a);
        w.end_row();
    }
    return rep;
}

// ---------------------------------------------------------------------------
// psycho
// ---------------------------------------------------------------------------

namespace {

double parse_double_field(const std::string& s, const std::string& file, size_t lineno) {
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw SchemaError("psycho: " + file + " line " + std::to_string(lineno) +
                          ": bad number '" + s + "'");
    }
}

}  // namespace

PsychoReport run_psycho(const ExperimentConfig& cfg, const std::string& responses_csv,
                        const std::string& likert_csv, const std::string& dir) {
    (void)cfg;
    PsychoReport rep;
    std::string rd = report_dir(dir);

    // ---- responses ----
    std::map<std::string, std::vector<psycho::TrialResponse>> by_participant;
    {
        csv::Table t;
        try {
            t = csv::read(responses_csv);
        } catch (const IoError& e) {
            throw SchemaError(e.what());
        }
        if (t.header != std::vector<std::string>{"participant", "sigma", "response"})
            throw SchemaError("psycho: " + responses_csv +
                              ": expected header participant,sigma,response");
        std::vector<size_t> bad_lines;
        size_t lineno = 1;
        for (const auto& row : t.rows) {
            ++lineno;
            psycho::TrialResponse r;
            r.participant_id = row[0];
            r.sigma_px = parse_double_field(row[1], responses_csv, lineno);
            if (row[2] == "same")
                r.same = true;
            else if (row[2] == "different")
                r.same = false;
            else {
                bad_lines.push_back(lineno);
                continue;
            }
            by_participant[r.participant_id].push_back(r);
        }
        if (!bad_lines.empty()) {
            std::string msg = "psycho: " + responses_csv + ": bad response value on line(s)";
            for (size_t l : bad_lines) msg += " " + std::to_string(l);
            throw SchemaError(msg);
        }
    }

    psycho::ExclusionReport excl = psycho::exclude_participants(by_participant);
    rep.excluded = excl.excluded;

    std::map<std::string, std::map<double, double>> kept_rates;
    for (const auto& pid : excl.kept) {
        const auto& responses = by_participant.at(pid);
        kept_rates[pid] = psycho::miss_rate(responses);
        PsychoReport::ParticipantFit pf;
        pf.participant = pid;
        try {
            pf.fit = psycho::fit_psychometric(responses);
            pf.ok = true;
        } catch (const std::exception& e) {
            pf.error = e.what();
        }
        rep.fits.push_back(pf);
    }
    {
        double sp = 0, sd = 0;
        int n = 0;
        for (const auto& pf : rep.fits)
            if (pf.ok) {
                sp += pf.fit.pse;
                sd += pf.fit.dt;
                ++n;
            }
        if (n > 0) {
            rep.mean_pse = sp / n;
            rep.mean_dt = sd / n;
        }
    }
    if (!kept_rates.empty()) {
        try {
            rep.pooled = psycho::pooled_curve(kept_rates);
        } catch (const std::exception& e) {
            std::cerr << "psycho: pooled fit failed: " << e.what() << "\n";
        }
    }

    // ---- Likert ----
    if (!likert_csv.empty()) {
        csv::Table t;
        try {
            t = csv::read(likert_csv);
        } catch (const IoError& e) {
            throw SchemaError(e.what());
        }
        if (t.header != std::vector<std::string>{"participant", "sigma", "attribute", "rating"})
            throw SchemaError("psycho: " + likert_csv +
                              ": expected header participant,sigma,attribute,rating");
        // attribute -> participant -> sigma -> rating
        std::map<std::string, std::map<std::string, std::map<double, double>>> data;
        std::set<double> sigmas;
        size_t lineno = 1;
        for (const auto& row : t.rows) {
            ++lineno;
            double sigma = parse_double_field(row[1], likert_csv, lineno);
            double rating = parse_double_field(row[3], likert_csv, lineno);
            if (rating < 1 || rating > 5)
                throw SchemaError("psycho: " + likert_csv + " line " + std::to_string(lineno) +
                                  ": rating outside 1..5");
            data[row[2]][row[0]][sigma] = rating;
            sigmas.insert(sigma);
        }
        for (auto& [attr, parts] : data) {
            psycho::LikertTable table;
            table.attribute = attr;
            table.conditions.assign(sigmas.begin(), sigmas.end());
            for (auto& [pid, bysigma] : parts) {
                std::vector<double> row;
                for (double s : table.conditions) {
                    auto it = bysigma.find(s);
                    if (it == bysigma.end())
                        throw SchemaError("psycho: " + likert_csv + ": participant " + pid +
                                          " misses attribute '" + attr + "' at sigma " +
                                          std::to_string(s) + " (within-subjects design)");
                    row.push_back(it->second);
                }
                table.ratings.push_back(std::move(row));
            }
            PsychoReport::AttributeStats st;
            st.attribute = attr;
            st.friedman = psycho::friedman_test(table);
            st.pairwise = psycho::pairwise_wilcoxon(table);
            // pairwise comparisons carry condition indices; translate here
            rep.attributes.push_back(std::move(st));
        }
        // remember sigma labels for the stats CSV
        std::vector<double> cond(sigmas.begin(), sigmas.end());
        csv::Writer w(rd + "/psycho_stats.csv", {"attribute", "chi_square", "df", "p_value"});
        for (const auto& st : rep.attributes) {
            w.field(st.attribute).field(st.friedman.chi_square).field(st.friedman.df).field(st.friedman.p_value);
            w.end_row();
        }
        csv::Writer wp(rd + "/psycho_pairwise.csv",
                       {"attribute", "sigma_a", "sigma_b", "statistic", "p_raw", "p_bonferroni"});
        for (const auto& st : rep.attributes) {
            for (const auto& c : st.pairwise) {
                wp.field(st.attribute)
                    .field(cond[static_cast<size_t>(c.condition_a)])
                    .field(cond[static_cast<size_t>(c.condition_b)])
                    .field(c.statistic)
                    .field(c.p_raw)
                    .field(c.p_adjusted);
                wp.end_row();
            }
        }
    }

    // ---- CSVs ----
    {
        csv::Writer w(rd + "/psycho_fits.csv",
                      {"participant", "a", "b", "pse", "dt", "converged", "status"});
        for (const auto& pf : rep.fits) {
            if (pf.ok)
                w.field(pf.participant)
                    .field(pf.fit.a)
                    .field(pf.fit.b)
                    .field(pf.fit.pse)
                    .field(pf.fit.dt)
                    .field(pf.fit.converged ? 1 : 0)
                    .field("ok");
            else
                w.field(pf.participant).field("nan").field("nan").field("nan").field("nan").field(0).field("failed");
            w.end_row();
        }
        int n = 0;
        for (const auto& pf : rep.fits) n += pf.ok ? 1 : 0;
        if (n > 0) {
            w.field("Average").field("nan").field("nan").field(rep.mean_pse).field(rep.mean_dt).field(1).field("ok");
            w.end_row();
        }
    }
    {
        csv::Writer w(rd + "/psycho_exclusions.csv", {"participant", "status"});
        for (const auto& pid : excl.kept) {
            w.field(pid).field("kept");
            w.end_row();
        }
        for (const auto& pid : excl.excluded) {
            w.field(pid).field("excluded");
            w.end_row();
        }
    }
    if (rep.pooled) {
        csv::Writer w(rd + "/psycho_pooled.csv", {"a", "b", "pse", "dt"});
        w.field(rep.pooled->a).field(rep.pooled->b).field(rep.pooled->pse).field(rep.pooled->dt);
        w.end_row();
    }
    return rep;
}

// ---------------------------------------------------------------------------
// plot
// ---------------------------------------------------------------------------

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

bool file_exists(const std::string& p) { return fs::exists(p); }

}  // namespace

int run_plot(const std::string& dir) {
    std::string rd = (fs::path(dir) / "report").string();
    int written = 0;

    // psychometric curves: one path per participant plus the pooled curve
    if (file_exists(rd + "/psycho_fits.csv")) {
        csv::Table t = csv::read(rd + "/psycho_fits.csv");
        std::vector<svg::Series> series;
        int color = 0;
        for (const auto& row : t.rows) {
            if (row[0] == "Average" || row[6] != "ok") continue;
            double a = std::stod(row[1]), b = std::stod(row[2]);
            svg::Series s;
            s.label = row[0];
            s.color = kPalette[color++ % 10];
            for (double x = 0; x <= 8.0001; x += 0.25)
                s.points.emplace_back(x, logistic::sigmoid(a, b, x));
            series.push_back(std::move(s));
        }
        if (file_exists(rd + "/psycho_pooled.csv")) {
            csv::Table p = csv::read(rd + "/psycho_pooled.csv");
            if (!p.rows.empty()) {
                double a = std::stod(p.rows[0][0]), b = std::stod(p.rows[0][1]);
                svg::Series s;
                s.label = "pooled";
                s.color = "#000000";
                s.dashed = true;
                for (double x = 0; x <= 8.0001; x += 0.25)
                    s.points.emplace_back(x, logistic::sigmoid(a, b, x));
                series.push_back(std::move(s));
            }
        }
        if (!series.empty()) {
            svg::write_line_chart(rd + "/psychometric_curves.svg", "Miss rate vs blur",
                                  "sigma (px)", "P(same)", series);
            ++written;
        }
    } else {
        std::cerr << "plot: psycho_fits.csv missing, skipping psychometric plot\n";
    }

    if (file_exists(rd + "/crr_by_sigma.csv")) {
        csv::Table t = csv::read(rd + "/crr_by_sigma.csv");
        svg::Series sel, auth;
        sel.label = "CRR @ selected";
        sel.color = "#1f77b4";
        auth.label = "CRR @ HD_auth";
        auth.color = "#d62728";
        auth.dashed = true;
        for (const auto& row : t.rows) {
            double sigma = std::stod(row[0]);
            if (row[6] != "nan") sel.points.emplace_back(sigma, std::stod(row[6]));
            if (row[7] != "nan") auth.points.emplace_back(sigma, std::stod(row[7]));
        }
        svg::write_line_chart(rd + "/crr_vs_sigma.svg", "Recognition vs blur", "sigma (px)",
                              "CRR (%)", {sel, auth});
        ++written;
    } else {
        std::cerr << "plot: crr_by_sigma.csv missing, skipping CRR plot\n";
    }

    if (file_exists(rd + "/crr_vs_distance.csv")) {
        csv::Table t = csv::read(rd + "/crr_vs_distance.csv");
        svg::Series pts;
        pts.label = "measured";
        pts.color = "#1f77b4";
        double dmin = 1e9, dmax = -1e9;
        for (const auto& row : t.rows) {
            double d = std::stod(row[0]);
            pts.points.emplace_back(d, std::stod(row[3]));
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
        std::vector<svg::Series> series = {pts};
        if (file_exists(rd + "/sigmoid_fit.csv")) {
            csv::Table ft = csv::read(rd + "/sigmoid_fit.csv");
            if (!ft.rows.empty()) {
                double a = std::stod(ft.rows[0][0]), b = std::stod(ft.rows[0][1]);
                svg::Series fitted;
                fitted.label = "sigmoid fit";
                fitted.color = "#000000";
                fitted.dashed = true;
                for (int i = 0; i <= 60; ++i) {
                    double d = dmin + (dmax - dmin) * i / 60.0;
                    fitted.points.emplace_back(d, logistic::sigmoid(a, b, d));
                }
                series.push_back(std::move(fitted));
            }
        }
        svg::write_line_chart(rd + "/crr_vs_distance.svg", "Match rate vs camera distance",
                              "distance (mm)", "match rate", series);
        ++written;
    } else {
        std::cerr << "plot: crr_vs_distance.csv missing, skipping distance plot\n";
    }

    if (file_exists(rd + "/hd_histogram.csv")) {
        csv::Table t = csv::read(rd + "/hd_histogram.csv");
        svg::Series intra, inter;
        intra.label = "intra-class";
        intra.color = "#1f77b4";
        inter.label = "inter-class";
        inter.color = "#d62728";
        for (const auto& row : t.rows) {
            double lo = std::stod(row[0]);
            intra.points.emplace_back(lo, std::stod(row[1]));
            inter.points.emplace_back(lo, std::stod(row[2]));
        }
        svg::write_histogram(rd + "/hd_histogram.svg", "Hamming distance distributions (in focus)",
                             "HD", {intra, inter});
        ++written;
    } else {
        std::cerr << "plot: hd_histogram.csv missing, skipping HD histogram\n";
    }
    return written;
}

void run_all(const ExperimentConfig& cfg, const std::string& dir, const std::string& responses_csv,
             const std::string& likert_csv) {
    run_synth(cfg, dir);
    run_auth(cfg, dir);
    run_gaze(cfg, dir);
    if (!responses_csv.empty()) run_psycho(cfg, responses_csv, likert_csv, dir);
    run_plot(dir);
}

}  // namespace idf::pipeline
