// Experiment driver: dataset synthesis, iris authentication analysis, gaze
// utility measurement, perceptual-study statistics, and SVG report plots.
//
// Exit codes: 0 success, 1 runtime failure, 2 validation failure.

#include <exception>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "idf/config.hpp"
#include "idf/errors.hpp"
#include "idf/pipeline.hpp"

namespace {

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const idf::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"defocus-based iris security and eye-tracking utility experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir_flag;
    long long seed_override = -1;
    int jobs_override = -1;
    app.add_option("--config", config_path, "experiment config (JSON)");
    app.add_option("--out", out_dir_flag, "output directory (overrides config and env)");
    app.add_option("--seed", seed_override, "override the config master seed");
    app.add_option("--jobs", jobs_override, "worker threads (0 = all cores)");

    auto* c_synth = app.add_subcommand("synth", "generate the synthetic eye dataset");
    auto* c_auth = app.add_subcommand("auth", "iris authentication analysis over the dataset");
    auto* c_gaze = app.add_subcommand("gaze", "eye-tracking utility measurement");
    auto* c_psycho = app.add_subcommand("psycho", "perceptual-study analyses from CSVs");
    auto* c_plot = app.add_subcommand("plot", "render SVG figures from the CSV reports");
    auto* c_all = app.add_subcommand("all", "synth + auth + gaze (+ psycho) + plot");
    for (auto* c : {c_synth, c_auth, c_gaze, c_psycho, c_plot, c_all})
        c->fallthrough();  // global --config/--out/--seed/--jobs after the subcommand

    std::string responses_csv, likert_csv;
    for (auto* c : {c_psycho, c_all}) {
        c->add_option("--responses", responses_csv, "trial response CSV (participant,sigma,response)");
        c->add_option("--likert", likert_csv, "Likert rating CSV (participant,sigma,attribute,rating)");
    }
    c_psycho->get_option("--responses")->required();

    bool save_codes = false;
    c_auth->add_flag("--save-codes", save_codes, "also write per-frame iris-code files");

    CLI11_PARSE(app, argc, argv);

    return run_guarded([&] {
        idf::ExperimentConfig cfg =
            config_path.empty() ? idf::ExperimentConfig{} : idf::load_config(config_path);
        if (seed_override >= 0) cfg.master_seed = static_cast<uint64_t>(seed_override);
        if (jobs_override >= 0) cfg.jobs = jobs_override;
        std::string dir = idf::resolve_output_dir(cfg, out_dir_flag);

        if (app.got_subcommand(c_synth)) {
            auto m = idf::pipeline::run_synth(cfg, dir);
            std::cout << "synth: wrote " << m.frames.size() << " frames under " << dir << "\n";
        } else if (app.got_subcommand(c_auth)) {
            auto rep = idf::pipeline::run_auth(cfg, dir, save_codes);
            std::cout << "auth: threshold " << rep.threshold.threshold << " (fpr "
                      << rep.threshold.fpr << "), reports under " << dir << "/report\n";
        } else if (app.got_subcommand(c_gaze)) {
            auto rep = idf::pipeline::run_gaze(cfg, dir);
            std::cout << "gaze: " << rep.rows.size() << " blur levels, reports under " << dir
                      << "/report\n";
        } else if (app.got_subcommand(c_psycho)) {
            auto rep = idf::pipeline::run_psycho(cfg, responses_csv, likert_csv, dir);
            std::cout << "psycho: " << rep.fits.size() << " fits, " << rep.excluded.size()
                      << " excluded, reports under " << dir << "/report\n";
        } else if (app.got_subcommand(c_plot)) {
            int n = idf::pipeline::run_plot(dir);
            std::cout << "plot: wrote " << n << " SVG files under " << dir << "/report\n";
        } else if (app.got_subcommand(c_all)) {
            idf::pipeline::run_all(cfg, dir, responses_csv, likert_csv);
            std::cout << "all: reports under " << dir << "/report\n";
        }
    });
}
