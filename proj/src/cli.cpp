#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "harness.hpp"
#include "metrics.hpp"
#include "optim.hpp"
#include "plant.hpp"
#include "signals.hpp"

namespace fs = std::filesystem;
using namespace soa;

namespace {

struct PlantArgs {
    std::string tf_path;
    int variant = -1;
};

TransferFunction resolve_tf(const PlantArgs& pa) {
    if (!pa.tf_path.empty()) return load_tf(pa.tf_path);
    if (pa.variant >= 0) {
        auto all = make_variants(canonical_tf());
        if (pa.variant >= static_cast<int>(all.size())) throw Error("variant index out of range");
        return all[pa.variant];
    }
    return canonical_tf();
}

void add_plant_flags(CLI::App* cmd, PlantArgs& pa) {
    cmd->add_option("--tf", pa.tf_path, "transfer function JSON file");
    cmd->add_option("--variant", pa.variant, "published variant index (0-9)");
}

int run_simulate(const PlantArgs& pa, const std::string& drive_path, const std::string& out_dir,
                 int oversample) {
    TransferFunction tf = resolve_tf(pa);
    StepLayout layout;
    StateSpaceModel model = make_model(tf, layout, oversample);
    Waveform drive = load_waveform(drive_path);
    ResponseTrace resp = simulate(model, drive, oversample);
    SetPoint sp = make_set_point(simulate(model, step(layout, drive.sample_period), oversample),
                                 layout.off_len);
    MetricsReport rep = compute_report(resp, sp);

    std::cout << metrics_csv_header() << "\n" << metrics_csv_row(rep) << "\n";
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::string resp_csv;
        for (double s : resp.samples) resp_csv += format_g17(s) + "\n";
        write_text_file((fs::path(out_dir) / "response.csv").string(), resp_csv);
        write_text_file((fs::path(out_dir) / "metrics.csv").string(),
                        metrics_csv_header() + "\n" + metrics_csv_row(rep) + "\n");
    }
    return 0;
}

int run_optimize(const PlantArgs& pa, const std::string& algo, uint64_t seed,
                 const std::string& out_dir, const ExperimentConfig& defaults) {
    TransferFunction tf = resolve_tf(pa);
    StepLayout layout = defaults.layout;
    StateSpaceModel model = make_model(tf, layout, defaults.oversample);

    StateSpaceModel canon = make_model(canonical_tf(), layout, defaults.oversample);
    Waveform base_step = step(layout);
    SetPoint sp =
        make_set_point(simulate(canon, base_step, defaults.oversample), layout.off_len);
    BoundsTemplate shell =
        pisic_shell(layout, defaults.pso.shell_w_f, defaults.pso.on_s_f, defaults.pso.off_s_f);
    FitnessContext ctx =
        make_context(model, sp, shell, base_step, defaults.quant_bits, defaults.oversample);

    RunRecord rec;
    if (algo == "pso") {
        PSOConfig c = defaults.pso;
        c.seed = seed;
        rec = pso_run(ctx, c);
    } else if (algo == "aco") {
        ACOConfig c = defaults.aco;
        c.seed = seed;
        rec = aco_run(ctx, c, layout);
    } else if (algo == "ga") {
        GAConfig c = defaults.ga;
        c.seed = seed;
        rec = ga_run(ctx, c);
    } else {
        throw Error("unknown algorithm: " + algo);
    }

    std::printf("%s seed=%llu cost=%.9g evals=%lld wall=%.1fs\n", rec.algorithm.c_str(),
                static_cast<unsigned long long>(rec.seed), rec.best_cost, rec.n_evaluations,
                rec.wall_time_s);
    std::cout << metrics_csv_header() << "\n" << metrics_csv_row(rec.best_metrics) << "\n";
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text_file((fs::path(out_dir) / (algo + "_record.json")).string(),
                        run_record_to_json(rec));
        save_waveform(rec.best_waveform, (fs::path(out_dir) / (algo + "_best.csv")).string());
    }
    return 0;
}

int run_campaign_cmd(ExperimentConfig cfg) {
    CampaignResult res = run_campaign(cfg);
    fs::create_directories(cfg.out_dir);
    write_text_file((fs::path(cfg.out_dir) / "config.json").string(), config_to_json(cfg));
    persist_records(res, cfg.out_dir);
    emit_learning_curves(res, (fs::path(cfg.out_dir) / "curves").string());
    emit_summary_table(res, cfg.out_dir);
    std::cout << summary_table_text(res);
    int failures = 0;
    for (auto& c : res.cells)
        if (!c.ok) ++failures;
    if (failures > 0) std::cout << failures << " cell(s) recorded errors\n";
    return 0;
}

int run_baselines(const PlantArgs& pa, const std::string& out_dir, int oversample) {
    TransferFunction tf = resolve_tf(pa);
    StepLayout layout;
    StateSpaceModel model = make_model(tf, layout, oversample);
    auto rows = baseline_rows(model, layout, oversample);
    std::cout << baselines_text(rows);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text_file((fs::path(out_dir) / "baselines.csv").string(), baselines_csv(rows));
    }
    return 0;
}

int run_freqresp(const PlantArgs& pa, const std::string& out_dir) {
    TransferFunction tf = resolve_tf(pa);
    auto freqs = log_spaced(1e7, 1e10, 500);
    auto resp = frequency_response(tf, freqs);
    std::string csv = "hz,db\n";
    for (auto& [hz, db] : resp) csv += format_g17(hz) + "," + format_g17(db) + "\n";
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text_file((fs::path(out_dir) / "freqresp.csv").string(), csv);
    } else {
        std::cout << csv;
    }
    std::printf("-3 dB bandwidth: %.6g GHz\n", bandwidth_3db(tf) / 1e9);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SOA drive-signal simulator and optimizer"};
    app.require_subcommand(1);

    PlantArgs sim_plant, opt_plant, base_plant, freq_plant;
    std::string drive_path, out_dir;
    std::string algo = "pso";
    uint64_t seed = kDefaultBaseSeed;
    int oversample = kDefaultOversample;

    auto* sim = app.add_subcommand("simulate", "simulate a drive waveform and report metrics");
    add_plant_flags(sim, sim_plant);
    sim->add_option("--drive", drive_path, "drive waveform CSV")->required();
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--oversample", oversample, "integrator oversample factor");

    auto* opt = app.add_subcommand("optimize", "run one optimizer against one plant");
    add_plant_flags(opt, opt_plant);
    opt->add_option("--algo", algo, "pso|aco|ga");
    opt->add_option("--seed", seed, "optimizer seed");
    opt->add_option("--out", out_dir, "output directory");

    auto* camp = app.add_subcommand("campaign", "run the full seeded run matrix");
    std::string config_path;
    int repeats_override = -1;
    int variant_override = -1;
    std::string algo_override;
    uint64_t seed_override = 0;
    bool seed_given = false;
    camp->add_option("--config", config_path, "experiment config JSON");
    camp->add_option("--repeats", repeats_override, "override repeat count");
    camp->add_option("--variant", variant_override, "restrict to one variant index");
    camp->add_option("--algo", algo_override, "restrict to one algorithm");
    camp->add_option("--seed", seed_override, "base seed")->each([&](const std::string&) {
        seed_given = true;
    });
    camp->add_option("--out", out_dir, "output directory");

    auto* base = app.add_subcommand("baselines", "step/PISIC/MISIC/raised-cosine/PID comparison");
    add_plant_flags(base, base_plant);
    base->add_option("--out", out_dir, "output directory");
    base->add_option("--oversample", oversample, "integrator oversample factor");

    auto* freq = app.add_subcommand("freqresp", "magnitude response CSV");
    add_plant_flags(freq, freq_plant);
    freq->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return run_simulate(sim_plant, drive_path, out_dir, oversample);
        if (opt->parsed()) {
            ExperimentConfig defaults;
            return run_optimize(opt_plant, algo, seed, out_dir, defaults);
        }
        if (camp->parsed()) {
            ExperimentConfig cfg;
            if (!config_path.empty()) {
                std::string text;
                try {
                    text = read_text_file(config_path);
                } catch (const Error& e) {
                    std::cerr << "config error: " << e.what() << "\n";
                    return 1;
                }
                cfg = config_from_json(text);
            }
            if (repeats_override > 0) cfg.n_repeats = repeats_override;
            if (variant_override >= 0) cfg.plant = "variant:" + std::to_string(variant_override);
            if (!algo_override.empty()) cfg.algorithms = {algo_override};
            if (seed_given) cfg.base_seed = seed_override;
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            return run_campaign_cmd(cfg);
        }
        if (base->parsed()) return run_baselines(base_plant, out_dir, oversample);
        if (freq->parsed()) return run_freqresp(freq_plant, out_dir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
