#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace soa {

int algorithm_id(const std::string& name) {
    if (name == "pso") return 0;
    if (name == "aco") return 1;
    if (name == "ga") return 2;
    throw Error("unknown algorithm: " + name);
}

std::string config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["plant"] = cfg.plant;
    j["algorithms"] = cfg.algorithms;
    j["n_repeats"] = cfg.n_repeats;
    j["base_seed"] = cfg.base_seed;
    j["out_dir"] = cfg.out_dir;
    j["oversample"] = cfg.oversample;
    j["quant_bits"] = cfg.quant_bits;
    j["layout"] = {{"off_len", cfg.layout.off_len},
                   {"on_len", cfg.layout.on_len},
                   {"v_off", cfg.layout.v_off},
                   {"v_on", cfg.layout.v_on}};
    j["pso"] = nlohmann::json::parse(pso_config_json(cfg.pso));
    j["aco"] = nlohmann::json::parse(aco_config_json(cfg.aco));
    j["ga"] = nlohmann::json::parse(ga_config_json(cfg.ga));
    return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    ExperimentConfig cfg;
    cfg.plant = j.value("plant", cfg.plant);
    if (j.contains("algorithms")) cfg.algorithms = j["algorithms"].get<std::vector<std::string>>();
    cfg.n_repeats = j.value("n_repeats", cfg.n_repeats);
    cfg.base_seed = j.value("base_seed", cfg.base_seed);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.oversample = j.value("oversample", cfg.oversample);
    cfg.quant_bits = j.value("quant_bits", cfg.quant_bits);
    if (j.contains("layout")) {
        auto& l = j["layout"];
        cfg.layout.off_len = l.value("off_len", cfg.layout.off_len);
        cfg.layout.on_len = l.value("on_len", cfg.layout.on_len);
        cfg.layout.v_off = l.value("v_off", cfg.layout.v_off);
        cfg.layout.v_on = l.value("v_on", cfg.layout.v_on);
    }
    if (j.contains("pso")) {
        auto& p = j["pso"];
        cfg.pso.iter_max = p.value("iter_max", cfg.pso.iter_max);
        cfg.pso.n_particles = p.value("n_particles", cfg.pso.n_particles);
        cfg.pso.max_v_f = p.value("max_v_f", cfg.pso.max_v_f);
        cfg.pso.w0 = p.value("w0", cfg.pso.w0);
        cfg.pso.w_nt = p.value("w_nt", cfg.pso.w_nt);
        cfg.pso.c_min = p.value("c_min", cfg.pso.c_min);
        cfg.pso.c_max = p.value("c_max", cfg.pso.c_max);
        cfg.pso.on_s_f = p.value("on_s_f", cfg.pso.on_s_f);
        cfg.pso.off_s_f = p.value("off_s_f", cfg.pso.off_s_f);
        cfg.pso.shell_w_f = p.value("shell_w_f", cfg.pso.shell_w_f);
        cfg.pso.embed_step = p.value("embed_step", cfg.pso.embed_step);
    }
    if (j.contains("aco")) {
        auto& a = j["aco"];
        cfg.aco.n_ants = a.value("n_ants", cfg.aco.n_ants);
        cfg.aco.n_generations = a.value("n_generations", cfg.aco.n_generations);
        cfg.aco.alpha = a.value("alpha", cfg.aco.alpha);
        cfg.aco.rho = a.value("rho", cfg.aco.rho);
        cfg.aco.explore_p = a.value("explore_p", cfg.aco.explore_p);
        cfg.aco.n_opt_points = a.value("n_opt_points", cfg.aco.n_opt_points);
        cfg.aco.n_levels = a.value("n_levels", cfg.aco.n_levels);
        cfg.aco.range_center_frac = a.value("range_center_frac", cfg.aco.range_center_frac);
        cfg.aco.range_halfwidth_frac =
            a.value("range_halfwidth_frac", cfg.aco.range_halfwidth_frac);
    }
    if (j.contains("ga")) {
        auto& g = j["ga"];
        cfg.ga.pop_size = g.value("pop_size", cfg.ga.pop_size);
        cfg.ga.n_generations = g.value("n_generations", cfg.ga.n_generations);
        cfg.ga.cxpb = g.value("cxpb", cfg.ga.cxpb);
        cfg.ga.mutpb = g.value("mutpb", cfg.ga.mutpb);
        cfg.ga.indpb = g.value("indpb", cfg.ga.indpb);
        cfg.ga.mut_mu = g.value("mut_mu", cfg.ga.mut_mu);
        cfg.ga.mut_sigma = g.value("mut_sigma", cfg.ga.mut_sigma);
        cfg.ga.tournsize = g.value("tournsize", cfg.ga.tournsize);
        cfg.ga.resample_cap = g.value("resample_cap", cfg.ga.resample_cap);
    }
    return cfg;
}

std::vector<TransferFunction> select_plants(const std::string& selector) {
    if (selector == "canonical") return {canonical_tf()};
    if (selector == "variants") return make_variants(canonical_tf());
    if (selector.rfind("variant:", 0) == 0) {
        int idx = std::stoi(selector.substr(8));
        auto all = make_variants(canonical_tf());
        if (idx < 0 || idx >= static_cast<int>(all.size()))
            throw Error("variant index out of range: " + selector);
        return {all[idx]};
    }
    return {load_tf(selector)};
}

const CampaignCell& CampaignResult::cell(int a, int v, int r) const {
    size_t idx = (static_cast<size_t>(a) * variant_names.size() + v) * n_repeats + r;
    return cells.at(idx);
}

int CampaignResult::best_repeat(int a, int v) const {
    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int r = 0; r < n_repeats; ++r) {
        const CampaignCell& c = cell(a, v, r);
        if (c.ok && c.record.best_cost < best_cost) {
            best_cost = c.record.best_cost;
            best = r;
        }
    }
    return best;
}

static MetricsReport nan_report() {
    MetricsReport m;
    m.rise_time = std::numeric_limits<double>::quiet_NaN();
    m.overshoot_pct = std::numeric_limits<double>::quiet_NaN();
    m.mse = std::numeric_limits<double>::quiet_NaN();
    m.on_snr_db = std::numeric_limits<double>::quiet_NaN();
    return m;
}

CampaignResult run_campaign(const ExperimentConfig& cfg) {
    if (cfg.n_repeats < 1) throw Error("n_repeats must be >= 1");
    auto plants = select_plants(cfg.plant);

    StateSpaceModel canon = make_model(canonical_tf(), cfg.layout, cfg.oversample);
    Waveform base_step = step(cfg.layout);
    ResponseTrace canon_step = simulate(canon, base_step, cfg.oversample);
    SetPoint sp = make_set_point(canon_step, cfg.layout.off_len);

    BoundsTemplate shell =
        pisic_shell(cfg.layout, cfg.pso.shell_w_f, cfg.pso.on_s_f, cfg.pso.off_s_f);

    CampaignResult res;
    res.algorithms = cfg.algorithms;
    res.n_repeats = cfg.n_repeats;

    std::vector<StateSpaceModel> models;
    for (auto& tf : plants) {
        res.variant_names.push_back(tf.variant);
        models.push_back(make_model(tf, cfg.layout, cfg.oversample));
    }

    for (auto& model : models) {
        try {
            res.step_reports.push_back(compute_report(simulate(model, base_step, cfg.oversample), sp));
            res.step_ok.push_back(true);
        } catch (const Error&) {
            res.step_reports.push_back(nan_report());
            res.step_ok.push_back(false);
        }
    }

    for (auto& algo : cfg.algorithms) {
        int aid = algorithm_id(algo);
        for (size_t v = 0; v < models.size(); ++v) {
            FitnessContext ctx =
                make_context(models[v], sp, shell, base_step, cfg.quant_bits, cfg.oversample);
            for (int r = 0; r < cfg.n_repeats; ++r) {
                CampaignCell cell;
                cell.algorithm = algo;
                cell.variant = static_cast<int>(v);
                cell.repeat = r;
                uint64_t seed = mix_seed(cfg.base_seed, aid, v, r);
                try {
                    if (algo == "pso") {
                        PSOConfig c = cfg.pso;
                        c.seed = seed;
                        cell.record = pso_run(ctx, c);
                    } else if (algo == "aco") {
                        ACOConfig c = cfg.aco;
                        c.seed = seed;
                        cell.record = aco_run(ctx, c, cfg.layout);
                    } else {
                        GAConfig c = cfg.ga;
                        c.seed = seed;
                        cell.record = ga_run(ctx, c);
                    }
                    cell.ok = true;
                } catch (const Error& e) {
                    cell.ok = false;
                    cell.error = e.what();
                }
                res.cells.push_back(std::move(cell));
            }
        }
    }
    return res;
}

void emit_learning_curves(const CampaignResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (size_t a = 0; a < result.algorithms.size(); ++a) {
        for (size_t v = 0; v < result.variant_names.size(); ++v) {
            size_t len = 0;
            for (int r = 0; r < result.n_repeats; ++r) {
                const auto& c = result.cell(a, v, r);
                if (c.ok) len = std::max(len, c.record.learning_curve.size());
            }
            std::ostringstream out;
            out << "iteration";
            for (int r = 0; r < result.n_repeats; ++r) out << ",repeat_" << r;
            out << "\n";
            for (size_t i = 0; i < len; ++i) {
                out << i;
                for (int r = 0; r < result.n_repeats; ++r) {
                    const auto& c = result.cell(a, v, r);
                    out << ",";
                    if (c.ok && i < c.record.learning_curve.size())
                        out << format_g17(c.record.learning_curve[i]);
                }
                out << "\n";
            }
            std::string name = "curves_" + result.algorithms[a] + "_v" + std::to_string(v) + ".csv";
            write_text_file((fs::path(dir) / name).string(), out.str());
        }
    }
}

namespace {

struct SummaryRow {
    std::string name;
    SummaryStats rise;
    SummaryStats settle;
    SummaryStats ovs;
    bool any = false;
};

std::optional<double> finite_or_none(double v) {
    if (std::isnan(v)) return std::nullopt;
    return v;
}

SummaryRow make_row(const std::string& name, const std::vector<MetricsReport>& reports) {
    SummaryRow row;
    row.name = name;
    std::vector<std::optional<double>> rise, settle, ovs;
    for (auto& m : reports) {
        rise.push_back(finite_or_none(m.rise_time));
        settle.push_back(m.settling_time);
        ovs.push_back(finite_or_none(m.overshoot_pct));
    }
    try {
        row.rise = summarize(rise);
        row.settle = summarize(settle);
        row.ovs = summarize(ovs);
        row.any = true;
    } catch (const Error&) {
        row.any = false;
    }
    return row;
}

std::vector<SummaryRow> build_rows(const CampaignResult& result) {
    std::vector<SummaryRow> rows;
    for (size_t a = 0; a < result.algorithms.size(); ++a) {
        std::vector<MetricsReport> reports;
        for (size_t v = 0; v < result.variant_names.size(); ++v) {
            int r = result.best_repeat(a, v);
            if (r >= 0)
                reports.push_back(result.cell(a, v, r).record.best_metrics);
            else
                reports.push_back(nan_report());
        }
        rows.push_back(make_row(result.algorithms[a], reports));
    }
    if (!result.step_reports.empty()) rows.push_back(make_row("step", result.step_reports));
    return rows;
}

std::string fmt_stat(double v, double scale, const char* unit_fmt) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), unit_fmt, v * scale);
    return buf;
}

}  // namespace

std::string summary_table_csv(const CampaignResult& result) {
    std::ostringstream out;
    out << "algorithm,metric,min,max,mean,std,excluded\n";
    for (auto& row : build_rows(result)) {
        struct Item {
            const char* metric;
            const SummaryStats* s;
            double scale;
        } items[] = {{"rise_ps", &row.rise, 1e12},
                     {"settle_ps", &row.settle, 1e12},
                     {"overshoot_pct", &row.ovs, 1.0}};
        for (auto& it : items) {
            out << row.name << "," << it.metric << ",";
            if (row.any) {
                out << format_g17(it.s->min * it.scale) << "," << format_g17(it.s->max * it.scale)
                    << "," << format_g17(it.s->mean * it.scale) << ","
                    << format_g17(it.s->std * it.scale) << "," << it.s->excluded_count;
            } else {
                out << "-,-,-,-," << result.variant_names.size();
            }
            out << "\n";
        }
    }
    return out.str();
}

std::string summary_table_text(const CampaignResult& result) {
    std::ostringstream out;
    char head[160];
    std::snprintf(head, sizeof(head), "%-10s | %-27s | %-27s | %-27s\n", "algorithm",
                  "rise ps (min|max|mean|std)", "settle ns (min|max|mean|std)",
                  "overshoot % (min|max|mean|std)");
    out << head;
    out << std::string(100, '-') << "\n";
    for (auto& row : build_rows(result)) {
        auto group = [&](const SummaryStats& s, double scale, const char* fmt) -> std::string {
            if (!row.any) return "-";
            std::string g = fmt_stat(s.min, scale, fmt);
            g += "|" + fmt_stat(s.max, scale, fmt);
            g += "|" + fmt_stat(s.mean, scale, fmt);
            g += "|" + fmt_stat(s.std, scale, fmt);
            if (s.excluded_count > 0) g += " (" + std::to_string(s.excluded_count) + " excl)";
            return g;
        };
        char line[256];
        std::snprintf(line, sizeof(line), "%-10s | %-27s | %-27s | %-27s\n", row.name.c_str(),
                      group(row.rise, 1e12, "%.0f").c_str(), group(row.settle, 1e9, "%.2f").c_str(),
                      group(row.ovs, 1.0, "%.1f").c_str());
        out << line;
    }
    return out.str();
}

void emit_summary_table(const CampaignResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_text_file((fs::path(dir) / "summary.csv").string(), summary_table_csv(result));
    write_text_file((fs::path(dir) / "summary.txt").string(), summary_table_text(result));
}

void persist_records(const CampaignResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::path rec_dir = fs::path(dir) / "records";
    fs::create_directories(rec_dir);
    for (size_t a = 0; a < result.algorithms.size(); ++a) {
        for (size_t v = 0; v < result.variant_names.size(); ++v) {
            for (int r = 0; r < result.n_repeats; ++r) {
                const auto& c = result.cell(a, v, r);
                std::string base = result.algorithms[a] + "_v" + std::to_string(v) + "_r" +
                                   std::to_string(r);
                if (c.ok)
                    write_text_file((rec_dir / (base + ".json")).string(),
                                    run_record_to_json(c.record));
                else
                    write_text_file((rec_dir / (base + ".error.txt")).string(), c.error + "\n");
            }
        }
    }
}

std::vector<BaselineRow> baseline_rows(const StateSpaceModel& model, const StepLayout& layout,
                                       int oversample) {
    Waveform base_step = step(layout);
    ResponseTrace step_resp = simulate(model, base_step, oversample);
    SetPoint sp = make_set_point(step_resp, layout.off_len);

    std::vector<BaselineRow> rows;
    auto add = [&](const std::string& name, const Waveform& drive) {
        BaselineRow row;
        row.name = name;
        row.report = compute_report(simulate(model, drive, oversample), sp);
        rows.push_back(std::move(row));
    };

    add("step", base_step);

    StepLayout pisic_layout = layout;
    pisic_layout.v_on = 2.95;
    add("pisic", pisic(pisic_layout, 4.05, 500e-12));
    add("misic", misic(pisic_layout, 4.05, "11", 500e-12));
    add("raised_cosine", raised_cosine_step(layout, 0.5));

    FOPDTParams f = fit_fopdt(step_resp, layout);
    PIDConfig pid_cfg = imc_tune(f, 5.0);
    add("pid", pid_drive(model, sp, pid_cfg, oversample));

    return rows;
}

std::string baselines_csv(const std::vector<BaselineRow>& rows) {
    std::ostringstream out;
    out << "name," << metrics_csv_header() << "\n";
    for (auto& r : rows) out << r.name << "," << metrics_csv_row(r.report) << "\n";
    return out.str();
}

std::string baselines_text(const std::vector<BaselineRow>& rows) {
    std::ostringstream out;
    char head[120];
    std::snprintf(head, sizeof(head), "%-14s %10s %12s %12s %12s %8s\n", "technique", "rise ps",
                  "settle ns", "overshoot %", "mse", "snr dB");
    out << head;
    for (auto& r : rows) {
        auto& m = r.report;
        char set_buf[32];
        if (m.settling_time)
            std::snprintf(set_buf, sizeof(set_buf), "%.3f", *m.settling_time * 1e9);
        else
            std::snprintf(set_buf, sizeof(set_buf), "-");
        char line[160];
        std::snprintf(line, sizeof(line), "%-14s %10.1f %12s %12.2f %12.4g %8.1f\n",
                      r.name.c_str(), m.rise_time * 1e12, set_buf, m.overshoot_pct, m.mse,
                      m.on_snr_db);
        out << line;
    }
    return out.str();
}

}  // namespace soa
