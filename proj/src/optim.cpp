#include "optim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace soa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPhiMarginFrac = 0.9;  // keeps (c1+c2)/2 - 1 strictly below w

double now_s() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void finish_record(RunRecord& rec, const FitnessContext& ctx, double t0) {
    ResponseTrace tr = simulate(*ctx.model, rec.best_waveform, ctx.oversample);
    rec.best_metrics = compute_report(tr, ctx.sp);
    rec.wall_time_s = now_s() - t0;
}

}  // namespace

BoundsTemplate snap_bounds(const BoundsTemplate& raw, int bits) {
    double levels = static_cast<double>((1 << bits) - 1);
    BoundsTemplate out = raw;
    for (size_t i = 0; i < out.lo.size(); ++i) {
        out.lo[i] = std::ceil(out.lo[i] / kMaxVolts * levels - 1e-9) / levels * kMaxVolts;
        out.hi[i] = std::floor(out.hi[i] / kMaxVolts * levels + 1e-9) / levels * kMaxVolts;
        if (out.lo[i] > out.hi[i]) throw Error("bounds snapped to an empty interval");
    }
    return out;
}

FitnessContext make_context(const StateSpaceModel& model, const SetPoint& sp,
                            const BoundsTemplate& raw_shell, const Waveform& base_step,
                            int bits, int oversample) {
    FitnessContext ctx;
    ctx.model = &model;
    ctx.sp = sp;
    ctx.bounds = snap_bounds(raw_shell, bits);
    ctx.base_step = base_step;
    ctx.bits = bits;
    ctx.edge_index = sp.edge_index;
    ctx.oversample = oversample;
    return ctx;
}

double evaluate(const FitnessContext& ctx, const Waveform& w, long long* blowups) {
    Waveform q = quantize(w, ctx.bits);
    if (!ctx.bounds.contains(q.samples)) throw Error("waveform out of bounds after quantization");
    try {
        ResponseTrace tr = simulate(*ctx.model, q, ctx.oversample);
        return mse(tr, ctx.sp);
    } catch (const Error&) {
        if (blowups) ++*blowups;
        return kInf;
    }
}

PsoCoeffs pso_update_coeffs(double pbest_cost, double current_cost, const PSOConfig& cfg) {
    PsoCoeffs out;
    double pb = pbest_cost, cur = current_cost;
    if (std::isinf(pb) && std::isinf(cur))
        out.m = 0.0;
    else if (std::isinf(cur))
        out.m = -1.0;
    else if (std::isinf(pb))
        out.m = 1.0;
    else if (pb + cur == 0.0)
        out.m = 0.0;
    else
        out.m = (pb - cur) / (pb + cur);

    double w = cfg.w0 + (cfg.w_nt - cfg.w0) * std::tanh(out.m / 2.0);
    out.w = std::clamp(w, std::min(cfg.w0, cfg.w_nt), std::max(cfg.w0, cfg.w_nt));

    double c = (cfg.c_min + cfg.c_max) / 2.0 + (cfg.c_max - cfg.c_min) / 2.0 +
               std::tanh(-out.m / 2.0);
    c = std::clamp(c, cfg.c_min, cfg.c_max);
    double phi_half = c;  // c1 == c2 == c
    if (phi_half < 1.0) {
        c = 1.0;
        phi_half = 1.0;
    }
    if (phi_half - 1.0 >= out.w) {
        c = 1.0 + kPhiMarginFrac * out.w;
        phi_half = c;
    }
    out.c1 = c;
    out.c2 = c;
    return out;
}

std::string pso_config_json(const PSOConfig& cfg) {
    nlohmann::json j;
    j["iter_max"] = cfg.iter_max;
    j["n_particles"] = cfg.n_particles;
    j["max_v_f"] = cfg.max_v_f;
    j["w0"] = cfg.w0;
    j["w_nt"] = cfg.w_nt;
    j["c_min"] = cfg.c_min;
    j["c_max"] = cfg.c_max;
    j["on_s_f"] = cfg.on_s_f;
    j["off_s_f"] = cfg.off_s_f;
    j["shell_w_f"] = cfg.shell_w_f;
    j["embed_step"] = cfg.embed_step;
    j["seed"] = cfg.seed;
    return j.dump();
}

RunRecord pso_run(const FitnessContext& ctx, const PSOConfig& cfg) {
    double t0 = now_s();
    int dims = ctx.bounds.size();
    int n = cfg.n_particles;
    Rng rng(cfg.seed);

    RunRecord rec;
    rec.algorithm = "pso";
    rec.config_json = pso_config_json(cfg);
    rec.seed = cfg.seed;

    std::vector<std::vector<double>> x(n), v(n), pbest(n);
    std::vector<double> cost(n), pbc(n);
    std::vector<PsoCoeffs> coef(n);

    for (int j = 0; j < n; ++j) {
        x[j].resize(dims);
        for (int d = 0; d < dims; ++d) x[j][d] = rng.uniform(ctx.bounds.lo[d], ctx.bounds.hi[d]);
        v[j].assign(dims, 0.0);
    }
    if (cfg.embed_step && n > 0) x[0] = ctx.base_step.samples;

    Waveform work;
    work.sample_period = ctx.base_step.sample_period;
    for (int j = 0; j < n; ++j) {
        work.samples = x[j];
        cost[j] = evaluate(ctx, work, &rec.n_blowups);
        ++rec.n_evaluations;
        coef[j] = pso_update_coeffs(cost[j], cost[j], cfg);
        pbest[j] = x[j];
        pbc[j] = cost[j];
    }
    int gi = static_cast<int>(std::min_element(pbc.begin(), pbc.end()) - pbc.begin());
    std::vector<double> gbest = pbest[gi];
    double gbc = pbc[gi];
    rec.learning_curve.push_back(gbc);

    for (int it = 0; it < cfg.iter_max; ++it) {
        for (int j = 0; j < n; ++j) {
            for (int d = 0; d < dims; ++d) {
                double r1 = rng.u01();
                double r2 = rng.u01();
                double vel = coef[j].w * v[j][d] + coef[j].c1 * r1 * (pbest[j][d] - x[j][d]) +
                             coef[j].c2 * r2 * (gbest[d] - x[j][d]);
                double vmax = cfg.max_v_f * (ctx.bounds.hi[d] - ctx.bounds.lo[d]);
                vel = std::clamp(vel, -vmax, vmax);
                v[j][d] = vel;
                x[j][d] = std::clamp(x[j][d] + vel, ctx.bounds.lo[d], ctx.bounds.hi[d]);
            }
            work.samples = x[j];
            cost[j] = evaluate(ctx, work, &rec.n_blowups);
            ++rec.n_evaluations;
            coef[j] = pso_update_coeffs(pbc[j], cost[j], cfg);
            if (cost[j] < pbc[j]) {
                pbc[j] = cost[j];
                pbest[j] = x[j];
            }
        }
        for (int j = 0; j < n; ++j) {
            if (pbc[j] < gbc) {
                gbc = pbc[j];
                gbest = pbest[j];
            }
        }
        rec.learning_curve.push_back(gbc);
    }

    work.samples = gbest;
    rec.best_waveform = quantize(work, ctx.bits);
    rec.best_cost = gbc;
    finish_record(rec, ctx, t0);
    return rec;
}

std::string aco_config_json(const ACOConfig& cfg) {
    nlohmann::json j;
    j["n_ants"] = cfg.n_ants;
    j["n_generations"] = cfg.n_generations;
    j["alpha"] = cfg.alpha;
    j["rho"] = cfg.rho;
    j["explore_p"] = cfg.explore_p;
    j["n_opt_points"] = cfg.n_opt_points;
    j["n_levels"] = cfg.n_levels;
    j["range_center_frac"] = cfg.range_center_frac;
    j["range_halfwidth_frac"] = cfg.range_halfwidth_frac;
    j["seed"] = cfg.seed;
    return j.dump();
}

PheromoneGraph aco_build_graph(const ACOConfig& cfg, const StepLayout& layout, double tau0) {
    if (cfg.n_levels < 2) throw Error("need at least two pheromone levels");
    if (cfg.n_opt_points > layout.on_len) throw Error("more optimized points than on-period samples");
    PheromoneGraph g;
    g.n_clusters = cfg.n_opt_points;
    g.n_levels = cfg.n_levels;
    g.levels.resize(cfg.n_levels);
    for (int j = 0; j < cfg.n_levels; ++j) {
        double t = 2.0 * j / (cfg.n_levels - 1) - 1.0;
        g.levels[j] = kMaxVolts * (cfg.range_center_frac + cfg.range_halfwidth_frac * t);
    }
    g.init.assign(cfg.n_levels, tau0);
    g.trans.assign(static_cast<size_t>(cfg.n_opt_points - 1) * cfg.n_levels * cfg.n_levels, tau0);
    return g;
}

namespace {

int sample_weighted(const double* w, int m, Rng& rng) {
    double total = 0.0;
    for (int i = 0; i < m; ++i) total += w[i];
    double r = rng.u01() * total;
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        acc += w[i];
        if (r < acc) return i;
    }
    return m - 1;
}

}  // namespace

RunRecord aco_run(const FitnessContext& ctx, const ACOConfig& cfg, const StepLayout& layout) {
    double t0 = now_s();
    Rng rng(cfg.seed);

    RunRecord rec;
    rec.algorithm = "aco";
    rec.config_json = aco_config_json(cfg);
    rec.seed = cfg.seed;

    double step_cost = evaluate(ctx, ctx.base_step, &rec.n_blowups);
    ++rec.n_evaluations;
    if (!std::isfinite(step_cost) || step_cost <= 0.0)
        throw Error("step reference cost unusable for pheromone init");
    double tau0 = 1.0 / (cfg.n_opt_points * step_cost);

    PheromoneGraph g = aco_build_graph(cfg, layout, tau0);
    int N = g.n_clusters, M = g.n_levels;

    // raw pheromone plus a synced tau^alpha table for the sampling weights
    std::vector<double> init_a(M), trans_a(g.trans.size());
    for (int i = 0; i < M; ++i) init_a[i] = std::pow(g.init[i], cfg.alpha);
    for (size_t i = 0; i < g.trans.size(); ++i) trans_a[i] = std::pow(g.trans[i], cfg.alpha);

    auto decay_init = [&](int node) {
        g.init[node] = (1.0 - cfg.rho) * g.init[node] + cfg.rho * tau0;
        init_a[node] = std::pow(g.init[node], cfg.alpha);
    };
    auto decay_edge = [&](int k, int from, int to) {
        double& t = g.at(k, from, to);
        t = (1.0 - cfg.rho) * t + cfg.rho * tau0;
        trans_a[(static_cast<size_t>(k) * M + from) * M + to] = std::pow(t, cfg.alpha);
    };
    auto deposit_init = [&](int node, double amount) {
        g.init[node] = (1.0 - cfg.rho) * g.init[node] + cfg.rho * amount;
        init_a[node] = std::pow(g.init[node], cfg.alpha);
    };
    auto deposit_edge = [&](int k, int from, int to, double amount) {
        double& t = g.at(k, from, to);
        t = (1.0 - cfg.rho) * t + cfg.rho * amount;
        trans_a[(static_cast<size_t>(k) * M + from) * M + to] = std::pow(t, cfg.alpha);
    };

    double best_cost = kInf;
    std::vector<int> best_path;
    std::vector<int> path(N);
    Waveform work = ctx.base_step;

    for (int gen = 0; gen < cfg.n_generations; ++gen) {
        for (int a = 0; a < cfg.n_ants; ++a) {
            if (rng.u01() < cfg.explore_p)
                path[0] = static_cast<int>(rng.uniform_int(M));
            else
                path[0] = sample_weighted(init_a.data(), M, rng);
            for (int k = 1; k < N; ++k) {
                if (rng.u01() < cfg.explore_p) {
                    path[k] = static_cast<int>(rng.uniform_int(M));
                } else {
                    const double* row =
                        trans_a.data() + (static_cast<size_t>(k - 1) * M + path[k - 1]) * M;
                    path[k] = sample_weighted(row, M, rng);
                }
            }
            for (int k = 0; k < N; ++k)
                work.samples[ctx.edge_index + k] = g.levels[path[k]];
            double c = evaluate(ctx, work, &rec.n_blowups);
            ++rec.n_evaluations;

            decay_init(path[0]);
            for (int k = 1; k < N; ++k) decay_edge(k - 1, path[k - 1], path[k]);

            if (c < best_cost) {
                best_cost = c;
                best_path = path;
            }
        }
        if (std::isfinite(best_cost)) {
            double amount = 1.0 / best_cost;
            deposit_init(best_path[0], amount);
            for (int k = 1; k < N; ++k)
                deposit_edge(k - 1, best_path[k - 1], best_path[k], amount);
        }
        rec.learning_curve.push_back(best_cost);
    }

    work = ctx.base_step;
    for (int k = 0; k < N; ++k) work.samples[ctx.edge_index + k] = g.levels[best_path[k]];
    rec.best_waveform = quantize(work, ctx.bits);
    rec.best_cost = best_cost;
    finish_record(rec, ctx, t0);
    return rec;
}

std::string ga_config_json(const GAConfig& cfg) {
    nlohmann::json j;
    j["pop_size"] = cfg.pop_size;
    j["n_generations"] = cfg.n_generations;
    j["cxpb"] = cfg.cxpb;
    j["mutpb"] = cfg.mutpb;
    j["indpb"] = cfg.indpb;
    j["mut_mu"] = cfg.mut_mu;
    j["mut_sigma"] = cfg.mut_sigma;
    j["tournsize"] = cfg.tournsize;
    j["resample_cap"] = cfg.resample_cap;
    j["seed"] = cfg.seed;
    return j.dump();
}

RunRecord ga_run(const FitnessContext& ctx, const GAConfig& cfg) {
    double t0 = now_s();
    if (cfg.pop_size < cfg.tournsize) throw Error("population smaller than tournament");
    int dims = static_cast<int>(ctx.base_step.samples.size());
    int pop = cfg.pop_size;
    Rng rng(cfg.seed);

    RunRecord rec;
    rec.algorithm = "ga";
    rec.config_json = ga_config_json(cfg);
    rec.seed = cfg.seed;

    // GA searches the full voltage range, not the PISIC shell
    BoundsTemplate full;
    full.lo.assign(dims, 0.0);
    full.hi.assign(dims, kMaxVolts);
    FitnessContext gctx = ctx;
    gctx.bounds = snap_bounds(full, ctx.bits);

    std::vector<std::vector<double>> X(pop);
    std::vector<double> costs(pop);
    Waveform work;
    work.sample_period = ctx.base_step.sample_period;
    for (int i = 0; i < pop; ++i) {
        X[i].resize(dims);
        for (int d = 0; d < dims; ++d) X[i][d] = rng.uniform(0.0, kMaxVolts);
        work.samples = X[i];
        costs[i] = evaluate(gctx, work, &rec.n_blowups);
        ++rec.n_evaluations;
    }
    int bi = static_cast<int>(std::min_element(costs.begin(), costs.end()) - costs.begin());
    std::vector<double> best = X[bi];
    double best_cost = costs[bi];
    rec.learning_curve.push_back(best_cost);

    double sigma = cfg.mut_sigma * kMaxVolts;
    std::vector<std::vector<double>> off(pop);
    std::vector<double> off_costs(pop);

    for (int gen = 0; gen < cfg.n_generations; ++gen) {
        for (int i = 0; i < pop; ++i) {
            int winner = static_cast<int>(rng.uniform_int(pop));
            for (int t = 1; t < cfg.tournsize; ++t) {
                int cand = static_cast<int>(rng.uniform_int(pop));
                if (costs[cand] < costs[winner]) winner = cand;
            }
            off[i] = X[winner];
        }
        for (int i = 0; i + 1 < pop; i += 2) {
            if (rng.u01() < cfg.cxpb) {
                int a = static_cast<int>(rng.uniform_int(dims));
                int b = static_cast<int>(rng.uniform_int(dims));
                if (a > b) std::swap(a, b);
                for (int d = a; d < b; ++d) std::swap(off[i][d], off[i + 1][d]);
            }
        }
        for (int i = 0; i < pop; ++i) {
            if (rng.u01() >= cfg.mutpb) continue;
            std::vector<double> base = off[i];
            std::vector<double> trial;
            bool valid = false;
            for (int attempt = 0; attempt < cfg.resample_cap && !valid; ++attempt) {
                trial = base;
                for (int d = 0; d < dims; ++d)
                    if (rng.u01() < cfg.indpb) trial[d] += rng.gauss(cfg.mut_mu, sigma);
                valid = true;
                for (double s : trial)
                    if (s < 0.0 || s > kMaxVolts) {
                        valid = false;
                        break;
                    }
            }
            if (!valid) {
                ++rec.n_clip_events;
                for (double& s : trial) s = std::clamp(s, 0.0, kMaxVolts);
            }
            off[i] = trial;
        }
        for (int i = 0; i < pop; ++i) {
            work.samples = off[i];
            off_costs[i] = evaluate(gctx, work, &rec.n_blowups);
            ++rec.n_evaluations;
        }
        int worst = static_cast<int>(
            std::max_element(off_costs.begin(), off_costs.end()) - off_costs.begin());
        double off_best = *std::min_element(off_costs.begin(), off_costs.end());
        if (best_cost < off_best) {
            off[worst] = best;
            off_costs[worst] = best_cost;
        }
        X.swap(off);
        costs.swap(off_costs);
        bi = static_cast<int>(std::min_element(costs.begin(), costs.end()) - costs.begin());
        if (costs[bi] < best_cost) {
            best_cost = costs[bi];
            best = X[bi];
        }
        rec.learning_curve.push_back(best_cost);
    }

    work.samples = best;
    rec.best_waveform = quantize(work, ctx.bits);
    rec.best_cost = best_cost;
    finish_record(rec, gctx, t0);
    return rec;
}

namespace {

nlohmann::json metrics_to_json(const MetricsReport& m) {
    nlohmann::json j;
    j["rise_time"] = m.rise_time;
    if (m.settling_time)
        j["settling_time"] = *m.settling_time;
    else
        j["settling_time"] = nullptr;
    j["overshoot_pct"] = m.overshoot_pct;
    j["mse"] = m.mse;
    if (std::isnan(m.on_snr_db))
        j["on_snr_db"] = nullptr;
    else
        j["on_snr_db"] = m.on_snr_db;
    return j;
}

MetricsReport metrics_from_json(const nlohmann::json& j) {
    MetricsReport m;
    m.rise_time = j.at("rise_time").get<double>();
    if (!j.at("settling_time").is_null()) m.settling_time = j.at("settling_time").get<double>();
    m.overshoot_pct = j.at("overshoot_pct").get<double>();
    m.mse = j.at("mse").get<double>();
    m.on_snr_db = j.at("on_snr_db").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                              : j.at("on_snr_db").get<double>();
    return m;
}

}  // namespace

std::string run_record_to_json(const RunRecord& rec) {
    nlohmann::json j;
    j["algorithm"] = rec.algorithm;
    j["config"] = nlohmann::json::parse(rec.config_json);
    j["seed"] = rec.seed;
    j["learning_curve"] = rec.learning_curve;
    j["best_waveform"]["sample_period"] = rec.best_waveform.sample_period;
    j["best_waveform"]["samples"] = rec.best_waveform.samples;
    j["best_cost"] = rec.best_cost;
    j["best_metrics"] = metrics_to_json(rec.best_metrics);
    j["wall_time_s"] = rec.wall_time_s;
    j["n_evaluations"] = rec.n_evaluations;
    j["n_blowups"] = rec.n_blowups;
    j["n_clip_events"] = rec.n_clip_events;
    return j.dump(2) + "\n";
}

RunRecord run_record_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    RunRecord rec;
    rec.algorithm = j.at("algorithm").get<std::string>();
    rec.config_json = j.at("config").dump();
    rec.seed = j.at("seed").get<uint64_t>();
    rec.learning_curve = j.at("learning_curve").get<std::vector<double>>();
    rec.best_waveform.sample_period = j.at("best_waveform").at("sample_period").get<double>();
    rec.best_waveform.samples = j.at("best_waveform").at("samples").get<std::vector<double>>();
    rec.best_cost = j.at("best_cost").get<double>();
    rec.best_metrics = metrics_from_json(j.at("best_metrics"));
    rec.wall_time_s = j.at("wall_time_s").get<double>();
    rec.n_evaluations = j.at("n_evaluations").get<long long>();
    rec.n_blowups = j.at("n_blowups").get<long long>();
    rec.n_clip_events = j.at("n_clip_events").get<long long>();
    return rec;
}

}  // namespace soa
