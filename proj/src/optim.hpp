#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "plant.hpp"
#include "signals.hpp"

namespace soa {

struct FitnessContext {
    const StateSpaceModel* model = nullptr;
    SetPoint sp;
    BoundsTemplate bounds;  // snapped to the quantizer grid
    Waveform base_step;
    int bits = kDefaultBits;
    int edge_index = 60;
    int oversample = kDefaultOversample;
};

// Shell bounds are snapped inward to the quantizer grid so any in-bounds
// waveform stays in bounds after quantization.
BoundsTemplate snap_bounds(const BoundsTemplate& raw, int bits);

FitnessContext make_context(const StateSpaceModel& model, const SetPoint& sp,
                            const BoundsTemplate& raw_shell, const Waveform& base_step,
                            int bits = kDefaultBits, int oversample = kDefaultOversample);

double evaluate(const FitnessContext& ctx, const Waveform& w, long long* blowups = nullptr);

struct PSOConfig {
    int iter_max = 150;
    int n_particles = 160;
    double max_v_f = 0.05;
    double w0 = 0.9;
    double w_nt = 0.5;
    double c_min = 0.1;
    double c_max = 2.5;
    double on_s_f = 2.0;
    double off_s_f = 0.2;
    double shell_w_f = 0.1;
    bool embed_step = true;
    uint64_t seed = 0;
};

struct PsoCoeffs {
    double w = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double m = 0.0;
};

// relative-improvement signal, inertia and acceleration schedule, and the
// convergence-condition clamp 0 <= (c1+c2)/2 - 1 < w < 1
PsoCoeffs pso_update_coeffs(double pbest_cost, double current_cost, const PSOConfig& cfg);

struct ACOConfig {
    int n_ants = 200;
    int n_generations = 100;
    double alpha = 0.25;
    double rho = 0.5;
    double explore_p = 0.1;
    int n_opt_points = 180;
    int n_levels = 50;
    double range_center_frac = 0.5;
    double range_halfwidth_frac = 0.25;
    uint64_t seed = 0;
};

struct PheromoneGraph {
    int n_clusters = 0;
    int n_levels = 0;
    std::vector<double> levels;
    std::vector<double> init;   // initial-cluster weights, M entries
    std::vector<double> trans;  // (n_clusters-1) x M x M, row-major

    double& at(int cluster_edge, int from, int to) {
        return trans[(static_cast<size_t>(cluster_edge) * n_levels + from) * n_levels + to];
    }
};

PheromoneGraph aco_build_graph(const ACOConfig& cfg, const StepLayout& layout,
                               double tau0 = 1.0);

struct GAConfig {
    int pop_size = 100;
    int n_generations = 500;
    double cxpb = 0.9;
    double mutpb = 0.3;
    double indpb = 0.06;
    double mut_mu = 0.0;
    double mut_sigma = 0.15;  // fraction of the 7 V range
    int tournsize = 4;
    int resample_cap = 20;
    uint64_t seed = 0;
};

struct RunRecord {
    std::string algorithm;
    std::string config_json;
    uint64_t seed = 0;
    std::vector<double> learning_curve;  // best-so-far
    Waveform best_waveform;              // quantized, as evaluated
    double best_cost = 0.0;
    MetricsReport best_metrics;
    double wall_time_s = 0.0;
    long long n_evaluations = 0;
    long long n_blowups = 0;
    long long n_clip_events = 0;
};

RunRecord pso_run(const FitnessContext& ctx, const PSOConfig& cfg);
RunRecord aco_run(const FitnessContext& ctx, const ACOConfig& cfg,
                  const StepLayout& layout = StepLayout{});
RunRecord ga_run(const FitnessContext& ctx, const GAConfig& cfg);

std::string run_record_to_json(const RunRecord& rec);
RunRecord run_record_from_json(const std::string& text);

std::string pso_config_json(const PSOConfig& cfg);
std::string aco_config_json(const ACOConfig& cfg);
std::string ga_config_json(const GAConfig& cfg);

}  // namespace soa
