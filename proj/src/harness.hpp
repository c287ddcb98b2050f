#pragma once

#include <map>
#include <string>
#include <vector>

#include "control.hpp"
#include "metrics.hpp"
#include "optim.hpp"
#include "plant.hpp"
#include "signals.hpp"

namespace soa {

inline constexpr uint64_t kDefaultBaseSeed = 1;

// stable ids for seed mixing
int algorithm_id(const std::string& name);

struct ExperimentConfig {
    std::string plant = "variants";  // "canonical" | "variants" | "variant:<i>" | path to a TF file
    std::vector<std::string> algorithms = {"pso", "aco", "ga"};
    int n_repeats = 10;
    uint64_t base_seed = kDefaultBaseSeed;
    std::string out_dir = "out";
    int oversample = kDefaultOversample;
    int quant_bits = kDefaultBits;
    StepLayout layout;
    PSOConfig pso;
    ACOConfig aco;
    GAConfig ga;
};

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

struct CampaignCell {
    std::string algorithm;
    int variant = 0;
    int repeat = 0;
    bool ok = false;
    std::string error;
    RunRecord record;
};

struct CampaignResult {
    std::vector<std::string> algorithms;
    std::vector<std::string> variant_names;
    int n_repeats = 0;
    std::vector<CampaignCell> cells;  // algo-major, then variant, then repeat
    std::vector<MetricsReport> step_reports;  // plain step per variant
    std::vector<bool> step_ok;

    const CampaignCell& cell(int a, int v, int r) const;
    // best-cost repeat for a cell group; -1 when every repeat failed
    int best_repeat(int a, int v) const;
};

CampaignResult run_campaign(const ExperimentConfig& cfg);

void emit_learning_curves(const CampaignResult& result, const std::string& dir);
std::string summary_table_csv(const CampaignResult& result);
std::string summary_table_text(const CampaignResult& result);
void emit_summary_table(const CampaignResult& result, const std::string& dir);
void persist_records(const CampaignResult& result, const std::string& dir);

struct BaselineRow {
    std::string name;
    MetricsReport report;
};

std::vector<BaselineRow> baseline_rows(const StateSpaceModel& model, const StepLayout& layout,
                                       int oversample = kDefaultOversample);
std::string baselines_csv(const std::vector<BaselineRow>& rows);
std::string baselines_text(const std::vector<BaselineRow>& rows);

// resolves the plant selector into (tf, calibrated model); fills variant list for "variants"
std::vector<TransferFunction> select_plants(const std::string& selector);

}  // namespace soa
