#pragma once

#include <optional>
#include <vector>

#include "plant.hpp"
#include "signals.hpp"

namespace soa {

struct MetricsReport {
    double rise_time = 0.0;
    std::optional<double> settling_time;
    double overshoot_pct = 0.0;
    double mse = 0.0;
    double on_snr_db = 0.0;
};

struct SummaryStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double std = 0.0;  // population
    int excluded_count = 0;
};

double steady_state(const ResponseTrace& trace, int from, int to);
double off_steady(const ResponseTrace& trace, int edge_index);
double on_steady(const ResponseTrace& trace, int edge_index);

double rise_time(const ResponseTrace& trace, int edge_index);
std::optional<double> settling_time(const ResponseTrace& trace, int edge_index);
double overshoot(const ResponseTrace& trace, int edge_index);
double on_snr_db(const ResponseTrace& trace, int edge_index);
double mse(const ResponseTrace& pv, const SetPoint& sp);

double cost_spread(const std::vector<double>& final_costs);
SummaryStats summarize(const std::vector<std::optional<double>>& values);

MetricsReport compute_report(const ResponseTrace& trace, const SetPoint& sp);

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& r);

}  // namespace soa
