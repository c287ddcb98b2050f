#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace soa {

double steady_state(const ResponseTrace& trace, int from, int to) {
    int n = static_cast<int>(trace.samples.size());
    if (from < 0 || to > n || from >= to) throw Error("steady-state window invalid");
    double acc = 0.0;
    for (int i = from; i < to; ++i) acc += trace.samples[i];
    return acc / (to - from);
}

double off_steady(const ResponseTrace& trace, int edge_index) {
    int w = std::max(1, edge_index / 5);
    return steady_state(trace, edge_index - w, edge_index);
}

double on_steady(const ResponseTrace& trace, int edge_index) {
    int n = static_cast<int>(trace.samples.size());
    int w = std::max(1, (n - edge_index) / 5);
    return steady_state(trace, n - w, n);
}

namespace {

// first crossing of level at or after edge, sub-sample interpolated
double crossing_pos(const std::vector<double>& y, int edge, double level) {
    int n = static_cast<int>(y.size());
    for (int i = edge; i < n; ++i) {
        if (y[i] >= level) {
            if (i > edge && y[i - 1] < level)
                return (i - 1) + (level - y[i - 1]) / (y[i] - y[i - 1]);
            return i;
        }
    }
    return -1.0;
}

}  // namespace

double rise_time(const ResponseTrace& trace, int edge_index) {
    double off = off_steady(trace, edge_index);
    double on = on_steady(trace, edge_index);
    if (on <= off) throw Error("on steady state not above off steady state");
    double swing = on - off;
    double p10 = crossing_pos(trace.samples, edge_index, off + 0.1 * swing);
    double p90 = crossing_pos(trace.samples, edge_index, off + 0.9 * swing);
    if (p90 < 0.0) throw Error("NOT_RISEN: 90% level never reached");
    if (p10 < 0.0) p10 = edge_index;
    return (p90 - p10) * trace.sample_period;
}

std::optional<double> settling_time(const ResponseTrace& trace, int edge_index) {
    int n = static_cast<int>(trace.samples.size());
    double on = on_steady(trace, edge_index);
    double band = 0.05 * std::fabs(on);
    int last_out = edge_index - 1;
    for (int i = edge_index; i < n; ++i)
        if (std::fabs(trace.samples[i] - on) > band) last_out = i;
    if (last_out == n - 1) return std::nullopt;
    int samples = std::max(1, last_out + 1 - edge_index);
    return samples * trace.sample_period;
}

double overshoot(const ResponseTrace& trace, int edge_index) {
    int n = static_cast<int>(trace.samples.size());
    double on = on_steady(trace, edge_index);
    double peak = trace.samples[edge_index];
    for (int i = edge_index; i < n; ++i) peak = std::max(peak, trace.samples[i]);
    return std::max(0.0, (peak - on) / on * 100.0);
}

double on_snr_db(const ResponseTrace& trace, int edge_index) {
    auto settle = settling_time(trace, edge_index);
    if (!settle) throw Error("snr undefined: trace never settles");
    int start = edge_index + static_cast<int>(std::lround(*settle / trace.sample_period));
    int n = static_cast<int>(trace.samples.size());
    start = std::min(start, n - 1);
    double mean = 0.0;
    for (int i = start; i < n; ++i) mean += trace.samples[i];
    mean /= (n - start);
    double var = 0.0;
    for (int i = start; i < n; ++i) {
        double d = trace.samples[i] - mean;
        var += d * d;
    }
    var /= (n - start);
    if (var <= 0.0) return 99.0;
    return std::min(99.0, 10.0 * std::log10(mean * mean / var));
}

double mse(const ResponseTrace& pv, const SetPoint& sp) {
    if (pv.samples.size() != sp.samples.size()) throw Error("mse length mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < pv.samples.size(); ++i) {
        double d = pv.samples[i] - sp.samples[i];
        acc += d * d;
    }
    return acc / pv.samples.size();
}

double cost_spread(const std::vector<double>& final_costs) {
    if (final_costs.size() < 2) throw Error("cost spread needs at least two runs");
    double lo = final_costs[0], hi = final_costs[0], mean = 0.0;
    for (double c : final_costs) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
        mean += c;
    }
    mean /= final_costs.size();
    if (mean == 0.0) throw Error("cost spread undefined for zero mean");
    return (hi - lo) / mean * 100.0;
}

SummaryStats summarize(const std::vector<std::optional<double>>& values) {
    if (values.empty()) throw Error("summarize needs input");
    SummaryStats s;
    std::vector<double> kept;
    for (auto& v : values) {
        if (v)
            kept.push_back(*v);
        else
            ++s.excluded_count;
    }
    if (kept.empty()) throw Error("summarize: every entry excluded");
    s.min = *std::min_element(kept.begin(), kept.end());
    s.max = *std::max_element(kept.begin(), kept.end());
    for (double v : kept) s.mean += v;
    s.mean /= kept.size();
    for (double v : kept) s.std += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(s.std / kept.size());
    return s;
}

MetricsReport compute_report(const ResponseTrace& trace, const SetPoint& sp) {
    MetricsReport r;
    r.rise_time = rise_time(trace, sp.edge_index);
    r.settling_time = settling_time(trace, sp.edge_index);
    r.overshoot_pct = overshoot(trace, sp.edge_index);
    r.mse = mse(trace, sp);
    r.on_snr_db = r.settling_time ? on_snr_db(trace, sp.edge_index)
                                  : std::numeric_limits<double>::quiet_NaN();
    return r;
}

std::string metrics_csv_header() { return "rise_ps,settle_ps,overshoot_pct,mse,snr_db"; }

static std::string num_or_empty(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string metrics_csv_row(const MetricsReport& r) {
    std::ostringstream out;
    out << num_or_empty(r.rise_time * 1e12) << ",";
    out << (r.settling_time ? num_or_empty(*r.settling_time * 1e12) : "") << ",";
    out << num_or_empty(r.overshoot_pct) << ",";
    out << num_or_empty(r.mse) << ",";
    out << num_or_empty(r.on_snr_db);
    return out.str();
}

}  // namespace soa
