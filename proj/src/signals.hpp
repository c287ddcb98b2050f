#pragma once

#include <string>
#include <vector>

#include "common.hpp"

namespace soa {

struct Waveform {
    std::vector<double> samples;
    double sample_period = kDefaultPeriod;

    int size() const { return static_cast<int>(samples.size()); }
};

struct StepLayout {
    int off_len = 60;
    int on_len = 180;
    double v_off = 0.0;
    double v_on = 3.5;

    int length() const { return off_len + on_len; }
};

struct SetPoint {
    std::vector<double> samples;
    int edge_index = 0;
    double off_value = 0.0;
    double on_value = 1.0;
};

struct BoundsTemplate {
    std::vector<double> lo;
    std::vector<double> hi;

    int size() const { return static_cast<int>(lo.size()); }
    bool contains(const std::vector<double>& w) const;
};

struct ResponseTrace;  // plant.hpp

Waveform step(const StepLayout& layout, double sample_period = kDefaultPeriod);
Waveform pisic(const StepLayout& layout, double impulse_v, double impulse_width,
               double sample_period = kDefaultPeriod);
Waveform misic(const StepLayout& layout, double impulse_v, const std::string& pattern,
               double slot_width, double sample_period = kDefaultPeriod);
Waveform raised_cosine_step(const StepLayout& layout, double beta,
                            double sample_period = kDefaultPeriod,
                            double symbol_period = 1e-9);

// Raised-cosine spectrum, unit magnitude in the passband.
double raised_cosine_h(double f, double beta, double symbol_period);

SetPoint make_set_point(const ResponseTrace& reference, int edge_index);

BoundsTemplate pisic_shell(const StepLayout& layout, double shell_w_f, double on_s_f,
                           double off_s_f);

Waveform quantize(const Waveform& w, int bits);

void save_waveform(const Waveform& w, const std::string& path);
Waveform load_waveform(const std::string& path);

}  // namespace soa
