#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "signals.hpp"

namespace soa {

struct DiodeParams {
    double eta = 0.0;
    double i_sat = 0.0;
};

DiodeParams fit_diode_params(const std::vector<std::pair<double, double>>& iv_points,
                             double temperature_k);

struct TransferFunction {
    double numerator = 0.0;
    std::array<double, 10> a{};  // ascending powers of s
    std::string variant = "canonical";

    int order() const;
    double dc_gain() const { return numerator / a[0]; }
};

TransferFunction canonical_tf();
std::vector<TransferFunction> make_variants(const TransferFunction& base);

std::string tf_to_json(const TransferFunction& tf);
TransferFunction tf_from_json(const std::string& text);
void save_tf(const TransferFunction& tf, const std::string& path);
TransferFunction load_tf(const std::string& path);

struct StateSpaceModel {
    int n = 0;
    std::vector<double> A;  // n x n row-major
    std::vector<double> B;
    std::vector<double> C;
    double D = 0.0;
    double freq_scale = kFreqScale;
    double norm_reference = 1.0;

    // last-row companion coefficients, kept for the O(n) integrator path
    std::vector<double> c;
    double b_gain = 0.0;
};

struct ResponseTrace {
    std::vector<double> samples;
    double sample_period = kDefaultPeriod;
    double norm_reference = 1.0;
};

StateSpaceModel to_state_space(const TransferFunction& tf, double freq_scale = kFreqScale);

// to_state_space plus normalization against the model's own step response
StateSpaceModel make_model(const TransferFunction& tf,
                           const StepLayout& layout = StepLayout{},
                           int oversample = kDefaultOversample,
                           double freq_scale = kFreqScale);

ResponseTrace simulate(const StateSpaceModel& model, const Waveform& drive, int oversample);

// single-sample stepper for closed-loop use
class PlantSim {
  public:
    PlantSim(const StateSpaceModel& model, double sample_period, int oversample);
    void reset(double u0);
    double step_sample(double u);  // advance one sample period, return end-of-interval output

  private:
    const StateSpaceModel& m_;
    std::vector<double> x_;
    double h_;
    int oversample_;
};

std::vector<std::pair<double, double>> frequency_response(const TransferFunction& tf,
                                                          const std::vector<double>& freqs_hz);

double bandwidth_3db(const TransferFunction& tf, double f_lo = 1e7, double f_hi = 1e10,
                     int n_grid = 4000);

std::vector<double> log_spaced(double lo, double hi, int n);

}  // namespace soa
