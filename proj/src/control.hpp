#pragma once

#include "metrics.hpp"
#include "plant.hpp"
#include "signals.hpp"

namespace soa {

struct FOPDTParams {
    double k_p = 0.0;     // normalized output per volt
    double tau_p = 0.0;   // s
    double theta_p = 0.0; // s
};

struct PIDConfig {
    double k_c = 0.0;
    double k_i = 0.0;
    double k_d = 0.0;
    double tau_c = 5.0;  // dimensionless factor on tau_p
    double sample_period = kDefaultPeriod;
};

FOPDTParams fit_fopdt(const ResponseTrace& step_response, const StepLayout& layout);

PIDConfig imc_tune(const FOPDTParams& f, double tau_c_factor = 5.0,
                   double sample_period = kDefaultPeriod);

Waveform pid_drive(const StateSpaceModel& model, const SetPoint& sp, const PIDConfig& cfg,
                   int oversample = kDefaultOversample);

}  // namespace soa
