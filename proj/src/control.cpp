#include "control.hpp"

#include <algorithm>
#include <cmath>

namespace soa {

namespace {

double crossing_after(const std::vector<double>& y, int edge, double level) {
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

FOPDTParams fit_fopdt(const ResponseTrace& step_response, const StepLayout& layout) {
    int edge = layout.off_len;
    if (!settling_time(step_response, edge)) throw Error("fopdt fit needs a settled response");
    double off = off_steady(step_response, edge);
    double on = on_steady(step_response, edge);
    double swing = on - off;
    if (swing <= 0.0) throw Error("fopdt fit needs a positive swing");

    double p5 = crossing_after(step_response.samples, edge, off + 0.05 * swing);
    double p632 = crossing_after(step_response.samples, edge, off + 0.632 * swing);
    if (p632 < 0.0) throw Error("response never reaches 63.2% of swing");
    if (p5 < 0.0) p5 = edge;

    FOPDTParams f;
    f.k_p = swing / (layout.v_on - layout.v_off);
    f.theta_p = (p5 - edge) * step_response.sample_period;
    f.tau_p = (p632 - p5) * step_response.sample_period;
    if (f.tau_p <= 0.0) throw Error("fopdt time constant not positive");
    return f;
}

PIDConfig imc_tune(const FOPDTParams& f, double tau_c_factor, double sample_period) {
    if (tau_c_factor <= 0.0) throw Error("tau_c factor must be positive");
    PIDConfig cfg;
    cfg.tau_c = tau_c_factor;
    cfg.sample_period = sample_period;
    double half_theta = f.theta_p / 2.0;
    cfg.k_c = (1.0 / f.k_p) * (f.tau_p + half_theta) / (tau_c_factor * f.tau_p + half_theta);
    double tau_i = f.tau_p + half_theta;
    double tau_d = f.tau_p * f.theta_p / (2.0 * f.tau_p + f.theta_p);
    cfg.k_i = cfg.k_c / tau_i;
    cfg.k_d = cfg.k_c * tau_d;
    return cfg;
}

Waveform pid_drive(const StateSpaceModel& model, const SetPoint& sp, const PIDConfig& cfg,
                   int oversample) {
    int n = static_cast<int>(sp.samples.size());
    if (n == 0) throw Error("empty set point");
    double dc = model.b_gain / model.c[0] / model.norm_reference;  // normalized output per volt
    if (dc <= 0.0) throw Error("plant has non-positive dc gain");
    double u0 = std::clamp(sp.off_value / dc, 0.0, kMaxVolts);

    PlantSim sim(model, cfg.sample_period, oversample);
    sim.reset(u0);

    Waveform drive;
    drive.sample_period = cfg.sample_period;
    drive.samples.resize(n);

    double integ = u0;  // bumpless start: zero error holds the equilibrium drive
    double y = sp.off_value;
    double prev_y = y;
    double ts = cfg.sample_period;
    for (int k = 0; k < n; ++k) {
        double e = sp.samples[k] - y;
        integ = std::clamp(integ + cfg.k_i * ts * e, 0.0, kMaxVolts);
        double deriv = -cfg.k_d * (y - prev_y) / ts;
        double u = std::clamp(cfg.k_c * e + integ + deriv, 0.0, kMaxVolts);
        drive.samples[k] = u;
        prev_y = y;
        y = sim.step_sample(u);
    }
    return drive;
}

}  // namespace soa
