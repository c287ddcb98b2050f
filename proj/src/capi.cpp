#include "soaopt.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "harness.hpp"
#include "metrics.hpp"
#include "optim.hpp"
#include "plant.hpp"
#include "signals.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

}  // namespace

struct soa_plant {
    soa::TransferFunction tf;
    soa::StateSpaceModel model;
    soa::StepLayout layout;
};

extern "C" {

soa_plant* soa_plant_canonical(void) {
    try {
        auto* p = new soa_plant;
        p->tf = soa::canonical_tf();
        p->model = soa::make_model(p->tf, p->layout);
        return p;
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

soa_plant* soa_plant_variant(int index) {
    try {
        auto variants = soa::make_variants(soa::canonical_tf());
        if (index < 0 || index >= static_cast<int>(variants.size())) {
            set_error("variant index out of range");
            return nullptr;
        }
        auto* p = new soa_plant;
        p->tf = variants[index];
        p->model = soa::make_model(p->tf, p->layout);
        return p;
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

soa_plant* soa_plant_load(const char* tf_json_path) {
    if (!tf_json_path) {
        set_error("null path");
        return nullptr;
    }
    try {
        auto* p = new soa_plant;
        p->tf = soa::load_tf(tf_json_path);
        p->model = soa::make_model(p->tf, p->layout);
        return p;
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void soa_plant_free(soa_plant* p) { delete p; }

int soa_plant_order(const soa_plant* p) { return p ? p->tf.order() : -1; }

double soa_plant_dc_gain(const soa_plant* p) {
    return p ? p->tf.dc_gain() : std::numeric_limits<double>::quiet_NaN();
}

const char* soa_plant_variant_name(const soa_plant* p) {
    return p ? p->tf.variant.c_str() : nullptr;
}

int soa_simulate(const soa_plant* p, const double* drive, int n, double sample_period,
                 int oversample, double* out_response) {
    if (!p || !drive || !out_response || n <= 0 || sample_period <= 0.0 || oversample < 1) {
        set_error("invalid simulate arguments");
        return SOA_ERR_INVALID;
    }
    try {
        soa::Waveform w;
        w.sample_period = sample_period;
        w.samples.assign(drive, drive + n);
        soa::ResponseTrace tr = soa::simulate(p->model, w, oversample);
        std::memcpy(out_response, tr.samples.data(), sizeof(double) * n);
        return SOA_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return SOA_ERR_RUNTIME;
    }
}

int soa_drive_metrics(const soa_plant* p, const double* drive, int n, double sample_period,
                      int oversample, soa_metrics_report* out) {
    if (!p || !drive || !out || n <= 0 || sample_period <= 0.0 || oversample < 1) {
        set_error("invalid metrics arguments");
        return SOA_ERR_INVALID;
    }
    try {
        soa::Waveform w;
        w.sample_period = sample_period;
        w.samples.assign(drive, drive + n);
        soa::ResponseTrace step_resp =
            soa::simulate(p->model, soa::step(p->layout, sample_period), oversample);
        soa::SetPoint sp = soa::make_set_point(step_resp, p->layout.off_len);
        soa::MetricsReport m = soa::compute_report(soa::simulate(p->model, w, oversample), sp);
        out->rise_s = m.rise_time;
        out->settled = m.settling_time ? 1 : 0;
        out->settling_s = m.settling_time ? *m.settling_time : 0.0;
        out->overshoot_pct = m.overshoot_pct;
        out->mse = m.mse;
        out->snr_db = m.on_snr_db;
        return SOA_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return SOA_ERR_RUNTIME;
    }
}

int soa_optimize(const soa_plant* p, const char* algorithm, uint64_t seed,
                 double* out_waveform, int waveform_capacity, soa_metrics_report* out_metrics) {
    if (!p || !algorithm || !out_waveform) {
        set_error("invalid optimize arguments");
        return SOA_ERR_INVALID;
    }
    try {
        soa::ExperimentConfig defaults;
        soa::Waveform base_step = soa::step(p->layout);
        if (waveform_capacity < base_step.size()) {
            set_error("waveform capacity too small");
            return SOA_ERR_INVALID;
        }
        soa::ResponseTrace step_resp = soa::simulate(p->model, base_step, defaults.oversample);
        soa::SetPoint sp = soa::make_set_point(step_resp, p->layout.off_len);
        soa::BoundsTemplate shell = soa::pisic_shell(p->layout, defaults.pso.shell_w_f,
                                                     defaults.pso.on_s_f, defaults.pso.off_s_f);
        soa::FitnessContext ctx = soa::make_context(p->model, sp, shell, base_step,
                                                    defaults.quant_bits, defaults.oversample);
        soa::RunRecord rec;
        std::string algo = algorithm;
        if (algo == "pso") {
            soa::PSOConfig c = defaults.pso;
            c.seed = seed;
            rec = soa::pso_run(ctx, c);
        } else if (algo == "aco") {
            soa::ACOConfig c = defaults.aco;
            c.seed = seed;
            rec = soa::aco_run(ctx, c, p->layout);
        } else if (algo == "ga") {
            soa::GAConfig c = defaults.ga;
            c.seed = seed;
            rec = soa::ga_run(ctx, c);
        } else {
            set_error("unknown algorithm: " + algo);
            return SOA_ERR_INVALID;
        }
        std::memcpy(out_waveform, rec.best_waveform.samples.data(),
                    sizeof(double) * rec.best_waveform.samples.size());
        if (out_metrics) {
            const soa::MetricsReport& m = rec.best_metrics;
            out_metrics->rise_s = m.rise_time;
            out_metrics->settled = m.settling_time ? 1 : 0;
            out_metrics->settling_s = m.settling_time ? *m.settling_time : 0.0;
            out_metrics->overshoot_pct = m.overshoot_pct;
            out_metrics->mse = m.mse;
            out_metrics->snr_db = m.on_snr_db;
        }
        return SOA_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return SOA_ERR_RUNTIME;
    }
}

int soa_freq_response(const soa_plant* p, const double* freqs_hz, int n, double* out_db) {
    if (!p || !freqs_hz || !out_db || n <= 0) {
        set_error("invalid frequency response arguments");
        return SOA_ERR_INVALID;
    }
    try {
        std::vector<double> freqs(freqs_hz, freqs_hz + n);
        auto resp = soa::frequency_response(p->tf, freqs);
        for (int i = 0; i < n; ++i) out_db[i] = resp[i].second;
        return SOA_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return SOA_ERR_RUNTIME;
    }
}

const char* soa_last_error(void) { return g_last_error.c_str(); }

const char* soa_version(void) { return "1.0.0"; }

}  // extern "C"
