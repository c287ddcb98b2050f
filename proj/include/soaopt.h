#ifndef SOAOPT_H
#define SOAOPT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define SOA_OK 0
#define SOA_ERR_INVALID 1
#define SOA_ERR_RUNTIME 2

typedef struct soa_plant soa_plant;

/* plant handles; NULL on failure, see soa_last_error() */
soa_plant* soa_plant_canonical(void);
soa_plant* soa_plant_variant(int index); /* 0..9, the published variant suite */
soa_plant* soa_plant_load(const char* tf_json_path);
void soa_plant_free(soa_plant* p);

int soa_plant_order(const soa_plant* p);
double soa_plant_dc_gain(const soa_plant* p);
const char* soa_plant_variant_name(const soa_plant* p);

/* simulate a drive (volts) against the plant; out_response receives n
 * normalized output samples */
int soa_simulate(const soa_plant* p, const double* drive, int n, double sample_period,
                 int oversample, double* out_response);

typedef struct soa_metrics_report {
    double rise_s;
    double settling_s; /* valid only when settled != 0 */
    int settled;
    double overshoot_pct;
    double mse;
    double snr_db; /* NaN when not settled */
} soa_metrics_report;

/* simulate a drive and score it against the plant's own ideal step target */
int soa_drive_metrics(const soa_plant* p, const double* drive, int n, double sample_period,
                      int oversample, soa_metrics_report* out);

/* run one optimizer ("pso" | "aco" | "ga") with tuned defaults; out_waveform
 * must hold 240 samples */
int soa_optimize(const soa_plant* p, const char* algorithm, uint64_t seed,
                 double* out_waveform, int waveform_capacity, soa_metrics_report* out_metrics);

/* magnitude response in dB normalized to the first frequency */
int soa_freq_response(const soa_plant* p, const double* freqs_hz, int n, double* out_db);

/* thread-local message for the most recent failure */
const char* soa_last_error(void);

const char* soa_version(void);

#ifdef __cplusplus
}
#endif

#endif /* SOAOPT_H */
