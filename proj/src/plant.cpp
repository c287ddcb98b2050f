#include "plant.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "json.hpp"

namespace soa {

DiodeParams fit_diode_params(const std::vector<std::pair<double, double>>& iv_points,
                             double temperature_k) {
    if (iv_points.size() < 2) throw Error("diode fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [v, i] : iv_points) {
        if (i <= 0.0) throw Error("diode fit needs positive currents");
        if (v >= 0.8) throw Error("diode fit valid below 0.8 V only");
        double y = std::log(i);
        sx += v;
        sy += y;
        sxx += v * v;
        sxy += v * y;
    }
    double n = static_cast<double>(iv_points.size());
    double denom = n * sxx - sx * sx;
    if (std::fabs(denom) < 1e-30) throw Error("degenerate diode fit: identical voltages");
    double slope = (n * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / n;
    double vt = 1.380649e-23 * temperature_k / 1.602176634e-19;
    DiodeParams p;
    p.eta = 1.0 / (slope * vt);
    p.i_sat = std::exp(intercept);
    return p;
}

int TransferFunction::order() const {
    for (int i = 9; i >= 0; --i)
        if (a[i] != 0.0) return i;
    return 0;
}

TransferFunction canonical_tf() {
    TransferFunction tf;
    tf.numerator = 2.01e85;
    tf.a = {2.40e90, 1.69e81, 9.20e71, 2.82e62, 1.37e52,
            1.70e42, 4.76e31, 3.05e21, 4.56e10, 1.65};
    tf.variant = "canonical";
    return tf;
}

std::vector<TransferFunction> make_variants(const TransferFunction& base) {
    struct Spec {
        int target;  // -1 numerator, else coefficient index
        double factor;
    };
    static const Spec specs[] = {{-1, 1.0},  {-1, 1.2},  {-1, 1.4}, {0, 0.8}, {1, 0.7},
                                 {1, 0.8},   {1, 1.2},   {2, 1.05}, {2, 1.1}, {2, 1.2}};
    std::vector<TransferFunction> out;
    for (auto& s : specs) {
        TransferFunction tf = base;
        char buf[48];
        if (s.target < 0) {
            tf.numerator *= s.factor;
            std::snprintf(buf, sizeof(buf), "numerator_x%.2f", s.factor);
        } else {
            tf.a[s.target] *= s.factor;
            std::snprintf(buf, sizeof(buf), "a%d_x%.2f", s.target, s.factor);
        }
        tf.variant = buf;
        out.push_back(tf);
    }
    return out;
}

std::string tf_to_json(const TransferFunction& tf) {
    nlohmann::json j;
    j["numerator"] = tf.numerator;
    for (int i = 0; i < 10; ++i) j["a" + std::to_string(i)] = tf.a[i];
    j["variant"] = tf.variant;
    return j.dump(2) + "\n";
}

TransferFunction tf_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    TransferFunction tf;
    tf.numerator = j.at("numerator").get<double>();
    for (int i = 0; i < 10; ++i) tf.a[i] = j.at("a" + std::to_string(i)).get<double>();
    tf.variant = j.value("variant", "unnamed");
    return tf;
}

void save_tf(const TransferFunction& tf, const std::string& path) {
    write_text_file(path, tf_to_json(tf));
}

TransferFunction load_tf(const std::string& path) {
    return tf_from_json(read_text_file(path));
}

StateSpaceModel to_state_space(const TransferFunction& tf, double freq_scale) {
    if (freq_scale <= 0.0) throw Error("freq_scale must be positive");
    int n = tf.order();
    if (n < 1) throw Error("transfer function has no dynamics");
    double an = tf.a[n] * std::pow(freq_scale, n);
    StateSpaceModel m;
    m.n = n;
    m.freq_scale = freq_scale;
    m.c.resize(n);
    for (int i = 0; i < n; ++i) {
        m.c[i] = tf.a[i] * std::pow(freq_scale, i) / an;
        if (!std::isfinite(m.c[i])) throw Error("frequency scaling produced non-finite coefficients");
    }
    m.b_gain = tf.numerator / an;
    if (!std::isfinite(m.b_gain)) throw Error("frequency scaling produced non-finite gain");
    m.A.assign(n * n, 0.0);
    for (int i = 0; i + 1 < n; ++i) m.A[i * n + i + 1] = 1.0;
    for (int j = 0; j < n; ++j) m.A[(n - 1) * n + j] = -m.c[j];
    m.B.assign(n, 0.0);
    m.B[n - 1] = 1.0;
    m.C.assign(n, 0.0);
    m.C[0] = m.b_gain;
    m.D = 0.0;
    m.norm_reference = 1.0;
    return m;
}

namespace {

// dx/dtau for the companion realization: O(n) instead of a dense matvec
inline void deriv(const StateSpaceModel& m, const std::vector<double>& x, double u,
                  std::vector<double>& dx) {
    int n = m.n;
    for (int i = 0; i + 1 < n; ++i) dx[i] = x[i + 1];
    double acc = u;
    for (int j = 0; j < n; ++j) acc -= m.c[j] * x[j];
    dx[n - 1] = acc;
}

inline void rk4_step(const StateSpaceModel& m, std::vector<double>& x, double u, double h,
                     std::vector<double>& k1, std::vector<double>& k2, std::vector<double>& k3,
                     std::vector<double>& k4, std::vector<double>& tmp) {
    int n = m.n;
    deriv(m, x, u, k1);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    deriv(m, tmp, u, k2);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    deriv(m, tmp, u, k3);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    deriv(m, tmp, u, k4);
    for (int i = 0; i < n; ++i)
        x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

std::vector<double> equilibrium_state(const StateSpaceModel& m, double u0) {
    if (m.c[0] == 0.0) throw Error("plant has no DC equilibrium");
    std::vector<double> x(m.n, 0.0);
    x[0] = u0 / m.c[0];
    return x;
}

}  // namespace

ResponseTrace simulate(const StateSpaceModel& model, const Waveform& drive, int oversample) {
    if (oversample < 1) throw Error("oversample must be >= 1");
    if (drive.samples.empty()) throw Error("empty drive");
    int n = model.n;
    double h = model.freq_scale * drive.sample_period / oversample;
    std::vector<double> x = equilibrium_state(model, drive.samples[0]);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    ResponseTrace tr;
    tr.sample_period = drive.sample_period;
    tr.norm_reference = model.norm_reference;
    tr.samples.resize(drive.samples.size());
    for (size_t k = 0; k < drive.samples.size(); ++k) {
        double u = drive.samples[k];
        for (int s = 0; s < oversample; ++s) rk4_step(model, x, u, h, k1, k2, k3, k4, tmp);
        double y = model.b_gain * x[0];
        if (!std::isfinite(y))
            throw Error("simulation diverged at sample " + std::to_string(k));
        tr.samples[k] = y / model.norm_reference;
    }
    return tr;
}

StateSpaceModel make_model(const TransferFunction& tf, const StepLayout& layout,
                           int oversample, double freq_scale) {
    StateSpaceModel m = to_state_space(tf, freq_scale);
    ResponseTrace raw = simulate(m, step(layout), oversample);
    int on_w = std::max(1, layout.on_len / 5);
    double acc = 0.0;
    for (int i = layout.length() - on_w; i < layout.length(); ++i) acc += raw.samples[i];
    double ref = acc / on_w;
    if (!(ref > 0.0)) throw Error("step response steady state not positive");
    m.norm_reference = ref;
    return m;
}

PlantSim::PlantSim(const StateSpaceModel& model, double sample_period, int oversample)
    : m_(model),
      x_(model.n, 0.0),
      h_(model.freq_scale * sample_period / oversample),
      oversample_(oversample) {}

void PlantSim::reset(double u0) { x_ = equilibrium_state(m_, u0); }

double PlantSim::step_sample(double u) {
    std::vector<double> k1(m_.n), k2(m_.n), k3(m_.n), k4(m_.n), tmp(m_.n);
    for (int s = 0; s < oversample_; ++s) rk4_step(m_, x_, u, h_, k1, k2, k3, k4, tmp);
    return m_.b_gain * x_[0] / m_.norm_reference;
}

std::vector<std::pair<double, double>> frequency_response(const TransferFunction& tf,
                                                          const std::vector<double>& freqs_hz) {
    if (freqs_hz.empty()) throw Error("no frequencies requested");
    int n = tf.order();
    double w0 = kFreqScale;
    double an = tf.a[n] * std::pow(w0, n);
    std::vector<double> c(n);
    for (int i = 0; i < n; ++i) c[i] = tf.a[i] * std::pow(w0, i) / an;
    double b = tf.numerator / an;
    std::vector<std::pair<double, double>> out;
    out.reserve(freqs_hz.size());
    double anchor = 0.0;
    for (size_t k = 0; k < freqs_hz.size(); ++k) {
        double f = freqs_hz[k];
        if (f <= 0.0) throw Error("frequencies must be positive");
        std::complex<double> sigma(0.0, 2.0 * M_PI * f / w0);
        std::complex<double> p(1.0, 0.0);
        for (int i = n - 1; i >= 0; --i) p = p * sigma + c[i];
        double db = 20.0 * std::log10(std::abs(b / p));
        if (k == 0) anchor = db;
        out.emplace_back(f, db - anchor);
    }
    return out;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> out(n);
    double llo = std::log10(lo), lhi = std::log10(hi);
    for (int i = 0; i < n; ++i)
        out[i] = std::pow(10.0, llo + (lhi - llo) * i / (n - 1));
    return out;
}

double bandwidth_3db(const TransferFunction& tf, double f_lo, double f_hi, int n_grid) {
    auto resp = frequency_response(tf, log_spaced(f_lo, f_hi, n_grid));
    for (size_t i = 1; i < resp.size(); ++i) {
        if (resp[i].second <= -3.0) {
            double f0 = resp[i - 1].first, f1 = resp[i].first;
            double d0 = resp[i - 1].second, d1 = resp[i].second;
            double t = (-3.0 - d0) / (d1 - d0);
            return std::exp(std::log(f0) + t * (std::log(f1) - std::log(f0)));
        }
    }
    throw Error("-3 dB point not reached in the requested range");
}

}  // namespace soa
