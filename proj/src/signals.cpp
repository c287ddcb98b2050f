#include "signals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "metrics.hpp"
#include "plant.hpp"

namespace soa {

bool BoundsTemplate::contains(const std::vector<double>& w) const {
    if (w.size() != lo.size()) return false;
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i] < lo[i] || w[i] > hi[i]) return false;
    }
    return true;
}

static void check_layout(const StepLayout& layout) {
    if (layout.off_len < 0 || layout.on_len < 0) throw Error("negative layout length");
    if (layout.v_off < 0.0 || layout.v_on > kMaxVolts || layout.v_off >= layout.v_on)
        throw Error("layout voltages out of range");
}

Waveform step(const StepLayout& layout, double sample_period) {
    check_layout(layout);
    Waveform w;
    w.sample_period = sample_period;
    w.samples.assign(layout.length(), layout.v_off);
    std::fill(w.samples.begin() + layout.off_len, w.samples.end(), layout.v_on);
    return w;
}

Waveform pisic(const StepLayout& layout, double impulse_v, double impulse_width,
               double sample_period) {
    if (layout.v_on + impulse_v > kMaxVolts + 1e-12)
        throw Error("pisic impulse exceeds voltage cap");
    if (impulse_width < sample_period) throw Error("pisic impulse narrower than one sample");
    Waveform w = step(layout, sample_period);
    int n = static_cast<int>(std::lround(impulse_width / sample_period));
    n = std::min(n, layout.on_len);
    for (int i = 0; i < n; ++i) w.samples[layout.off_len + i] = layout.v_on + impulse_v;
    return w;
}

Waveform misic(const StepLayout& layout, double impulse_v, const std::string& pattern,
               double slot_width, double sample_period) {
    if (pattern.empty()) throw Error("misic pattern empty");
    if (layout.v_on + impulse_v > kMaxVolts + 1e-12)
        throw Error("misic impulse exceeds voltage cap");
    int slot = static_cast<int>(std::lround(slot_width / sample_period));
    if (slot < 1) throw Error("misic slot narrower than one sample");
    if (static_cast<int>(pattern.size()) * slot > layout.on_len)
        throw Error("misic pattern overruns the on period");
    Waveform w = step(layout, sample_period);
    for (size_t k = 0; k < pattern.size(); ++k) {
        if (pattern[k] == '0') continue;
        if (pattern[k] != '1') throw Error("misic pattern must be a bit string");
        int start = layout.off_len + static_cast<int>(k) * slot;
        for (int i = 0; i < slot; ++i) w.samples[start + i] = layout.v_on + impulse_v;
    }
    return w;
}

double raised_cosine_h(double f, double beta, double symbol_period) {
    double af = std::fabs(f);
    double lo = (1.0 - beta) / (2.0 * symbol_period);
    double hi = (1.0 + beta) / (2.0 * symbol_period);
    if (beta == 0.0) return af <= 1.0 / (2.0 * symbol_period) ? 1.0 : 0.0;
    if (af <= lo) return 1.0;
    if (af >= hi) return 0.0;
    return 0.5 * (1.0 + std::cos(M_PI * symbol_period / beta * (af - lo)));
}

Waveform raised_cosine_step(const StepLayout& layout, double beta, double sample_period,
                            double symbol_period) {
    if (beta < 0.0 || beta > 1.0) throw Error("beta outside [0, 1]");
    Waveform w = step(layout, sample_period);
    double window = 4.0 * symbol_period;
    int half = static_cast<int>(std::lround(window / sample_period));
    int lo_i = std::max(0, layout.off_len - half);
    int hi_i = std::min(layout.length() - 1, layout.off_len + half);

    // time-domain pulse via inverse transform of the spectrum, then a running
    // sum shaped into the edge
    double fmax = (1.0 + beta) / (2.0 * symbol_period);
    const int nf = 2048;
    double df = fmax / nf;
    std::vector<double> pulse(hi_i - lo_i + 1);
    for (int i = lo_i; i <= hi_i; ++i) {
        double t = (i - layout.off_len) * sample_period;
        double acc = 0.0;
        for (int k = 0; k <= nf; ++k) {
            double f = k * df;
            double v = raised_cosine_h(f, beta, symbol_period) * std::cos(2.0 * M_PI * f * t);
            acc += (k == 0 || k == nf) ? 0.5 * v : v;
        }
        pulse[i - lo_i] = 2.0 * acc * df;
    }
    double total = 0.0;
    for (double p : pulse) total += p;
    if (total <= 0.0) throw Error("degenerate raised-cosine pulse");
    double cum = 0.0;
    for (int i = lo_i; i <= hi_i; ++i) {
        cum += pulse[i - lo_i];
        double v = layout.v_off + (layout.v_on - layout.v_off) * (cum / total);
        w.samples[i] = std::clamp(v, 0.0, kMaxVolts);
    }
    return w;
}

SetPoint make_set_point(const ResponseTrace& reference, int edge_index) {
    if (!settling_time(reference, edge_index))
        throw Error("set-point reference never settles");
    int n = static_cast<int>(reference.samples.size());
    int off_w = std::max(1, edge_index / 5);
    int on_w = std::max(1, (n - edge_index) / 5);
    SetPoint sp;
    sp.edge_index = edge_index;
    sp.off_value = steady_state(reference, edge_index - off_w, edge_index);
    sp.on_value = steady_state(reference, n - on_w, n);
    sp.samples.assign(n, sp.off_value);
    for (int i = edge_index; i < n; ++i) sp.samples[i] = sp.on_value;
    return sp;
}

BoundsTemplate pisic_shell(const StepLayout& layout, double shell_w_f, double on_s_f,
                           double off_s_f) {
    if (shell_w_f < 0.0 || on_s_f <= 0.0 || off_s_f <= 0.0)
        throw Error("shell factors must be positive");
    BoundsTemplate b;
    int n = layout.length();
    b.lo.assign(n, 0.0);
    b.hi.assign(n, 0.0);
    int lead = static_cast<int>(std::lround(shell_w_f * layout.on_len));
    double on_lo = layout.v_on / on_s_f;
    double on_hi = std::min(on_s_f * layout.v_on, kMaxVolts);
    for (int i = 0; i < n; ++i) {
        if (i < layout.off_len) {
            b.lo[i] = 0.0;
            b.hi[i] = off_s_f * layout.v_on;
        } else if (i < layout.off_len + lead) {
            b.lo[i] = on_lo;
            b.hi[i] = kMaxVolts;
        } else {
            b.lo[i] = on_lo;
            b.hi[i] = on_hi;
        }
        if (b.lo[i] > b.hi[i]) throw Error("shell bounds inverted");
    }
    return b;
}

Waveform quantize(const Waveform& w, int bits) {
    if (bits < 1 || bits > 16) throw Error("quantize bits outside [1, 16]");
    double levels = static_cast<double>((1 << bits) - 1);
    Waveform out = w;
    for (double& s : out.samples)
        s = std::round(s / kMaxVolts * levels) / levels * kMaxVolts;
    return out;
}

void save_waveform(const Waveform& w, const std::string& path) {
    std::ostringstream csv;
    for (double s : w.samples) csv << format_g17(s) << "\n";
    write_text_file(path, csv.str());
    std::ostringstream meta;
    meta << "sample_period=" << format_g17(w.sample_period) << "\n";
    meta << "length=" << w.samples.size() << "\n";
    write_text_file(path + ".meta", meta.str());
}

Waveform load_waveform(const std::string& path) {
    Waveform w;
    std::istringstream csv(read_text_file(path));
    std::string line;
    while (std::getline(csv, line)) {
        if (line.empty() || line == "\r") continue;
        w.samples.push_back(std::strtod(line.c_str(), nullptr));
    }
    std::istringstream meta(read_text_file(path + ".meta"));
    size_t expect = w.samples.size();
    while (std::getline(meta, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        if (key == "sample_period") w.sample_period = std::strtod(val.c_str(), nullptr);
        if (key == "length") expect = std::strtoul(val.c_str(), nullptr, 10);
    }
    if (expect != w.samples.size()) throw Error("waveform length mismatch in " + path);
    return w;
}

}  // namespace soa
