#include "common.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace soa {

uint64_t splitmix64_next(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t mix64(uint64_t x) {
    uint64_t s = x;
    return splitmix64_next(s);
}

uint64_t mix_seed(uint64_t base, uint64_t algo, uint64_t variant, uint64_t repeat) {
    uint64_t s = base;
    uint64_t h = splitmix64_next(s);
    s = h ^ algo;
    h = splitmix64_next(s);
    s = h ^ variant;
    h = splitmix64_next(s);
    s = h ^ repeat;
    return splitmix64_next(s);
}

double Rng::gauss(double mu, double sigma) {
    if (have_spare_) {
        have_spare_ = false;
        return mu + sigma * spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * u01() - 1.0;
        v = 2.0 * u01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return mu + sigma * u * f;
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
    if (!out) throw Error("write failed: " + path);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace soa
