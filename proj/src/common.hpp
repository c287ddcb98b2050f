#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace soa {

inline constexpr double kMaxVolts = 7.0;
inline constexpr int kDefaultLength = 240;
inline constexpr double kDefaultPeriod = 20e-9 / 240;
inline constexpr double kFreqScale = 1e10;
inline constexpr int kDefaultOversample = 10;
inline constexpr int kDefaultBits = 8;

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

uint64_t splitmix64_next(uint64_t& state);
uint64_t mix64(uint64_t x);

// Campaign seed derivation: base seed folded with (algorithm, variant, repeat)
// through the SplitMix64 finalizer so every cell gets an independent stream.
uint64_t mix_seed(uint64_t base, uint64_t algo, uint64_t variant, uint64_t repeat);

class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(mix64(seed)) {}

    double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    uint64_t uniform_int(uint64_t n) { return gen_() % n; }

    double gauss(double mu, double sigma);

    std::mt19937_64& raw() { return gen_; }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

std::string format_g17(double v);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace soa
