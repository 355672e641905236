#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace evkws {

// Symmetric 8-bit tensor with a power-of-two scale:
// real = 2^scale_exp * (q - zero_point), zero_point fixed at 0.
struct QuantTensor {
    std::vector<std::int8_t> data;
    std::vector<std::size_t> shape;
    int scale_exp = 0;
    int zero_point = 0;

    double scale() const { return std::ldexp(1.0, scale_exp); }
    double dequantize(std::size_t i) const { return scale() * (data[i] - zero_point); }
    std::size_t size() const { return data.size(); }

    friend bool operator==(const QuantTensor&, const QuantTensor&) = default;
};

inline constexpr std::int32_t kInt8Min = -128;
inline constexpr std::int32_t kInt8Max = 127;

constexpr std::int8_t saturate_int8(std::int64_t v) {
    return static_cast<std::int8_t>(v < kInt8Min ? kInt8Min : (v > kInt8Max ? kInt8Max : v));
}

// Arithmetic right shift rounding half toward +inf.
constexpr std::int64_t round_shift(std::int64_t v, int shift) {
    return shift <= 0 ? v : (v + (std::int64_t{1} << (shift - 1))) >> shift;
}

// acc * scale_num / 2^scale_shift, rounded and saturated to int8.
constexpr std::int8_t requantize(std::int64_t acc, std::int32_t scale_num, int scale_shift) {
    return saturate_int8(round_shift(acc * scale_num, scale_shift));
}

// Lookup tables indexed by (q + 128) for an int8 pre-activation q at scale 1/16.
// Outputs are at scale 1/128: sigmoid in [0, 128], tanh in [-128, 127].
extern const std::array<std::int16_t, 256> kSigmoidLut;
extern const std::array<std::int16_t, 256> kTanhLut;

inline std::int32_t sigmoid_q7(std::int8_t q) { return kSigmoidLut[static_cast<std::size_t>(q + 128)]; }
inline std::int32_t tanh_q7(std::int8_t q) { return kTanhLut[static_cast<std::size_t>(q + 128)]; }

// Elapsed microseconds mapped to an 8-bit positional input: round(dt / 64), capped at 127.
inline constexpr int kTimeShift = 6;
constexpr std::int8_t quantize_dt(std::int64_t dt_us) { return saturate_int8(round_shift(dt_us, kTimeShift)); }

}  // namespace evkws
