#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace evkws {

enum class BlockKind { conv, linear, gru };

std::string_view to_string(BlockKind kind);
BlockKind parse_block_kind(std::string_view text);

// One quantized layer. `weight` is row-major:
//   conv, linear: [out x in], bias[out]
//   gru:          [3*out x (in + out)], gate rows ordered reset, update, candidate;
//                 the first `in` columns act on the input, the rest on the hidden
//                 state. bias[6*out] = input biases (r, z, n) then hidden biases (r, z, n).
// For conv blocks `in` counts the two positional inputs (channel offset, elapsed time).
// The int32 accumulator is requantized as acc * scale_num / 2^scale_shift.
struct Block {
    BlockKind kind = BlockKind::linear;
    int in = 0;
    int out = 0;
    std::int32_t scale_num = 1;
    int scale_shift = 0;
    int out_scale_exp = 0;  // power-of-two scale of the int8 output, informational
    std::vector<std::int8_t> weight;
    std::vector<std::int32_t> bias;

    std::size_t weight_rows() const { return static_cast<std::size_t>(kind == BlockKind::gru ? 3 * out : out); }
    std::size_t weight_cols() const { return static_cast<std::size_t>(kind == BlockKind::gru ? in + out : in); }
    std::size_t bias_size() const { return static_cast<std::size_t>(kind == BlockKind::gru ? 6 * out : out); }
    std::size_t parameter_count() const { return weight.size() + bias.size(); }

    friend bool operator==(const Block&, const Block&) = default;
};

inline constexpr int kConvLayers = 4;
inline constexpr int kFirstLayerFeatures = 3;  // mean neighbor dc, mean neighbor dt, polarity
inline constexpr int kPositionalInputs = 2;

struct ModelWeights {
    int version = 1;
    int class_count = 0;
    std::vector<int> conv_widths;
    std::vector<Block> conv;  // exactly kConvLayers
    std::vector<Block> head;  // executed in order; last block emits class_count + 1 values

    // Throws ConfigError naming the offending block.
    void validate() const;
    std::size_t parameter_count() const;
    int feature_width() const { return conv_widths.empty() ? 0 : conv_widths.back(); }

    friend bool operator==(const ModelWeights&, const ModelWeights&) = default;
};

struct HeadBlockSpec {
    BlockKind kind;
    int out;
};

// Hidden head blocks; a final linear block producing class_count + 1 outputs is appended.
struct Architecture {
    std::vector<int> conv_widths{72, 72, 72, 72};
    std::vector<HeadBlockSpec> head_hidden{
        {BlockKind::linear, 72}, {BlockKind::linear, 72}, {BlockKind::gru, 72}, {BlockKind::linear, 36}};
    int class_count = 11;

    // Every conv and hidden head width set to `width`, except the last hidden linear at width/2.
    static Architecture with_width(int width, int class_count = 11);
    void validate() const;
};

// Parameter count of an architecture without materializing it.
std::size_t parameter_count(const Architecture& arch);

ModelWeights random_weights(std::uint64_t seed, const Architecture& arch = {});

nlohmann::json to_json(const ModelWeights& weights);
ModelWeights weights_from_json(const nlohmann::json& doc);
ModelWeights load_weights(const std::filesystem::path& path);
void save_weights(const ModelWeights& weights, const std::filesystem::path& path);

std::string base64_encode(const std::vector<std::int8_t>& bytes);
std::vector<std::int8_t> base64_decode(std::string_view text);

}  // namespace evkws
