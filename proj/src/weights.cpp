#include "evkws/weights.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "evkws/error.hpp"

namespace evkws {
namespace {

constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string block_name(const char* group, std::size_t index) {
    return std::string(group) + "[" + std::to_string(index) + "]";
}

void check_block(const Block& b, const std::string& name) {
    if (b.in < 1 || b.out < 1) throw ConfigError(name + ": widths must be positive");
    if (b.scale_num < 1) throw ConfigError(name + ": scale_num must be >= 1");
    if (b.scale_shift < 0 || b.scale_shift > 62) throw ConfigError(name + ": scale_shift must be in [0, 62]");
    if (b.weight.size() != b.weight_rows() * b.weight_cols()) {
        throw ConfigError(name + ": weight has " + std::to_string(b.weight.size()) + " entries, expected " +
                          std::to_string(b.weight_rows() * b.weight_cols()));
    }
    if (b.bias.size() != b.bias_size()) {
        throw ConfigError(name + ": bias has " + std::to_string(b.bias.size()) + " entries, expected " +
                          std::to_string(b.bias_size()));
    }
}

Block make_block(std::mt19937_64& rng, BlockKind kind, int in, int out) {
    Block b;
    b.kind = kind;
    b.in = in;
    b.out = out;
    b.weight.resize(b.weight_rows() * b.weight_cols());
    b.bias.resize(b.bias_size());
    std::uniform_int_distribution<int> w(-64, 64);
    std::uniform_int_distribution<std::int32_t> bias(-2048, 2048);
    for (auto& v : b.weight) v = static_cast<std::int8_t>(w(rng));
    for (auto& v : b.bias) v = bias(rng);
    // Aim for int8 outputs with a standard deviation of a few tens given
    // inputs of similar spread.
    const double fan_in = kind == BlockKind::gru ? in + out : in;
    const double target = 40.0 / (std::sqrt(fan_in) * 37.0 * 50.0);
    b.scale_shift = 16;
    b.scale_num = std::max<std::int32_t>(1, static_cast<std::int32_t>(std::lround(target * 65536.0)));
    b.out_scale_exp = kind == BlockKind::gru ? -7 : -4;
    return b;
}

}  // namespace

std::string_view to_string(BlockKind kind) {
    switch (kind) {
        case BlockKind::conv: return "conv";
        case BlockKind::linear: return "linear";
        case BlockKind::gru: return "gru";
    }
    return "?";
}

BlockKind parse_block_kind(std::string_view text) {
    if (text == "conv") return BlockKind::conv;
    if (text == "linear") return BlockKind::linear;
    if (text == "gru") return BlockKind::gru;
    throw ConfigError("unknown block kind '" + std::string(text) + "'");
}

void ModelWeights::validate() const {
    if (version != 1) throw ConfigError("unsupported weight file version " + std::to_string(version));
    if (class_count < 1) throw ConfigError("class_count must be >= 1");
    if (conv_widths.size() != kConvLayers) throw ConfigError("conv_widths must list 4 layer widths");
    if (conv.size() != kConvLayers) {
        throw ConfigError("expected 4 conv blocks, found " + std::to_string(conv.size()));
    }
    for (std::size_t l = 0; l < conv.size(); ++l) {
        const auto name = block_name("conv", l);
        const Block& b = conv[l];
        if (b.kind != BlockKind::conv) throw ConfigError(name + ": kind must be conv");
        const int features = l == 0 ? kFirstLayerFeatures : conv_widths[l - 1];
        if (b.in != features + kPositionalInputs) {
            throw ConfigError(name + ": in must be " + std::to_string(features) + " features + " +
                              std::to_string(kPositionalInputs) + " positional, got " + std::to_string(b.in));
        }
        if (b.out != conv_widths[l]) throw ConfigError(name + ": out disagrees with conv_widths");
        check_block(b, name);
    }
    if (head.empty()) throw ConfigError("head has no blocks");
    int width = conv_widths.back();
    for (std::size_t i = 0; i < head.size(); ++i) {
        const auto name = block_name("head", i);
        const Block& b = head[i];
        if (b.kind == BlockKind::conv) throw ConfigError(name + ": conv block not allowed in head");
        if (b.in != width) {
            throw ConfigError(name + ": in " + std::to_string(b.in) + " does not match preceding width " +
                              std::to_string(width));
        }
        check_block(b, name);
        width = b.out;
    }
    if (width != class_count + 1) {
        throw ConfigError("head output width " + std::to_string(width) + " must equal class_count + 1 = " +
                          std::to_string(class_count + 1));
    }
}

std::size_t ModelWeights::parameter_count() const {
    std::size_t n = 0;
    for (const auto& b : conv) n += b.parameter_count();
    for (const auto& b : head) n += b.parameter_count();
    return n;
}

Architecture Architecture::with_width(int width, int class_count) {
    Architecture a;
    a.conv_widths.assign(kConvLayers, width);
    a.head_hidden = {{BlockKind::linear, width},
                     {BlockKind::linear, width},
                     {BlockKind::gru, width},
                     {BlockKind::linear, std::max(1, width / 2)}};
    a.class_count = class_count;
    return a;
}

void Architecture::validate() const {
    if (conv_widths.size() != kConvLayers) throw ConfigError("architecture needs 4 conv widths");
    for (int w : conv_widths) {
        if (w < 1) throw ConfigError("conv widths must be positive");
    }
    for (const auto& h : head_hidden) {
        if (h.out < 1 || h.kind == BlockKind::conv) throw ConfigError("bad head block in architecture");
    }
    if (class_count < 1) throw ConfigError("class_count must be >= 1");
}

std::size_t parameter_count(const Architecture& arch) {
    arch.validate();
    auto dense = [](std::size_t in, std::size_t out) { return in * out + out; };
    std::size_t n = 0;
    std::size_t prev = kFirstLayerFeatures;
    for (int w : arch.conv_widths) {
        n += dense(prev + kPositionalInputs, static_cast<std::size_t>(w));
        prev = static_cast<std::size_t>(w);
    }
    for (const auto& h : arch.head_hidden) {
        const auto out = static_cast<std::size_t>(h.out);
        n += h.kind == BlockKind::gru ? 3 * (prev + out) * out + 6 * out : dense(prev, out);
        prev = out;
    }
    return n + dense(prev, static_cast<std::size_t>(arch.class_count + 1));
}

ModelWeights random_weights(std::uint64_t seed, const Architecture& arch) {
    arch.validate();
    std::mt19937_64 rng(seed);
    ModelWeights m;
    m.class_count = arch.class_count;
    m.conv_widths = arch.conv_widths;
    int prev = kFirstLayerFeatures;
    for (int w : arch.conv_widths) {
        m.conv.push_back(make_block(rng, BlockKind::conv, prev + kPositionalInputs, w));
        prev = w;
    }
    for (const auto& h : arch.head_hidden) {
        m.head.push_back(make_block(rng, h.kind, prev, h.out));
        prev = h.out;
    }
    m.head.push_back(make_block(rng, BlockKind::linear, prev, arch.class_count + 1));
    m.validate();
    return m;
}

std::string base64_encode(const std::vector<std::int8_t>& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    auto byte = [&](std::size_t k) { return static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[k])); };
    for (; i + 3 <= bytes.size(); i += 3) {
        const std::uint32_t v = byte(i) << 16 | byte(i + 1) << 8 | byte(i + 2);
        for (int s = 18; s >= 0; s -= 6) out.push_back(kAlphabet[(v >> s) & 63]);
    }
    const std::size_t rest = bytes.size() - i;
    if (rest > 0) {
        std::uint32_t v = byte(i) << 16;
        if (rest == 2) v |= byte(i + 1) << 8;
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back(rest == 2 ? kAlphabet[(v >> 6) & 63] : '=');
        out.push_back('=');
    }
    return out;
}

std::vector<std::int8_t> base64_decode(std::string_view text) {
    std::array<int, 256> table{};
    table.fill(-1);
    for (std::size_t k = 0; k < kAlphabet.size(); ++k) table[static_cast<unsigned char>(kAlphabet[k])] = static_cast<int>(k);
    if (text.size() % 4 != 0) throw ParseError("base64 length is not a multiple of 4", text.size());
    std::vector<std::int8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        std::uint32_t v = 0;
        int pad = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            const char ch = text[i + k];
            if (ch == '=' && i + 4 == text.size() && k >= 2) {
                ++pad;
                v <<= 6;
                continue;
            }
            const int d = table[static_cast<unsigned char>(ch)];
            if (d < 0 || pad > 0) throw ParseError("invalid base64 character", i + k);
            v = v << 6 | static_cast<std::uint32_t>(d);
        }
        out.push_back(static_cast<std::int8_t>(static_cast<std::uint8_t>(v >> 16)));
        if (pad < 2) out.push_back(static_cast<std::int8_t>(static_cast<std::uint8_t>(v >> 8)));
        if (pad < 1) out.push_back(static_cast<std::int8_t>(static_cast<std::uint8_t>(v)));
    }
    return out;
}

nlohmann::json to_json(const ModelWeights& m) {
    nlohmann::json blocks = nlohmann::json::array();
    auto emit = [&](const Block& b) {
        blocks.push_back({{"kind", to_string(b.kind)},
                          {"in", b.in},
                          {"out", b.out},
                          {"scale_num", b.scale_num},
                          {"scale_shift", b.scale_shift},
                          {"out_scale_exp", b.out_scale_exp},
                          {"weight", base64_encode(b.weight)},
                          {"bias", b.bias}});
    };
    for (const auto& b : m.conv) emit(b);
    for (const auto& b : m.head) emit(b);
    return {{"version", m.version}, {"class_count", m.class_count}, {"conv_widths", m.conv_widths}, {"blocks", blocks}};
}

ModelWeights weights_from_json(const nlohmann::json& doc) {
    ModelWeights m;
    std::size_t index = 0;
    try {
        m.version = doc.at("version").get<int>();
        m.class_count = doc.at("class_count").get<int>();
        m.conv_widths = doc.at("conv_widths").get<std::vector<int>>();
        const auto& blocks = doc.at("blocks");
        if (!blocks.is_array()) throw ConfigError("\"blocks\" must be an array");
        for (; index < blocks.size(); ++index) {
            const auto& j = blocks[index];
            Block b;
            b.kind = parse_block_kind(j.at("kind").get<std::string>());
            b.in = j.at("in").get<int>();
            b.out = j.at("out").get<int>();
            b.scale_num = j.at("scale_num").get<std::int32_t>();
            b.scale_shift = j.at("scale_shift").get<int>();
            b.out_scale_exp = j.value("out_scale_exp", 0);
            b.weight = base64_decode(j.at("weight").get<std::string>());
            b.bias = j.at("bias").get<std::vector<std::int32_t>>();
            (b.kind == BlockKind::conv ? m.conv : m.head).push_back(std::move(b));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("weight file schema violation at block " + std::to_string(index) + ": " + e.what());
    } catch (const ParseError& e) {
        throw ConfigError("weight file block " + std::to_string(index) + ": " + e.what());
    }
    m.validate();
    return m;
}

ModelWeights load_weights(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open weight file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("weight file " + path.string() + ": " + e.what(), e.byte);
    }
    return weights_from_json(doc);
}

void save_weights(const ModelWeights& weights, const std::filesystem::path& path) {
    weights.validate();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << to_json(weights).dump() << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace evkws
