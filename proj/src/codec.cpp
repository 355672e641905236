#include "evkws/codec.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "evkws/error.hpp"

namespace evkws {
namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

std::uint16_t load_u16(const char* p) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(p[0]) |
                                      (static_cast<unsigned char>(p[1]) << 8));
}

std::uint32_t load_u32(const char* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
    return v;
}

void store_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
}

void store_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <typename T>
bool parse_int(std::string_view field, T& value) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
        field.remove_suffix(1);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    return ec == std::errc() && ptr == field.data() + field.size();
}

void check_order(const EventStream& stream, std::uint64_t offset) {
    const auto n = stream.events.size();
    if (n >= 2 && stream.events[n - 1].t < stream.events[n - 2].t) {
        throw OrderingError("timestamp " + std::to_string(stream.events[n - 1].t) +
                            " decreases from " + std::to_string(stream.events[n - 2].t) +
                            " at offset " + std::to_string(offset));
    }
}

}  // namespace

StreamFormat parse_stream_format(std::string_view text) {
    if (text == "binary" || text == "bin") return StreamFormat::binary;
    if (text == "csv") return StreamFormat::csv;
    throw ConfigError("unknown stream format '" + std::string(text) + "' (expected binary|csv)");
}

StreamFormat format_from_extension(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? StreamFormat::csv : StreamFormat::binary;
}

EventStream decode_binary(std::string_view bytes, const SensorConfig& config) {
    config.validate();
    EventStream stream;
    stream.config = config;
    if (bytes.empty()) return stream;
    if (bytes.size() < kBinaryHeaderSize) throw ParseError("truncated header", bytes.size());
    if (std::memcmp(bytes.data(), kBinaryMagic, 4) != 0) throw ParseError("bad magic", 0);
    if (static_cast<std::uint8_t>(bytes[4]) != kBinaryVersion) {
        throw ParseError("unsupported format version " +
                             std::to_string(static_cast<unsigned char>(bytes[4])),
                         4);
    }
    const std::uint16_t channels = load_u16(bytes.data() + 5);
    const auto topology = static_cast<std::uint8_t>(bytes[7]);
    if (topology > 1) throw ParseError("bad topology byte", 7);
    if (channels != config.channels || static_cast<Topology>(topology) != config.topology) {
        throw ValidationError("file declares " + std::to_string(channels) + "-" +
                              std::string(to_string(static_cast<Topology>(topology))) +
                              " but configuration is " + std::to_string(config.channels) + "-" +
                              std::string(to_string(config.topology)));
    }
    const std::size_t body = bytes.size() - kBinaryHeaderSize;
    if (body % kBinaryRecordSize != 0) {
        throw ParseError("truncated record", kBinaryHeaderSize + body / kBinaryRecordSize * kBinaryRecordSize);
    }
    stream.events.reserve(body / kBinaryRecordSize);
    for (std::size_t off = kBinaryHeaderSize; off < bytes.size(); off += kBinaryRecordSize) {
        const char* rec = bytes.data() + off;
        Event e;
        e.t = load_u32(rec);
        e.c = load_u16(rec + 4);
        e.p = static_cast<std::int8_t>(rec[6]);
        if (e.p != 1 && e.p != -1) {
            throw ParseError("bad polarity " + std::to_string(e.p) + " at byte " + std::to_string(off + 6),
                             off + 6);
        }
        validate_event(e, config);
        stream.events.push_back(e);
        check_order(stream, off);
    }
    return stream;
}

std::string encode_binary(const EventStream& stream) {
    stream.validate();
    std::string out;
    out.reserve(kBinaryHeaderSize + stream.events.size() * kBinaryRecordSize);
    out.append(kBinaryMagic, 4);
    out.push_back(static_cast<char>(kBinaryVersion));
    store_u16(out, stream.config.channels);
    out.push_back(static_cast<char>(stream.config.topology));
    for (const Event& e : stream.events) {
        store_u32(out, e.t);
        store_u16(out, e.c);
        out.push_back(static_cast<char>(e.p));
        out.push_back('\0');
    }
    return out;
}

EventStream decode_csv(std::string_view text, const SensorConfig& config) {
    config.validate();
    EventStream stream;
    stream.config = config;
    std::uint64_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line_no == 1 && line == "t,c,p") continue;

        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 3 fields", line_no);
        }
        std::uint32_t t = 0;
        std::uint32_t c = 0;
        int p = 0;
        if (!parse_int(line.substr(0, c1), t) || !parse_int(line.substr(c1 + 1, c2 - c1 - 1), c) ||
            !parse_int(line.substr(c2 + 1), p)) {
            throw ParseError("line " + std::to_string(line_no) + ": malformed number", line_no);
        }
        if (p != 1 && p != -1) {
            throw ParseError("line " + std::to_string(line_no) + ": polarity must be -1 or 1", line_no);
        }
        if (c >= config.channels) {
            throw ValidationError("line " + std::to_string(line_no) + ": channel " + std::to_string(c) +
                                  " >= " + std::to_string(config.channels));
        }
        stream.events.push_back({t, static_cast<std::uint16_t>(c), static_cast<std::int8_t>(p)});
        check_order(stream, line_no);
    }
    return stream;
}

std::string encode_csv(const EventStream& stream) {
    stream.validate();
    std::string out = "t,c,p\n";
    out.reserve(out.size() + stream.events.size() * 16);
    for (const Event& e : stream.events) {
        out += std::to_string(e.t);
        out += ',';
        out += std::to_string(e.c);
        out += ',';
        out += std::to_string(e.p);
        out += '\n';
    }
    return out;
}

EventStream read_stream(const std::filesystem::path& path, StreamFormat format,
                        const SensorConfig& config) {
    const std::string bytes = read_file(path);
    EventStream stream =
        format == StreamFormat::binary ? decode_binary(bytes, config) : decode_csv(bytes, config);
    stream.sample_id = path.stem().string();
    return stream;
}

void write_stream(const EventStream& stream, const std::filesystem::path& path, StreamFormat format) {
    // Encoding validates, so an invalid stream never reaches the file.
    const std::string bytes = format == StreamFormat::binary ? encode_binary(stream) : encode_csv(stream);
    write_file(path, bytes);
}

}  // namespace evkws
