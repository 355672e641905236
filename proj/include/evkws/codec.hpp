#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "evkws/event.hpp"

namespace evkws {

enum class StreamFormat { binary, csv };

StreamFormat parse_stream_format(std::string_view text);
// Picks csv for a ".csv" extension, binary otherwise.
StreamFormat format_from_extension(const std::filesystem::path& path);

// Binary layout (little endian):
//   header  "NASE" | version u8 | channels u16 | topology u8      (8 bytes)
//   record  t u32 | c u16 | p i8 | pad u8                          (8 bytes)
inline constexpr char kBinaryMagic[4] = {'N', 'A', 'S', 'E'};
inline constexpr std::uint8_t kBinaryVersion = 1;
inline constexpr std::size_t kBinaryHeaderSize = 8;
inline constexpr std::size_t kBinaryRecordSize = 8;

// For binary input the channel count and topology stored in the header must
// agree with `config`. CSV input takes the config as given.
EventStream read_stream(const std::filesystem::path& path, StreamFormat format,
                        const SensorConfig& config);
void write_stream(const EventStream& stream, const std::filesystem::path& path,
                  StreamFormat format);

// In-memory variants used by the file functions and by the bindings.
EventStream decode_binary(std::string_view bytes, const SensorConfig& config);
std::string encode_binary(const EventStream& stream);
EventStream decode_csv(std::string_view text, const SensorConfig& config);
std::string encode_csv(const EventStream& stream);

}  // namespace evkws
