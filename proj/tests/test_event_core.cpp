#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "evkws/codec.hpp"
#include "evkws/error.hpp"
#include "evkws/stats.hpp"
#include "evkws/synth.hpp"
#include "oracles/generators.hpp"

using namespace evkws;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
    auto dir = fs::temp_directory_path() / "evkws_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write_bytes(const fs::path& p, const std::string& bytes) {
    std::ofstream(p, std::ios::binary) << bytes;
}

SensorConfig c32() { return {32, Topology::cascade}; }

}  // namespace

TEST(SensorConfig, OnlyThreeChannelCounts) {
    EXPECT_NO_THROW((SensorConfig{32, Topology::cascade}.validate()));
    EXPECT_NO_THROW((SensorConfig{128, Topology::parallel}.validate()));
    EXPECT_THROW((SensorConfig{48, Topology::parallel}.validate()), ValidationError);
}

TEST(EventStream, ValidateRejectsBadEvents) {
    EventStream s{c32(), {{0, 0, 1}, {5, 31, -1}}, "x", {}, {}};
    EXPECT_NO_THROW(s.validate());
    s.events.push_back({4, 1, 1});
    EXPECT_THROW(s.validate(), OrderingError);
    s.events.back() = {6, 32, 1};
    EXPECT_THROW(s.validate(), ValidationError);
    s.events.back() = {6, 3, 0};
    EXPECT_THROW(s.validate(), ValidationError);
}

TEST(ReadStream, EmptyFileGivesEmptyStream) {
    const auto p = temp_path("empty.csv");
    write_bytes(p, "");
    EXPECT_TRUE(read_stream(p, StreamFormat::csv, c32()).events.empty());
    const auto b = temp_path("empty.bin");
    write_bytes(b, "");
    EXPECT_TRUE(read_stream(b, StreamFormat::binary, c32()).events.empty());
}

TEST(ReadStream, CsvTranscription) {
    const auto s = decode_csv("0,0,1\n100,3,-1", c32());
    ASSERT_EQ(s.events.size(), 2u);
    EXPECT_EQ(s.events[0], (Event{0, 0, 1}));
    EXPECT_EQ(s.events[1], (Event{100, 3, -1}));
    // The header line is optional.
    EXPECT_EQ(decode_csv("t,c,p\n0,0,1\n100,3,-1\n", c32()).events, s.events);
}

TEST(ReadStream, CsvErrorsCarryLineNumbers) {
    try {
        decode_csv("t,c,p\n0,0,1\n5,x,1\n", c32());
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 3u);
    }
    EXPECT_THROW(decode_csv("0,40,1\n", c32()), ValidationError);
    EXPECT_THROW(decode_csv("10,0,1\n5,0,1\n", c32()), OrderingError);
    EXPECT_THROW(decode_csv("10,0,2\n", c32()), ParseError);
    EXPECT_THROW(decode_csv("10,0\n", c32()), ParseError);
}

TEST(ReadStream, BinaryChannelOutOfRange) {
    EventStream s{{64, Topology::cascade}, {{0, 40, 1}}, "", {}, {}};
    std::string bytes = encode_binary(s);
    // Re-label the header as a 32-channel file holding channel 40.
    bytes[5] = 32;
    bytes[6] = 0;
    const auto p = temp_path("c40.bin");
    write_bytes(p, bytes);
    EXPECT_THROW(read_stream(p, StreamFormat::binary, c32()), ValidationError);
}

TEST(ReadStream, BinaryLayoutIsFixed) {
    EventStream s{c32(), {{0x01020304, 7, -1}}, "", {}, {}};
    const std::string b = encode_binary(s);
    ASSERT_EQ(b.size(), 16u);
    EXPECT_EQ(b.substr(0, 4), "NASE");
    EXPECT_EQ(b[4], 1);
    EXPECT_EQ(static_cast<unsigned char>(b[5]), 32u);
    EXPECT_EQ(b[6], 0);
    EXPECT_EQ(b[7], 0);  // cascade
    EXPECT_EQ(static_cast<unsigned char>(b[8]), 0x04u);
    EXPECT_EQ(static_cast<unsigned char>(b[11]), 0x01u);
    EXPECT_EQ(b[12], 7);
    EXPECT_EQ(static_cast<signed char>(b[14]), -1);
    EXPECT_EQ(b[15], 0);
}

TEST(ReadStream, BinaryErrors) {
    EventStream s{c32(), {{0, 1, 1}, {10, 2, -1}}, "", {}, {}};
    std::string b = encode_binary(s);
    try {
        decode_binary(b.substr(0, b.size() - 3), c32());
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 16u);
    }
    std::string bad = b;
    bad[0] = 'X';
    EXPECT_THROW(decode_binary(bad, c32()), ParseError);
    EXPECT_THROW(decode_binary(b, SensorConfig{64, Topology::cascade}), ValidationError);
    std::string regress = b;
    regress[16] = 20;  // second record t = 20, then ... swap to make decreasing
    regress[8] = 30;
    EXPECT_THROW(decode_binary(regress, c32()), OrderingError);
}

TEST(WriteStream, RefusesInvalidStream) {
    const auto p = temp_path("refused.bin");
    fs::remove(p);
    EventStream s{c32(), {{10, 0, 1}, {5, 0, 1}}, "", {}, {}};
    EXPECT_THROW(write_stream(s, p, StreamFormat::binary), OrderingError);
    EXPECT_FALSE(fs::exists(p));
}

TEST(WriteStream, UnwritablePath) {
    EventStream s{c32(), {}, "", {}, {}};
    EXPECT_THROW(write_stream(s, "/nonexistent-dir/x.bin", StreamFormat::binary), IoError);
}

TEST(Codec, RoundTripProperty) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const unsigned channels = testgen::random_channels(rng);
        const auto s = testgen::random_stream(rng, channels, trial == 0 ? 1000 : rng() % 300);
        for (auto fmt : {StreamFormat::binary, StreamFormat::csv}) {
            const auto p = temp_path(fmt == StreamFormat::binary ? "rt.bin" : "rt.csv");
            write_stream(s, p, fmt);
            const auto back = read_stream(p, fmt, s.config);
            ASSERT_TRUE(back.same_content(s)) << "trial " << trial;
            if (fmt == StreamFormat::binary) {
                // Byte-exact: re-encoding reproduces the file.
                std::ifstream in(p, std::ios::binary);
                std::string bytes((std::istreambuf_iterator<char>(in)), {});
                EXPECT_EQ(bytes, encode_binary(back));
            }
        }
    }
}

TEST(Stats, UniformTenEventsOverOneSecond) {
    EventStream s{c32(), {}, "", {}, {}};
    for (std::uint32_t k = 0; k < 10; ++k) s.events.push_back({k * 100000, 0, 1});
    const auto st = compute_stats(std::span(&s, 1));
    // 9 intervals over a 0.9 s span.
    EXPECT_NEAR(st.kev_per_s_avg, 0.01, 1e-12);
    EXPECT_EQ(st.total_events, 10u);
    EXPECT_EQ(st.events_per_window_max, 1u);
    // Windows 0..90 inclusive.
    EXPECT_NEAR(st.events_per_window_avg, 10.0 / 91.0, 1e-12);
}

TEST(Stats, ConcentratedChannel) {
    EventStream s{c32(), {{0, 0, 1}, {50, 0, -1}, {3000, 0, 1}}, "", {}, {}};
    const auto st = compute_stats(std::span(&s, 1));
    EXPECT_DOUBLE_EQ(st.per_channel[0].mean, 3.0);
    for (std::size_t c = 1; c < st.per_channel.size(); ++c) EXPECT_EQ(st.per_channel[c].mean, 0.0);
}

TEST(Stats, ShortSamplesExcludedFromRates) {
    EventStream a{c32(), {{0, 0, 1}}, "a", {}, {}};
    EventStream b{c32(), {{0, 0, 1}, {500, 1, 1}}, "b", {}, {}};
    EventStream both[] = {a, b};
    const auto st = compute_stats(both);
    EXPECT_EQ(st.rate_samples, 0u);
    EXPECT_EQ(st.kev_per_s_avg, 0.0);
    EXPECT_EQ(st.total_events, 3u);
}

TEST(Stats, Errors) {
    EXPECT_THROW(compute_stats(std::span<const EventStream>{}), ValidationError);
    EventStream a{c32(), {}, "", {}, {}};
    EventStream b{{64, Topology::cascade}, {}, "", {}, {}};
    EventStream mixed[] = {a, b};
    EXPECT_THROW(compute_stats(mixed), ValidationError);
}

TEST(Stats, PermutationInvariantAndMatchesBruteForce) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const unsigned channels = testgen::random_channels(rng);
        std::vector<EventStream> streams;
        for (int k = 0; k < 7; ++k) {
            auto s = testgen::random_stream(rng, channels, rng() % 500, 3000);
            s.config.topology = Topology::parallel;
            streams.push_back(std::move(s));
        }
        const auto ref = compute_stats(streams);
        // Per-channel mean is the plain count over samples.
        for (unsigned c = 0; c < channels; ++c) {
            std::uint64_t count = 0;
            for (const auto& s : streams)
                count += std::count_if(s.events.begin(), s.events.end(), [&](const Event& e) { return e.c == c; });
            EXPECT_DOUBLE_EQ(ref.per_channel[c].mean, static_cast<double>(count) / streams.size());
        }
        double sum = 0;
        for (const auto& ch : ref.per_channel) sum += ch.mean * streams.size();
        EXPECT_NEAR(sum, static_cast<double>(ref.total_events), 1e-6);

        std::shuffle(streams.begin(), streams.end(), rng);
        const auto shuffled = compute_stats(streams, kWindowUs, 3);
        EXPECT_EQ(nlohmann::json(to_json(ref)).dump(), nlohmann::json(to_json(shuffled)).dump());
    }
}

TEST(Synth, ZeroRatesGiveEmptyStream) {
    std::vector<double> rates(32, 0.0);
    EXPECT_TRUE(synth_stream(1, c32(), 1000000, rates).events.empty());
}

TEST(Synth, DeterministicAndValid) {
    const auto a = synth_stream_uniform(42, {64, Topology::parallel}, 500000, 5000);
    const auto b = synth_stream_uniform(42, {64, Topology::parallel}, 500000, 5000);
    EXPECT_EQ(a.events, b.events);
    EXPECT_NO_THROW(a.validate());
    const auto c = synth_stream_uniform(43, {64, Topology::parallel}, 500000, 5000);
    EXPECT_NE(a.events, c.events);
}

TEST(Synth, PoissonCountWithinFiveSigma) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = synth_stream_uniform(seed, c32(), 1000000, 1000.0);
        EXPECT_LE(std::abs(static_cast<double>(s.events.size()) - 1000.0), 5.0 * std::sqrt(1000.0)) << seed;
    }
}

TEST(Synth, RejectsBadRates) {
    std::vector<double> rates(32, 1.0);
    rates[3] = -1.0;
    EXPECT_THROW(synth_stream(1, c32(), 1000, rates), ValidationError);
    rates.resize(16);
    EXPECT_THROW(synth_stream(1, c32(), 1000, rates), ValidationError);
}
