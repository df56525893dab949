#include "waveformer/audio.hpp"

#include "waveformer/errors.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace waveformer {

namespace {

uint32_t rd_u32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t rd_u16(const unsigned char* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void wr_u16(std::ostream& out, uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

} // namespace

AudioBuffer read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw FormatError("not a RIFF/WAVE file: " + path);

    uint16_t audio_format = 0, channels = 0, bits = 0;
    uint32_t sample_rate = 0;
    bool have_fmt = false;
    size_t data_off = 0, data_len = 0;

    size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const uint32_t chunk_len = rd_u32(bytes.data() + pos + 4);
        const unsigned char* body = bytes.data() + pos + 8;
        if (pos + 8 + chunk_len > bytes.size())
            throw FormatError("truncated WAV chunk in " + path);
        if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0) {
            if (chunk_len < 16) throw FormatError("short fmt chunk in " + path);
            audio_format = rd_u16(body);
            channels = rd_u16(body + 2);
            sample_rate = rd_u32(body + 4);
            bits = rd_u16(body + 14);
            have_fmt = true;
        } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
            data_off = pos + 8;
            data_len = chunk_len;
        }
        pos += 8 + chunk_len + (chunk_len & 1);
    }
    if (!have_fmt || data_off == 0)
        throw FormatError("missing fmt or data chunk in " + path);
    if (channels != 1)
        throw FormatError("mono required, file has " + std::to_string(channels) +
                          " channels: " + path);

    AudioBuffer buf;
    buf.sample_rate = sample_rate;
    if (audio_format == 1 && bits == 16) {
        const size_t n = data_len / 2;
        buf.samples.resize(n);
        for (size_t i = 0; i < n; ++i) {
            const int16_t s = static_cast<int16_t>(rd_u16(bytes.data() + data_off + 2 * i));
            buf.samples[i] = static_cast<float>(s) / 32768.0f;
        }
    } else if (audio_format == 3 && bits == 32) {
        const size_t n = data_len / 4;
        buf.samples.resize(n);
        std::memcpy(buf.samples.data(), bytes.data() + data_off, n * 4);
    } else {
        throw FormatError("unsupported WAV encoding (need PCM16 or float32): " + path);
    }
    return buf;
}

void write_wav(const std::string& path, const AudioBuffer& buf, WavFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);

    const bool f32 = format == WavFormat::Float32;
    const uint16_t bits = f32 ? 32 : 16;
    const uint32_t data_len = static_cast<uint32_t>(buf.samples.size() * (bits / 8));

    out.write("RIFF", 4);
    wr_u32(out, 36 + data_len);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    wr_u32(out, 16);
    wr_u16(out, f32 ? 3 : 1);
    wr_u16(out, 1);
    wr_u32(out, buf.sample_rate);
    wr_u32(out, buf.sample_rate * (bits / 8));
    wr_u16(out, bits / 8);
    wr_u16(out, bits);
    out.write("data", 4);
    wr_u32(out, data_len);

    if (f32) {
        out.write(reinterpret_cast<const char*>(buf.samples.data()), data_len);
    } else {
        for (float v : buf.samples) {
            double s = std::round(static_cast<double>(v) * 32768.0); // half away from zero
            if (s > 32767.0) s = 32767.0;
            if (s < -32768.0) s = -32768.0;
            wr_u16(out, static_cast<uint16_t>(static_cast<int16_t>(s)));
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

} // namespace waveformer
