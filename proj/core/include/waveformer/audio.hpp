#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace waveformer {

/// Mono sample sequence, nominal range [-1, 1].
struct AudioBuffer {
    std::vector<float> samples;
    uint32_t sample_rate = 44100;
};

enum class WavFormat { Pcm16, Float32 };

/// Reads RIFF/WAVE, PCM 16-bit or IEEE float 32-bit, mono only.
/// 16-bit samples decode as s / 32768.
AudioBuffer read_wav(const std::string& path);

/// Float32 writes are exact; 16-bit rounds half away from zero and clamps.
void write_wav(const std::string& path, const AudioBuffer& buf, WavFormat format);

} // namespace waveformer
