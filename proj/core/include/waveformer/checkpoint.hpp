#pragma once

#include "waveformer/config.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace waveformer {

struct NamedTensor {
    std::vector<uint32_t> dims;
    std::vector<float> data;

    size_t element_count() const {
        size_t n = 1;
        for (auto d : dims) n *= d;
        return n;
    }
};

/// A full parameter set plus the config it was built for. The `.wvfm` file
/// is this structure, little-endian:
///   magic "WVFM" | version u32 | config (10 u32 fields + sample_rate f32)
///   | entry count u32 | per entry: name len u32, name bytes, ndim u32,
///   dims u32..., payload f32...
struct NamedTensorSet {
    ModelConfig config;
    std::map<std::string, NamedTensor> entries; // name-ordered

    static constexpr uint32_t kFormatVersion = 1;
};

void save_checkpoint(const NamedTensorSet& set, const std::string& path);
NamedTensorSet load_checkpoint(const std::string& path);

/// Every tensor name the architecture requires under `cfg`, with its dims.
std::vector<std::pair<std::string, std::vector<uint32_t>>>
required_tensors(const ModelConfig& cfg);

/// Throws ValidationError naming every missing tensor and every dimension
/// mismatch at once. Extraneous entries are ignored.
void validate_checkpoint(const NamedTensorSet& set);

/// Deterministic random parameter set: splitmix64 streams keyed by (seed,
/// tensor name), values uniform in +/- sqrt(6 / (fan_in + fan_out)).
/// Fixed-width integer arithmetic only, so identical bytes on any platform.
NamedTensorSet random_init(const ModelConfig& cfg, uint64_t seed);

} // namespace waveformer
