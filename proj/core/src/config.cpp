#include "waveformer/config.hpp"

#include "waveformer/errors.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace waveformer {

void ModelConfig::validate() const {
    if (conv_stride < 1 || encoder_dim < 1 || decoder_dim < 1 || chunk_frames < 1 ||
        dcc_layers < 1 || num_classes < 1 || heads < 1 || ffn_dim < 1 ||
        embed_hidden < 1 || sample_rate < 1)
        throw std::invalid_argument("config: all fields must be >= 1");
    if (dcc_kernel < 2)
        throw std::invalid_argument("config: dcc kernel size must be >= 2");
    if (decoder_dim > encoder_dim)
        throw std::invalid_argument("config: decoder dim must not exceed encoder dim");
    if (decoder_dim % heads != 0)
        throw std::invalid_argument("config: decoder dim must be divisible by heads");
    if (dcc_layers > 32)
        throw std::invalid_argument("config: dcc layer count too large");
}

uint64_t receptive_field_frames(uint32_t kernel, uint32_t layers) {
    if (kernel < 2)
        throw std::invalid_argument("receptive_field_frames: kernel must be >= 2");
    if (layers < 1 || layers > 62)
        throw std::invalid_argument("receptive_field_frames: layers must be in [1, 62]");
    return static_cast<uint64_t>(kernel - 1) * ((1ull << layers) - 1);
}

ChunkGeometry chunk_geometry(const ModelConfig& cfg) {
    cfg.validate();
    ChunkGeometry g{};
    g.samples_per_chunk = cfg.chunk_samples();
    g.chunk_duration_ms = 1000.0 * g.samples_per_chunk / cfg.sample_rate;
    g.lookahead_samples = cfg.lookahead_samples();
    g.lookahead_ms = 1000.0 * g.lookahead_samples / cfg.sample_rate;
    g.receptive_field_seconds =
        static_cast<double>(receptive_field_frames(cfg.dcc_kernel, cfg.dcc_layers)) *
        cfg.conv_stride / cfg.sample_rate;
    return g;
}

uint64_t encoder_macs_per_chunk(const ModelConfig& cfg) {
    return static_cast<uint64_t>(cfg.dcc_layers) * cfg.chunk_frames * cfg.dcc_kernel *
           cfg.encoder_dim * cfg.encoder_dim;
}

uint64_t attention_macs_per_chunk(const ModelConfig& cfg, uint64_t r_frames) {
    const uint64_t attn = 2ull * cfg.chunk_frames * r_frames * cfg.decoder_dim;
    const uint64_t proj = 4ull * cfg.chunk_frames * cfg.decoder_dim * cfg.decoder_dim;
    return attn + proj;
}

ModelConfig parse_config(const std::string& text) {
    ModelConfig cfg;
    bool ffn_set = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        uint32_t num = 0;
        try {
            num = static_cast<uint32_t>(std::stoul(val));
        } catch (const std::exception&) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": bad value '" + val + "'");
        }
        if (key == "L") cfg.conv_stride = num;
        else if (key == "E") cfg.encoder_dim = num;
        else if (key == "D") cfg.decoder_dim = num;
        else if (key == "K") cfg.chunk_frames = num;
        else if (key == "M") cfg.dcc_layers = num;
        else if (key == "P") cfg.dcc_kernel = num;
        else if (key == "N_c") cfg.num_classes = num;
        else if (key == "heads") cfg.heads = num;
        else if (key == "ffn_dim") { cfg.ffn_dim = num; ffn_set = true; }
        else if (key == "embed_hidden") cfg.embed_hidden = num;
        else if (key == "sample_rate") cfg.sample_rate = num;
        else
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
    }
    if (!ffn_set) cfg.ffn_dim = 4 * cfg.decoder_dim; // default feed-forward width
    cfg.validate();
    return cfg;
}

ModelConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

} // namespace waveformer
