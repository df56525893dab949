#include "waveformer/checkpoint.hpp"

#include "waveformer/errors.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace waveformer {

namespace {

constexpr char kMagic[4] = {'W', 'V', 'F', 'M'};

void put_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f32(std::ostream& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

struct Reader {
    std::istream& in;
    uint64_t offset = 0;

    uint32_t u32(const char* what) {
        unsigned char b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        if (!in)
            throw FormatError(std::string("checkpoint truncated reading ") + what +
                              " at byte offset " + std::to_string(offset));
        offset += 4;
        return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
               (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
    }

    float f32(const char* what) {
        const uint32_t bits = u32(what);
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }

    void bytes(void* dst, size_t n, const char* what) {
        in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (!in)
            throw FormatError(std::string("checkpoint truncated reading ") + what +
                              " at byte offset " + std::to_string(offset));
        offset += n;
    }
};

// splitmix64, the per-tensor stream generator
uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

double fan_sum(const std::vector<uint32_t>& dims) {
    // conv [out][in][k]: fans in*k / out*k; matrix [out][in]: in / out;
    // vectors: len twice.
    if (dims.size() == 3)
        return static_cast<double>(dims[1]) * dims[2] +
               static_cast<double>(dims[0]) * dims[2];
    if (dims.size() == 2) return static_cast<double>(dims[0]) + dims[1];
    return 2.0 * dims[0];
}

} // namespace

void save_checkpoint(const NamedTensorSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);

    out.write(kMagic, 4);
    put_u32(out, NamedTensorSet::kFormatVersion);
    const ModelConfig& c = set.config;
    for (uint32_t v : {c.conv_stride, c.encoder_dim, c.decoder_dim, c.chunk_frames,
                       c.dcc_layers, c.dcc_kernel, c.num_classes, c.heads, c.ffn_dim,
                       c.embed_hidden})
        put_u32(out, v);
    put_f32(out, static_cast<float>(c.sample_rate));

    put_u32(out, static_cast<uint32_t>(set.entries.size()));
    for (const auto& [name, tensor] : set.entries) {
        put_u32(out, static_cast<uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_u32(out, static_cast<uint32_t>(tensor.dims.size()));
        for (uint32_t d : tensor.dims) put_u32(out, d);
        out.write(reinterpret_cast<const char*>(tensor.data.data()),
                  static_cast<std::streamsize>(tensor.data.size() * 4));
    }
    if (!out) throw IoError("write failed: " + path);
}

NamedTensorSet load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);

    Reader r{in};
    char magic[4];
    r.bytes(magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("bad magic at byte offset 0, not a .wvfm checkpoint");
    const uint32_t version = r.u32("version");
    if (version != NamedTensorSet::kFormatVersion)
        throw FormatError("unsupported format version " + std::to_string(version) +
                          " at byte offset 4");

    NamedTensorSet set;
    ModelConfig& c = set.config;
    c.conv_stride = r.u32("config.L");
    c.encoder_dim = r.u32("config.E");
    c.decoder_dim = r.u32("config.D");
    c.chunk_frames = r.u32("config.K");
    c.dcc_layers = r.u32("config.M");
    c.dcc_kernel = r.u32("config.P");
    c.num_classes = r.u32("config.N_c");
    c.heads = r.u32("config.heads");
    c.ffn_dim = r.u32("config.ffn_dim");
    c.embed_hidden = r.u32("config.embed_hidden");
    c.sample_rate = static_cast<uint32_t>(r.f32("config.sample_rate"));
    c.validate();

    const uint32_t count = r.u32("entry count");
    for (uint32_t e = 0; e < count; ++e) {
        const uint32_t name_len = r.u32("name length");
        if (name_len > 4096)
            throw FormatError("implausible name length at byte offset " +
                              std::to_string(r.offset - 4));
        std::string name(name_len, '\0');
        r.bytes(name.data(), name_len, "name");
        const uint32_t ndim = r.u32("ndim");
        if (ndim == 0 || ndim > 8)
            throw FormatError("implausible rank for tensor '" + name +
                              "' at byte offset " + std::to_string(r.offset - 4));
        NamedTensor t;
        t.dims.resize(ndim);
        for (uint32_t i = 0; i < ndim; ++i) t.dims[i] = r.u32("dim");
        t.data.resize(t.element_count());
        r.bytes(t.data.data(), t.data.size() * 4, "payload");
        if (!set.entries.emplace(std::move(name), std::move(t)).second)
            throw FormatError("duplicate tensor name in checkpoint");
    }
    return set;
}

std::vector<std::pair<std::string, std::vector<uint32_t>>>
required_tensors(const ModelConfig& cfg) {
    const uint32_t E = cfg.encoder_dim, D = cfg.decoder_dim, P = cfg.dcc_kernel;
    const uint32_t H = cfg.embed_hidden, F = cfg.ffn_dim, Nc = cfg.num_classes;
    const uint32_t FK = cfg.frontend_kernel();

    std::vector<std::pair<std::string, std::vector<uint32_t>>> req;
    req.push_back({"fe.conv.w", {E, 1, FK}});
    req.push_back({"fe.conv.b", {E}});
    req.push_back({"syn.conv.w", {E, 1, FK}});
    req.push_back({"syn.conv.b", {1}});
    for (uint32_t i = 0; i < cfg.dcc_layers; ++i) {
        const std::string p = "enc.layer" + std::to_string(i) + ".";
        req.push_back({p + "conv.w", {E, E, P}});
        req.push_back({p + "conv.b", {E}});
        req.push_back({p + "norm.g", {E}});
        req.push_back({p + "norm.b", {E}});
    }
    req.push_back({"emb.fc1.w", {H, Nc}});
    req.push_back({"emb.fc1.b", {H}});
    req.push_back({"emb.fc2.w", {H, H}});
    req.push_back({"emb.fc2.b", {H}});
    req.push_back({"emb.fc3.w", {E, H}});
    req.push_back({"emb.fc3.b", {E}});
    req.push_back({"dec.proj_self.w", {D, E}});
    req.push_back({"dec.proj_self.b", {D}});
    req.push_back({"dec.proj_cross.w", {D, E}});
    req.push_back({"dec.proj_cross.b", {D}});
    for (const char* blk : {"self", "cross"}) {
        const std::string p = std::string("dec.xform.") + blk + ".";
        for (const char* m : {"wq", "wk", "wv", "wo"}) req.push_back({p + m, {D, D}});
        for (const char* b : {"bq", "bk", "bv", "bo"}) req.push_back({p + b, {D}});
    }
    for (int i = 1; i <= 3; ++i) {
        const std::string p = "dec.xform.norm" + std::to_string(i) + ".";
        req.push_back({p + "g", {D}});
        req.push_back({p + "b", {D}});
    }
    req.push_back({"dec.xform.ffn.fc1.w", {F, D}});
    req.push_back({"dec.xform.ffn.fc1.b", {F}});
    req.push_back({"dec.xform.ffn.fc2.w", {D, F}});
    req.push_back({"dec.xform.ffn.fc2.b", {D}});
    req.push_back({"dec.proj_out.w", {E, D}});
    req.push_back({"dec.proj_out.b", {E}});
    return req;
}

void validate_checkpoint(const NamedTensorSet& set) {
    set.config.validate();
    std::ostringstream problems;
    int count = 0;
    for (const auto& [name, dims] : required_tensors(set.config)) {
        const auto it = set.entries.find(name);
        if (it == set.entries.end()) {
            problems << (count++ ? ", " : "") << "missing " << name;
            continue;
        }
        if (it->second.dims != dims) {
            problems << (count++ ? ", " : "") << "bad dims for " << name;
        } else if (it->second.data.size() != it->second.element_count()) {
            problems << (count++ ? ", " : "") << "bad payload size for " << name;
        }
    }
    if (count) throw ValidationError("checkpoint validation failed: " + problems.str());
}

NamedTensorSet random_init(const ModelConfig& cfg, uint64_t seed) {
    cfg.validate();
    NamedTensorSet set;
    set.config = cfg;
    for (const auto& [name, dims] : required_tensors(cfg)) {
        NamedTensor t;
        t.dims = dims;
        t.data.resize(t.element_count());
        const float bound = static_cast<float>(std::sqrt(6.0 / fan_sum(dims)));
        uint64_t state = seed;
        (void)splitmix64(state); // decorrelate raw seed
        state ^= fnv1a64(name);
        for (auto& v : t.data) {
            const uint64_t bits = splitmix64(state);
            const double u = static_cast<double>(bits >> 11) * 0x1.0p-53; // [0, 1)
            v = static_cast<float>((2.0 * u - 1.0) * bound);
        }
        set.entries.emplace(name, std::move(t));
    }
    return set;
}

} // namespace waveformer
