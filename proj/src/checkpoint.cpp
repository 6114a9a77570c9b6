#include "hrs/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hrs {

namespace {

constexpr char kMagic[4] = {'H', 'R', 'S', 'C'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    put_u64(out, bits);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("checkpoint: truncated file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error("checkpoint: truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in) {
    const std::uint64_t bits = get_u64(in);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string serialize_config(const HrsConfig& cfg) {
    std::ostringstream os;
    os << "lookback=" << cfg.lookback << "\n";
    os << "horizon=" << cfg.horizon << "\n";
    os << "embed_dim=" << cfg.embed_dim << "\n";
    os << "fused_tokens=" << cfg.fused_tokens << "\n";
    os << "conv_kernel_h=" << cfg.conv_kernel_h << "\n";
    os << "conv_kernel_w=" << cfg.conv_kernel_w << "\n";
    os << "conv_stride_h=" << cfg.conv_stride_h << "\n";
    os << "conv_stride_w=" << cfg.conv_stride_w << "\n";
    os << "conv1d_kernel=" << cfg.conv1d_kernel << "\n";
    os << "timestamp_fields=" << cfg.timestamp_fields << "\n";
    os << "token_hidden=" << cfg.token_hidden << "\n";
    os << "dim_hidden=" << cfg.dim_hidden << "\n";
    os << "render_height=" << cfg.render.height << "\n";
    os << "render_expansion=" << cfg.render.expansion << "\n";
    os << "render_line_width=" << cfg.render.line_width << "\n";
    os << "render_background=" << fmt_double(cfg.render.background[0]) << ","
       << fmt_double(cfg.render.background[1]) << "," << fmt_double(cfg.render.background[2])
       << "\n";
    os << "render_line=" << fmt_double(cfg.render.line[0]) << "," << fmt_double(cfg.render.line[1])
       << "," << fmt_double(cfg.render.line[2]) << "\n";
    os << "ablation=" << ablation_name(cfg.ablation) << "\n";
    return os.str();
}

HrsConfig parse_config_block(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    const auto want = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw std::runtime_error("checkpoint: config key missing: " + key);
        return it->second;
    };
    const auto num = [&](const std::string& key) {
        return static_cast<std::size_t>(std::stoull(want(key)));
    };
    const auto rgb = [&](const std::string& key) {
        Rgb c{};
        const std::string& s = want(key);
        if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &c[0], &c[1], &c[2]) != 3) {
            throw std::runtime_error("checkpoint: bad color value for " + key);
        }
        return c;
    };
    HrsConfig cfg;
    cfg.lookback = num("lookback");
    cfg.horizon = num("horizon");
    cfg.embed_dim = num("embed_dim");
    cfg.fused_tokens = num("fused_tokens");
    cfg.conv_kernel_h = num("conv_kernel_h");
    cfg.conv_kernel_w = num("conv_kernel_w");
    cfg.conv_stride_h = num("conv_stride_h");
    cfg.conv_stride_w = num("conv_stride_w");
    cfg.conv1d_kernel = num("conv1d_kernel");
    cfg.timestamp_fields = num("timestamp_fields");
    cfg.token_hidden = num("token_hidden");
    cfg.dim_hidden = num("dim_hidden");
    cfg.render.height = num("render_height");
    cfg.render.expansion = num("render_expansion");
    cfg.render.line_width = num("render_line_width");
    cfg.render.background = rgb("render_background");
    cfg.render.line = rgb("render_line");
    if (!ablation_from_name(want("ablation"), cfg.ablation)) {
        throw std::runtime_error("checkpoint: unknown ablation name");
    }
    return cfg;
}

void save_forecaster(const std::string& path, const Forecaster& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, f.kind == ModelKind::hrs ? 0u : 1u);
    const std::string cfg = serialize_config(f.config);
    put_u64(out, cfg.size());
    out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
    put_u64(out, f.params.size());
    for (const auto& [name, tensor] : f.params.entries) {
        put_u64(out, name.size());
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_u32(out, static_cast<std::uint32_t>(tensor.shape().size()));
        for (std::size_t e : tensor.shape()) put_u64(out, e);
        for (double v : tensor.values()) put_f64(out, v);
    }
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

Forecaster load_forecaster(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("checkpoint: bad magic in " + path);
    }
    const std::uint32_t version = get_u32(in);
    if (version != kVersion) {
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
    }
    Forecaster f;
    const std::uint32_t kind = get_u32(in);
    if (kind > 1) throw std::runtime_error("checkpoint: unknown model kind");
    f.kind = kind == 0 ? ModelKind::hrs : ModelKind::linear;
    const std::uint64_t cfg_len = get_u64(in);
    std::string cfg_text(cfg_len, '\0');
    in.read(cfg_text.data(), static_cast<std::streamsize>(cfg_len));
    if (!in) throw std::runtime_error("checkpoint: truncated config block");
    f.config = parse_config_block(cfg_text);
    const std::uint64_t count = get_u64(in);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t name_len = get_u64(in);
        std::string name(name_len, '\0');
        in.read(name.data(), static_cast<std::streamsize>(name_len));
        if (!in) throw std::runtime_error("checkpoint: truncated tensor name");
        const std::uint32_t ndim = get_u32(in);
        Shape shape(ndim);
        for (std::uint32_t d = 0; d < ndim; ++d) shape[d] = get_u64(in);
        std::vector<double> data(shape_numel(shape));
        for (double& v : data) v = get_f64(in);
        f.params.add(std::move(name), Tensor::from(std::move(shape), std::move(data), true));
    }
    return f;
}

}  // namespace hrs
