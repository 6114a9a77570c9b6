#include "hrs/model.hpp"

#include <cmath>
#include <stdexcept>

namespace hrs {

std::string ablation_name(Ablation a) {
    switch (a) {
        case Ablation::none: return "none";
        case Ablation::no_visual: return "vfem";
        case Ablation::no_numeric: return "nfem";
        case Ablation::no_fusion: return "ffm";
        case Ablation::no_mixer: return "mdm";
    }
    return "none";
}

bool ablation_from_name(std::string_view name, Ablation& out) {
    if (name == "none") out = Ablation::none;
    else if (name == "vfem") out = Ablation::no_visual;
    else if (name == "nfem") out = Ablation::no_numeric;
    else if (name == "ffm") out = Ablation::no_fusion;
    else if (name == "mdm") out = Ablation::no_mixer;
    else return false;
    return true;
}

std::string model_kind_name(ModelKind kind) {
    return kind == ModelKind::hrs ? "hrs" : "linear";
}

bool model_kind_from_name(std::string_view name, ModelKind& out) {
    if (name == "hrs") out = ModelKind::hrs;
    else if (name == "linear") out = ModelKind::linear;
    else return false;
    return true;
}

std::size_t HrsConfig::conv_rows() const {
    return conv_out_extent(image_height(), conv_kernel_h, conv_stride_h);
}

std::size_t HrsConfig::conv_cols() const {
    return conv_out_extent(image_width(), conv_kernel_w, conv_stride_w);
}

std::size_t HrsConfig::visual_tokens() const { return conv_rows() * conv_cols(); }

ConvSpec HrsConfig::conv_spec() const {
    ConvSpec sp;
    sp.kernel_h = conv_kernel_h;
    sp.kernel_w = conv_kernel_w;
    sp.stride_h = conv_stride_h;
    sp.stride_w = conv_stride_w;
    sp.in_channels = RenderConfig::channels;
    sp.out_channels = embed_dim;
    return sp;
}

void HrsConfig::validate() const {
    render.validate();
    if (lookback < 2) throw std::invalid_argument("model: lookback must be at least 2");
    if (horizon < 1) throw std::invalid_argument("model: horizon must be at least 1");
    if (embed_dim < 1) throw std::invalid_argument("model: embed_dim must be at least 1");
    if (fused_tokens < 1) throw std::invalid_argument("model: fused_tokens must be at least 1");
    if (conv1d_kernel < 1) throw std::invalid_argument("model: conv1d kernel must be at least 1");
    if (timestamp_fields < 1 || timestamp_fields > kTimestampFields) {
        throw std::invalid_argument("model: timestamp_fields must be in [1, " +
                                    std::to_string(kTimestampFields) + "]");
    }
    if (conv_kernel_h > image_height()) {
        throw std::invalid_argument("model: conv kernel height exceeds image height");
    }
    if (conv_kernel_w > image_width()) {
        throw std::invalid_argument("model: conv kernel width exceeds image width");
    }
}

Tensor& ModelParams::at(std::string_view name) {
    for (auto& [n, t] : entries) {
        if (n == name) return t;
    }
    throw std::logic_error("params: no entry named '" + std::string(name) + "'");
}

const Tensor& ModelParams::at(std::string_view name) const {
    for (const auto& [n, t] : entries) {
        if (n == name) return t;
    }
    throw std::logic_error("params: no entry named '" + std::string(name) + "'");
}

bool ModelParams::has(std::string_view name) const {
    for (const auto& [n, t] : entries) {
        if (n == name) return true;
    }
    return false;
}

void ModelParams::add(std::string name, Tensor t) {
    if (has(name)) throw std::logic_error("params: duplicate entry '" + name + "'");
    entries.emplace_back(std::move(name), std::move(t));
}

void ModelParams::zero_grad() {
    for (auto& [n, t] : entries) t.zero_grad();
}

ModelParams ModelParams::clone() const {
    ModelParams out;
    out.entries.reserve(entries.size());
    for (const auto& [n, t] : entries) out.entries.emplace_back(n, t.clone());
    return out;
}

namespace {

Tensor init_weight(Shape shape, std::size_t fan_in, Rng& rng) {
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    std::vector<double> v(shape_numel(shape));
    for (double& x : v) x = rng.uniform(-bound, bound);
    return Tensor::from(std::move(shape), std::move(v), true);
}

void expect_shape(const Tensor& t, const Shape& want, const char* stage) {
    if (t.shape() != want) {
        throw std::logic_error(std::string(stage) + ": got shape " + shape_str(t.shape()) +
                               ", expected " + shape_str(want));
    }
}

}  // namespace

ModelParams init_hrs_params(const HrsConfig& cfg, Rng& rng) {
    cfg.validate();
    const std::size_t d = cfg.embed_dim;
    const std::size_t v = cfg.visual_tokens();
    const std::size_t l = cfg.lookback;
    const std::size_t fused_in = cfg.fusion_inputs();
    const std::size_t tokens = cfg.mixer_tokens();
    ModelParams p;

    if (cfg.ablation != Ablation::no_visual) {
        p.add("conv2.weight", init_weight({d, RenderConfig::channels, cfg.conv_kernel_h,
                                           cfg.conv_kernel_w},
                                          RenderConfig::channels * cfg.conv_kernel_h *
                                              cfg.conv_kernel_w,
                                          rng));
        p.add("conv2.bias", Tensor::zeros({d}, true));
    }
    if (cfg.ablation != Ablation::no_numeric) {
        p.add("conv1.weight", init_weight({d, cfg.conv1d_kernel}, cfg.conv1d_kernel, rng));
        p.add("conv1.bias", Tensor::zeros({d}, true));
        p.add("time.weight", init_weight({d, cfg.timestamp_fields}, cfg.timestamp_fields, rng));
        p.add("time.bias", Tensor::zeros({d}, true));
    }
    if (cfg.ablation == Ablation::no_visual) {
        p.add("lift.weight", init_weight({fused_in, l}, l, rng));
        p.add("lift.bias", Tensor::zeros({fused_in}, true));
    } else if (cfg.ablation == Ablation::no_numeric) {
        p.add("lift.weight", init_weight({fused_in, v}, v, rng));
        p.add("lift.bias", Tensor::zeros({fused_in}, true));
    }
    if (cfg.ablation != Ablation::no_fusion) {
        p.add("fusion.weight", init_weight({cfg.fused_tokens, fused_in}, fused_in, rng));
        p.add("fusion.bias", Tensor::zeros({cfg.fused_tokens}, true));
    }
    if (cfg.ablation == Ablation::no_mixer) {
        const std::size_t hd = cfg.dim_hidden_resolved();
        p.add("mlp1.weight", init_weight({hd, d}, d, rng));
        p.add("mlp1.bias", Tensor::zeros({hd}, true));
        p.add("mlp2.weight", init_weight({d, hd}, hd, rng));
        p.add("mlp2.bias", Tensor::zeros({d}, true));
    } else {
        const std::size_t ht = cfg.token_hidden_resolved();
        const std::size_t hd = cfg.dim_hidden_resolved();
        p.add("norm1.gain", Tensor::full({d}, 1.0, true));
        p.add("norm1.shift", Tensor::zeros({d}, true));
        p.add("token.w1", init_weight({ht, tokens}, tokens, rng));
        p.add("token.b1", Tensor::zeros({ht}, true));
        p.add("token.w2", init_weight({tokens, ht}, ht, rng));
        p.add("token.b2", Tensor::zeros({tokens}, true));
        p.add("norm2.gain", Tensor::full({d}, 1.0, true));
        p.add("norm2.shift", Tensor::zeros({d}, true));
        p.add("dim.w1", init_weight({hd, d}, d, rng));
        p.add("dim.b1", Tensor::zeros({hd}, true));
        p.add("dim.w2", init_weight({d, hd}, hd, rng));
        p.add("dim.b2", Tensor::zeros({d}, true));
    }
    p.add("head.weight", init_weight({cfg.horizon, tokens * d}, tokens * d, rng));
    p.add("head.bias", Tensor::zeros({cfg.horizon}, true));
    return p;
}

Tensor visual_features(const Tensor& image, const HrsConfig& cfg, const ModelParams& p) {
    expect_shape(image, {RenderConfig::channels, cfg.image_height(), cfg.image_width()},
                 "visual_features input");
    const Tensor feature_map =
        conv2d(image, cfg.conv_spec(), p.at("conv2.weight"), p.at("conv2.bias"));
    expect_shape(feature_map, {cfg.embed_dim, cfg.conv_rows(), cfg.conv_cols()},
                 "visual_features conv");
    const Tensor flat = reshape(feature_map, {cfg.embed_dim, cfg.visual_tokens()});
    return transpose2d(flat);  // [V x D]
}

Tensor numeric_features(const Tensor& x_norm, const std::vector<std::int64_t>& timestamps,
                        const HrsConfig& cfg, const ModelParams& p) {
    expect_shape(x_norm, {cfg.lookback}, "numeric_features input");
    if (timestamps.size() != cfg.lookback) {
        throw std::invalid_argument("numeric_features: timestamp count " +
                                    std::to_string(timestamps.size()) + " != lookback " +
                                    std::to_string(cfg.lookback));
    }
    Conv1dSpec spec{cfg.conv1d_kernel, cfg.embed_dim};
    const Tensor value_embed = conv1d(x_norm, spec, p.at("conv1.weight"), p.at("conv1.bias"));

    std::vector<double> fields(cfg.lookback * cfg.timestamp_fields);
    for (std::size_t i = 0; i < cfg.lookback; ++i) {
        const auto f = decompose_timestamp(timestamps[i]);
        for (std::size_t j = 0; j < cfg.timestamp_fields; ++j) {
            fields[i * cfg.timestamp_fields + j] = f[j];
        }
    }
    const Tensor field_tensor = Tensor::from({cfg.lookback, cfg.timestamp_fields}, std::move(fields));
    const Tensor time_embed = linear(field_tensor, p.at("time.weight"), p.at("time.bias"));
    const Tensor out = add(value_embed, time_embed);
    expect_shape(out, {cfg.lookback, cfg.embed_dim}, "numeric_features output");
    return out;
}

Tensor fuse_features(const Tensor& f_visual, const Tensor& f_numeric, const HrsConfig& cfg,
                     const ModelParams& p) {
    if (f_visual.shape().back() != f_numeric.shape().back()) {
        throw std::invalid_argument("fuse: embed dims differ, " +
                                    std::to_string(f_visual.shape().back()) + " vs " +
                                    std::to_string(f_numeric.shape().back()));
    }
    const Tensor tokens = concat_rows(f_visual, f_numeric);  // [(V+L) x D]
    expect_shape(tokens, {cfg.fusion_inputs(), cfg.embed_dim}, "fuse concat");
    if (cfg.ablation == Ablation::no_fusion) return tokens;
    const Tensor fused =
        add_row_bias(matmul(p.at("fusion.weight"), tokens), p.at("fusion.bias"));
    expect_shape(fused, {cfg.fused_tokens, cfg.embed_dim}, "fuse output");
    return fused;
}

namespace {

Tensor token_mlp(const Tensor& x, const ModelParams& p) {
    Tensor h = relu(add_row_bias(matmul(p.at("token.w1"), x), p.at("token.b1")));
    return add_row_bias(matmul(p.at("token.w2"), h), p.at("token.b2"));
}

Tensor dim_mlp(const Tensor& x, const ModelParams& p) {
    Tensor h = relu(linear(x, p.at("dim.w1"), p.at("dim.b1")));
    return linear(h, p.at("dim.w2"), p.at("dim.b2"));
}

}  // namespace

Tensor mix_dependencies(const Tensor& fused, const HrsConfig& cfg, const ModelParams& p) {
    expect_shape(fused, {cfg.mixer_tokens(), cfg.embed_dim}, "mixer input");
    if (cfg.ablation == Ablation::no_mixer) {
        const Tensor h = relu(linear(fused, p.at("mlp1.weight"), p.at("mlp1.bias")));
        return linear(h, p.at("mlp2.weight"), p.at("mlp2.bias"));
    }
    const Tensor normed = layer_norm(fused, p.at("norm1.gain"), p.at("norm1.shift"), kLayerNormEps);
    const Tensor token_mixed = token_mlp(normed, p);
    const Tensor residual =
        layer_norm(add(token_mixed, fused), p.at("norm2.gain"), p.at("norm2.shift"), kLayerNormEps);
    const Tensor out = dim_mlp(residual, p);
    expect_shape(out, {cfg.mixer_tokens(), cfg.embed_dim}, "mixer output");
    return out;
}

Tensor project_horizon(const Tensor& mixed, const HrsConfig& cfg, const ModelParams& p) {
    const Tensor flat = reshape(mixed, {cfg.mixer_tokens() * cfg.embed_dim});
    const Tensor out = linear(flat, p.at("head.weight"), p.at("head.bias"));
    expect_shape(out, {cfg.horizon}, "head output");
    return out;
}

Tensor hrs_forward(const SeriesWindow& sample, const HrsConfig& cfg, const ModelParams& p,
                   RenderCache* cache) {
    if (sample.lookback.size() != cfg.lookback) {
        throw std::invalid_argument("forward: sample lookback length " +
                                    std::to_string(sample.lookback.size()) + " != configured " +
                                    std::to_string(cfg.lookback));
    }
    const Tensor x_norm = Tensor::from({cfg.lookback}, normalize_window(sample));

    Tensor fused;
    if (cfg.ablation == Ablation::no_visual) {
        const Tensor f_n = numeric_features(x_norm, sample.timestamps, cfg, p);
        fused = add_row_bias(matmul(p.at("lift.weight"), f_n), p.at("lift.bias"));
        fused = add_row_bias(matmul(p.at("fusion.weight"), fused), p.at("fusion.bias"));
    } else if (cfg.ablation == Ablation::no_numeric) {
        std::shared_ptr<const ImageTensor> img;
        if (cache) img = cache->get(sample.lookback, cfg.render);
        else img = std::make_shared<ImageTensor>(render_series(sample.lookback, cfg.render));
        const Tensor image = Tensor::from(
            {img->channels(), img->height, img->width}, img->data);
        const Tensor f_v = visual_features(image, cfg, p);
        fused = add_row_bias(matmul(p.at("lift.weight"), f_v), p.at("lift.bias"));
        fused = add_row_bias(matmul(p.at("fusion.weight"), fused), p.at("fusion.bias"));
    } else {
        std::shared_ptr<const ImageTensor> img;
        if (cache) img = cache->get(sample.lookback, cfg.render);
        else img = std::make_shared<ImageTensor>(render_series(sample.lookback, cfg.render));
        const Tensor image = Tensor::from(
            {img->channels(), img->height, img->width}, img->data);
        const Tensor f_v = visual_features(image, cfg, p);
        const Tensor f_n = numeric_features(x_norm, sample.timestamps, cfg, p);
        fused = fuse_features(f_v, f_n, cfg, p);
    }

    const Tensor mixed = mix_dependencies(fused, cfg, p);
    const Tensor normalized_forecast = project_horizon(mixed, cfg, p);
    return add_scalar(scale(normalized_forecast, window_span(sample)), sample.lookback_min);
}

ModelParams init_linear_params(std::size_t lookback, std::size_t horizon, Rng& rng) {
    ModelParams p;
    p.add("linear.weight", init_weight({horizon, lookback}, lookback, rng));
    p.add("linear.bias", Tensor::zeros({horizon}, true));
    return p;
}

Tensor linear_forward(const SeriesWindow& sample, std::size_t lookback, std::size_t horizon,
                      const ModelParams& p) {
    if (sample.lookback.size() != lookback) {
        throw std::invalid_argument("linear_forward: sample lookback length mismatch");
    }
    const Tensor x_norm = Tensor::from({lookback}, normalize_window(sample));
    const Tensor out = linear(x_norm, p.at("linear.weight"), p.at("linear.bias"));
    expect_shape(out, {horizon}, "linear output");
    return add_scalar(scale(out, window_span(sample)), sample.lookback_min);
}

std::vector<double> Forecaster::predict(const SeriesWindow& sample, RenderCache* cache) const {
    const Tensor out = kind == ModelKind::hrs
                           ? hrs_forward(sample, config, params, cache)
                           : linear_forward(sample, config.lookback, config.horizon, params);
    return out.values();
}

}  // namespace hrs
