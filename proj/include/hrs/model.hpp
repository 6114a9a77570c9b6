#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hrs/data.hpp"
#include "hrs/render.hpp"
#include "hrs/rng.hpp"
#include "hrs/tensor.hpp"

namespace hrs {

//! Module switches used by ablation runs. Each drop preserves the fused
//! feature dimensionality: the missing branch's tokens are recovered with a
//! learned token lift, the fusion drop falls back to plain concatenation,
//! and the mixer drop substitutes two stacked feed-forward layers.
enum class Ablation { none, no_visual, no_numeric, no_fusion, no_mixer };

std::string ablation_name(Ablation a);
bool ablation_from_name(std::string_view name, Ablation& out);

struct HrsConfig {
    std::size_t lookback = 24;     // L
    std::size_t horizon = 24;      // T
    std::size_t embed_dim = 16;    // D
    std::size_t fused_tokens = 64; // width of the fused representation
    std::size_t conv_kernel_h = 8;
    std::size_t conv_kernel_w = 8;
    std::size_t conv_stride_h = 8;
    std::size_t conv_stride_w = 8;
    std::size_t conv1d_kernel = 3;
    std::size_t timestamp_fields = kTimestampFields;  // K_t <= 5
    std::size_t token_hidden = 0;  // 0 -> 2x token count
    std::size_t dim_hidden = 0;    // 0 -> 2x embed_dim
    RenderConfig render;
    Ablation ablation = Ablation::none;

    std::size_t image_height() const { return render.canvas_height(); }
    std::size_t image_width() const { return render.canvas_width(lookback); }
    std::size_t conv_rows() const;     // I_h
    std::size_t conv_cols() const;     // I_w
    std::size_t visual_tokens() const; // V = I_h * I_w
    std::size_t fusion_inputs() const { return visual_tokens() + lookback; }
    std::size_t mixer_tokens() const {
        return ablation == Ablation::no_fusion ? fusion_inputs() : fused_tokens;
    }
    std::size_t token_hidden_resolved() const {
        return token_hidden ? token_hidden : 2 * mixer_tokens();
    }
    std::size_t dim_hidden_resolved() const { return dim_hidden ? dim_hidden : 2 * embed_dim; }
    ConvSpec conv_spec() const;
    void validate() const;
};

//! Named parameter tensors in a stable order; the order defines both the
//! init stream and the checkpoint layout.
struct ModelParams {
    std::vector<std::pair<std::string, Tensor>> entries;

    Tensor& at(std::string_view name);
    const Tensor& at(std::string_view name) const;
    bool has(std::string_view name) const;
    void add(std::string name, Tensor t);
    std::size_t size() const { return entries.size(); }
    void zero_grad();
    ModelParams clone() const;
};

constexpr double kLayerNormEps = 1e-5;

ModelParams init_hrs_params(const HrsConfig& cfg, Rng& rng);

// Stage outputs of the forward pass.
Tensor visual_features(const Tensor& image, const HrsConfig& cfg, const ModelParams& p);
Tensor numeric_features(const Tensor& x_norm, const std::vector<std::int64_t>& timestamps,
                        const HrsConfig& cfg, const ModelParams& p);
Tensor fuse_features(const Tensor& f_visual, const Tensor& f_numeric, const HrsConfig& cfg,
                     const ModelParams& p);
Tensor mix_dependencies(const Tensor& fused, const HrsConfig& cfg, const ModelParams& p);
Tensor project_horizon(const Tensor& mixed, const HrsConfig& cfg, const ModelParams& p);

//! Full forward pass for one sample; the result is the horizon forecast in
//! raw units, differentiable w.r.t. every parameter.
Tensor hrs_forward(const SeriesWindow& sample, const HrsConfig& cfg, const ModelParams& p,
                   RenderCache* cache = nullptr);

// Single affine lookback-to-horizon baseline, sharing the same per-window
// normalization convention.
ModelParams init_linear_params(std::size_t lookback, std::size_t horizon, Rng& rng);
Tensor linear_forward(const SeriesWindow& sample, std::size_t lookback, std::size_t horizon,
                      const ModelParams& p);

enum class ModelKind { hrs, linear };

std::string model_kind_name(ModelKind kind);
bool model_kind_from_name(std::string_view name, ModelKind& out);

//! A trained model plus everything needed to produce raw-scale forecasts.
struct Forecaster {
    ModelKind kind = ModelKind::hrs;
    HrsConfig config;
    ModelParams params;

    std::vector<double> predict(const SeriesWindow& sample, RenderCache* cache = nullptr) const;
};

}  // namespace hrs
