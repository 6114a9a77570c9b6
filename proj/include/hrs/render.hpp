#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace hrs {

using Rgb = std::array<double, 3>;

//! Rendering knobs for the polyline image form of a window.
struct RenderConfig {
    std::size_t height = 32;     // canvas rows before expansion
    std::size_t expansion = 2;   // pixels per series step
    Rgb background{0.0, 0.0, 0.0};
    Rgb line{1.0, 1.0, 1.0};
    std::size_t line_width = 2;
    static constexpr std::size_t channels = 3;

    std::size_t canvas_height() const { return height * expansion; }
    std::size_t canvas_width(std::size_t len) const { return len * expansion; }
    void validate() const;
    bool operator==(const RenderConfig&) const = default;
};

//! Channel-major raster, (3*M) x H x W, every value in [0,1]. Each pixel
//! carries exactly the background or the line color.
struct ImageTensor {
    std::size_t variates = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> data;

    std::size_t channels() const { return RenderConfig::channels * variates; }
    double at(std::size_t c, std::size_t y, std::size_t x) const {
        return data[(c * height + y) * width + x];
    }
};

//! Nearest-row/column digital segment between integer endpoints; the same
//! pixel set the rasterizer produces, computed point-by-point. Used as the
//! reference route in tests.
bool on_segment(long px, long py, long x0, long y0, long x1, long y1);

//! Per-variate vertex rows: min-max normalize, flip vertically, and map to
//! the integer row grid. Constant windows pin the line to the bottom row.
std::vector<long> vertex_rows(const std::vector<double>& window, std::size_t canvas_height);

ImageTensor render_series(const std::vector<double>& window, const RenderConfig& cfg);
ImageTensor render_series(const std::vector<std::vector<double>>& variates,
                          const RenderConfig& cfg);

//! Binary P6 pixmap dump of one variate's channel block.
void write_ppm(const ImageTensor& img, std::size_t variate, const std::string& path);

//! Memoizes rendered windows keyed by (window contents, config).
class RenderCache {
public:
    std::shared_ptr<const ImageTensor> get(const std::vector<double>& window,
                                           const RenderConfig& cfg);
    std::size_t size() const { return entries_.size(); }

private:
    struct Entry {
        std::vector<double> window;
        RenderConfig cfg;
        std::shared_ptr<const ImageTensor> image;
    };
    std::unordered_map<std::uint64_t, std::vector<Entry>> entries_;
};

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ull);

}  // namespace hrs
