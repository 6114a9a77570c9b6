#include "hrs/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hrs {

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

void RenderConfig::validate() const {
    if (height * expansion < 2) {
        throw std::invalid_argument("render: canvas height h*ex must be at least 2");
    }
    if (line_width < 1) throw std::invalid_argument("render: line width must be at least 1");
    if (expansion < 1) throw std::invalid_argument("render: expansion must be at least 1");
    if (background == line) {
        throw std::invalid_argument("render: background and line colors must differ");
    }
    for (double v : background) {
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("render: background color outside [0,1]");
    }
    for (double v : line) {
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("render: line color outside [0,1]");
    }
}

namespace {

long floordiv(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// Row of the digital line at column x (x-major), i.e. the ideal ordinate
// rounded half-up: floor((x-x0)*dy/dx + 1/2).
long line_row_at(long x, long x0, long y0, long dx, long dy) {
    return y0 + floordiv(2 * (x - x0) * dy + dx, 2 * dx);
}

}  // namespace

bool on_segment(long px, long py, long x0, long y0, long x1, long y1) {
    const long dx = x1 - x0;
    const long dy = y1 - y0;
    if (dx == 0 && dy == 0) return px == x0 && py == y0;
    if (std::labs(dx) >= std::labs(dy)) {
        long xa = x0, ya = y0, xb = x1, yb = y1;
        if (xa > xb) {
            std::swap(xa, xb);
            std::swap(ya, yb);
        }
        if (px < xa || px > xb) return false;
        return py == line_row_at(px, xa, ya, xb - xa, yb - ya);
    }
    long xa = x0, ya = y0, xb = x1, yb = y1;
    if (ya > yb) {
        std::swap(xa, xb);
        std::swap(ya, yb);
    }
    if (py < ya || py > yb) return false;
    return px == line_row_at(py, ya, xa, yb - ya, xb - xa);
}

std::vector<long> vertex_rows(const std::vector<double>& window, std::size_t canvas_height) {
    const std::size_t len = window.size();
    double lo = window[0];
    double hi = window[0];
    for (double v : window) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double diff = hi - lo;
    std::vector<long> rows(len);
    const double top = static_cast<double>(canvas_height - 1);
    for (std::size_t j = 0; j < len; ++j) {
        const double line = diff == 0.0 ? 1.0 : 1.0 - (window[j] - lo) / diff;
        rows[j] = std::lround(line * top);
    }
    return rows;
}

namespace {

struct Canvas {
    std::size_t height;
    std::size_t width;
    std::vector<std::uint8_t> lit;  // 1 where the line color lands

    void plot_brush(long x, long y, long lo, long hi) {
        for (long by = y + lo; by <= y + hi; ++by) {
            if (by < 0 || by >= static_cast<long>(height)) continue;
            for (long bx = x + lo; bx <= x + hi; ++bx) {
                if (bx < 0 || bx >= static_cast<long>(width)) continue;
                lit[static_cast<std::size_t>(by) * width + static_cast<std::size_t>(bx)] = 1;
            }
        }
    }
};

// Incremental integer walk over the nearest-grid digital segment. Keeps a
// remainder in [0, 2*major) so each step adjusts the minor coordinate by at
// most one; matches line_row_at() exactly, ties rounding half-up.
void draw_segment(Canvas& canvas, long x0, long y0, long x1, long y1, long blo, long bhi) {
    const long adx = std::labs(x1 - x0);
    const long ady = std::labs(y1 - y0);
    if (adx == 0 && ady == 0) {
        canvas.plot_brush(x0, y0, blo, bhi);
        return;
    }
    const bool x_major = adx >= ady;
    long xa = x0, ya = y0, xb = x1, yb = y1;
    if (x_major ? (xa > xb) : (ya > yb)) {
        std::swap(xa, xb);
        std::swap(ya, yb);
    }
    const long major = x_major ? xb - xa : yb - ya;
    const long minor_delta = x_major ? yb - ya : xb - xa;
    long minor = x_major ? ya : xa;
    long rem = major;  // numerator of (fractional part + 1/2), scaled by 2*major
    for (long step = 0; step <= major; ++step) {
        if (x_major) {
            canvas.plot_brush(xa + step, minor, blo, bhi);
        } else {
            canvas.plot_brush(minor, ya + step, blo, bhi);
        }
        rem += 2 * minor_delta;
        while (rem >= 2 * major) {
            rem -= 2 * major;
            ++minor;
        }
        while (rem < 0) {
            rem += 2 * major;
            --minor;
        }
    }
}

}  // namespace

ImageTensor render_series(const std::vector<std::vector<double>>& variates,
                          const RenderConfig& cfg) {
    cfg.validate();
    if (variates.empty()) throw std::invalid_argument("render: no variates");
    const std::size_t len = variates[0].size();
    if (len < 2) throw std::invalid_argument("render: window length must be at least 2");
    for (const auto& w : variates) {
        if (w.size() != len) throw std::invalid_argument("render: variate lengths differ");
        for (double v : w) {
            if (!std::isfinite(v)) throw std::invalid_argument("render: non-finite value in window");
        }
    }

    const std::size_t h = cfg.canvas_height();
    const std::size_t w = cfg.canvas_width(len);
    const long ex = static_cast<long>(cfg.expansion);
    const long blo = -static_cast<long>((cfg.line_width - 1) / 2);
    const long bhi = static_cast<long>(cfg.line_width / 2);

    ImageTensor img;
    img.variates = variates.size();
    img.height = h;
    img.width = w;
    img.data.resize(img.channels() * h * w);

    Canvas canvas{h, w, {}};
    for (std::size_t m = 0; m < variates.size(); ++m) {
        canvas.lit.assign(h * w, 0);
        const auto rows = vertex_rows(variates[m], h);
        for (std::size_t j = 0; j + 1 < rows.size(); ++j) {
            draw_segment(canvas, static_cast<long>(j) * ex, rows[j],
                         static_cast<long>(j + 1) * ex, rows[j + 1], blo, bhi);
        }
        for (std::size_t c = 0; c < RenderConfig::channels; ++c) {
            double* out = img.data.data() + ((m * RenderConfig::channels + c) * h * w);
            const double bg = cfg.background[c];
            const double fg = cfg.line[c];
            for (std::size_t p = 0; p < h * w; ++p) out[p] = canvas.lit[p] ? fg : bg;
        }
    }
    return img;
}

ImageTensor render_series(const std::vector<double>& window, const RenderConfig& cfg) {
    return render_series(std::vector<std::vector<double>>{window}, cfg);
}

void write_ppm(const ImageTensor& img, std::size_t variate, const std::string& path) {
    if (variate >= img.variates) throw std::invalid_argument("write_ppm: variate out of range");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_ppm: cannot open " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            for (std::size_t c = 0; c < RenderConfig::channels; ++c) {
                const double v = img.at(variate * RenderConfig::channels + c, y, x);
                const long b = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
                out.put(static_cast<char>(static_cast<unsigned char>(b)));
            }
        }
    }
    if (!out) throw std::runtime_error("write_ppm: write failed for " + path);
}

std::shared_ptr<const ImageTensor> RenderCache::get(const std::vector<double>& window,
                                                    const RenderConfig& cfg) {
    std::uint64_t h = fnv1a64(window.data(), window.size() * sizeof(double));
    h = fnv1a64(&cfg.height, sizeof(cfg.height), h);
    h = fnv1a64(&cfg.expansion, sizeof(cfg.expansion), h);
    h = fnv1a64(&cfg.line_width, sizeof(cfg.line_width), h);
    h = fnv1a64(cfg.background.data(), sizeof(cfg.background), h);
    h = fnv1a64(cfg.line.data(), sizeof(cfg.line), h);
    auto& bucket = entries_[h];
    for (const Entry& e : bucket) {
        if (e.cfg == cfg && e.window == window) return e.image;
    }
    auto image = std::make_shared<ImageTensor>(render_series(window, cfg));
    bucket.push_back(Entry{window, cfg, image});
    return bucket.back().image;
}

}  // namespace hrs
