#include "hrs/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace hrs {

std::size_t shape_numel(const Shape& shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    return n;
}

std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << "x";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

namespace detail {

void Node::ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
}

}  // namespace detail

namespace {

std::shared_ptr<detail::Node> new_node(Shape shape, std::vector<double> value,
                                       bool requires_grad) {
    if (shape_numel(shape) != value.size()) {
        throw std::invalid_argument("tensor: shape " + shape_str(shape) + " wants " +
                                    std::to_string(shape_numel(shape)) + " elements, got " +
                                    std::to_string(value.size()));
    }
    for (std::size_t e : shape) {
        if (e == 0) throw std::invalid_argument("tensor: zero extent in shape " + shape_str(shape));
    }
    auto node = std::make_shared<detail::Node>();
    node->shape = std::move(shape);
    node->value = std::move(value);
    node->requires_grad = requires_grad;
    if (requires_grad) node->ensure_grad();
    return node;
}

}  // namespace

Tensor make_op(Shape shape, std::vector<double> value, std::vector<Tensor> parents,
               std::function<void(detail::Node&)> backprop) {
    bool track = false;
    for (const Tensor& p : parents) track = track || p.requires_grad();
    auto node = new_node(std::move(shape), std::move(value), track);
    if (track) {
        // Strong references keep the graph alive past the caller's handles.
        node->parents.reserve(parents.size());
        for (const Tensor& p : parents) node->parents.push_back(p.node_);
        node->backprop = std::move(backprop);
    }
    return Tensor(std::move(node));
}

const Shape& Tensor::shape() const {
    if (!node_) throw std::logic_error("tensor: undefined handle");
    return node_->shape;
}

std::size_t Tensor::numel() const { return shape_numel(shape()); }

const std::vector<double>& Tensor::values() const {
    if (!node_) throw std::logic_error("tensor: undefined handle");
    return node_->value;
}

std::vector<double>& Tensor::values() {
    if (!node_) throw std::logic_error("tensor: undefined handle");
    return node_->value;
}

double Tensor::item() const {
    if (numel() != 1) {
        throw std::invalid_argument("tensor: item() on non-scalar shape " + shape_str(shape()));
    }
    return values()[0];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

bool Tensor::has_grad() const { return node_ && node_->grad.size() == node_->value.size(); }

const std::vector<double>& Tensor::grad() const {
    if (!has_grad()) throw std::logic_error("tensor: gradient not present");
    return node_->grad;
}

void Tensor::zero_grad() {
    if (!node_) return;
    node_->grad.assign(node_->value.size(), 0.0);
    node_->backward_done = false;
}

Tensor Tensor::clone() const {
    if (!node_) return Tensor();
    return Tensor::from(node_->shape, node_->value, node_->requires_grad);
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    std::vector<double> v(shape_numel(shape), 0.0);
    return Tensor(new_node(std::move(shape), std::move(v), requires_grad));
}

Tensor Tensor::full(Shape shape, double fill, bool requires_grad) {
    std::vector<double> v(shape_numel(shape), fill);
    return Tensor(new_node(std::move(shape), std::move(v), requires_grad));
}

Tensor Tensor::from(Shape shape, std::vector<double> data, bool requires_grad) {
    return Tensor(new_node(std::move(shape), std::move(data), requires_grad));
}

Tensor Tensor::scalar(double v, bool requires_grad) {
    return Tensor(new_node(Shape{1}, std::vector<double>{v}, requires_grad));
}

namespace {

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                                    " vs " + shape_str(b.shape()));
    }
}

void accumulate(detail::Node& parent, const std::vector<double>& delta) {
    if (!parent.requires_grad) return;
    parent.ensure_grad();
    for (std::size_t i = 0; i < delta.size(); ++i) parent.grad[i] += delta[i];
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    check_same_shape("add", a, b);
    std::vector<double> out(a.numel());
    const auto& av = a.values();
    const auto& bv = b.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
    auto* an = a.node();
    auto* bn = b.node();
    return make_op(a.shape(), std::move(out), {a, b}, [an, bn](detail::Node& n) {
        accumulate(*an, n.grad);
        accumulate(*bn, n.grad);
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same_shape("sub", a, b);
    std::vector<double> out(a.numel());
    const auto& av = a.values();
    const auto& bv = b.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
    auto* an = a.node();
    auto* bn = b.node();
    return make_op(a.shape(), std::move(out), {a, b}, [an, bn](detail::Node& n) {
        accumulate(*an, n.grad);
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) bn->grad[i] -= n.grad[i];
        }
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check_same_shape("mul", a, b);
    std::vector<double> out(a.numel());
    const auto& av = a.values();
    const auto& bv = b.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
    auto* an = a.node();
    auto* bn = b.node();
    return make_op(a.shape(), std::move(out), {a, b}, [an, bn](detail::Node& n) {
        if (an->requires_grad) {
            an->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) an->grad[i] += n.grad[i] * bn->value[i];
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) bn->grad[i] += n.grad[i] * an->value[i];
        }
    });
}

Tensor scale(const Tensor& x, double s) {
    std::vector<double> out(x.numel());
    const auto& xv = x.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * s;
    auto* xn = x.node();
    return make_op(x.shape(), std::move(out), {x}, [xn, s](detail::Node& n) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (std::size_t i = 0; i < n.grad.size(); ++i) xn->grad[i] += n.grad[i] * s;
    });
}

Tensor add_scalar(const Tensor& x, double c) {
    std::vector<double> out(x.numel());
    const auto& xv = x.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] + c;
    auto* xn = x.node();
    return make_op(x.shape(), std::move(out), {x},
                   [xn](detail::Node& n) { accumulate(*xn, n.grad); });
}

Tensor relu(const Tensor& x) {
    std::vector<double> out(x.numel());
    const auto& xv = x.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] > 0.0 ? xv[i] : 0.0;
    auto* xn = x.node();
    return make_op(x.shape(), std::move(out), {x}, [xn](detail::Node& n) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (std::size_t i = 0; i < n.grad.size(); ++i) {
            if (xn->value[i] > 0.0) xn->grad[i] += n.grad[i];
        }
    });
}

namespace {

double stable_sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

Tensor sigmoid(const Tensor& x) {
    std::vector<double> out(x.numel());
    const auto& xv = x.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = stable_sigmoid(xv[i]);
    auto* xn = x.node();
    return make_op(x.shape(), std::move(out), {x}, [xn](detail::Node& n) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (std::size_t i = 0; i < n.grad.size(); ++i) {
            const double s = n.value[i];
            xn->grad[i] += n.grad[i] * s * (1.0 - s);
        }
    });
}

Tensor sum(const Tensor& x) {
    double acc = 0.0;
    for (double v : x.values()) acc += v;
    auto* xn = x.node();
    return make_op(Shape{1}, {acc}, {x}, [xn](detail::Node& n) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (double& g : xn->grad) g += n.grad[0];
    });
}

Tensor mean(const Tensor& x) {
    double acc = 0.0;
    for (double v : x.values()) acc += v;
    const double inv = 1.0 / static_cast<double>(x.numel());
    auto* xn = x.node();
    return make_op(Shape{1}, {acc * inv}, {x}, [xn, inv](detail::Node& n) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (double& g : xn->grad) g += n.grad[0] * inv;
    });
}

Tensor reshape(const Tensor& x, Shape shape) {
    if (shape_numel(shape) != x.numel()) {
        throw std::invalid_argument("reshape: cannot view " + shape_str(x.shape()) + " as " +
                                    shape_str(shape) + " (element count differs)");
    }
    auto* xn = x.node();
    return make_op(std::move(shape), x.values(), {x},
                   [xn](detail::Node& n) { accumulate(*xn, n.grad); });
}

Tensor transpose2d(const Tensor& x) {
    if (x.ndim() != 2) {
        throw std::invalid_argument("transpose2d: want 2-D input, got " + shape_str(x.shape()));
    }
    const std::size_t r = x.shape()[0];
    const std::size_t c = x.shape()[1];
    std::vector<double> out(r * c);
    const auto& xv = x.values();
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) out[j * r + i] = xv[i * c + j];
    }
    auto* xn = x.node();
    return make_op(Shape{c, r}, std::move(out), {x}, [xn, r, c](detail::Node& n) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < c; ++j) xn->grad[i * c + j] += n.grad[j * r + i];
        }
    });
}

Tensor concat_rows(const Tensor& a, const Tensor& b) {
    if (a.ndim() != 2 || b.ndim() != 2) {
        throw std::invalid_argument("concat_rows: want 2-D inputs, got " + shape_str(a.shape()) +
                                    " and " + shape_str(b.shape()));
    }
    if (a.shape()[1] != b.shape()[1]) {
        throw std::invalid_argument("concat_rows: column extents differ, " +
                                    std::to_string(a.shape()[1]) + " vs " +
                                    std::to_string(b.shape()[1]));
    }
    const std::size_t cols = a.shape()[1];
    const std::size_t ra = a.shape()[0];
    const std::size_t rb = b.shape()[0];
    std::vector<double> out;
    out.reserve((ra + rb) * cols);
    out.insert(out.end(), a.values().begin(), a.values().end());
    out.insert(out.end(), b.values().begin(), b.values().end());
    auto* an = a.node();
    auto* bn = b.node();
    return make_op(Shape{ra + rb, cols}, std::move(out), {a, b}, [an, bn, ra, cols](detail::Node& n) {
        if (an->requires_grad) {
            an->ensure_grad();
            for (std::size_t i = 0; i < an->grad.size(); ++i) an->grad[i] += n.grad[i];
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            const std::size_t off = ra * cols;
            for (std::size_t i = 0; i < bn->grad.size(); ++i) bn->grad[i] += n.grad[off + i];
        }
    });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.ndim() != 2 || b.ndim() != 2) {
        throw std::invalid_argument("matmul: want 2-D inputs, got " + shape_str(a.shape()) +
                                    " and " + shape_str(b.shape()));
    }
    const std::size_t m = a.shape()[0];
    const std::size_t k = a.shape()[1];
    if (b.shape()[0] != k) {
        throw std::invalid_argument("matmul: inner extents differ, " + std::to_string(k) + " vs " +
                                    std::to_string(b.shape()[0]));
    }
    const std::size_t n = b.shape()[1];
    std::vector<double> out(m * n, 0.0);
    const auto& av = a.values();
    const auto& bv = b.values();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = av[i * k + p];
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aip * bv[p * n + j];
        }
    }
    auto* an = a.node();
    auto* bn = b.node();
    return make_op(Shape{m, n}, std::move(out), {a, b}, [an, bn, m, k, n](detail::Node& node) {
        if (an->requires_grad) {
            an->ensure_grad();
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t p = 0; p < k; ++p) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                        acc += node.grad[i * n + j] * bn->value[p * n + j];
                    }
                    an->grad[i * k + p] += acc;
                }
            }
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (std::size_t p = 0; p < k; ++p) {
                for (std::size_t j = 0; j < n; ++j) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < m; ++i) {
                        acc += an->value[i * k + p] * node.grad[i * n + j];
                    }
                    bn->grad[p * n + j] += acc;
                }
            }
        }
    });
}

Tensor add_row_bias(const Tensor& x, const Tensor& bias) {
    if (x.ndim() != 2) {
        throw std::invalid_argument("add_row_bias: want 2-D input, got " + shape_str(x.shape()));
    }
    if (bias.ndim() != 1 || bias.shape()[0] != x.shape()[0]) {
        throw std::invalid_argument("add_row_bias: bias " + shape_str(bias.shape()) +
                                    " does not match row extent " + std::to_string(x.shape()[0]));
    }
    const std::size_t rows = x.shape()[0];
    const std::size_t cols = x.shape()[1];
    std::vector<double> out(rows * cols);
    const auto& xv = x.values();
    const auto& bv = bias.values();
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] = xv[i * cols + j] + bv[i];
    }
    auto* xn = x.node();
    auto* bn = bias.node();
    return make_op(x.shape(), std::move(out), {x, bias}, [xn, bn, rows, cols](detail::Node& n) {
        accumulate(*xn, n.grad);
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (std::size_t i = 0; i < rows; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < cols; ++j) acc += n.grad[i * cols + j];
                bn->grad[i] += acc;
            }
        }
    });
}

Tensor linear(const Tensor& x, const Tensor& weights, const Tensor& bias) {
    if (weights.ndim() != 2) {
        throw std::invalid_argument("linear: weights must be 2-D, got " +
                                    shape_str(weights.shape()));
    }
    const std::size_t f_out = weights.shape()[0];
    const std::size_t f_in = weights.shape()[1];
    if (x.ndim() == 0 || x.shape().back() != f_in) {
        throw std::invalid_argument("linear: trailing extent of input " + shape_str(x.shape()) +
                                    " does not match F_in=" + std::to_string(f_in));
    }
    if (bias.ndim() != 1 || bias.shape()[0] != f_out) {
        throw std::invalid_argument("linear: bias " + shape_str(bias.shape()) +
                                    " does not match F_out=" + std::to_string(f_out));
    }
    const std::size_t rows = x.numel() / f_in;
    Shape out_shape = x.shape();
    out_shape.back() = f_out;
    std::vector<double> out(rows * f_out);
    const auto& xv = x.values();
    const auto& wv = weights.values();
    const auto& bv = bias.values();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t o = 0; o < f_out; ++o) {
            double acc = bv[o];
            for (std::size_t i = 0; i < f_in; ++i) acc += wv[o * f_in + i] * xv[r * f_in + i];
            out[r * f_out + o] = acc;
        }
    }
    auto* xn = x.node();
    auto* wn = weights.node();
    auto* bn = bias.node();
    return make_op(std::move(out_shape), std::move(out), {x, weights, bias},
                   [xn, wn, bn, rows, f_in, f_out](detail::Node& n) {
                       if (xn->requires_grad) {
                           xn->ensure_grad();
                           for (std::size_t r = 0; r < rows; ++r) {
                               for (std::size_t i = 0; i < f_in; ++i) {
                                   double acc = 0.0;
                                   for (std::size_t o = 0; o < f_out; ++o) {
                                       acc += n.grad[r * f_out + o] * wn->value[o * f_in + i];
                                   }
                                   xn->grad[r * f_in + i] += acc;
                               }
                           }
                       }
                       if (wn->requires_grad) {
                           wn->ensure_grad();
                           for (std::size_t o = 0; o < f_out; ++o) {
                               for (std::size_t i = 0; i < f_in; ++i) {
                                   double acc = 0.0;
                                   for (std::size_t r = 0; r < rows; ++r) {
                                       acc += n.grad[r * f_out + o] * xn->value[r * f_in + i];
                                   }
                                   wn->grad[o * f_in + i] += acc;
                               }
                           }
                       }
                       if (bn->requires_grad) {
                           bn->ensure_grad();
                           for (std::size_t o = 0; o < f_out; ++o) {
                               double acc = 0.0;
                               for (std::size_t r = 0; r < rows; ++r) acc += n.grad[r * f_out + o];
                               bn->grad[o] += acc;
                           }
                       }
                   });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("layer_norm: eps must be positive");
    if (x.ndim() == 0) throw std::invalid_argument("layer_norm: undefined input");
    const std::size_t d = x.shape().back();
    if (gain.ndim() != 1 || gain.shape()[0] != d || shift.ndim() != 1 || shift.shape()[0] != d) {
        throw std::invalid_argument("layer_norm: gain/shift must be 1-D of extent " +
                                    std::to_string(d));
    }
    const std::size_t rows = x.numel() / d;
    std::vector<double> out(x.numel());
    std::vector<double> xhat(x.numel());
    std::vector<double> inv_std(rows);
    const auto& xv = x.values();
    const auto& gv = gain.values();
    const auto& sv = shift.values();
    for (std::size_t r = 0; r < rows; ++r) {
        double mu = 0.0;
        for (std::size_t j = 0; j < d; ++j) mu += xv[r * d + j];
        mu /= static_cast<double>(d);
        double var = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double c = xv[r * d + j] - mu;
            var += c * c;
        }
        var /= static_cast<double>(d);
        const double is = 1.0 / std::sqrt(var + eps);
        inv_std[r] = is;
        for (std::size_t j = 0; j < d; ++j) {
            const double h = (xv[r * d + j] - mu) * is;
            xhat[r * d + j] = h;
            out[r * d + j] = gv[j] * h + sv[j];
        }
    }
    auto* xn = x.node();
    auto* gn = gain.node();
    auto* sn = shift.node();
    auto xhat_s = std::make_shared<std::vector<double>>(std::move(xhat));
    auto inv_std_s = std::make_shared<std::vector<double>>(std::move(inv_std));
    return make_op(x.shape(), std::move(out), {x, gain, shift},
                   [xn, gn, sn, rows, d, xhat_s, inv_std_s](detail::Node& n) {
                       const auto& xh = *xhat_s;
                       const auto& is = *inv_std_s;
                       if (gn->requires_grad) {
                           gn->ensure_grad();
                           for (std::size_t j = 0; j < d; ++j) {
                               double acc = 0.0;
                               for (std::size_t r = 0; r < rows; ++r) {
                                   acc += n.grad[r * d + j] * xh[r * d + j];
                               }
                               gn->grad[j] += acc;
                           }
                       }
                       if (sn->requires_grad) {
                           sn->ensure_grad();
                           for (std::size_t j = 0; j < d; ++j) {
                               double acc = 0.0;
                               for (std::size_t r = 0; r < rows; ++r) acc += n.grad[r * d + j];
                               sn->grad[j] += acc;
                           }
                       }
                       if (xn->requires_grad) {
                           xn->ensure_grad();
                           const double invd = 1.0 / static_cast<double>(d);
                           for (std::size_t r = 0; r < rows; ++r) {
                               double mean_gy = 0.0;
                               double mean_gyh = 0.0;
                               for (std::size_t j = 0; j < d; ++j) {
                                   const double gy = n.grad[r * d + j] * gn->value[j];
                                   mean_gy += gy;
                                   mean_gyh += gy * xh[r * d + j];
                               }
                               mean_gy *= invd;
                               mean_gyh *= invd;
                               for (std::size_t j = 0; j < d; ++j) {
                                   const double gy = n.grad[r * d + j] * gn->value[j];
                                   xn->grad[r * d + j] +=
                                       is[r] * (gy - mean_gy - xh[r * d + j] * mean_gyh);
                               }
                           }
                       }
                   });
}

std::size_t conv_out_extent(std::size_t in, std::size_t kernel, std::size_t stride) {
    if (kernel > in) {
        throw std::invalid_argument("conv: kernel extent " + std::to_string(kernel) +
                                    " exceeds input extent " + std::to_string(in));
    }
    if (stride == 0) throw std::invalid_argument("conv: zero stride");
    return (in - kernel) / stride + 1;
}

Tensor conv2d(const Tensor& input, const ConvSpec& spec, const Tensor& weights,
              const Tensor& bias) {
    if (input.ndim() != 3) {
        throw std::invalid_argument("conv2d: want [C_in x H x W] input, got " +
                                    shape_str(input.shape()));
    }
    const std::size_t c_in = input.shape()[0];
    const std::size_t h = input.shape()[1];
    const std::size_t w = input.shape()[2];
    if (c_in != spec.in_channels) {
        throw std::invalid_argument("conv2d: input channel extent " + std::to_string(c_in) +
                                    " != spec in_channels " + std::to_string(spec.in_channels));
    }
    Shape want_w{spec.out_channels, spec.in_channels, spec.kernel_h, spec.kernel_w};
    if (weights.shape() != want_w) {
        throw std::invalid_argument("conv2d: weights " + shape_str(weights.shape()) + " != " +
                                    shape_str(want_w));
    }
    if (bias.ndim() != 1 || bias.shape()[0] != spec.out_channels) {
        throw std::invalid_argument("conv2d: bias " + shape_str(bias.shape()) +
                                    " != [C_out=" + std::to_string(spec.out_channels) + "]");
    }
    if (spec.kernel_h > h) {
        throw std::invalid_argument("conv2d: kernel height " + std::to_string(spec.kernel_h) +
                                    " exceeds input height " + std::to_string(h));
    }
    if (spec.kernel_w > w) {
        throw std::invalid_argument("conv2d: kernel width " + std::to_string(spec.kernel_w) +
                                    " exceeds input width " + std::to_string(w));
    }
    const std::size_t oh = conv_out_extent(h, spec.kernel_h, spec.stride_h);
    const std::size_t ow = conv_out_extent(w, spec.kernel_w, spec.stride_w);
    const std::size_t c_out = spec.out_channels;
    std::vector<double> out(c_out * oh * ow);
    const auto& xv = input.values();
    const auto& wv = weights.values();
    const auto& bv = bias.values();
    const auto widx = [c_in, kh = spec.kernel_h, kw = spec.kernel_w](
                          std::size_t o, std::size_t c, std::size_t i, std::size_t j) {
        return ((o * c_in + c) * kh + i) * kw + j;
    };
    for (std::size_t o = 0; o < c_out; ++o) {
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t x = 0; x < ow; ++x) {
                double acc = bv[o];
                const std::size_t y0 = y * spec.stride_h;
                const std::size_t x0 = x * spec.stride_w;
                for (std::size_t c = 0; c < c_in; ++c) {
                    for (std::size_t i = 0; i < spec.kernel_h; ++i) {
                        const std::size_t base = (c * h + y0 + i) * w + x0;
                        for (std::size_t j = 0; j < spec.kernel_w; ++j) {
                            acc += wv[widx(o, c, i, j)] * xv[base + j];
                        }
                    }
                }
                out[(o * oh + y) * ow + x] = acc;
            }
        }
    }
    auto* xn = input.node();
    auto* wn = weights.node();
    auto* bn = bias.node();
    ConvSpec sp = spec;
    return make_op(Shape{c_out, oh, ow}, std::move(out), {input, weights, bias},
                   [xn, wn, bn, sp, c_in, h, w, oh, ow, c_out, widx](detail::Node& n) {
                       if (bn->requires_grad) {
                           bn->ensure_grad();
                           for (std::size_t o = 0; o < c_out; ++o) {
                               double acc = 0.0;
                               for (std::size_t p = 0; p < oh * ow; ++p) acc += n.grad[o * oh * ow + p];
                               bn->grad[o] += acc;
                           }
                       }
                       const bool gx = xn->requires_grad;
                       const bool gw = wn->requires_grad;
                       if (!gx && !gw) return;
                       if (gx) xn->ensure_grad();
                       if (gw) wn->ensure_grad();
                       for (std::size_t o = 0; o < c_out; ++o) {
                           for (std::size_t y = 0; y < oh; ++y) {
                               for (std::size_t x = 0; x < ow; ++x) {
                                   const double g = n.grad[(o * oh + y) * ow + x];
                                   if (g == 0.0) continue;
                                   const std::size_t y0 = y * sp.stride_h;
                                   const std::size_t x0 = x * sp.stride_w;
                                   for (std::size_t c = 0; c < c_in; ++c) {
                                       for (std::size_t i = 0; i < sp.kernel_h; ++i) {
                                           const std::size_t base = (c * h + y0 + i) * w + x0;
                                           for (std::size_t j = 0; j < sp.kernel_w; ++j) {
                                               if (gx) {
                                                   xn->grad[base + j] += g * wn->value[widx(o, c, i, j)];
                                               }
                                               if (gw) {
                                                   wn->grad[widx(o, c, i, j)] += g * xn->value[base + j];
                                               }
                                           }
                                       }
                                   }
                               }
                           }
                       }
                   });
}

Tensor conv1d(const Tensor& input, const Conv1dSpec& spec, const Tensor& weights,
              const Tensor& bias) {
    if (input.ndim() != 1) {
        throw std::invalid_argument("conv1d: want [L] input, got " + shape_str(input.shape()));
    }
    const std::size_t len = input.shape()[0];
    const std::size_t k = spec.kernel;
    const std::size_t d = spec.out_channels;
    if (k == 0) throw std::invalid_argument("conv1d: zero kernel extent");
    if (k > len + k - 1) throw std::invalid_argument("conv1d: kernel longer than padded input");
    if (weights.ndim() != 2 || weights.shape()[0] != d || weights.shape()[1] != k) {
        throw std::invalid_argument("conv1d: weights " + shape_str(weights.shape()) + " != [" +
                                    std::to_string(d) + "x" + std::to_string(k) + "]");
    }
    if (bias.ndim() != 1 || bias.shape()[0] != d) {
        throw std::invalid_argument("conv1d: bias " + shape_str(bias.shape()) +
                                    " != [D=" + std::to_string(d) + "]");
    }
    // Symmetric zero padding; total k-1 keeps the output length at L.
    const std::size_t pad_left = (k - 1) / 2;
    std::vector<double> out(len * d);
    const auto& xv = input.values();
    const auto& wv = weights.values();
    const auto& bv = bias.values();
    for (std::size_t t = 0; t < len; ++t) {
        for (std::size_t o = 0; o < d; ++o) {
            double acc = bv[o];
            for (std::size_t j = 0; j < k; ++j) {
                const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + j) -
                                           static_cast<std::ptrdiff_t>(pad_left);
                if (src >= 0 && src < static_cast<std::ptrdiff_t>(len)) {
                    acc += wv[o * k + j] * xv[static_cast<std::size_t>(src)];
                }
            }
            out[t * d + o] = acc;
        }
    }
    auto* xn = input.node();
    auto* wn = weights.node();
    auto* bn = bias.node();
    return make_op(Shape{len, d}, std::move(out), {input, weights, bias},
                   [xn, wn, bn, len, k, d, pad_left](detail::Node& n) {
                       if (bn->requires_grad) {
                           bn->ensure_grad();
                           for (std::size_t o = 0; o < d; ++o) {
                               double acc = 0.0;
                               for (std::size_t t = 0; t < len; ++t) acc += n.grad[t * d + o];
                               bn->grad[o] += acc;
                           }
                       }
                       const bool gx = xn->requires_grad;
                       const bool gw = wn->requires_grad;
                       if (!gx && !gw) return;
                       if (gx) xn->ensure_grad();
                       if (gw) wn->ensure_grad();
                       for (std::size_t t = 0; t < len; ++t) {
                           for (std::size_t o = 0; o < d; ++o) {
                               const double g = n.grad[t * d + o];
                               if (g == 0.0) continue;
                               for (std::size_t j = 0; j < k; ++j) {
                                   const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + j) -
                                                              static_cast<std::ptrdiff_t>(pad_left);
                                   if (src < 0 || src >= static_cast<std::ptrdiff_t>(len)) continue;
                                   if (gx) xn->grad[static_cast<std::size_t>(src)] += g * wn->value[o * k + j];
                                   if (gw) wn->grad[o * k + j] += g * xn->value[static_cast<std::size_t>(src)];
                               }
                           }
                       }
                   });
}

void backward(const Tensor& loss) {
    if (!loss.defined()) throw std::invalid_argument("backward: undefined loss");
    if (loss.numel() != 1) {
        throw std::invalid_argument("backward: loss must be scalar, got shape " +
                                    shape_str(loss.shape()));
    }
    auto* root = loss.node();
    if (!root->requires_grad) {
        throw std::invalid_argument("backward: loss does not track gradients");
    }
    if (root->backward_done) {
        throw std::logic_error("backward: second sweep from the same loss without reset");
    }
    root->backward_done = true;

    // Reverse topological order via iterative post-order DFS.
    std::vector<detail::Node*> order;
    std::unordered_set<detail::Node*> seen;
    struct Frame {
        detail::Node* node;
        std::size_t next_child;
    };
    std::vector<Frame> stack;
    stack.push_back({root, 0});
    seen.insert(root);
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next_child < f.node->parents.size()) {
            detail::Node* child = f.node->parents[f.next_child].get();
            ++f.next_child;
            if (child && child->requires_grad && !seen.count(child)) {
                seen.insert(child);
                stack.push_back({child, 0});
            }
        } else {
            order.push_back(f.node);
            stack.pop_back();
        }
    }

    root->ensure_grad();
    std::fill(root->grad.begin(), root->grad.end(), 0.0);
    root->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        detail::Node* node = *it;
        if (node->backprop && node->grad.size() == node->value.size()) {
            node->backprop(*node);
        }
    }
}

}  // namespace hrs
