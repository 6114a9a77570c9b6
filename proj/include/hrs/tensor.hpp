#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace hrs {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

//! One value in the differentiation graph. Parents are held alive through
//! shared ownership; the backward closure scatters this node's gradient
//! into its parents' gradient buffers.
struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    bool requires_grad = false;
    bool backward_done = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backprop;

    std::size_t numel() const { return value.size(); }
    void ensure_grad();
};

}  // namespace detail

//! Dense n-dimensional array of doubles, value-like handle onto a shared
//! graph node. Copies alias the same storage; use clone() for a deep copy.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double fill, bool requires_grad = false);
    static Tensor from(Shape shape, std::vector<double> data, bool requires_grad = false);
    static Tensor scalar(double v, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const;
    std::size_t ndim() const { return shape().size(); }
    std::size_t numel() const;

    const std::vector<double>& values() const;
    std::vector<double>& values();
    double item() const;  // scalar tensors only

    bool requires_grad() const;
    bool has_grad() const;
    const std::vector<double>& grad() const;
    void zero_grad();

    Tensor clone() const;  // deep copy, detached from any graph

    detail::Node* node() const { return node_.get(); }

private:
    explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
    std::shared_ptr<detail::Node> node_;

    friend Tensor make_op(Shape shape, std::vector<double> value,
                          std::vector<Tensor> parents,
                          std::function<void(detail::Node&)> backprop);
};

//! 2-D convolution geometry. Output extents follow the floor formula
//! out = (in - kernel) / stride + 1 with no padding.
struct ConvSpec {
    std::size_t kernel_h = 1;
    std::size_t kernel_w = 1;
    std::size_t stride_h = 1;
    std::size_t stride_w = 1;
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
};

std::size_t conv_out_extent(std::size_t in, std::size_t kernel, std::size_t stride);

//! 1-D convolution with symmetric zero padding sized to preserve the
//! input length.
struct Conv1dSpec {
    std::size_t kernel = 3;
    std::size_t out_channels = 1;
};

// Elementwise and reduction primitives. All are differentiable; gradients
// accumulate (sum) when a tensor is reused in several places.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double s);
Tensor add_scalar(const Tensor& x, double c);
Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

// Structural ops.
Tensor reshape(const Tensor& x, Shape shape);
Tensor transpose2d(const Tensor& x);
Tensor concat_rows(const Tensor& a, const Tensor& b);

// Linear-algebra ops.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add_row_bias(const Tensor& x, const Tensor& bias);

//! Affine map along the trailing axis: input [... x F_in] with weights
//! [F_out x F_in] and bias [F_out] gives [... x F_out].
Tensor linear(const Tensor& x, const Tensor& weights, const Tensor& bias);

//! Per-row normalization over the trailing axis, then elementwise affine
//! with gain/shift of that axis length.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift, double eps);

//! input [C_in x H x W], weights [C_out x C_in x k_h x k_w], bias [C_out]
//! -> [C_out x I_h x I_w].
Tensor conv2d(const Tensor& input, const ConvSpec& spec, const Tensor& weights,
              const Tensor& bias);

//! input [L], weights [D x k], bias [D] -> [L x D], length preserved by
//! symmetric zero padding.
Tensor conv1d(const Tensor& input, const Conv1dSpec& spec, const Tensor& weights,
              const Tensor& bias);

//! Reverse-mode sweep from a scalar loss. Fills grad on every tensor that
//! requires gradients. A second sweep from the same loss is rejected.
void backward(const Tensor& loss);

}  // namespace hrs
