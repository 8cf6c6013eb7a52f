#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "harmonics/core.hpp"

namespace harmonics {

enum class Activation { sigmoid, relu, tanh, identity };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

struct DenseLayer {
    Mat weight; // out x in
    Vec bias;   // out
    Activation act = Activation::identity;
};

struct DenseNetwork {
    std::vector<DenseLayer> layers;
    uint64_t version = 0; // bumped on every parameter write, for stale-tape checks

    /// Hidden layers use hidden_act, the final layer out_act. Weights are
    /// uniform(+-sqrt(6/(fan_in+fan_out))), biases zero, draw order fixed.
    static DenseNetwork make(int input, const std::vector<int>& hidden, int output,
                             Activation hidden_act, Activation out_act, uint64_t seed);

    int input_dim() const { return layers.front().weight.cols; }
    int output_dim() const { return layers.back().weight.rows; }
    size_t parameter_count() const;

    Vec flatten_params() const;
    void unflatten_params(const Vec& p);
};

/// Record of one forward pass: inputs plus per-layer pre- and post-activation
/// values, enough for exact reverse-mode gradients.
struct GradientTape {
    const DenseNetwork* net = nullptr;
    uint64_t net_version = 0;
    Mat input;             // B x in
    std::vector<Mat> pre;  // per layer, B x out
    std::vector<Mat> post; // per layer, B x out
};

struct NetGrads {
    std::vector<Mat> d_weight;
    std::vector<Vec> d_bias;
    Mat d_input; // B x in

    Vec flatten() const;
    void accumulate(const NetGrads& other, double factor = 1.0);
    void scale(double factor);
};

NetGrads zero_grads(const DenseNetwork& net, int batch = 1);

/// Batched forward; rows of x are examples. Rejects non-finite inputs.
Mat forward(const DenseNetwork& net, const Mat& x, GradientTape& tape);
Vec forward(const DenseNetwork& net, const Vec& x, GradientTape& tape);
Vec forward(const DenseNetwork& net, const Vec& x); // no tape

/// Reverse-mode pass. seed_grad holds d(scalar)/d(output) per example; the
/// parameter gradients are summed over the batch in ascending example order.
NetGrads backward(const GradientTape& tape, const Mat& seed_grad);

struct AdamState {
    Vec m; // first moments
    Vec v; // second moments
    long t = 0;
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(size_t n = 0, double lr_ = 0.001) : m(n, 0.0), v(n, 0.0), lr(lr_) {}
};

/// Standard Adam update with bias correction. Returns false (and leaves
/// params and state untouched) when any gradient entry is non-finite.
bool adam_step(Vec& params, const Vec& grads, AdamState& state);

} // namespace harmonics
