#include "harmonics/autodiff.hpp"

#include <cmath>

#include "harmonics/kernels.hpp"
#include "harmonics/rng.hpp"

namespace harmonics {

Activation activation_from_string(const std::string& s) {
    if (s == "sigmoid") return Activation::sigmoid;
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    if (s == "identity") return Activation::identity;
    throw std::invalid_argument("unknown activation: " + s);
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::sigmoid: return "sigmoid";
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
        case Activation::identity: return "identity";
    }
    throw std::logic_error("bad activation enum");
}

namespace {

double act_value(Activation a, double z) {
    switch (a) {
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Activation::relu: return z > 0.0 ? z : 0.0;
        case Activation::tanh: return std::tanh(z);
        case Activation::identity: return z;
    }
    return z;
}

// Derivative from pre-activation z and post-activation a.
double act_slope(Activation act, double z, double a) {
    switch (act) {
        case Activation::sigmoid: return a * (1.0 - a);
        case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::tanh: return 1.0 - a * a;
        case Activation::identity: return 1.0;
    }
    return 1.0;
}

} // namespace

DenseNetwork DenseNetwork::make(int input, const std::vector<int>& hidden, int output,
                                Activation hidden_act, Activation out_act, uint64_t seed) {
    require(input >= 1 && output >= 1, "DenseNetwork: dimensions must be >= 1");
    DenseNetwork net;
    Rng rng(seed);
    int in = input;
    std::vector<int> outs = hidden;
    outs.push_back(output);
    for (size_t l = 0; l < outs.size(); ++l) {
        DenseLayer layer;
        layer.weight = Mat(outs[l], in);
        layer.bias.assign(outs[l], 0.0);
        layer.act = l + 1 == outs.size() ? out_act : hidden_act;
        const double bound = std::sqrt(6.0 / static_cast<double>(in + outs[l]));
        for (double& w : layer.weight.a) w = rng.uniform(-bound, bound);
        in = outs[l];
        net.layers.push_back(std::move(layer));
    }
    return net;
}

size_t DenseNetwork::parameter_count() const {
    size_t n = 0;
    for (const DenseLayer& l : layers) n += l.weight.a.size() + l.bias.size();
    return n;
}

Vec DenseNetwork::flatten_params() const {
    Vec p;
    p.reserve(parameter_count());
    for (const DenseLayer& l : layers) {
        p.insert(p.end(), l.weight.a.begin(), l.weight.a.end());
        p.insert(p.end(), l.bias.begin(), l.bias.end());
    }
    return p;
}

void DenseNetwork::unflatten_params(const Vec& p) {
    require(p.size() == parameter_count(), "unflatten_params: size mismatch");
    size_t off = 0;
    for (DenseLayer& l : layers) {
        std::copy(p.begin() + off, p.begin() + off + l.weight.a.size(), l.weight.a.begin());
        off += l.weight.a.size();
        std::copy(p.begin() + off, p.begin() + off + l.bias.size(), l.bias.begin());
        off += l.bias.size();
    }
    ++version;
}

Vec NetGrads::flatten() const {
    Vec g;
    for (size_t l = 0; l < d_weight.size(); ++l) {
        g.insert(g.end(), d_weight[l].a.begin(), d_weight[l].a.end());
        g.insert(g.end(), d_bias[l].begin(), d_bias[l].end());
    }
    return g;
}

void NetGrads::accumulate(const NetGrads& other, double factor) {
    for (size_t l = 0; l < d_weight.size(); ++l) {
        for (size_t i = 0; i < d_weight[l].a.size(); ++i) d_weight[l].a[i] += factor * other.d_weight[l].a[i];
        for (size_t i = 0; i < d_bias[l].size(); ++i) d_bias[l][i] += factor * other.d_bias[l][i];
    }
}

void NetGrads::scale(double factor) {
    for (size_t l = 0; l < d_weight.size(); ++l) {
        for (double& g : d_weight[l].a) g *= factor;
        for (double& g : d_bias[l]) g *= factor;
    }
    for (double& g : d_input.a) g *= factor;
}

NetGrads zero_grads(const DenseNetwork& net, int batch) {
    NetGrads g;
    for (const DenseLayer& l : net.layers) {
        g.d_weight.emplace_back(l.weight.rows, l.weight.cols);
        g.d_bias.emplace_back(l.bias.size(), 0.0);
    }
    g.d_input = Mat(batch, net.input_dim());
    return g;
}

Mat forward(const DenseNetwork& net, const Mat& x, GradientTape& tape) {
    require(x.cols == net.input_dim(), "forward: input dimension mismatch");
    for (double v : x.a) require(std::isfinite(v), "forward: non-finite input");
    tape.net = &net;
    tape.net_version = net.version;
    tape.input = x;
    tape.pre.clear();
    tape.post.clear();
    Mat a = x;
    for (const DenseLayer& layer : net.layers) {
        Mat z = kernels::matmul_nt(a, layer.weight); // B x out
        for (int i = 0; i < z.rows; ++i) {
            double* zr = z.row(i);
            for (int j = 0; j < z.cols; ++j) zr[j] += layer.bias[j];
        }
        Mat post(z.rows, z.cols);
        for (size_t i = 0; i < z.a.size(); ++i) post.a[i] = act_value(layer.act, z.a[i]);
        tape.pre.push_back(z);
        tape.post.push_back(post);
        a = std::move(post);
    }
    return a;
}

Vec forward(const DenseNetwork& net, const Vec& x, GradientTape& tape) {
    return forward(net, as_row(x), tape).row_vec(0);
}

Vec forward(const DenseNetwork& net, const Vec& x) {
    GradientTape tape;
    return forward(net, x, tape);
}

NetGrads backward(const GradientTape& tape, const Mat& seed_grad) {
    require(tape.net != nullptr, "backward: empty tape");
    const DenseNetwork& net = *tape.net;
    require(tape.net_version == net.version,
            "backward: stale tape (parameters changed since forward)");
    require(seed_grad.rows == tape.input.rows && seed_grad.cols == net.output_dim(),
            "backward: seed gradient shape mismatch");

    NetGrads grads = zero_grads(net, tape.input.rows);
    Mat d_act = seed_grad;
    for (int l = static_cast<int>(net.layers.size()) - 1; l >= 0; --l) {
        const DenseLayer& layer = net.layers[l];
        const Mat& z = tape.pre[l];
        const Mat& a = tape.post[l];
        Mat dz(d_act.rows, d_act.cols);
        for (size_t i = 0; i < dz.a.size(); ++i)
            dz.a[i] = d_act.a[i] * act_slope(layer.act, z.a[i], a.a[i]);

        const Mat& prev = l == 0 ? tape.input : tape.post[l - 1];
        grads.d_weight[l] = kernels::matmul_tn(dz, prev); // out x in, batch-summed ascending
        for (int i = 0; i < dz.rows; ++i) {
            const double* r = dz.row(i);
            for (int j = 0; j < dz.cols; ++j) grads.d_bias[l][j] += r[j];
        }
        d_act = kernels::matmul(dz, layer.weight); // B x in
    }
    grads.d_input = std::move(d_act);
    return grads;
}

bool adam_step(Vec& params, const Vec& grads, AdamState& state) {
    require(params.size() == grads.size(), "adam_step: shape mismatch");
    require(state.m.size() == params.size() && state.v.size() == params.size(),
            "adam_step: state shape mismatch");
    for (double g : grads)
        if (!std::isfinite(g)) return false;
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
    return true;
}

} // namespace harmonics
