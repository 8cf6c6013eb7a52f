#include <doctest.h>

#include <cmath>

#include "harmonics/autodiff.hpp"
#include "harmonics/rng.hpp"

using namespace harmonics;

namespace {

// d(sum of outputs)/d(params) by central differences.
Vec fd_gradient(DenseNetwork& net, const Vec& x, double h = 1e-6) {
    Vec p = net.flatten_params();
    Vec g(p.size());
    for (size_t i = 0; i < p.size(); ++i) {
        const double keep = p[i];
        p[i] = keep + h;
        net.unflatten_params(p);
        const Vec up = forward(net, x);
        p[i] = keep - h;
        net.unflatten_params(p);
        const Vec dn = forward(net, x);
        p[i] = keep;
        double s = 0.0;
        for (size_t j = 0; j < up.size(); ++j) s += up[j] - dn[j];
        g[i] = s / (2.0 * h);
    }
    net.unflatten_params(p);
    return g;
}

double max_rel_err(const Vec& a, const Vec& b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-6});
        worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
    }
    return worst;
}

} // namespace

TEST_CASE("backward matches central differences for each activation") {
    Rng rng(11);
    for (Activation act : {Activation::sigmoid, Activation::relu, Activation::tanh}) {
        DenseNetwork net = DenseNetwork::make(3, {8, 8}, 2, act, Activation::identity, 17);
        const Vec x = rng.gauss_vec(3);
        GradientTape tape;
        const Vec out = forward(net, x, tape);
        Mat seed(1, static_cast<int>(out.size()), 1.0); // d(sum)/d(out) = 1
        const NetGrads g = backward(tape, seed);
        CHECK(max_rel_err(g.flatten(), fd_gradient(net, x)) <= 1e-4);
    }
}

TEST_CASE("input gradient matches central differences") {
    DenseNetwork net = DenseNetwork::make(4, {6}, 3, Activation::tanh, Activation::identity, 5);
    Rng rng(23);
    const Vec x = rng.gauss_vec(4);
    GradientTape tape;
    const Vec out = forward(net, x, tape);
    Mat seed(1, static_cast<int>(out.size()), 1.0);
    const NetGrads g = backward(tape, seed);
    const double h = 1e-6;
    for (int i = 0; i < 4; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const Vec up = forward(net, xp), dn = forward(net, xm);
        double fd = 0.0;
        for (size_t j = 0; j < up.size(); ++j) fd += up[j] - dn[j];
        fd /= 2.0 * h;
        CHECK(g.d_input(0, i) == doctest::Approx(fd).epsilon(1e-4));
    }
}

TEST_CASE("batched forward equals per-example forward") {
    DenseNetwork net = DenseNetwork::make(3, {5, 4}, 2, Activation::sigmoid,
                                          Activation::identity, 2);
    Rng rng(9);
    Mat x(6, 3);
    for (double& v : x.a) v = rng.gauss();
    GradientTape tape;
    const Mat batched = forward(net, x, tape);
    for (int i = 0; i < x.rows; ++i) {
        const Vec single = forward(net, x.row_vec(i));
        for (int j = 0; j < batched.cols; ++j) CHECK(batched(i, j) == single[j]);
    }
}

TEST_CASE("initialization is deterministic in the seed") {
    const DenseNetwork a = DenseNetwork::make(3, {4}, 2, Activation::relu, Activation::identity, 7);
    const DenseNetwork b = DenseNetwork::make(3, {4}, 2, Activation::relu, Activation::identity, 7);
    const DenseNetwork c = DenseNetwork::make(3, {4}, 2, Activation::relu, Activation::identity, 8);
    CHECK(a.flatten_params() == b.flatten_params());
    CHECK(a.flatten_params() != c.flatten_params());
}

TEST_CASE("initialization respects the glorot bound and zero biases") {
    const DenseNetwork net = DenseNetwork::make(10, {20}, 5, Activation::tanh,
                                                Activation::identity, 3);
    const double bound0 = std::sqrt(6.0 / (10 + 20));
    for (double w : net.layers[0].weight.a) CHECK(std::abs(w) <= bound0);
    for (double b : net.layers[0].bias) CHECK(b == 0.0);
}

TEST_CASE("flatten and unflatten round-trip") {
    DenseNetwork net = DenseNetwork::make(2, {3}, 2, Activation::sigmoid, Activation::identity, 1);
    const Vec p = net.flatten_params();
    CHECK(p.size() == net.parameter_count());
    Vec q = p;
    for (double& v : q) v += 0.25;
    net.unflatten_params(q);
    CHECK(net.flatten_params() == q);
}

TEST_CASE("backward rejects a stale tape") {
    DenseNetwork net = DenseNetwork::make(2, {3}, 1, Activation::tanh, Activation::identity, 4);
    GradientTape tape;
    forward(net, Vec{0.1, -0.2}, tape);
    Vec p = net.flatten_params();
    p[0] += 1.0;
    net.unflatten_params(p); // bumps version
    CHECK_THROWS_AS(backward(tape, Mat(1, 1, 1.0)), std::invalid_argument);
}

TEST_CASE("forward rejects non-finite input") {
    DenseNetwork net = DenseNetwork::make(2, {3}, 1, Activation::relu, Activation::identity, 4);
    CHECK_THROWS_AS(forward(net, Vec{1.0, std::nan("")}), std::invalid_argument);
}

TEST_CASE("adam follows the hand-computed trajectory") {
    // constant gradient 1 on a single parameter
    Vec params = {0.0};
    AdamState st(1, 0.1);
    double m = 0.0, v = 0.0, x = 0.0;
    for (int t = 1; t <= 3; ++t) {
        CHECK(adam_step(params, Vec{1.0}, st));
        m = 0.9 * m + 0.1 * 1.0;
        v = 0.999 * v + 0.001 * 1.0;
        const double mh = m / (1.0 - std::pow(0.9, t));
        const double vh = v / (1.0 - std::pow(0.999, t));
        x -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
        CHECK(params[0] == doctest::Approx(x).epsilon(1e-10));
    }
}

TEST_CASE("adam skips a step on non-finite gradients") {
    Vec params = {1.0, 2.0};
    AdamState st(2, 0.1);
    CHECK_FALSE(adam_step(params, Vec{1.0, std::numeric_limits<double>::infinity()}, st));
    CHECK(params == Vec{1.0, 2.0});
    CHECK(st.t == 0);
}

TEST_CASE("gradients accumulate over the batch in ascending example order") {
    DenseNetwork net = DenseNetwork::make(2, {4}, 1, Activation::sigmoid, Activation::identity, 6);
    Rng rng(14);
    Mat x(3, 2);
    for (double& v : x.a) v = rng.gauss();
    GradientTape tape;
    forward(net, x, tape);
    const NetGrads batched = backward(tape, Mat(3, 1, 1.0));
    NetGrads summed = zero_grads(net);
    for (int i = 0; i < 3; ++i) {
        GradientTape t1;
        forward(net, x.row_vec(i), t1);
        summed.accumulate(backward(t1, Mat(1, 1, 1.0)));
    }
    const Vec a = batched.flatten(), b = summed.flatten();
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
}
