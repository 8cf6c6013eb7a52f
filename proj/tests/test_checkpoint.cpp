#include <doctest.h>

#include <filesystem>

#include "harmonics/checkpoint.hpp"

using namespace harmonics;

TEST_CASE("network serialization round-trips bit-exactly") {
    const DenseNetwork net =
        DenseNetwork::make(3, {8, 5}, 2, Activation::tanh, Activation::identity, 21);
    const DenseNetwork back = checkpoint::deserialize_network(checkpoint::serialize(net));
    CHECK(back.flatten_params() == net.flatten_params());
    REQUIRE(back.layers.size() == net.layers.size());
    for (size_t i = 0; i < net.layers.size(); ++i) {
        CHECK(back.layers[i].weight.rows == net.layers[i].weight.rows);
        CHECK(back.layers[i].weight.cols == net.layers[i].weight.cols);
        CHECK(back.layers[i].act == net.layers[i].act);
    }
}

TEST_CASE("model serialization keeps metadata and hyperparameters") {
    const VaeModel m = VaeModel::make(2, 1, {6}, Activation::sigmoid, 0.2, Vec{0.7}, 5);
    std::map<std::string, std::string> meta = {{"experiment", "unit"}, {"seed", "5"}};
    std::map<std::string, std::string> meta_back;
    const VaeModel back = checkpoint::deserialize_model(checkpoint::serialize(m, meta), &meta_back);
    CHECK(back.flatten_params() == m.flatten_params());
    CHECK(back.sigma_theta == m.sigma_theta);
    CHECK(back.fixed_sigma_phi == m.fixed_sigma_phi);
    CHECK(back.latent_dim == m.latent_dim);
    CHECK(back.data_dim == m.data_dim);
    CHECK(meta_back == meta);
}

TEST_CASE("learned-scale models survive the round-trip") {
    const VaeModel m = VaeModel::make(2, 2, {6}, Activation::relu, 0.1, std::nullopt, 6);
    const VaeModel back = checkpoint::deserialize_model(checkpoint::serialize(m));
    CHECK(back.learned_scale());
    CHECK(back.flatten_params() == m.flatten_params());
}

TEST_CASE("a corrupted payload is rejected by the checksum") {
    const VaeModel m = VaeModel::make(2, 1, {4}, Activation::sigmoid, 0.1, Vec{0.5}, 7);
    std::string text = checkpoint::serialize(m);
    const size_t pos = text.rfind("0.");
    REQUIRE(pos != std::string::npos);
    text[pos + 2] = text[pos + 2] == '1' ? '2' : '1';
    CHECK_THROWS_WITH_AS(checkpoint::deserialize_model(text),
                         doctest::Contains("checksum"), std::invalid_argument);
}

TEST_CASE("garbage input is rejected up front") {
    CHECK_THROWS_AS(checkpoint::deserialize_model("not a checkpoint\n"), std::invalid_argument);
    CHECK_THROWS_AS(checkpoint::deserialize_network(""), std::invalid_argument);
}

TEST_CASE("save and load round-trip through a file") {
    namespace fs = std::filesystem;
    const fs::path p = fs::temp_directory_path() / "vaeharm_test_model.ckpt";
    const VaeModel m = VaeModel::make(3, 1, {5}, Activation::tanh, 0.15, Vec{0.4}, 9);
    checkpoint::save_model(m, p.string(), {{"note", "temp"}});
    std::map<std::string, std::string> meta;
    const VaeModel back = checkpoint::load_model(p.string(), &meta);
    CHECK(back.flatten_params() == m.flatten_params());
    CHECK(meta.at("note") == "temp");
    fs::remove(p);
    CHECK_THROWS_AS(checkpoint::load_model(p.string()), std::invalid_argument);
}
