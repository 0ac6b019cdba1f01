#include <cmath>

#include <gtest/gtest.h>

#include "icla/errors.hpp"
#include "icla/model.hpp"

using namespace icla;
using namespace icla::model;

namespace {

Architecture small_arch() {
    return {6, {5, 4}, 3, Activation::relu, Activation::linear, Activation::sigmoid};
}

}  // namespace

TEST(Model, InitBuildsMirroredAutoencoderAndHead) {
    Rng rng(1);
    const auto p = NetworkParams::init(small_arch(), 2, rng);
    ASSERT_EQ(p.encoder.size(), 3u);
    ASSERT_EQ(p.decoder.size(), 3u);
    EXPECT_EQ(p.encoder[0].in(), 6u);
    EXPECT_EQ(p.encoder[0].out(), 5u);
    EXPECT_EQ(p.encoder[1].out(), 4u);
    EXPECT_EQ(p.encoder[2].out(), 3u);
    EXPECT_EQ(p.encoder[2].activation, Activation::linear);
    EXPECT_EQ(p.decoder[0].in(), 3u);
    EXPECT_EQ(p.decoder[0].out(), 4u);
    EXPECT_EQ(p.decoder[1].out(), 5u);
    EXPECT_EQ(p.decoder[2].out(), 6u);
    EXPECT_EQ(p.decoder[2].activation, Activation::sigmoid);
    EXPECT_EQ(p.head.in(), 3u);
    EXPECT_EQ(p.head.out(), 2u);
    EXPECT_EQ(p.head.activation, Activation::linear);
    EXPECT_EQ(p.input_dim(), 6u);
    EXPECT_EQ(p.embedding_dim(), 3u);
    EXPECT_EQ(p.num_classes(), 2u);
}

TEST(Model, StandardArchitectures) {
    const auto a = mlp_embedding32();
    EXPECT_EQ(a.input_dim, 784u);
    EXPECT_EQ(a.hidden, (std::vector<std::size_t>{512, 256}));
    EXPECT_EQ(a.embedding_dim, 32u);
    const auto b = mlp_100();
    EXPECT_TRUE(b.hidden.empty());
    EXPECT_EQ(b.embedding_dim, 100u);
}

TEST(Model, InitIsDeterministicPerSeed) {
    Rng a(4), b(4), c(5);
    EXPECT_EQ(NetworkParams::init(small_arch(), 2, a), NetworkParams::init(small_arch(), 2, b));
    EXPECT_NE(NetworkParams::init(small_arch(), 2, a), NetworkParams::init(small_arch(), 2, c));
}

TEST(Model, ClassifyGivesRowDistributions) {
    Rng rng(2);
    const auto p = NetworkParams::init(small_arch(), 4, rng);
    nn::Matrix x(7, 6);
    for (std::size_t i = 0; i < x.size(); ++i) x.values()[i] = std::sin(static_cast<double>(i));
    const auto probs = classify(p, encode(p, x));
    ASSERT_EQ(probs.rows(), 7u);
    ASSERT_EQ(probs.cols(), 4u);
    for (std::size_t r = 0; r < 7; ++r) {
        double s = 0.0;
        for (double v : probs.row(r)) s += v;
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
    const auto xhat = decode(p, encode(p, x));
    EXPECT_EQ(xhat.cols(), 6u);
    for (double v : xhat.values()) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
    EXPECT_EQ(argmax_rows(nn::Matrix{{0.1, 0.7, 0.2}, {3, 1, 3}}), (std::vector<int>{1, 0}));
}

TEST(Model, ExpandHeadKeepsExistingRows) {
    Rng rng(3);
    auto p = NetworkParams::init(small_arch(), 2, rng);
    auto opt = NetworkOptimizer::for_params(p);
    const auto before = p;
    Rng head_rng(9);
    expand_head(p, 3, head_rng);
    expand_head(opt, 3);
    ASSERT_EQ(p.num_classes(), 5u);
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(p.head.weights(r, c), before.head.weights(r, c));
        EXPECT_EQ(p.head.bias[r], before.head.bias[r]);
    }
    for (std::size_t r = 2; r < 5; ++r) EXPECT_EQ(p.head.bias[r], 0.0);
    EXPECT_EQ(p.encoder, before.encoder);
    EXPECT_EQ(p.decoder, before.decoder);
    EXPECT_EQ(opt.head.first[0].weights.rows(), 5u);

    auto q = before;
    Rng again(9);
    expand_head(q, 0, again);
    EXPECT_EQ(q, before);
}

TEST(Model, ParameterViewsCoverEveryArray) {
    Rng rng(6);
    auto p = NetworkParams::init(small_arch(), 2, rng);
    const auto views = parameter_views(p);
    EXPECT_EQ(views.size(), 2u * (3 + 3 + 1));
    std::size_t total = 0;
    for (const auto& v : views) total += v.size();
    // encoder 35 + 24 + 15, decoder 16 + 25 + 36, head 8
    EXPECT_EQ(total, 159u);
}
