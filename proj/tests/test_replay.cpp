#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "icla/embedding.hpp"
#include "icla/errors.hpp"
#include "icla/replay.hpp"

using namespace icla;
using namespace icla::replay;
using nn::Activation;
using nn::DenseLayer;
using nn::Matrix;

namespace {

// Identity autoencoder on R^2 and a head scoring class 0 by 10 x0 and class 1
// by -10 x0, so p(class 0 | x) = 1 / (1 + exp(-20 x0)).
model::NetworkParams sign_classifier(double head_bias0 = 0.0) {
    model::NetworkParams p;
    DenseLayer id = DenseLayer::zeros(2, 2, Activation::linear);
    id.weights = Matrix{{1, 0}, {0, 1}};
    p.encoder = {id};
    p.decoder = {id};
    p.head = DenseLayer::zeros(2, 2, Activation::linear);
    p.head.weights = Matrix{{10, 0}, {-10, 0}};
    p.head.bias = {head_bias0, 0.0};
    return p;
}

gmm::GaussianMixture two_blobs() {
    Matrix z(400, 2);
    std::vector<int> labels(400);
    for (std::size_t i = 0; i < 400; ++i) {
        const double s = static_cast<double>(i % 20) / 10.0 - 0.95;  // spread in [-0.95, 0.95]
        const double t = static_cast<double>(i / 20 % 20) / 10.0 - 0.95;
        labels[i] = i < 200 ? 0 : 1;
        z(i, 0) = (labels[i] == 0 ? 3.0 : -3.0) + s;
        z(i, 1) = t;
    }
    return gmm::fit_map({z, labels});
}

TaskDataset labeled(std::vector<int> labels, double offset = 0.0) {
    TaskDataset d;
    d.x = Matrix(labels.size(), 2);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        d.x(i, 0) = offset + static_cast<double>(i);
        d.x(i, 1) = labels[i];
    }
    d.labels = std::move(labels);
    d.class_set = sorted_classes(d.labels);
    return d;
}

}  // namespace

TEST(Pseudo, AcceptedSamplesSatisfyTheConfidenceRule) {
    const auto params = sign_classifier();
    PseudoOptions opts;
    opts.per_class = 300;
    opts.tau = 0.9;
    const auto pseudo = generate_pseudo(two_blobs(), params, opts, 42);
    ASSERT_EQ(pseudo.size(), 600u);
    EXPECT_EQ(rows_of_class(pseudo.labels, 0).size(), 300u);
    EXPECT_EQ(rows_of_class(pseudo.labels, 1).size(), 300u);
    for (std::size_t i = 0; i < pseudo.size(); ++i) {
        const double x0 = pseudo.embeddings(i, 0);
        const double p0 = 1.0 / (1.0 + std::exp(-20.0 * x0));
        const double conf = pseudo.labels[i] == 0 ? p0 : 1.0 - p0;
        EXPECT_GE(conf, 0.9 - 1e-12);
        // Decoding is the identity here.
        EXPECT_EQ(pseudo.inputs(i, 0), pseudo.embeddings(i, 0));
        EXPECT_EQ(pseudo.inputs(i, 1), pseudo.embeddings(i, 1));
    }
    ASSERT_EQ(pseudo.acceptance.size(), 2u);
    for (const auto& a : pseudo.acceptance) {
        EXPECT_EQ(a.accepted, 300u);
        EXPECT_GE(a.attempts, 300u);
        EXPECT_GT(a.rate(), 0.95);  // a N(+-3, ~0.33) class rarely crosses |x0| < 0.11
    }
}

TEST(Pseudo, SameSeedSameSamples) {
    const auto params = sign_classifier();
    PseudoOptions opts;
    opts.per_class = 50;
    const auto a = generate_pseudo(two_blobs(), params, opts, 7);
    const auto b = generate_pseudo(two_blobs(), params, opts, 7);
    const auto c = generate_pseudo(two_blobs(), params, opts, 8);
    EXPECT_EQ(a.inputs, b.inputs);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_NE(a.inputs, c.inputs);
}

TEST(Pseudo, StarvationNamesTheClass) {
    // Class 0 wins everywhere, so class 1 can never be accepted.
    const auto params = sign_classifier(1e3);
    PseudoOptions opts;
    opts.per_class = 10;
    opts.max_attempts = 200;
    try {
        generate_pseudo(two_blobs(), params, opts, 1);
        FAIL() << "expected ReplayStarvation";
    } catch (const ReplayStarvation& e) {
        EXPECT_EQ(e.class_id(), 1);
        EXPECT_EQ(e.acceptance_rate(), 0.0);
    }
}

TEST(Pseudo, ShortfallIsToppedUpFromAcceptedSamples) {
    // With a budget of 3 attempts per class only 3 distinct samples exist.
    const auto params = sign_classifier();
    PseudoOptions opts;
    opts.per_class = 10;
    opts.max_attempts = 3;
    opts.tau = 0.0;
    opts.require_argmax = false;
    const auto pseudo = generate_pseudo(two_blobs(), params, opts, 3);
    ASSERT_EQ(pseudo.size(), 20u);
    std::set<std::pair<double, double>> distinct;
    for (std::size_t i = 0; i < 10; ++i) distinct.insert({pseudo.inputs(i, 0), pseudo.inputs(i, 1)});
    EXPECT_EQ(distinct.size(), 3u);
}

TEST(Pseudo, RejectsBadOptions) {
    const auto params = sign_classifier();
    PseudoOptions opts;
    opts.per_class = 0;
    EXPECT_THROW(generate_pseudo(two_blobs(), params, opts, 1), ArgumentError);
    opts.per_class = 1;
    opts.tau = 1.0;
    EXPECT_THROW(generate_pseudo(two_blobs(), params, opts, 1), ArgumentError);
}

TEST(Buffer, QuotaIsCapacityOverClassesSeen) {
    ReplayBuffer buf(100);
    Rng rng(1);
    buf.update(labeled(std::vector<int>(80, 0)), rng);
    EXPECT_EQ(buf.count(0), 80u);  // quota 100, only 80 available
    std::vector<int> two(120, 1);
    for (std::size_t i = 0; i < 60; ++i) two[i] = 2;
    buf.update(labeled(two, 1000.0), rng);
    EXPECT_EQ(buf.count(0), 33u);
    EXPECT_EQ(buf.count(1), 33u);
    EXPECT_EQ(buf.count(2), 33u);
    EXPECT_LE(buf.size(), buf.capacity());
}

TEST(Buffer, StoredRowsComeFromTheSourceData) {
    ReplayBuffer buf(10);
    Rng rng(2);
    const auto task = labeled({0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1});
    buf.update(task, rng);
    const auto contents = buf.contents();
    EXPECT_EQ(contents.size(), 10u);
    for (std::size_t r = 0; r < contents.size(); ++r) {
        const auto idx = static_cast<std::size_t>(contents.x(r, 0));
        ASSERT_LT(idx, task.size());
        EXPECT_EQ(contents.labels[r], task.labels[idx]);
        EXPECT_EQ(contents.x(r, 1), task.x(idx, 1));
    }
    // Rows keep their original relative order within a class.
    for (std::size_t r = 1; r < contents.size(); ++r) {
        if (contents.labels[r] == contents.labels[r - 1]) EXPECT_LT(contents.x(r - 1, 0), contents.x(r, 0));
    }
}

TEST(Buffer, RevisitedClassDrawsFromStoredAndNewRows) {
    ReplayBuffer buf(4);
    Rng rng(3);
    buf.update(labeled({0, 0, 0, 0}), rng);
    buf.update(labeled({0, 0, 0, 0, 1, 1}, 100.0), rng);
    EXPECT_EQ(buf.count(0), 2u);
    EXPECT_EQ(buf.count(1), 2u);
}

TEST(Buffer, CapacityBelowClassCountThrows) {
    ReplayBuffer buf(1);
    Rng rng(4);
    EXPECT_THROW(buf.update(labeled({0, 1}), rng), ArgumentError);
}

TEST(Buffer, FromPartsRestoresState) {
    ReplayBuffer buf(6);
    Rng rng(5);
    buf.update(labeled({0, 1, 2, 0, 1, 2, 0}), rng);
    auto copy = ReplayBuffer::from_parts(buf.capacity(), buf.classes());
    EXPECT_EQ(copy.contents().x, buf.contents().x);
    EXPECT_EQ(copy.contents().labels, buf.contents().labels);
}

TEST(FullReplay, ConcatenatesEveryPastTask) {
    const std::vector<TaskDataset> past{labeled({0, 1}), labeled({2, 2, 3}, 10.0)};
    const auto all = full_replay_store(past);
    EXPECT_EQ(all.size(), 5u);
    EXPECT_EQ(all.labels, (std::vector<int>{0, 1, 2, 2, 3}));
    EXPECT_EQ(all.x(2, 0), 10.0);
    EXPECT_EQ(all.class_set, (std::vector<int>{0, 1, 2, 3}));
}
