#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "icla/datasets.hpp"
#include "icla/embedding.hpp"
#include "icla/errors.hpp"
#include "icla/idx.hpp"
#include "test_support.hpp"

using namespace icla;
using namespace icla::data;
using nn::Matrix;

namespace {

// Big-endian header bytes written out by hand.
std::vector<std::uint8_t> label_file(std::vector<std::uint8_t> labels) {
    const auto n = static_cast<std::uint32_t>(labels.size());
    std::vector<std::uint8_t> b{0, 0, 8, 1,
                                static_cast<std::uint8_t>(n >> 24), static_cast<std::uint8_t>(n >> 16),
                                static_cast<std::uint8_t>(n >> 8), static_cast<std::uint8_t>(n)};
    b.insert(b.end(), labels.begin(), labels.end());
    return b;
}

// Ten classes, `per_class` train rows and half as many test rows each. Pixel
// 0 carries a unique row id so partitions can be checked.
ImageDataset fake_images(std::size_t per_class, std::size_t dim = 16) {
    ImageDataset ds;
    const std::size_t n = 10 * per_class, m = 10 * (per_class / 2);
    ds.train_x = Matrix(n, dim);
    ds.test_x = Matrix(m, dim);
    for (std::size_t i = 0; i < n; ++i) {
        ds.train_y.push_back(static_cast<int>(i % 10));
        ds.train_x(i, 0) = static_cast<double>(i);
        for (std::size_t c = 1; c < dim; ++c) ds.train_x(i, c) = static_cast<double>((i * c) % 7) / 7.0;
    }
    for (std::size_t i = 0; i < m; ++i) {
        ds.test_y.push_back(static_cast<int>((i * 3) % 10));
        ds.test_x(i, 0) = 1e6 + static_cast<double>(i);
    }
    return ds;
}

}  // namespace

TEST(Idx, LabelFileParses) {
    const auto f = parse_idx(label_file({3, 1, 4, 1, 5, 9, 2, 6, 5, 3}));
    EXPECT_EQ(f.magic, 2049u);
    EXPECT_EQ(f.dims, (std::vector<std::uint32_t>{10}));
    EXPECT_EQ(idx_labels(f), (std::vector<int>{3, 1, 4, 1, 5, 9, 2, 6, 5, 3}));
}

TEST(Idx, ImageFileScalesToUnitInterval) {
    // 2 images of 1 x 2 pixels.
    const std::vector<std::uint8_t> bytes{0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0, 2,
                                          0, 255, 51, 102};
    const auto f = parse_idx(bytes);
    EXPECT_EQ(f.magic, 2051u);
    const Matrix x = idx_images(f);
    ASSERT_EQ(x.rows(), 2u);
    ASSERT_EQ(x.cols(), 2u);
    EXPECT_EQ(x(0, 0), 0.0);
    EXPECT_EQ(x(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(x(1, 0), 0.2);
    EXPECT_DOUBLE_EQ(x(1, 1), 0.4);
    EXPECT_EQ(encode_idx(f), bytes);
    EXPECT_THROW(idx_labels(f), ParseError);
}

TEST(Idx, ErrorsCarryByteOffsets) {
    auto good = label_file({1, 2, 3});
    try {
        parse_idx(std::span(good).first(6));
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_LE(e.offset(), 6u);
    }
    try {
        parse_idx(std::span(good).first(10));
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 10u);  // input ran out here
    }
    auto bad_magic = good;
    bad_magic[3] = 9;
    try {
        parse_idx(bad_magic);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 0u);
        EXPECT_NE(std::string(e.what()).find("byte offset 0"), std::string::npos);
    }
    auto trailing = good;
    trailing.push_back(0);
    EXPECT_THROW(parse_idx(trailing), ParseError);
    EXPECT_THROW(parse_idx(std::vector<std::uint8_t>{}), ParseError);
}

TEST(Idx, LoadFromDiskAndMissingFile) {
    icla::testing::TempDir dir("idx");
    const auto bytes = label_file({7, 7, 0});
    {
        std::ofstream out(dir.path() / "labels", std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    EXPECT_EQ(idx_labels(load_idx(dir.path() / "labels")), (std::vector<int>{7, 7, 0}));
    EXPECT_THROW(load_idx(dir.path() / "absent"), DataError);
    EXPECT_THROW(load_image_dataset(dir.path()), DataError);
}

TEST(Protocols, ClassGroups) {
    const auto nine = protocol_classes(Protocol::mnist9T);
    ASSERT_EQ(nine.size(), 9u);
    std::size_t cumulative = 0;
    for (std::size_t t = 0; t < 9; ++t) {
        cumulative += nine[t].size();
        EXPECT_EQ(cumulative, t + 2);
    }
    EXPECT_EQ(protocol_classes(Protocol::mnist2T),
              (std::vector<std::vector<int>>{{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}}));
    const auto five = protocol_classes(Protocol::mnist5T);
    ASSERT_EQ(five.size(), 5u);
    EXPECT_EQ(five[3], (std::vector<int>{6, 7}));
    const auto fashion = protocol_classes(Protocol::fmnist4T);
    ASSERT_EQ(fashion.size(), 4u);
    for (const auto& g : fashion) EXPECT_EQ(g.size(), 2u);
    for (auto p : {Protocol::mnist9T, Protocol::fmnist4T, Protocol::mnist5T, Protocol::mnist2T}) {
        EXPECT_EQ(parse_protocol(to_string(p)), p);
    }
    EXPECT_THROW(parse_protocol("mnist3T"), ArgumentError);
}

TEST(Protocols, IncrementalTasksPartitionTheData) {
    const auto ds = fake_images(12);
    for (auto p : {Protocol::mnist9T, Protocol::mnist5T, Protocol::mnist2T}) {
        const auto stream = make_incremental_stream(ds, p);
        std::multiset<double> train_ids, test_ids;
        for (const auto& task : stream.tasks) {
            for (std::size_t r = 0; r < task.train.size(); ++r) {
                train_ids.insert(task.train.x(r, 0));
                EXPECT_TRUE(std::binary_search(task.train.class_set.begin(),
                                               task.train.class_set.end(), task.train.labels[r]));
            }
            for (std::size_t r = 0; r < task.test.size(); ++r) test_ids.insert(task.test.x(r, 0));
        }
        EXPECT_EQ(train_ids.size(), ds.train_y.size());
        EXPECT_EQ(std::set<double>(train_ids.begin(), train_ids.end()).size(), ds.train_y.size());
        EXPECT_EQ(test_ids.size(), ds.test_y.size());
        // Test rows are the standard split, untouched.
        EXPECT_EQ(*test_ids.begin(), 1e6);
    }
}

TEST(Protocols, SubsampleIsSeededAndPerClass) {
    const auto ds = fake_images(40);
    const Subsample sub{0.25, 0.5, 9};
    const auto a = make_incremental_stream(ds, Protocol::mnist5T, sub);
    const auto b = make_incremental_stream(ds, Protocol::mnist5T, sub);
    for (std::size_t t = 0; t < 5; ++t) {
        EXPECT_EQ(a.tasks[t].train.x, b.tasks[t].train.x);
        for (int c : a.tasks[t].train.class_set) {
            EXPECT_EQ(rows_of_class(a.tasks[t].train.labels, c).size(), 10u);
        }
    }
}

TEST(Permuted, PermutationsAreSeededBijections) {
    EXPECT_EQ(task_permutation(784, 0, 5), [] {
        std::vector<std::size_t> id(784);
        std::iota(id.begin(), id.end(), std::size_t{0});
        return id;
    }());
    for (std::size_t t = 1; t < 5; ++t) {
        auto p = task_permutation(784, t, 5);
        EXPECT_EQ(p, task_permutation(784, t, 5));
        EXPECT_NE(p, task_permutation(784, t, 6));
        std::sort(p.begin(), p.end());
        for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i], i);
    }
    EXPECT_NE(task_permutation(784, 1, 5), task_permutation(784, 2, 5));
}

TEST(Permuted, PermuteColumnsGathersSourcePixels) {
    const Matrix x{{10, 20, 30}};
    EXPECT_EQ(permute_columns(x, {2, 0, 1}), (Matrix{{30, 10, 20}}));
    EXPECT_EQ(permute_columns(x, {0, 1, 2}), x);
    EXPECT_THROW(permute_columns(x, {0, 1}), DimensionError);
}

TEST(Permuted, TasksGrowByTwoDigitsAndReusePermutedImages) {
    const auto ds = fake_images(6);
    const auto s = make_permuted_stream(ds, 5, 3);
    ASSERT_EQ(s.size(), 5u);
    EXPECT_EQ(s.tasks[2].train.class_set, (std::vector<int>{0, 1, 2, 3, 4, 5}));
    EXPECT_EQ(s.old_classes(2), (std::vector<int>{0, 1, 2, 3}));
    EXPECT_EQ(s.new_classes(2), (std::vector<int>{4, 5}));
    // Task 1 is unpermuted; task 2 holds the same digit 0/1 images, permuted.
    const auto perm = task_permutation(16, 1, 3);
    const auto first = rows_of_class(s.tasks[0].train.labels, 0);
    const auto second = rows_of_class(s.tasks[1].train.labels, 0);
    ASSERT_EQ(first.size(), second.size());
    const Matrix original = nn::gather_rows(s.tasks[0].train.x, first);
    EXPECT_EQ(nn::gather_rows(s.tasks[1].train.x, second), permute_columns(original, perm));
    EXPECT_THROW(make_permuted_stream(ds, 6, 3), ArgumentError);
}

TEST(Blobs, SameSeedSameStream) {
    const auto a = make_blob_stream(blobs_two_task(), 4);
    const auto b = make_blob_stream(blobs_two_task(), 4);
    const auto c = make_blob_stream(blobs_two_task(), 5);
    EXPECT_EQ(a.tasks[1].train.x, b.tasks[1].train.x);
    EXPECT_NE(a.tasks[1].train.x, c.tasks[1].train.x);
    EXPECT_EQ(a.tasks[0].train.size(), 1000u);
    EXPECT_EQ(a.tasks[0].test.size(), 400u);
}

TEST(Blobs, TwoClassTaskIsLinearlySeparable) {
    // Oracle classifier: sign of the first coordinate.
    const auto s = make_blob_stream(blobs_two_task(), 1);
    const auto& test = s.tasks[0].test;
    std::size_t correct = 0;
    for (std::size_t r = 0; r < test.size(); ++r) {
        const int predicted = test.x(r, 0) > 0.0 ? 0 : 1;
        correct += predicted == test.labels[r];
    }
    EXPECT_GE(static_cast<double>(correct) / static_cast<double>(test.size()), 0.99);
}

TEST(Blobs, DriftTaskRevisitsAnOldClass) {
    const auto s = make_blob_stream(blobs_drift(), 1);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s.old_classes(1), (std::vector<int>{0}));
    EXPECT_EQ(s.new_classes(1), (std::vector<int>{2}));
    // Class 0 moved from (3, 0) towards (4, 0).
    double m1 = 0.0, m2 = 0.0;
    const auto r1 = rows_of_class(s.tasks[0].train.labels, 0);
    const auto r2 = rows_of_class(s.tasks[1].train.labels, 0);
    for (auto r : r1) m1 += s.tasks[0].train.x(r, 0);
    for (auto r : r2) m2 += s.tasks[1].train.x(r, 0);
    EXPECT_NEAR(m1 / static_cast<double>(r1.size()), 3.0, 0.15);
    EXPECT_NEAR(m2 / static_cast<double>(r2.size()), 4.0, 0.15);
}

TEST(Blobs, ThreeTaskLayout) {
    const auto s = make_blob_stream(blobs_three_task(), 2);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.total_classes(), 6u);
    for (std::size_t t = 0; t < 3; ++t) EXPECT_TRUE(s.old_classes(t).empty());
}

TEST(Streams, ValidateRejectsBrokenStreams) {
    auto s = make_blob_stream(blobs_two_task(), 1);
    auto bad = s;
    bad.tasks[1].train.labels[0] = 9;
    EXPECT_THROW(bad.validate(), DataError);
    bad = s;
    bad.tasks.clear();
    EXPECT_THROW(bad.validate(), DataError);
    // New classes must be numbered in order of first appearance.
    bad = s;
    for (auto* d : {&bad.tasks[1].train, &bad.tasks[1].test}) {
        for (int& l : d->labels) l = l == 2 ? 5 : l;
        d->class_set = sorted_classes(d->labels);
    }
    EXPECT_THROW(bad.validate(), DataError);
}

// Real MNIST files, when ICLA_DATA_DIR points at them.
TEST(Mnist, StandardSplitSizes) {
    const auto dir = locate_dataset("mnist");
    if (!dir) GTEST_SKIP() << "MNIST files not found (set ICLA_DATA_DIR)";
    const auto ds = load_image_dataset(*dir);
    EXPECT_EQ(ds.train_x.rows(), 60000u);
    EXPECT_EQ(ds.train_x.cols(), 784u);
    EXPECT_EQ(ds.test_x.rows(), 10000u);
    EXPECT_EQ(ds.test_y.size(), 10000u);
    const auto [lo, hi] = std::minmax_element(ds.train_x.values().begin(), ds.train_x.values().end());
    EXPECT_EQ(*lo, 0.0);
    EXPECT_EQ(*hi, 1.0);
    const auto nine = make_incremental_stream(ds, Protocol::mnist9T);
    std::size_t total = 0;
    for (const auto& t : nine.tasks) total += t.train.size();
    EXPECT_EQ(total, 60000u);
}
