#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "icla/matrix.hpp"

namespace icla {

// One task's inputs with integer labels (global class indices). One-hot
// targets are built at the current head width when a batch is formed.
struct TaskDataset {
    nn::Matrix x;
    std::vector<int> labels;
    std::vector<int> class_set;  // sorted
    std::string name;

    std::size_t size() const noexcept { return labels.size(); }
};

struct Task {
    TaskDataset train;
    TaskDataset test;
};

// Ordered tasks. Classes are numbered in order of first appearance, so the
// classes new at task t are exactly [k_seen, k_seen + k_new).
struct TaskStream {
    std::string name;
    std::size_t input_dim = 0;
    std::vector<Task> tasks;

    std::size_t size() const noexcept { return tasks.size(); }
    // Classes of task t already seen in tasks < t.
    std::vector<int> old_classes(std::size_t t) const;
    // Classes of task t not seen before.
    std::vector<int> new_classes(std::size_t t) const;
    // Every class seen in tasks <= t.
    std::vector<int> seen_classes(std::size_t t) const;
    std::size_t total_classes() const;

    // Throws DataError if an invariant is broken.
    void validate() const;
};

TaskDataset concat(const TaskDataset& a, const TaskDataset& b);
TaskDataset subset(const TaskDataset& d, const std::vector<std::size_t>& rows);
std::vector<int> sorted_classes(const std::vector<int>& labels);

}  // namespace icla
