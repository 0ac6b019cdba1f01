#include "icla/task_stream.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "icla/errors.hpp"

namespace icla {

std::vector<int> sorted_classes(const std::vector<int>& labels) {
    const std::set<int> s(labels.begin(), labels.end());
    return {s.begin(), s.end()};
}

std::vector<int> TaskStream::seen_classes(std::size_t t) const {
    std::set<int> s;
    for (std::size_t i = 0; i <= t && i < tasks.size(); ++i) {
        s.insert(tasks[i].train.class_set.begin(), tasks[i].train.class_set.end());
    }
    return {s.begin(), s.end()};
}

std::vector<int> TaskStream::old_classes(std::size_t t) const {
    if (t == 0) return {};
    const auto before = seen_classes(t - 1);
    std::vector<int> out;
    for (int c : tasks.at(t).train.class_set) {
        if (std::binary_search(before.begin(), before.end(), c)) out.push_back(c);
    }
    return out;
}

std::vector<int> TaskStream::new_classes(std::size_t t) const {
    const auto old = old_classes(t);
    std::vector<int> out;
    for (int c : tasks.at(t).train.class_set) {
        if (!std::binary_search(old.begin(), old.end(), c)) out.push_back(c);
    }
    return out;
}

std::size_t TaskStream::total_classes() const {
    return tasks.empty() ? 0 : seen_classes(tasks.size() - 1).size();
}

void TaskStream::validate() const {
    if (tasks.empty()) throw DataError("task stream '" + name + "' is empty");
    int next_class = 0;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        for (const TaskDataset* d : {&tasks[t].train, &tasks[t].test}) {
            if (d->x.rows() != d->labels.size()) {
                throw DataError("task " + std::to_string(t + 1) + ": label count mismatch");
            }
            if (d->x.cols() != input_dim) {
                throw DataError("task " + std::to_string(t + 1) + ": input width " +
                                std::to_string(d->x.cols()) + " != " + std::to_string(input_dim));
            }
            for (int y : d->labels) {
                if (!std::binary_search(d->class_set.begin(), d->class_set.end(), y)) {
                    throw DataError("task " + std::to_string(t + 1) + ": label " +
                                    std::to_string(y) + " outside the task class set");
                }
            }
        }
        if (tasks[t].train.size() == 0) {
            throw DataError("task " + std::to_string(t + 1) + " has no training data");
        }
        for (int c : new_classes(t)) {
            if (c != next_class) {
                throw DataError("task " + std::to_string(t + 1) + ": new class " +
                                std::to_string(c) + " breaks first-appearance numbering (expected " +
                                std::to_string(next_class) + ")");
            }
            ++next_class;
        }
    }
}

TaskDataset concat(const TaskDataset& a, const TaskDataset& b) {
    TaskDataset out;
    out.x = nn::vstack(a.x, b.x);
    out.labels = a.labels;
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    out.class_set = sorted_classes(out.labels);
    out.name = a.name.empty() ? b.name : (b.name.empty() ? a.name : a.name + "+" + b.name);
    return out;
}

TaskDataset subset(const TaskDataset& d, const std::vector<std::size_t>& rows) {
    TaskDataset out;
    out.x = nn::gather_rows(d.x, rows);
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) out.labels.push_back(d.labels[r]);
    out.class_set = d.class_set;
    out.name = d.name;
    return out;
}

}  // namespace icla
