#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "icla/trainer.hpp"

namespace icla::harness {

// Bumped whenever a CSV header changes.
inline constexpr int kCurveSchemaVersion = 1;

// task,epoch,seen_accuracy,acc_task1..acc_taskN. Values use %.17g so they
// read back exactly; a task not yet seen is an empty cell.
std::string curve_header(std::size_t num_tasks);
std::string curve_line(const train::CurveRow& row);
void write_curve_csv(std::ostream& out, const train::LearningCurve& curve);
train::LearningCurve read_curve_csv(const std::filesystem::path& path);

// Mean and sample standard deviation (n - 1; 0 for a single seed) of every
// (task, epoch) cell across seeds. Cells empty in any seed stay empty.
struct AggregateRow {
    std::size_t task = 0;
    std::size_t epoch = 0;
    std::size_t seeds = 0;
    double seen_mean = 0.0;
    double seen_std = 0.0;
    std::vector<double> task_mean;
    std::vector<double> task_std;
};

std::vector<AggregateRow> aggregate(const std::vector<train::LearningCurve>& curves);
std::string aggregate_header(std::size_t num_tasks);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows,
                         std::size_t num_tasks);

// Wall-clock seconds since the start of the run, kept apart from the curve
// so the curve stays reproducible.
struct TimingRow {
    std::size_t task = 0;
    std::size_t epoch = 0;
    double seconds = 0.0;
};

std::string format_double(double v);

}  // namespace icla::harness
