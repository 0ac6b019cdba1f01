#include "icla/curve_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "icla/errors.hpp"

namespace icla::harness {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& s, std::size_t line_no) {
    if (s.empty()) return std::nan("");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) {
        throw DataError("curve csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    return v;
}

std::size_t parse_index(const std::string& s, std::size_t line_no) {
    char* end = nullptr;
    const auto v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw DataError("curve csv line " + std::to_string(line_no) + ": bad index '" + s + "'");
    }
    return v;
}

std::string cell(double v) { return std::isnan(v) ? std::string() : format_double(v); }

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    sd = 0.0;
    if (v.size() < 2) return;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string curve_header(std::size_t num_tasks) {
    std::string h = "task,epoch,seen_accuracy";
    for (std::size_t t = 1; t <= num_tasks; ++t) h += ",acc_task" + std::to_string(t);
    return h;
}

std::string curve_line(const train::CurveRow& row) {
    std::string s = std::to_string(row.task) + "," + std::to_string(row.epoch) + "," +
                    format_double(row.seen_accuracy);
    for (double a : row.task_accuracy) s += "," + cell(a);
    return s;
}

void write_curve_csv(std::ostream& out, const train::LearningCurve& curve) {
    out << curve_header(curve.num_tasks) << '\n';
    for (const auto& row : curve.rows) out << curve_line(row) << '\n';
}

train::LearningCurve read_curve_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty curve file");
    const auto header = split(line);
    if (header.size() < 3) throw DataError(path.string() + ": bad curve header");
    train::LearningCurve curve;
    curve.num_tasks = header.size() - 3;
    if (line != curve_header(curve.num_tasks)) {
        throw DataError(path.string() + ": unexpected curve header '" + line + "'");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw DataError(path.string() + ": line " + std::to_string(line_no) +
                            " has the wrong number of cells");
        }
        train::CurveRow row;
        row.task = parse_index(cells[0], line_no);
        row.epoch = parse_index(cells[1], line_no);
        row.seen_accuracy = parse_cell(cells[2], line_no);
        for (std::size_t i = 3; i < cells.size(); ++i) {
            row.task_accuracy.push_back(parse_cell(cells[i], line_no));
        }
        curve.rows.push_back(std::move(row));
    }
    return curve;
}

std::vector<AggregateRow> aggregate(const std::vector<train::LearningCurve>& curves) {
    if (curves.empty()) return {};
    const auto& first = curves.front();
    for (const auto& c : curves) {
        if (c.num_tasks != first.num_tasks || c.rows.size() != first.rows.size()) {
            throw ArgumentError("aggregate: curves have different shapes");
        }
        for (std::size_t r = 0; r < c.rows.size(); ++r) {
            if (c.rows[r].task != first.rows[r].task || c.rows[r].epoch != first.rows[r].epoch) {
                throw ArgumentError("aggregate: curves disagree on (task, epoch) at row " +
                                    std::to_string(r));
            }
        }
    }
    std::vector<AggregateRow> out;
    for (std::size_t r = 0; r < first.rows.size(); ++r) {
        AggregateRow row;
        row.task = first.rows[r].task;
        row.epoch = first.rows[r].epoch;
        row.seeds = curves.size();
        std::vector<double> v;
        for (const auto& c : curves) v.push_back(c.rows[r].seen_accuracy);
        mean_std(v, row.seen_mean, row.seen_std);
        for (std::size_t t = 0; t < first.num_tasks; ++t) {
            v.clear();
            bool missing = false;
            for (const auto& c : curves) {
                const double a = c.rows[r].task_accuracy[t];
                missing = missing || std::isnan(a);
                v.push_back(a);
            }
            double m = std::nan(""), s = std::nan("");
            if (!missing) mean_std(v, m, s);
            row.task_mean.push_back(m);
            row.task_std.push_back(s);
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::string aggregate_header(std::size_t num_tasks) {
    std::string h = "task,epoch,seeds,seen_accuracy_mean,seen_accuracy_std";
    for (std::size_t t = 1; t <= num_tasks; ++t) {
        h += ",acc_task" + std::to_string(t) + "_mean,acc_task" + std::to_string(t) + "_std";
    }
    return h;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows,
                         std::size_t num_tasks) {
    out << aggregate_header(num_tasks) << '\n';
    for (const auto& r : rows) {
        out << r.task << ',' << r.epoch << ',' << r.seeds << ',' << format_double(r.seen_mean) << ','
            << format_double(r.seen_std);
        for (std::size_t t = 0; t < num_tasks; ++t) {
            out << ',' << cell(r.task_mean[t]) << ',' << cell(r.task_std[t]);
        }
        out << '\n';
    }
}

}  // namespace icla::harness
