#pragma once

#include "rfs/label.hpp"
#include "rfs/metrics.hpp"
#include "rfs/models.hpp"
#include "rfs/scenario.hpp"

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace rfs {

/// All text formats share a first line "V horizon", then one
/// space-separated record per line, numbers printed with 9 significant
/// digits so re-runs are byte-identical.
///
/// truth:        step target px vx py vy
/// measurements: step sensor px py        (sensor ids 0-based)
/// estimates:    step label px vx py vy   (label as Label::str())

void write_truth(const std::string& path, const SimulationResult& result, int sensors,
                 int horizon);
void write_measurements(const std::string& path, const SimulationResult& result, int sensors,
                        int horizon);

struct EstimateRecord {
    int step = 0;
    Label label;
    Eigen::Vector4d state;
};

void write_estimates(const std::string& path, const std::vector<EstimateRecord>& records,
                     int sensors, int horizon);

struct MeasurementData {
    int sensors = 0;
    int horizon = 0;
    std::vector<MeasurementFrame> frames;  // one per step 1..horizon
};

MeasurementData read_measurements(const std::string& path);

struct TrackData {
    int sensors = 0;
    int horizon = 0;
    std::vector<TrackHistory> tracks;
};

TrackData read_truth(const std::string& path);
TrackData read_estimates(const std::string& path);

/// Inverse of Label::str().
Label parse_label(const std::string& text);

/// One line series for the SVG plot.
struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Dependency-free SVG line chart.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series);

/// Formats a double with 9 significant digits.
std::string format_g9(double v);

}  // namespace rfs
