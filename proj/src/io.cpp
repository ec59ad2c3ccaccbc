#include "rfs/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace rfs {

std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

std::pair<int, int> read_header(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ": missing header line");
    std::istringstream hs(line);
    int sensors = 0, horizon = 0;
    if (!(hs >> sensors >> horizon) || sensors < 0 || horizon < 0)
        throw std::runtime_error(path + ": malformed header, expected \"V horizon\"");
    return {sensors, horizon};
}

}  // namespace

void write_truth(const std::string& path, const SimulationResult& result, int sensors,
                 int horizon) {
    auto out = open_out(path);
    out << sensors << ' ' << horizon << '\n';
    for (int step = 1; step <= horizon; ++step) {
        for (std::size_t i = 0; i < result.truth.size(); ++i) {
            const auto& track = result.truth[i];
            if (!track.alive(step)) continue;
            const auto& x = track.state(step);
            out << step << ' ' << i << ' ' << format_g9(x[0]) << ' ' << format_g9(x[1]) << ' '
                << format_g9(x[2]) << ' ' << format_g9(x[3]) << '\n';
        }
    }
}

void write_measurements(const std::string& path, const SimulationResult& result, int sensors,
                        int horizon) {
    auto out = open_out(path);
    out << sensors << ' ' << horizon << '\n';
    for (const auto& frame : result.frames) {
        for (int s = 0; s < frame.sensors(); ++s) {
            for (const auto& z : frame.per_sensor[static_cast<std::size_t>(s)]) {
                out << frame.time << ' ' << s << ' ' << format_g9(z[0]) << ' ' << format_g9(z[1])
                    << '\n';
            }
        }
    }
}

void write_estimates(const std::string& path, const std::vector<EstimateRecord>& records,
                     int sensors, int horizon) {
    auto out = open_out(path);
    out << sensors << ' ' << horizon << '\n';
    for (const auto& rec : records) {
        out << rec.step << ' ' << rec.label.str() << ' ' << format_g9(rec.state[0]) << ' '
            << format_g9(rec.state[1]) << ' ' << format_g9(rec.state[2]) << ' '
            << format_g9(rec.state[3]) << '\n';
    }
}

MeasurementData read_measurements(const std::string& path) {
    auto in = open_in(path);
    MeasurementData data;
    std::tie(data.sensors, data.horizon) = read_header(in, path);
    data.frames.resize(static_cast<std::size_t>(data.horizon));
    for (int step = 1; step <= data.horizon; ++step) {
        auto& frame = data.frames[static_cast<std::size_t>(step - 1)];
        frame.time = step;
        frame.per_sensor.resize(static_cast<std::size_t>(data.sensors));
    }
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        int step = 0, sensor = 0;
        double px = 0.0, py = 0.0;
        if (!(ls >> step >> sensor >> px >> py))
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": malformed measurement line");
        if (step < 1 || step > data.horizon)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": step outside the horizon");
        if (sensor < 0 || sensor >= data.sensors)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": sensor index out of range");
        data.frames[static_cast<std::size_t>(step - 1)]
            .per_sensor[static_cast<std::size_t>(sensor)]
            .emplace_back(px, py);
    }
    return data;
}

namespace {

TrackData read_points(const std::string& path, bool labeled) {
    auto in = open_in(path);
    TrackData data;
    std::tie(data.sensors, data.horizon) = read_header(in, path);
    std::map<Label, std::size_t> index;
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        int step = 0;
        Label label;
        double px = 0.0, vx = 0.0, py = 0.0, vy = 0.0;
        std::string label_text;
        if (!(ls >> step >> label_text >> px >> vx >> py >> vy))
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": malformed track line");
        if (labeled) {
            label = parse_label(label_text);
        } else {
            label = Label{0, std::stoi(label_text)};
        }
        auto [it, inserted] = index.try_emplace(label, data.tracks.size());
        if (inserted) {
            TrackHistory h;
            h.label = label;
            data.tracks.push_back(std::move(h));
        }
        data.tracks[it->second].points[step] = Eigen::Vector2d(px, py);
    }
    return data;
}

}  // namespace

TrackData read_truth(const std::string& path) { return read_points(path, false); }

TrackData read_estimates(const std::string& path) { return read_points(path, true); }

Label parse_label(const std::string& text) {
    auto fail = [&]() -> Label {
        throw std::runtime_error("malformed label: " + text);
    };
    std::size_t hash = text.find('#');
    std::size_t colon = text.find(':');
    try {
        if (hash != std::string::npos) {
            int time = std::stoi(text.substr(0, hash));
            int idx = std::stoi(text.substr(hash + 1));
            return Label{time, idx};
        }
        if (colon != std::string::npos) {
            int time = std::stoi(text.substr(0, colon));
            MeasurementTuple tuple;
            std::string rest = text.substr(colon + 1);
            std::istringstream rs(rest);
            std::string part;
            while (std::getline(rs, part, '-')) tuple.indices.push_back(std::stoi(part));
            if (tuple.indices.empty()) return fail();
            return Label{time, std::move(tuple)};
        }
    } catch (const std::logic_error&) {
        return fail();
    }
    return fail();
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series) {
    const double width = 860.0, height = 520.0;
    const double left = 70.0, right = 820.0, top = 50.0, bottom = 460.0;

    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
    bool any = false;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!any) {
                x_min = x_max = s.x[i];
                y_min = 0.0;
                y_max = s.y[i];
                any = true;
            }
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_max = std::max(y_max, s.y[i]);
        }
    }
    if (x_max <= x_min) x_max = x_min + 1.0;
    if (y_max <= y_min) y_max = y_min + 1.0;
    y_max *= 1.05;

    auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * (right - left); };
    auto py = [&](double y) { return bottom - (y - y_min) / (y_max - y_min) * (bottom - top); };

    static const char* palette[] = {"#1b6ca8", "#c94a38", "#3a8f4d", "#8456a8", "#b58a2a",
                                    "#4a8a98"};

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << (width / 2) << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">"
        << title << "</text>\n";

    out << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\""
        << bottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom
        << "\" stroke=\"black\"/>\n";

    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        double fx = x_min + (x_max - x_min) * i / ticks;
        double fy = y_min + (y_max - y_min) * i / ticks;
        out << "<line x1=\"" << px(fx) << "\" y1=\"" << bottom << "\" x2=\"" << px(fx)
            << "\" y2=\"" << (bottom + 5) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(fx) << "\" y=\"" << (bottom + 20)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << format_g9(fx) << "</text>\n";
        out << "<line x1=\"" << (left - 5) << "\" y1=\"" << py(fy) << "\" x2=\"" << left
            << "\" y2=\"" << py(fy) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << (left - 8) << "\" y=\"" << (py(fy) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
            << format_g9(fy) << "</text>\n";
    }
    out << "<text x=\"" << ((left + right) / 2) << "\" y=\"" << (bottom + 45)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << x_label
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << ((top + bottom) / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 18 "
        << ((top + bottom) / 2) << ")\">" << y_label << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = palette[k % (sizeof(palette) / sizeof(palette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) out << ' ';
            out << format_g9(px(s.x[i])) << ',' << format_g9(py(s.y[i]));
        }
        out << "\"/>\n";
        double ly = top + 20.0 * static_cast<double>(k);
        out << "<line x1=\"" << (right - 150) << "\" y1=\"" << ly << "\" x2=\"" << (right - 120)
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << (right - 112) << "\" y=\"" << (ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"13\">" << s.name << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace rfs
