#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace rfs {

/// Multi-sensor measurement index: one entry per sensor, 0 meaning
/// miss-detection and j >= 1 the j-th measurement of that sensor.
/// Ordered lexicographically.
struct MeasurementTuple {
    std::vector<int> indices;

    MeasurementTuple() = default;
    explicit MeasurementTuple(std::vector<int> idx) : indices(std::move(idx)) {}

    int sensors() const { return static_cast<int>(indices.size()); }
    bool all_miss() const {
        for (int j : indices)
            if (j != 0) return false;
        return true;
    }
    int detection_count() const {
        int n = 0;
        for (int j : indices)
            if (j != 0) ++n;
        return n;
    }

    auto operator<=>(const MeasurementTuple&) const = default;
};

/// Track label: birth time plus origin. Adaptive-birth tracks carry the
/// full measurement tuple that spawned them; simulated/static tracks use
/// an integer index. The ordering (birth time, then origin with integer
/// origins before tuple origins) is a strict total order.
struct Label {
    int birth_time = 0;
    std::variant<int, MeasurementTuple> origin;

    Label() : origin(0) {}
    Label(int time, int index) : birth_time(time), origin(index) {}
    Label(int time, MeasurementTuple tuple) : birth_time(time), origin(std::move(tuple)) {}

    auto operator<=>(const Label&) const = default;

    /// Compact text form used in estimate files: "k#i" for static origins,
    /// "k:j1-j2-...-jV" for measurement-tuple origins.
    std::string str() const {
        std::string s = std::to_string(birth_time);
        if (const int* idx = std::get_if<int>(&origin)) {
            s += '#';
            s += std::to_string(*idx);
        } else {
            const auto& tup = std::get<MeasurementTuple>(origin);
            s += ':';
            for (std::size_t i = 0; i < tup.indices.size(); ++i) {
                if (i) s += '-';
                s += std::to_string(tup.indices[i]);
            }
        }
        return s;
    }
};

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

struct TupleHash {
    std::size_t operator()(const MeasurementTuple& t) const {
        std::size_t h = 0x2545f4914f6cdd1dULL;
        for (int j : t.indices) h = hash_combine(h, std::hash<int>{}(j));
        return h;
    }
};

struct LabelHash {
    std::size_t operator()(const Label& l) const {
        std::size_t h = std::hash<int>{}(l.birth_time);
        if (const int* idx = std::get_if<int>(&l.origin))
            return hash_combine(h, std::hash<int>{}(*idx));
        return hash_combine(hash_combine(h, 1), TupleHash{}(std::get<MeasurementTuple>(l.origin)));
    }
};

}  // namespace rfs
