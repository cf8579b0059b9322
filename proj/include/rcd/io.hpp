#pragma once

// CSV snapshots (header "x,value", 17 significant digits), flat key=value
// configuration files, and JSON views of analysis records.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rcd/analysis.hpp"
#include "rcd/errors.hpp"
#include "rcd/grid.hpp"
#include "rcd/solver.hpp"

namespace rcd::io {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(const std::filesystem::path& path, std::span<const double> x,
                      std::span<const double> values) {
    if (x.size() != values.size()) {
        throw DomainError("write_csv: column lengths differ");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out << "x,value\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << format_double(x[i]) << ',' << format_double(values[i]) << '\n';
    }
    if (!out) {
        throw Error("write failed: " + path.string());
    }
}

inline void write_csv(const std::filesystem::path& path, const GridFunction& g) {
    write_csv(path, g.nodes(), g.values());
}

struct Columns {
    std::vector<double> x;
    std::vector<double> value;
};

inline Columns read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != "x,value") {
        throw Error(path.string() + ": expected header x,value");
    }
    Columns c;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw Error(path.string() + ":" + std::to_string(lineno) + ": missing comma");
        }
        auto parse = [&](std::string_view text) {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc() || ptr != text.data() + text.size()) {
                throw Error(path.string() + ":" + std::to_string(lineno) + ": not a number");
            }
            return v;
        };
        const std::string_view sv(line);
        c.x.push_back(parse(sv.substr(0, comma)));
        c.value.push_back(parse(sv.substr(comma + 1)));
    }
    return c;
}

/// Flat key = value text; '#' starts a comment.
class Config {
public:
    static Config parse(std::istream& in, const std::string& origin = "config") {
        Config c;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos) {
                line.erase(hash);
            }
            const auto trimmed = trim(line);
            if (trimmed.empty()) {
                continue;
            }
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos) {
                throw DomainError(origin + ":" + std::to_string(lineno) + ": expected key = value");
            }
            c.set(trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)));
        }
        return c;
    }

    static Config load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) {
            throw Error("cannot open config " + path.string());
        }
        return parse(in, path.string());
    }

    void set(const std::string& key, const std::string& value) {
        if (key.empty()) {
            throw DomainError("config: empty key");
        }
        values_[key] = value;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::optional<std::string> get(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) {
            return std::nullopt;
        }
        used_[key] = true;
        return it->second;
    }

    std::string str(const std::string& key, const std::string& fallback) const {
        return get(key).value_or(fallback);
    }

    double num(const std::string& key, double fallback) const {
        const auto v = get(key);
        return v ? to_number(key, *v) : fallback;
    }

    std::optional<double> num(const std::string& key) const {
        const auto v = get(key);
        if (!v) {
            return std::nullopt;
        }
        return to_number(key, *v);
    }

    std::vector<double> list(const std::string& key) const {
        std::vector<double> out;
        const auto v = get(key);
        if (!v) {
            return out;
        }
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) {
                out.push_back(to_number(key, item));
            }
        }
        return out;
    }

    /// Keys present but never read; a typo guard.
    std::vector<std::string> unused() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : values_) {
            if (!used_.count(k)) {
                out.push_back(k);
            }
        }
        return out;
    }

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) {
            return {};
        }
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    static double to_number(const std::string& key, const std::string& text) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != text.size() || pos == 0) {
            throw DomainError("config: key '" + key + "' is not a number: " + text);
        }
        return v;
    }

    std::map<std::string, std::string> values_;
    mutable std::map<std::string, bool> used_;
};

using nlohmann::json;

inline json optional_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

inline json to_json(const StopReason& r) {
    struct V {
        json operator()(ReachedFinalTime) const { return {{"kind", "ReachedFinalTime"}}; }
        json operator()(const AmplitudeCap& a) const {
            return {{"kind", "AmplitudeCap"}, {"time", a.time}};
        }
        json operator()(const InterfaceHitBoundary& h) const {
            return {{"kind", "InterfaceHitBoundary"}, {"side", to_string(h.side)}, {"time", h.time}};
        }
    };
    return std::visit(V{}, r);
}

inline json to_json(const InterfaceTrace& t) {
    json left = json::array();
    json right = json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
        left.push_back(optional_json(t.left_edge[i]));
        right.push_back(optional_json(t.right_edge[i]));
    }
    return {{"times", t.times},   {"left_edge", left},  {"right_edge", right},
            {"max_value", t.max_value}, {"argmax", t.argmax}};
}

inline json to_json(const FitReport& f) {
    return {{"model", f.model},
            {"estimate", f.estimate},
            {"width", f.width},
            {"residual_norm", f.residual_norm},
            {"window", {f.window.lo, f.window.hi}},
            {"points", f.points},
            {"blowup_time", optional_json(f.blowup_time)},
            {"coefficients", f.coefficients}};
}

inline json to_json(const StepStatistics& s) {
    return {{"count", s.count},
            {"dt_min", s.count ? json(s.dt_min) : json(nullptr)},
            {"dt_max", s.dt_max},
            {"clamped_mass", s.clamped_mass}};
}

inline void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out << doc.dump(2) << '\n';
}

} // namespace rcd::io
