#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rcd/rcd.hpp"

namespace fs = std::filesystem;
using rcd::io::json;

namespace {

std::string domain_string(const rcd::Interval& d) {
    auto end = [](double v) {
        if (std::isinf(v)) {
            return std::string(v < 0 ? "-inf" : "inf");
        }
        return rcd::io::format_double(v);
    };
    return "(" + end(d.lo) + ", " + end(d.hi) + ")";
}

json transform_json(double m, double K, double delta_K) {
    const auto params = rcd::ModelParams::constant(m, K);
    const auto regime = rcd::classify_regime(params, delta_K);
    const auto map = rcd::build_transform(params, delta_K);
    const auto e = rcd::eigenvalues(params);
    json doc;
    doc["m"] = m;
    doc["K"] = K;
    doc["regime"] = std::string(rcd::to_string(regime));
    doc["lambda1"] = e.lambda1;
    doc["lambda2"] = e.lambda2;
    if (regime == rcd::Regime::Super) {
        doc["lambda"] = 0.0;
        doc["lambda_imag"] = e.gap_imag();
    } else {
        doc["lambda"] = e.gap;
    }
    if (regime == rcd::Regime::Sub) {
        doc["gamma_minus"] = rcd::gamma_of_K(m, K, rcd::Branch::Minus);
        doc["gamma_plus"] = rcd::gamma_of_K(m, K, rcd::Branch::Plus);
    } else {
        doc["gamma_minus"] = nullptr;
        doc["gamma_plus"] = nullptr;
    }
    doc["time_scale"] = map.time_scale;
    doc["density"] = map.density_description;
    doc["x_domain"] = domain_string(map.x_domain);
    doc["domain"] = domain_string(map.x_domain);
    doc["y_domain"] = domain_string(map.y_domain);
    doc["orientation_reversed"] = map.reversed;
    return doc;
}

std::string file_name(const std::string& prefix, std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%03zu.csv", index);
    return prefix + buf;
}

void write_outcome(const rcd::experiments::Outcome& o, const fs::path& out) {
    fs::create_directories(out);
    json times = json::array();
    for (std::size_t i = 0; i < o.snapshots.size(); ++i) {
        rcd::io::write_csv(out / file_name("snapshot", i), o.snapshots[i]);
        times.push_back(o.snapshots[i].time());
    }
    json doc = {{"experiment", o.name}, {"summary", o.summary}, {"snapshot_times", times}};
    if (o.trace) {
        doc["trace"] = rcd::io::to_json(*o.trace);
    }
    rcd::io::write_json(out / "trace.json", doc);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reaction-convection-diffusion / nonhomogeneous porous medium toolkit"};
    app.require_subcommand(1);

    double m = 2.0;
    double K = 0.0;
    double delta_K = 0.0;
    auto* transform = app.add_subcommand("transform", "coefficient algebra and transformation data (JSON)");
    transform->add_option("--m", m, "diffusion exponent (> 1)")->required();
    transform->add_option("--K", K, "reaction coefficient")->required();
    transform->add_option("--delta-K", delta_K, "tolerance for the critical regime")->capture_default_str();

    std::string family = "translated-barenblatt";
    double C = 1.0;
    double y0 = 5.0;
    double gamma = 0.5;
    std::vector<double> times;
    double lo = 0.0;
    double hi = 10.0;
    std::size_t nodes = 1001;
    std::string out_dir = "out";
    auto* exact = app.add_subcommand("exact", "sample an exact solution to CSV, one file per time");
    exact->add_option("--family", family,
                      "translated-barenblatt | barenblatt-gamma | dipole-gamma | transformed-b0 | "
                      "transformed-b | transformed-z")
        ->capture_default_str();
    exact->add_option("--m", m, "diffusion exponent")->capture_default_str();
    exact->add_option("--C", C)->capture_default_str();
    exact->add_option("--y0", y0)->capture_default_str();
    exact->add_option("--gamma", gamma)->capture_default_str();
    exact->add_option("--times", times, "sampling times")->delimiter(',');
    exact->add_option("--lo", lo)->capture_default_str();
    exact->add_option("--hi", hi)->capture_default_str();
    exact->add_option("--nodes", nodes)->capture_default_str();
    exact->add_option("--out", out_dir)->capture_default_str();

    std::string preset;
    std::string config_file;
    std::vector<std::string> overrides;
    auto* simulate = app.add_subcommand("simulate", "run the solver; snapshot CSVs + trace.json");
    simulate->add_option("--preset", preset,
                         "blowup-minus-infinity | interface-blowup | isothermal | critical-rate");
    simulate->add_option("--config", config_file, "flat key = value file");
    simulate->add_option("--set", overrides, "key=value override (repeatable)");
    simulate->add_option("--out", out_dir)->capture_default_str();

    std::string suite = "all";
    auto* verify = app.add_subcommand("verify", "run invariant suites");
    verify->add_option("--suite", suite, "algebra | exact | solver | all")->capture_default_str();

    auto* figure = app.add_subcommand("figure1", "paired theta/u CSVs for the focusing/blow-up figure");
    figure->add_option("--out", out_dir)->capture_default_str();
    figure->add_option("--set", overrides, "key=value override (repeatable)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*transform) {
            std::cout << transform_json(m, K, delta_K).dump(2) << '\n';
            return 0;
        }
        if (*exact) {
            rcd::ExactSolution sol = [&] {
                rcd::io::Config c;
                c.set("family", family);
                c.set("m", rcd::io::format_double(m));
                c.set("C", rcd::io::format_double(C));
                c.set("y0", rcd::io::format_double(y0));
                c.set("gamma", rcd::io::format_double(gamma));
                return rcd::experiments::exact_from_config(c);
            }();
            if (nodes < 2 || !(hi > lo)) {
                throw rcd::DomainError("need --nodes >= 2 and --lo < --hi");
            }
            if (sol.half_line() && lo < 0.0) {
                throw rcd::DomainError("half-line family needs --lo >= 0");
            }
            const auto xs = rcd::linspace(lo, hi, nodes);
            if (!times.empty()) {
                fs::create_directories(out_dir);
            }
            for (std::size_t j = 0; j < times.size(); ++j) {
                std::vector<double> v(xs.size());
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    v[i] = sol.eval(xs[i], times[j]);
                }
                rcd::io::write_csv(fs::path(out_dir) / file_name(std::string(sol.name()), j), xs, v);
            }
            return 0;
        }
        if (*simulate || *figure) {
            rcd::io::Config cfg;
            if (!config_file.empty()) {
                cfg = rcd::io::Config::load(config_file);
            }
            for (const auto& kv : overrides) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) {
                    throw rcd::DomainError("--set expects key=value, got '" + kv + "'");
                }
                cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
            }
            if (*figure) {
                const auto pairs = rcd::experiments::figure1(cfg);
                fs::create_directories(out_dir);
                json taus = json::array();
                for (std::size_t i = 0; i < pairs.size(); ++i) {
                    rcd::io::write_csv(fs::path(out_dir) / file_name("theta", i), pairs[i].theta);
                    rcd::io::write_csv(fs::path(out_dir) / file_name("u", i), pairs[i].u);
                    taus.push_back({{"index", i}, {"tau", pairs[i].tau}, {"t", pairs[i].u.time()}});
                }
                rcd::io::write_json(fs::path(out_dir) / "figure1.json", {{"pairs", taus}});
                return 0;
            }
            const std::string name = preset.empty() ? cfg.str("preset", "none") : preset;
            const auto outcome = rcd::experiments::run_preset(name, cfg);
            for (const auto& key : cfg.unused()) {
                if (key != "preset") {
                    std::cerr << "warning: unused config key '" << key << "'\n";
                }
            }
            write_outcome(outcome, out_dir);
            json brief = outcome.summary;
            brief.erase("distance_series");
            brief.erase("escapes");
            std::cout << json{{"experiment", outcome.name}, {"summary", brief}}.dump(2) << '\n';
            return 0;
        }
        if (*verify) {
            const auto results = rcd::verify::run_suite(suite);
            int failures = 0;
            for (const auto& r : results) {
                std::cout << (r.passed ? "PASS " : "FAIL ") << r.suite << ": " << r.name;
                if (!r.detail.empty()) {
                    std::cout << " [" << r.detail << "]";
                }
                std::cout << '\n';
                failures += r.passed ? 0 : 1;
            }
            std::cout << results.size() - failures << "/" << results.size() << " checks passed\n";
            return std::min(failures, 100);
        }
    } catch (const rcd::NumericalFailure& e) {
        std::cerr << "error: " << e.what() << " (step " << e.step() << ")\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
