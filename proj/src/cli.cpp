#include "mlmm/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlmm/analysis.hpp"
#include "mlmm/diffusion.hpp"
#include "mlmm/problems.hpp"
#include "mlmm/stability.hpp"

namespace mlmm::cli {

namespace {

using nlohmann::json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << content;
    if (!out) throw IoError("failed writing output file: " + path);
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

// --- method selection flags -------------------------------------------------

struct MethodFlags {
    std::string family = "ab";
    int order = 1;
    double beta = 1.0;
    std::optional<double> momentum;

    void attach(CLI::App* cmd) {
        cmd->add_option("--family", family,
                        "solver family: ab | hb | ghvb | nesterov | interp-ab")
            ->default_val("ab");
        cmd->add_option("--order", order, "method order 1..5 (ab/hb/nesterov/interp-ab)");
        cmd->add_option("--beta", beta, "damping coefficient in (0,1] (hb/nesterov/interp-ab)");
        cmd->add_option("--momentum", momentum, "GHVB momentum number in (0,5]");
    }

    [[nodiscard]] MethodSpec build() const {
        try {
            if (family == "ab") return MethodSpec::ab(order);
            if (family == "hb") return MethodSpec::hb(order, beta);
            if (family == "ghvb") {
                if (!momentum) throw UsageError("--momentum is required for --family ghvb");
                return MethodSpec::ghvb(*momentum);
            }
            if (family == "nesterov") return MethodSpec::nesterov(order, beta);
            if (family == "interp-ab") return MethodSpec::interp_ab(order, beta);
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("invalid --order/--beta/--momentum: ") + e.what());
        }
        throw UsageError("unknown --family value: " + family);
    }
};

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw UsageError(std::string(flag) + ": malformed integer list entry '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw UsageError(std::string(flag) + ": malformed number list entry '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
    return out;
}

Problem build_problem(const std::string& name, double lambda, const char* flag) {
    if (name == "toy2x2") return toy_2x2();
    if (name == "test-eq") return test_equation(lambda, 1.0, 0.0, 1.0);
    throw UsageError(std::string(flag) + ": unknown problem '" + name + "'");
}

AlphaSchedule load_schedule(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open schedule file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw UsageError("--schedule: invalid JSON: " + std::string(e.what()));
    }
    if (!j.is_array()) throw UsageError("--schedule: expected a JSON array of alpha values");
    std::vector<double> alphas;
    for (const auto& v : j) {
        if (!v.is_number()) throw UsageError("--schedule: array entries must be numbers");
        alphas.push_back(v.get<double>());
    }
    try {
        return AlphaSchedule(std::move(alphas));
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--schedule: ") + e.what());
    }
}

// Deterministic linear noise model shipped for schedule-driven solves.
NoiseModel demo_noise_model() {
    NoiseModel model;
    model.predict = [](const Vec& x, double) {
        return Vec{-0.4 * x[0] + 0.1 * x[1] + 0.05, -0.3 * x[1] - 0.02};
    };
    return model;
}

// --- command bodies ----------------------------------------------------------

std::string render_locus(const MethodSpec& spec, int samples, const std::string& format) {
    const LocusCurve curve = locus(linear_multistep_form(spec), samples);
    if (format == "json") {
        json j;
        j["theta"] = json::array();
        j["re"] = json::array();
        j["im"] = json::array();
        for (std::size_t i = 0; i < curve.thetas.size(); ++i) {
            j["theta"].push_back(curve.thetas[i]);
            j["re"].push_back(curve.values[i].real());
            j["im"].push_back(curve.values[i].imag());
        }
        return dump_json(j);
    }
    std::string out = "theta,re,im\n";
    for (std::size_t i = 0; i < curve.thetas.size(); ++i) {
        out += format_double(curve.thetas[i]);
        out += ',';
        out += format_double(curve.values[i].real());
        out += ',';
        out += format_double(curve.values[i].imag());
        out += '\n';
    }
    return out;
}

std::string render_region(const MethodSpec& spec, double re0, double re1, double im0, double im1,
                          int resolution, const std::string& format) {
    const MethodForm form = linear_multistep_form(spec);
    const std::vector<bool> grid = stability_raster(form, re0, re1, resolution, im0, im1,
                                                    resolution);
    const auto coord = [resolution](double lo, double hi, int k) {
        return resolution == 1 ? lo : lo + (hi - lo) * k / (resolution - 1);
    };
    if (format == "json") {
        json j;
        j["re"] = json::array();
        j["im"] = json::array();
        j["stable"] = json::array();
        for (int i = 0; i < resolution; ++i)
            for (int k = 0; k < resolution; ++k) {
                j["re"].push_back(coord(re0, re1, k));
                j["im"].push_back(coord(im0, im1, i));
                j["stable"].push_back(grid[static_cast<std::size_t>(i) * resolution + k] ? 1 : 0);
            }
        return dump_json(j);
    }
    std::string out = "re,im,stable\n";
    for (int i = 0; i < resolution; ++i) {
        for (int k = 0; k < resolution; ++k) {
            out += format_double(coord(re0, re1, k));
            out += ',';
            out += format_double(coord(im0, im1, i));
            out += ',';
            out += grid[static_cast<std::size_t>(i) * resolution + k] ? '1' : '0';
            out += '\n';
        }
    }
    return out;
}

std::string render_trajectory(const Trajectory& traj, const std::string& format) {
    if (format == "json") {
        json j;
        j["times"] = traj.times;
        j["states"] = traj.states;
        j["diverged"] = traj.diverged;
        return dump_json(j);
    }
    const std::size_t dim = traj.states.front().size();
    std::string out = "time";
    for (std::size_t d = 0; d < dim; ++d) out += ",x" + std::to_string(d);
    out += '\n';
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out += format_double(traj.times[i]);
        for (double v : traj.states[i]) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    out += traj.diverged ? "diverged,true\n" : "diverged,false\n";
    return out;
}

std::string render_order(const MethodSpec& spec, const Problem& problem,
                         const std::vector<int>& steps) {
    std::vector<double> deltas;
    std::vector<double> errors;
    for (int n : steps) {
        if (n < 1) throw UsageError("--steps: step counts must be >= 1");
        deltas.push_back((problem.t1 - problem.t0) / n);
        errors.push_back(global_error(integrate(spec, problem, n), *problem.exact));
    }
    json j;
    j["deltas"] = deltas;
    j["errors"] = errors;
    j["method"] = spec.name();
    j["orders"] = empirical_order(errors, deltas);
    j["steps"] = steps;
    return dump_json(j);
}

LatentGrid parse_grid(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty() || !j[0][0].is_array())
        throw UsageError("--input: expected a nested H x W x C JSON array");
    LatentGrid grid;
    grid.height = static_cast<int>(j.size());
    grid.width = static_cast<int>(j[0].size());
    grid.channels = static_cast<int>(j[0][0].size());
    grid.data.reserve(static_cast<std::size_t>(grid.height) * grid.width * grid.channels);
    for (const auto& row : j) {
        if (static_cast<int>(row.size()) != grid.width)
            throw UsageError("--input: ragged grid rows");
        for (const auto& px : row) {
            if (static_cast<int>(px.size()) != grid.channels)
                throw UsageError("--input: ragged channel vectors");
            for (const auto& v : px) grid.data.push_back(v.get<double>());
        }
    }
    return grid;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"momentum linear-multistep solver toolkit"};
    app.require_subcommand(1);

    // locus ---------------------------------------------------------------
    auto* locus_cmd = app.add_subcommand("locus", "sample a boundary-locus curve");
    MethodFlags locus_method;
    locus_method.attach(locus_cmd);
    int locus_samples = 512;
    std::string locus_out;
    std::string locus_format = "csv";
    locus_cmd->add_option("--samples", locus_samples, "number of theta samples (>= 2)");
    locus_cmd->add_option("--out", locus_out, "output path")->required();
    locus_cmd->add_option("--format", locus_format, "csv | json");

    // region --------------------------------------------------------------
    auto* region_cmd = app.add_subcommand("region", "rasterize a stability region");
    MethodFlags region_method;
    region_method.attach(region_cmd);
    double re0 = -4.0, re1 = 1.0, im0 = -2.5, im1 = 2.5;
    int resolution = 41;
    std::string region_out, region_format = "csv";
    region_cmd->add_option("--re-min", re0, "real-axis lower bound");
    region_cmd->add_option("--re-max", re1, "real-axis upper bound");
    region_cmd->add_option("--im-min", im0, "imaginary-axis lower bound");
    region_cmd->add_option("--im-max", im1, "imaginary-axis upper bound");
    region_cmd->add_option("--resolution", resolution, "grid points per axis (>= 2)");
    region_cmd->add_option("--out", region_out, "output path")->required();
    region_cmd->add_option("--format", region_format, "csv | json");

    // solve ---------------------------------------------------------------
    auto* solve_cmd = app.add_subcommand("solve", "integrate a problem with a method");
    MethodFlags solve_method;
    solve_method.attach(solve_cmd);
    std::string solve_problem = "test-eq";
    double solve_lambda = -1.0;
    int solve_steps = 26;
    std::string solve_schedule;
    std::string solve_out, solve_format = "csv";
    solve_cmd->add_option("--problem", solve_problem,
                          "test-eq | toy2x2 | diffusion (with --schedule)");
    solve_cmd->add_option("--lambda", solve_lambda, "test equation rate");
    solve_cmd->add_option("--steps", solve_steps, "number of uniform steps (>= 1)");
    solve_cmd->add_option("--schedule", solve_schedule,
                          "alpha-schedule JSON array, most-noised entry first");
    solve_cmd->add_option("--out", solve_out, "output path")->required();
    solve_cmd->add_option("--format", solve_format, "csv | json");

    // order ---------------------------------------------------------------
    auto* order_cmd = app.add_subcommand("order", "empirical order-of-convergence table");
    MethodFlags order_method;
    order_method.attach(order_cmd);
    std::string order_problem = "test-eq";
    double order_lambda = -1.0;
    std::string order_steps = "20,40,80,160,320,640";
    std::string order_out;
    order_cmd->add_option("--problem", order_problem, "test-eq | toy2x2");
    order_cmd->add_option("--lambda", order_lambda, "test equation rate");
    order_cmd->add_option("--steps", order_steps, "comma-separated step counts");
    order_cmd->add_option("--out", order_out, "output path (JSON)")->required();

    // magnitude -----------------------------------------------------------
    auto* mag_cmd = app.add_subcommand("magnitude", "latent magnitude score of a grid");
    std::string mag_input, mag_out;
    double mag_tau = 3.0;
    int mag_pool = 1;
    std::string mag_means, mag_stds;
    mag_cmd->add_option("--input", mag_input, "H x W x C nested JSON array")->required();
    mag_cmd->add_option("--tau", mag_tau, "threshold in std-dev units");
    mag_cmd->add_option("--pool", mag_pool, "max-pool kernel (stride = kernel)");
    mag_cmd->add_option("--means", mag_means, "comma-separated channel means (default 0)");
    mag_cmd->add_option("--stds", mag_stds, "comma-separated channel stds (default 1)");
    mag_cmd->add_option("--out", mag_out, "output path (JSON)")->required();

    // compare ---------------------------------------------------------------
    auto* cmp_cmd = app.add_subcommand("compare", "final errors of several methods");
    std::string cmp_problem = "toy2x2";
    double cmp_lambda = -1.0;
    int cmp_steps = 26;
    std::string cmp_methods = "ab1,ab2";
    std::string cmp_out, cmp_format = "csv";
    cmp_cmd->add_option("--problem", cmp_problem, "test-eq | toy2x2");
    cmp_cmd->add_option("--lambda", cmp_lambda, "test equation rate");
    cmp_cmd->add_option("--steps", cmp_steps, "number of uniform steps (>= 1)");
    cmp_cmd->add_option("--methods", cmp_methods,
                        "comma-separated method tokens, e.g. ab2,ghvb1.8,hb0.8-ab2");
    cmp_cmd->add_option("--out", cmp_out, "output path")->required();
    cmp_cmd->add_option("--format", cmp_format, "csv | json");

    std::vector<const char*> argv;
    argv.push_back("mlmm");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "argument error: " << e.what() << "\n";
        return 2;
    }

    auto check_format = [](const std::string& f) {
        if (f != "csv" && f != "json") throw UsageError("--format must be csv or json");
    };

    if (locus_cmd->parsed()) {
        if (locus_samples < 2) throw UsageError("--samples must be >= 2");
        check_format(locus_format);
        write_file(locus_out, render_locus(locus_method.build(), locus_samples, locus_format));
        return 0;
    }
    if (region_cmd->parsed()) {
        if (resolution < 2) throw UsageError("--resolution must be >= 2");
        if (!(re1 > re0)) throw UsageError("--re-min/--re-max: empty range");
        if (!(im1 > im0)) throw UsageError("--im-min/--im-max: empty range");
        check_format(region_format);
        write_file(region_out, render_region(region_method.build(), re0, re1, im0, im1,
                                             resolution, region_format));
        return 0;
    }
    if (solve_cmd->parsed()) {
        check_format(solve_format);
        if (solve_problem == "diffusion") {
            if (solve_schedule.empty())
                throw UsageError("--schedule is required for --problem diffusion");
            const AlphaSchedule schedule = load_schedule(solve_schedule);
            Stepper stepper = make_method(solve_method.build());
            const NoiseModel model = demo_noise_model();
            const std::vector<Vec> chain = sample_ode_bar({1.0, -1.0}, schedule, model, stepper);
            Trajectory traj;
            const std::vector<double> grid = schedule.sigma_bar_grid();
            for (int t = schedule.size() - 1; t >= 0; --t) {
                traj.times.push_back(grid[static_cast<std::size_t>(t)]);
                traj.states.push_back(chain[static_cast<std::size_t>(schedule.size() - 1 - t)]);
                if (!vec_finite(traj.states.back())) traj.diverged = true;
            }
            write_file(solve_out, render_trajectory(traj, solve_format));
            return 0;
        }
        if (solve_steps < 1) throw UsageError("--steps must be >= 1");
        const Problem problem = build_problem(solve_problem, solve_lambda, "--problem");
        const Trajectory traj = integrate(solve_method.build(), problem, solve_steps);
        write_file(solve_out, render_trajectory(traj, solve_format));
        return 0;
    }
    if (order_cmd->parsed()) {
        const Problem problem = build_problem(order_problem, order_lambda, "--problem");
        const std::vector<int> steps = parse_int_list(order_steps, "--steps");
        write_file(order_out, render_order(order_method.build(), problem, steps));
        return 0;
    }
    if (mag_cmd->parsed()) {
        std::ifstream in(mag_input, std::ios::binary);
        if (!in) throw IoError("cannot open input file: " + mag_input);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw UsageError("--input: invalid JSON: " + std::string(e.what()));
        }
        const LatentGrid grid = parse_grid(j);
        MagnitudeConfig cfg;
        cfg.tau = mag_tau;
        cfg.pool_k = mag_pool;
        cfg.channel_means = mag_means.empty() ? std::vector<double>(static_cast<std::size_t>(grid.channels), 0.0)
                                              : parse_double_list(mag_means, "--means");
        cfg.channel_stds = mag_stds.empty() ? std::vector<double>(static_cast<std::size_t>(grid.channels), 1.0)
                                            : parse_double_list(mag_stds, "--stds");
        double score = 0.0;
        try {
            score = magnitude_score(grid, cfg);
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("--input/--pool/--tau: ") + e.what());
        }
        json result;
        result["score"] = score;
        write_file(mag_out, dump_json(result));
        return 0;
    }
    if (cmp_cmd->parsed()) {
        if (cmp_steps < 1) throw UsageError("--steps must be >= 1");
        check_format(cmp_format);
        const Problem problem = build_problem(cmp_problem, cmp_lambda, "--problem");
        std::stringstream ss(cmp_methods);
        std::string token;
        std::vector<std::string> names;
        std::vector<double> errors;
        std::vector<bool> diverged;
        while (std::getline(ss, token, ',')) {
            MethodSpec spec;
            try {
                spec = parse_method_token(token);
            } catch (const std::invalid_argument& e) {
                throw UsageError(std::string("--methods: ") + e.what());
            }
            const Trajectory traj = integrate(spec, problem, cmp_steps);
            names.push_back(spec.name());
            errors.push_back(global_error(traj, *problem.exact));
            diverged.push_back(traj.diverged);
        }
        if (names.empty()) throw UsageError("--methods: empty list");
        if (cmp_format == "json") {
            json j;
            j["diverged"] = diverged;
            j["final_errors"] = errors;
            j["methods"] = names;
            write_file(cmp_out, dump_json(j));
        } else {
            std::string outstr = "method,final_error,diverged\n";
            for (std::size_t i = 0; i < names.size(); ++i) {
                outstr += names[i] + "," + format_double(errors[i]) + "," +
                          (diverged[i] ? "true" : "false") + "\n";
            }
            write_file(cmp_out, outstr);
        }
        return 0;
    }
    throw UsageError("no command given");
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

MethodSpec parse_method_token(const std::string& token) {
    auto starts_with = [&](const char* prefix) { return token.rfind(prefix, 0) == 0; };
    auto number_after = [&](std::size_t pos, std::size_t end) {
        const std::string text = token.substr(pos, end - pos);
        try {
            std::size_t used = 0;
            const double v = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed method token: " + token);
        }
    };
    const std::size_t dash = token.find("-ab");
    const std::size_t head_end = dash == std::string::npos ? token.size() : dash;
    auto base_order = [&]() {
        if (dash == std::string::npos)
            throw std::invalid_argument("method token needs an -ab<order> suffix: " + token);
        return static_cast<int>(number_after(dash + 3, token.size()));
    };

    if (starts_with("ab")) return MethodSpec::ab(static_cast<int>(number_after(2, head_end)));
    if (starts_with("ghvb")) return MethodSpec::ghvb(number_after(4, head_end));
    if (starts_with("hb")) return MethodSpec::hb(base_order(), number_after(2, head_end));
    if (starts_with("nesterov"))
        return MethodSpec::nesterov(base_order(), number_after(8, head_end));
    if (starts_with("interp"))
        return MethodSpec::interp_ab(base_order(), number_after(6, head_end));
    throw std::invalid_argument("unknown method token: " + token);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const UsageError& e) {
        err << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(const std::vector<std::string>& args) { return run(args, std::cout, std::cerr); }

}  // namespace mlmm::cli
