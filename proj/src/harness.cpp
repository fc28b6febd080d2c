#include "kernelid/harness.hpp"

#include "kernelid/acceptance.hpp"
#include "kernelid/error.hpp"
#include "kernelid/report_io.hpp"
#include "kernelid/spec_json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace kernelid {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const std::set<std::string> kCommands = {"measure", "classify", "sample-gp", "dichotomy",
                                         "region",  "operators", "verify-all"};

struct Artifacts {
    json report = json::object();
    std::vector<std::pair<std::string, std::string>> csv;  // file name, contents
    std::vector<std::string> log;                          // sidecar lines
    int status = kExitOk;
};

double parse_double(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw InvalidArgument(what + ": cannot parse '" + text + "'");
    return v;
}

Grid parse_grid(const std::string& text, TimeDomain domain) {
    const auto a = text.find(':');
    const auto b = a == std::string::npos ? a : text.find(':', a + 1);
    if (b == std::string::npos) throw InvalidArgument("--grid expects start:step:end, got '" + text + "'");
    const double start = parse_double(text.substr(0, a), "--grid start");
    const double step = parse_double(text.substr(a + 1, b - a - 1), "--grid step");
    const double end = parse_double(text.substr(b + 1), "--grid end");
    if (!(step > 0.0) || !(end >= start)) throw InvalidArgument("--grid needs step > 0 and end >= start");
    if ((end - start) / step > 1e6) throw InvalidArgument("--grid has more than 1e6 points");
    return Grid::uniform(domain, start, step, end);
}

Grid default_grid(const Kernel& k, const RunConfig& config) {
    if (config.grid) return parse_grid(*config.grid, k.domain());
    if (k.domain() == TimeDomain::Discrete) {
        const double h = config.horizon.value_or(128.0);
        return Grid::discrete_range(static_cast<std::size_t>(h));
    }
    const double h = config.horizon.value_or(12.8);
    return Grid::uniform(TimeDomain::Continuous, 0.0, 0.1, h - 0.1);
}

MeasureOptions measure_options(const RunConfig& config) {
    MeasureOptions options;
    if (config.tol) options.tol = *config.tol;
    if (config.horizon) {
        options.discrete_max = *config.horizon;
        options.continuous_max = *config.horizon;
        options.discrete_start = std::min(options.discrete_start, *config.horizon);
        options.continuous_start = std::min(options.continuous_start, *config.horizon);
    }
    return options;
}

std::string trace_csv(const MeasureResult& m) {
    std::ostringstream s;
    write_trace_csv(s, m.partial_sum_trace);
    return s.str();
}

void do_measure(const Kernel& k, const RunConfig& config, Artifacts& a) {
    const MeasureResult m = dsri_measure(k, std::nullopt, measure_options(config));
    a.report["kernel"] = k.label();
    a.report["result"] = to_json(m);
    a.report["value"] = a.report["result"]["value"];
    a.report["method"] = to_string(m.method);
    a.report["status"] = to_string(m.status);
    a.report["error_bound"] = number_json(m.error_bound);
    a.csv.emplace_back("trace.csv", trace_csv(m));
}

void do_classify(const Kernel& k, const RunConfig& config, Artifacts& a) {
    ProbeOptions probe;
    probe.seed = config.master_seed;
    const ClassReport r = classify(k, std::nullopt, measure_options(config), probe);
    a.report["classification"] = to_json(r);
    a.report["flags"] = {{"dsri", to_string(r.dsri.state)},
                         {"integrable", to_string(r.integrable.state)},
                         {"finite_trace", to_string(r.finite_trace.state)},
                         {"square_integrable", to_string(r.square_integrable.state)},
                         {"stable_probe", to_string(r.stable_probe.verdict)}};
    a.csv.emplace_back("trace.csv", trace_csv(r.dsri.measure));
}

void do_sample_gp(const Kernel& k, const RunConfig& config, Artifacts& a) {
    const Grid grid = default_grid(k, config);
    const std::size_t n = config.paths.value_or(100);
    const GpEnsemble e = sample_paths(k, Signal::zero(), grid, n, config.master_seed);
    const double end = grid.point(grid.size() - 1) + (grid.domain() == TimeDomain::Discrete ? 1.0 : 1e-9);
    const RowMatrix l1 = truncated_l1(e, {end});
    const double mean = l1.col(0).mean();
    a.report["kernel"] = k.label();
    a.report["n_paths"] = n;
    a.report["grid"] = {{"domain", to_string(grid.domain())},
                        {"points", grid.size()},
                        {"start", grid.point(0)},
                        {"end", grid.point(grid.size() - 1)}};
    a.report["jitter"] = e.jitter;
    a.report["diagonal_factor"] = e.diagonal_factor;
    a.report["mean_truncated_l1"] = mean;
    a.report["path_seeds"] = e.seeds;
    std::ostringstream s;
    write_paths_csv(s, e);
    a.csv.emplace_back("paths.csv", s.str());
}

void do_dichotomy(const Kernel& k, const RunConfig& config, Artifacts& a) {
    DichotomyConfig d;
    d.seed = config.master_seed;
    if (config.paths) d.n_paths = *config.paths;
    d.horizon = config.horizon.value_or(k.domain() == TimeDomain::Discrete ? 512.0 : 51.2);
    const DichotomyReport r = dichotomy_experiment(k, d);
    a.report["dichotomy"] = to_json(r);
    std::ostringstream s;
    write_dichotomy_csv(s, r);
    a.csv.emplace_back("dichotomy.csv", s.str());
}

void do_region(const Kernel& k, const RunConfig& config, Artifacts& a) {
    const double eps = config.epsilon.value_or(0.95);
    const ConfidenceRegion r = confidence_region(k, Signal::zero(), eps, std::nullopt, measure_options(config));
    a.report["region"] = to_json(r);
    a.report["area"] = a.report["region"]["area"]["value"];
    std::ostringstream s;
    write_region_csv(s, r, default_grid(k, config));
    a.csv.emplace_back("region.csv", s.str());
}

void do_operators(const Kernel& k, const RunConfig& config, Artifacts& a) {
    const std::size_t n = config.paths.value_or(500);
    ContinuityOptions options;
    options.measure = measure_options(config);
    std::vector<Functional> ops = {
        Functional::fourier(0.0, k.domain()),
        Functional::fourier(std::numbers::pi / 4.0, k.domain()),
        Functional::fourier(std::numbers::pi, k.domain()),
        Functional::lv(BoundedSignal::scalar(Signal::constant(1.0), k.domain())),
    };
    json reports = json::array();
    std::ostringstream s;
    s << "operator,rkhs_bound,max_observed_ratio,max_embedding_ratio,violations\n";
    for (const auto& op : ops) {
        const OperatorBoundReport r = verify_continuity_bound(k, op, n, config.master_seed, options);
        reports.push_back(to_json(r));
        s << '"' << r.operator_label << "\"," << csv_number(r.rkhs_bound) << ',' << csv_number(r.max_observed_ratio)
          << ',' << csv_number(r.max_embedding_ratio) << ',' << r.violations + r.embedding_violations << '\n';
    }
    a.report["operators"] = reports;
    a.csv.emplace_back("operators.csv", s.str());
}

void do_verify_all(const RunConfig& config, Artifacts& a, std::ostream& out) {
    const auto results = run_all_criteria(config.master_seed);
    a.report = acceptance_report(results, config.master_seed);
    bool all = true;
    char line[160];
    for (const auto& r : results) {
        std::snprintf(line, sizeof line, "[%s] criterion %2d  %-14s %s", r.pass ? "PASS" : "FAIL", r.id,
                      r.module.c_str(), r.title.c_str());
        out << line << '\n';
        std::snprintf(line, sizeof line, "criterion %d: %.3f s", r.id, r.seconds);
        a.log.emplace_back(line);
        all = all && r.pass;
    }
    a.report["all_pass"] = all;
    out << (all ? "all criteria pass" : "FAILED:");
    for (const auto& r : results) {
        if (!r.pass) out << " [" << r.module << " #" << r.id << ']';
    }
    out << '\n';
    std::ostringstream s;
    s << "id,module,pass\n";
    for (const auto& r : results) s << r.id << ',' << r.module << ',' << (r.pass ? 1 : 0) << '\n';
    a.csv.emplace_back("criteria.csv", s.str());
    if (!all) a.status = kExitError;
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write " + path.string());
    f << contents;
}

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

void validate_config(const RunConfig& config) {
    if (!kCommands.contains(config.command)) throw InvalidArgument("unknown command '" + config.command + "'");
    if (config.tol && !(*config.tol >= std::numeric_limits<double>::epsilon())) {
        throw InvalidArgument("--tol must be at least machine epsilon");
    }
    if (config.horizon && !(*config.horizon > 0.0 && std::isfinite(*config.horizon))) {
        throw InvalidArgument("--horizon must be positive and finite");
    }
    if (config.epsilon && !(*config.epsilon >= 0.0 && *config.epsilon < 1.0)) {
        throw InvalidArgument("--epsilon must lie in [0, 1)");
    }
    if (config.paths && *config.paths == 0) throw InvalidArgument("--paths must be positive");
    if (config.emit.empty()) throw InvalidArgument("--emit needs json and/or csv");
    for (const auto& e : config.emit) {
        if (e != "json" && e != "csv") throw InvalidArgument("--emit accepts json,csv; got '" + e + "'");
    }
    if (config.command != "verify-all" && !config.kernel_spec_path) {
        throw InvalidArgument(config.command + " requires --kernel");
    }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const auto start = Clock::now();
    Artifacts a;
    json spec;
    std::string hash;
    try {
        validate_config(config);
        if (config.command == "verify-all") {
            do_verify_all(config, a, out);
        } else {
            spec = load_spec_file(*config.kernel_spec_path);
            hash = spec_hash(spec);
            const Kernel k = build_kernel(spec);
            if (config.command == "measure") do_measure(k, config, a);
            else if (config.command == "classify") do_classify(k, config, a);
            else if (config.command == "sample-gp") do_sample_gp(k, config, a);
            else if (config.command == "dichotomy") do_dichotomy(k, config, a);
            else if (config.command == "region") do_region(k, config, a);
            else do_operators(k, config, a);
        }
    } catch (const InternalAssertion& e) {
        err << "internal assertion: " << e.what() << '\n';
        a.report["error"] = e.what();
        a.status = kExitAssertion;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        a.report["error"] = e.what();
        a.status = kExitError;
    }

    a.report["tool"] = kToolName;
    a.report["version"] = kToolVersion;
    a.report["command"] = config.command;
    a.report["seed"] = config.master_seed;
    if (!hash.empty()) a.report["spec_hash"] = hash;
    if (!spec.is_null()) a.report["kernel_spec"] = spec;
    a.report["exit_status"] = a.status;

    try {
        const fs::path dir(config.output_dir);
        fs::create_directories(dir);
        // report.json is written regardless of the emit set.
        write_file(dir / "report.json", dump_report(a.report));
        if (config.emit.contains("csv")) {
            for (const auto& [name, contents] : a.csv) write_file(dir / name, contents);
        }
        std::ostringstream log;
        log << "started " << utc_now() << '\n';
        for (const auto& line : a.log) log << line << '\n';
        log << "elapsed " << std::chrono::duration<double>(Clock::now() - start).count() << " s\n";
        write_file(dir / "run.log", log.str());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    if (a.status == kExitOk && config.command != "verify-all") out << dump_report(a.report);
    return a.status;
}

}  // namespace kernelid
