#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kernelid/error.hpp"
#include "kernelid/harness.hpp"
#include "kernelid/report_io.hpp"
#include "kernelid/spec_json.hpp"
#include "kernelid/zoo.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace kernelid;
namespace fs = std::filesystem;

namespace {

constexpr auto D = TimeDomain::Discrete;

struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("kernelid_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }

    std::string write(const std::string& file, const std::string& text) const {
        const fs::path p = dir / file;
        std::ofstream(p) << text;
        return p.string();
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

RunConfig config_for(const std::string& command, const std::string& spec, const Scratch& scratch) {
    RunConfig c;
    c.command = command;
    c.kernel_spec_path = spec;
    c.output_dir = (scratch.dir / "out").string();
    return c;
}

}  // namespace

TEST_CASE("every catalogue entry builds and is symmetric") {
    for (const auto& e : standard_zoo()) {
        CAPTURE(e.name);
        const Kernel k = build_kernel(e.spec);
        const double s = k.domain() == D ? 3.0 : 2.5;
        const double t = k.domain() == D ? 5.0 : 4.0;
        CHECK(k(s, t) == doctest::Approx(k(t, s)));
        CHECK(spec_hash(e.spec) == spec_hash(parse_spec_text(canonical_spec(e.spec))));
    }
}

TEST_CASE("composite specs") {
    const KernelSpec sum = parse_spec_text(R"({
        "family": "sum",
        "terms": [
            {"family": "TC", "domain": "discrete", "params": {"alpha": 0.5}},
            {"family": "DI", "domain": "discrete", "params": {"alpha": 0.25}}
        ],
        "coefficients": [2.0, 3.0]
    })");
    const Kernel k = build_kernel(sum);
    const Kernel tc = zoo::make_tc(0.5, D);
    const Kernel di = zoo::make_di(0.25, D);
    for (double s = 0; s < 4; ++s) {
        for (double t = 0; t < 4; ++t) CHECK(k(s, t) == doctest::Approx(2.0 * tc(s, t) + 3.0 * di(s, t)));
    }
    const Kernel prod = build_kernel(parse_spec_text(R"({"family": "product", "terms": [
        {"family": "TC", "domain": "discrete", "params": {"alpha": 0.5}},
        {"family": "TC", "domain": "discrete", "params": {"alpha": 0.5}}]})"));
    CHECK(prod(2, 3) == doctest::Approx(0.125 * 0.125));
    const Kernel sampled = build_kernel(parse_spec_text(R"({"family": "sampled",
        "kernel": {"family": "RnE", "domain": "continuous", "params": {"lambda": [1.0], "alpha": [0.5]}},
        "sigma": {"scale": 2.0}})"));
    CHECK(sampled.domain() == D);
    CHECK(sampled(1, 1) == doctest::Approx(0.25));
    const Kernel reparam = build_kernel(parse_spec_text(R"({"family": "reparameterized",
        "kernel": {"family": "TC", "domain": "discrete", "params": {"alpha": 0.5}},
        "rho": {"scale": 2}})"));
    CHECK(reparam(1, 1) == doctest::Approx(0.25));
}

TEST_CASE("spec errors") {
    try {
        parse_spec_text("{\n  \"family\": \"TC\",\n  \"params\": {\"alpha\": }\n}");
        FAIL("expected SpecParseError");
    } catch (const SpecParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(build_kernel(parse_spec_text(R"({"family": "Nope"})")), UnknownFamily);
    CHECK_THROWS_AS(build_kernel(parse_spec_text(R"({"family": "TC", "domain": "discrete", "params": {}})")), SpecParseError);
    try {
        build_kernel(parse_spec_text(R"({"family": "TC", "domain": "discrete", "params": {"alpha": "x"}})"));
        FAIL("expected SpecParseError");
    } catch (const SpecParseError& e) {
        CHECK(std::string(e.what()).find("params.alpha") != std::string::npos);
    }
    CHECK_THROWS_AS(build_kernel(parse_spec_text(R"({"family": "TC", "domain": "discrete", "params": {"alpha": 1.5}})")),
                    ParameterOutOfRange);
    CHECK_THROWS_AS(load_spec_file("/nonexistent/kernel.json"), SpecParseError);
}

TEST_CASE("spec hash ignores formatting and key order") {
    const KernelSpec a = parse_spec_text(R"({"family":"TC","domain":"discrete","params":{"alpha":0.5}})");
    const KernelSpec b = parse_spec_text("{\n \"params\": {\"alpha\": 0.5},\n \"domain\": \"discrete\", \"family\": \"TC\"\n}");
    const KernelSpec c = parse_spec_text(R"({"family":"TC","domain":"discrete","params":{"alpha":0.25}})");
    CHECK(spec_hash(a) == spec_hash(b));
    CHECK(spec_hash(a) != spec_hash(c));
    CHECK(spec_hash(a).size() == 16);
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("reports round-trip through JSON") {
    nlohmann::json doc;
    doc["measure"] = to_json(dsri_measure(zoo::make_tc(0.5, D), std::nullopt, {.allow_closed_form = false}));
    doc["classify"] = to_json(classify(zoo::make_counterexample(D)));
    doc["region"] = to_json(confidence_region(zoo::make_tc(0.25, D), Signal::zero(), 0.95));
    const std::string first = dump_report(doc);
    CHECK(dump_report(nlohmann::json::parse(first)) == first);
    CHECK(csv_number(0.1) == "0.10000000000000001");
    CHECK(std::stod(csv_number(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(csv_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("config validation") {
    RunConfig c;
    c.command = "measure";
    c.kernel_spec_path = "k.json";
    CHECK_NOTHROW(validate_config(c));
    RunConfig bad = c;
    bad.tol = -1.0;
    CHECK_THROWS_AS(validate_config(bad), InvalidArgument);
    bad = c;
    bad.tol = 1e-20;
    CHECK_THROWS_AS(validate_config(bad), InvalidArgument);
    bad = c;
    bad.command = "launch";
    CHECK_THROWS_AS(validate_config(bad), InvalidArgument);
    bad = c;
    bad.epsilon = 1.0;
    CHECK_THROWS_AS(validate_config(bad), InvalidArgument);
    bad = c;
    bad.emit = {"xml"};
    CHECK_THROWS_AS(validate_config(bad), InvalidArgument);
    bad = c;
    bad.kernel_spec_path.reset();
    CHECK_THROWS_AS(validate_config(bad), InvalidArgument);
}

TEST_CASE("measure run writes report.json") {
    const Scratch scratch("measure");
    const std::string spec = scratch.write("tc.json", R"({"family":"TC","domain":"discrete","params":{"alpha":0.25}})");
    RunConfig c = config_for("measure", spec, scratch);
    c.emit = {"json", "csv"};
    std::ostringstream out;
    std::ostringstream err;
    REQUIRE(run(c, out, err) == kExitOk);
    const auto report = nlohmann::json::parse(slurp(scratch.dir / "out" / "report.json"));
    CHECK(report["value"].get<double>() == 2.0);
    CHECK(report["method"] == "closed_form");
    CHECK(report["seed"] == 42);
    CHECK(report["tool"] == "kernelid");
    CHECK(report["spec_hash"] == spec_hash(load_spec_file(spec)));
    CHECK(fs::exists(scratch.dir / "out" / "trace.csv"));
    CHECK(fs::exists(scratch.dir / "out" / "run.log"));
    // No wall-clock content in the report itself.
    RunConfig again = c;
    std::ostringstream out2;
    const std::string first = slurp(scratch.dir / "out" / "report.json");
    REQUIRE(run(again, out2, err) == kExitOk);
    CHECK(slurp(scratch.dir / "out" / "report.json") == first);
}

TEST_CASE("classify run on the counterexample") {
    const Scratch scratch("classify");
    const std::string spec = scratch.write("ce.json", R"({"family":"CounterexDiscrete"})");
    std::ostringstream out;
    std::ostringstream err;
    REQUIRE(run(config_for("classify", spec, scratch), out, err) == kExitOk);
    const auto report = nlohmann::json::parse(slurp(scratch.dir / "out" / "report.json"));
    const auto& flags = report["classification"];
    CHECK(flags["dsri"]["state"] == "no");
    CHECK(flags["integrable"]["state"] == "yes");
    CHECK(flags["finite_trace"]["state"] == "yes");
    CHECK(flags["square_integrable"]["state"] == "yes");
}

TEST_CASE("region and operators runs") {
    const Scratch scratch("region");
    const std::string spec = scratch.write("tc.json", R"({"family":"TC","domain":"discrete","params":{"alpha":0.25}})");
    std::ostringstream out;
    std::ostringstream err;
    RunConfig region = config_for("region", spec, scratch);
    region.emit = {"json", "csv"};
    REQUIRE(run(region, out, err) == kExitOk);
    auto report = nlohmann::json::parse(slurp(scratch.dir / "out" / "report.json"));
    CHECK(std::fabs(report["area"].get<double>() - 7.83986) <= 1e-4);
    CHECK(fs::exists(scratch.dir / "out" / "region.csv"));
    REQUIRE(run(config_for("operators", spec, scratch), out, err) == kExitOk);
    report = nlohmann::json::parse(slurp(scratch.dir / "out" / "report.json"));
    CHECK(report["exit_status"] == 0);
}

TEST_CASE("failures map to exit codes") {
    const Scratch scratch("errors");
    std::ostringstream out;
    std::ostringstream err;
    CHECK(run(config_for("measure", (scratch.dir / "missing.json").string(), scratch), out, err) == kExitError);
    const auto report = nlohmann::json::parse(slurp(scratch.dir / "out" / "report.json"));
    CHECK(report["exit_status"] == 1);
    CHECK(report["error"].get<std::string>().find("SpecParseError") != std::string::npos);

    const std::string bad = scratch.write("bad.json", R"({"family":"Mystery"})");
    CHECK(run(config_for("measure", bad, scratch), out, err) == kExitError);

    RunConfig neg;
    neg.command = "verify-all";
    neg.output_dir = (scratch.dir / "out").string();
    neg.tol = -1.0;
    CHECK(run(neg, out, err) == kExitError);

    RunConfig cmd = config_for("launch", bad, scratch);
    CHECK(run(cmd, out, err) == kExitError);
}
