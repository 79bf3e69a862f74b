#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "coherence/cli.hpp"

using namespace coherence;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int         code = 0;
    std::string out;
    std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "netcoh");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int          code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream      in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string config(const char* name) { return (fs::path(NETCOH_CONFIG_DIR) / name).string(); }

// Fresh scratch directory under the system temp dir, removed on scope exit.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("netcoh_test_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string sub(const std::string& name) const { return (path / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name, std::ios::binary) << text;
        return sub(name);
    }
};

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("exit codes") {
        CHECK(cli::exit_code(ErrorKind::ConfigParse) == 2);
        CHECK(cli::exit_code(ErrorKind::SelfLoop) == 2);
        CHECK(cli::exit_code(ErrorKind::Disconnected) == 3);
        CHECK(cli::exit_code(ErrorKind::SingularAtS) == 3);
        CHECK(cli::exit_code(ErrorKind::UnstableModel) == 4);
        CHECK(cli::exit_code(ErrorKind::Io) == 5);
    }

    TEST_CASE("aggregate of two swing nodes") {
        TempDir    tmp("aggregate");
        const auto r = run_cli({"aggregate", "-c", config("aggregate_swing.json"), "--out", tmp.sub("out")});
        REQUIRE(r.code == 0);
        const std::string text = slurp(tmp.path / "out" / "aggregate.txt");
        CHECK(text.find("num=[1], den=[7,3]") != std::string::npos);
        CHECK(fs::exists(tmp.path / "out" / "aggregate_response.csv"));
    }

    TEST_CASE("bound on a disconnected graph") {
        TempDir    tmp("disconnected");
        const auto r = run_cli({"bound", "-c", config("disconnected.json"), "--out", tmp.sub("out")});
        CHECK(r.code == 3);
        CHECK(r.err.rfind("error: kind=Disconnected", 0) == 0);
    }

    TEST_CASE("analyze reruns are byte-identical and carry provenance") {
        TempDir    tmp("analyze");
        const auto a = run_cli({"analyze", "-c", config("swing_k4.json"), "--out", tmp.sub("a")});
        const auto b = run_cli({"analyze", "-c", config("swing_k4.json"), "--out", tmp.sub("b")});
        REQUIRE(a.code == 0);
        REQUIRE(b.code == 0);
        for (const char* f : {"analyze.csv", "analyze_summary.csv", "pole_approach.csv"}) {
            const std::string x = slurp(tmp.path / "a" / f);
            CHECK(!x.empty());
            CHECK(x == slurp(tmp.path / "b" / f));
            CHECK(x.rfind("# tool_version=netcoh 1.0.0", 0) == 0);
            CHECK(x.find("# config_hash=") != std::string::npos);
        }
        const auto c = run_cli({"analyze", "-c", config("swing_k4.json"), "--alpha", "3", "--out", tmp.sub("c")});
        REQUIRE(c.code == 0);
        CHECK(slurp(tmp.path / "c" / "analyze.csv") != slurp(tmp.path / "a" / "analyze.csv"));
    }

    TEST_CASE("edge list read relative to the config") {
        TempDir    tmp("ringfile");
        const auto r = run_cli({"bound", "-c", config("ring_file.json"), "--out", tmp.sub("out")});
        CHECK(r.code == 0);
        CHECK(fs::exists(tmp.path / "out" / "bound.csv"));
    }

    TEST_CASE("simulate and freqdep") {
        TempDir    tmp("simulate");
        const auto s = run_cli({"simulate", "-c", config("swing_k4.json"), "--out", tmp.sub("out")});
        REQUIRE(s.code == 0);
        const std::string sim = slurp(tmp.path / "out" / "simulation.csv");
        CHECK(sim.find("# input_family=step") != std::string::npos);
        CHECK(fs::exists(tmp.path / "out" / "simulation_summary.csv"));
        const auto f = run_cli({"freqdep", "-c", config("ring_file.json"), "--out", tmp.sub("out")});
        REQUIRE(f.code == 0);
        CHECK(fs::exists(tmp.path / "out" / "freqdep.csv"));
    }

    TEST_CASE("concentrate is reproducible and seed-dependent") {
        TempDir           tmp("concentrate");
        const std::string cfg = tmp.write("c.json", R"({
            "ensemble": {"family": "swing", "params": {"m": {"uniform": [1, 2]}, "d": {"normal": {"mean": 1.5, "sd": 0.2, "lo": 1, "hi": 2}}},
                         "sizes": [4, 16], "trials": 6, "epsilon": 0.01},
            "region": {"kind": "segment", "sigma": 0, "omega_min": -1, "omega_max": 1, "resolution": 5},
            "seed": 3})");
        REQUIRE(run_cli({"concentrate", "-c", cfg, "--out", tmp.sub("a")}).code == 0);
        REQUIRE(run_cli({"concentrate", "-c", cfg, "--out", tmp.sub("b")}).code == 0);
        REQUIRE(run_cli({"concentrate", "-c", cfg, "--seed", "4", "--out", tmp.sub("c")}).code == 0);
        const std::string a = slurp(tmp.path / "a" / "concentration.csv");
        CHECK(a == slurp(tmp.path / "b" / "concentration.csv"));
        CHECK(a != slurp(tmp.path / "c" / "concentration.csv"));
        CHECK(a.find("# seed=3") != std::string::npos);
    }

    TEST_CASE("unstable closed loop") {
        TempDir           tmp("unstable");
        const std::string cfg = tmp.write("u.json", R"({
            "network": {"nodes": [{"num": [1], "den": [-1, 1]}, {"num": [1], "den": [-1, 1]}],
                        "laplacian": {"topology": "path", "weight": 0.1}},
            "input": {"family": "step", "node": 0},
            "simulation": {"t_end": 1.0}})");
        const auto r = run_cli({"simulate", "-c", cfg, "--out", tmp.sub("out")});
        CHECK(r.code == 4);
        CHECK(r.err.rfind("error: kind=UnstableModel", 0) == 0);
    }

    TEST_CASE("configuration and I/O errors") {
        TempDir tmp("errors");
        CHECK(run_cli({"analyze", "-c", tmp.sub("missing.json")}).code == 5);
        const auto bad = run_cli({"analyze", "-c", tmp.write("bad.json", "{ not json")});
        CHECK(bad.code == 2);
        CHECK(bad.err.rfind("error: kind=ConfigParse", 0) == 0);
        const std::string no_file = tmp.write("nofile.json", R"({
            "network": {"nodes": [{"m": 1, "d": 1}, {"m": 1, "d": 2}], "laplacian": {"file": "absent.edges"}}})");
        CHECK(run_cli({"aggregate", "-c", no_file, "--out", tmp.sub("out")}).code == 5);
        const std::string loop = tmp.write("loop.json", R"({
            "network": {"nodes": [{"m": 1, "d": 1}, {"m": 1, "d": 2}], "laplacian": {"edges": [[0, 0, 1]]}}})");
        const auto self = run_cli({"aggregate", "-c", loop, "--out", tmp.sub("out")});
        CHECK(self.code == 2);
        CHECK(self.err.rfind("error: kind=SelfLoop", 0) == 0);
        CHECK(run_cli({"explode", "-c", tmp.sub("bad.json")}).code == 2);
        CHECK(run_cli({"analyze"}).code == 2);
    }

    TEST_CASE("version flag") {
        const auto r = run_cli({"--version"});
        CHECK(r.code == 0);
        CHECK(r.out.find("netcoh 1.0.0") != std::string::npos);
    }
}
