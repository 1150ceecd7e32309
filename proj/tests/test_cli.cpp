#include "doctest.h"
#include "riskbench/cli.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace riskbench;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome call(std::vector<std::string> args) {
    args.insert(args.begin(), "riskbench");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::vector<nlohmann::json> manifest_lines(const fs::path& p) {
    std::vector<nlohmann::json> lines;
    std::ifstream f(p);
    for (std::string line; std::getline(f, line);) lines.push_back(nlohmann::json::parse(line));
    return lines;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("riskbench-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
    static inline int counter = 0;
};

}  // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(call({}).code == 2);
    CHECK(call({"bogus"}).code == 2);
    CHECK(call({"hard", "--k", "zero"}).code == 2);
    CHECK(call({"fit"}).code == 2);
    const auto help = call({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("selftest") != std::string::npos);
}

TEST_CASE("hard writes the shared CSV schema, appends manifests and is reproducible") {
    TempDir dir;
    const std::string csv = dir / "h.csv";
    const std::vector<std::string> args = {"hard", "--k", "2", "--j", "1", "--eps-scale", "1", "--n-grid",
                                           "64:4096:x2", "--repeats", "200", "--seed", "1", "--threads", "2",
                                           "--out", csv};
    REQUIRE(call(args).code == 0);
    const std::string first = slurp(csv);
    CHECK(first.rfind("dataset,objective,z,j,k,n,repeat,seed,sample_cost,full_cost,excess\n", 0) == 0);
    CHECK(first.find("hard-c=1,subspace,2,1,2,64,0,") != std::string::npos);

    auto threads1 = args;
    threads1[14] = "1";
    REQUIRE(call(threads1).code == 0);
    CHECK(slurp(csv) == first);

    const auto lines = manifest_lines(csv + ".manifest.jsonl");
    REQUIRE(lines.size() == 2);
    CHECK(lines[0]["subcommand"] == "hard");
    CHECK(lines[0]["seed"] == 1);
    CHECK(lines[0]["exit_code"] == 0);
    CHECK(lines[0]["outputs"][0] == csv);
    CHECK(lines[0].contains("started_at"));
    CHECK(lines[0].contains("version"));

    const auto fit = call({"fit", "--csv", csv, "--manifest", dir / "m.jsonl"});
    REQUIRE(fit.code == 0);
    const auto j = nlohmann::json::parse(fit.out);
    CHECK(j["q1_fixed"] == true);
    CHECK(j["q1"] == 0.0);
    CHECK(j["rows"] == 7);
    CHECK(j["q2"].get<double>() >= 0.35);
    CHECK(j["q2"].get<double>() <= 0.65);
    CHECK(j.contains("c"));
    CHECK(j.contains("lse"));
    CHECK(manifest_lines(dir / "m.jsonl").size() == 1);
}

TEST_CASE("hard needs an eps list") {
    TempDir dir;
    CHECK(call({"hard", "--manifest", dir / "m.jsonl"}).code == 2);
    CHECK(manifest_lines(dir / "m.jsonl").back()["exit_code"] == 2);
}

TEST_CASE("RISKBENCH_SEED is the seed fallback") {
    TempDir dir;
    ::setenv("RISKBENCH_SEED", "42", 1);
    const std::string csv = dir / "h.csv";
    REQUIRE(call({"hard", "--eps", "0.2", "--n-grid", "64,128", "--repeats", "3", "--out", csv}).code == 0);
    CHECK(manifest_lines(csv + ".manifest.jsonl")[0]["seed"] == 42);
    REQUIRE(call({"hard", "--eps", "0.2", "--n-grid", "64,128", "--repeats", "3", "--seed", "5", "--out", csv}).code == 0);
    CHECK(manifest_lines(csv + ".manifest.jsonl")[1]["seed"] == 5);
    ::setenv("RISKBENCH_SEED", "not-a-seed", 1);
    CHECK(call({"hard", "--eps", "0.2", "--n-grid", "64", "--repeats", "3", "--out", csv}).code == 2);
    ::unsetenv("RISKBENCH_SEED");
}

TEST_CASE("run reads a config, applies overrides and writes CSV plus metadata") {
    TempDir dir;
    const std::string conf = dir / "exp.conf";
    std::ofstream(conf) << "synth_n = 300\nsynth_d = 3\nsynth_components = 4\nk_grid = 2,3\nn_grid = 16,32,64\n"
                           "repeats = 2\nopt_restarts = 2\nseed = 3\n";
    const std::string out = dir / "risk.csv";
    const auto r = call({"run", "--config", conf, "--out", out, "--set", "repeats=3", "--seed", "9", "--threads", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("wrote 18 rows") != std::string::npos);
    CHECK(fs::exists(out + ".meta.json"));
    const auto m = manifest_lines(out + ".manifest.jsonl");
    CHECK(m[0]["seed"] == 9);
    CHECK(m[0]["config"] == conf);
    const std::string first = slurp(out), first_meta = slurp(out + ".meta.json");
    REQUIRE(call({"run", "--config", conf, "--out", out, "--set", "repeats=3", "--seed", "9", "--threads", "1"}).code == 0);
    CHECK(slurp(out) == first);
    CHECK(slurp(out + ".meta.json") == first_meta);

    CHECK(call({"run", "--config", conf, "--out", out, "--set", "no_such_key=1"}).code == 2);
    std::ofstream(conf, std::ios::app) << "repeats = many\n";
    const auto bad = call({"run", "--config", conf, "--out", out});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("line 9") != std::string::npos);
}

TEST_CASE("reduce emits one JSON line per trial") {
    TempDir dir;
    const std::string out = dir / "r.jsonl";
    const auto r = call({"reduce", "--trials", "12", "--seed", "4", "--threads", "3", "--out", out});
    REQUIRE(r.code == 0);
    const auto lines = manifest_lines(out);
    REQUIRE(lines.size() == 12);
    for (const auto& l : lines) {
        CHECK(l["passed"] == true);
        CHECK(l["m_size"].get<int>() <= l["size_bound"].get<int>());
    }
    CHECK(lines[5]["trial"] == 5);
    const std::string first = slurp(out);
    REQUIRE(call({"reduce", "--trials", "12", "--seed", "4", "--threads", "1", "--out", out}).code == 0);
    CHECK(slurp(out) == first);
}

TEST_CASE("complexity emits the estimator CSV") {
    TempDir dir;
    const auto r = call({"complexity", "--n-grid", "32,64", "--j-grid", "1,2", "--d", "4", "--pool", "20", "--trials",
                         "200", "--seed", "2", "--manifest", dir / "m.jsonl"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "n,j,kind,estimate,stderr,bound");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 8);
    CHECK(r.out.find("\n32,1,rademacher,") != std::string::npos);
    CHECK(r.out.find("\n64,2,gaussian,") != std::string::npos);
    CHECK(call({"complexity", "--trials", "10", "--manifest", dir / "m.jsonl"}).code == 2);
}

TEST_CASE("fetch verifies checksums") {
    TempDir dir;
    const std::string src = dir / "src.csv";
    std::ofstream(src) << "1,2\n3,4\n";
    const std::string url = "file://" + src;
    const auto bad = call({"fetch", "--url", url, "--sha256", std::string(64, '0'), "--dest", dir / "a.csv"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("ChecksumMismatch") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "a.csv"));
    const auto ok = call({"fetch", "--url", url, "--dest", dir / "b.csv"});
    CHECK(ok.code == 0);
    CHECK(slurp(dir / "b.csv") == "1,2\n3,4\n");
}

TEST_CASE("selftest prints one line per module") {
    TempDir dir;
    const auto r = call({"selftest", "--seed", "7", "--manifest", dir / "m.jsonl"});
    CHECK(r.code == 0);
    int lines = 0;
    std::istringstream in(r.out);
    for (std::string line; std::getline(in, line);) {
        ++lines;
        CHECK(line.rfind("PASS ", 0) == 0);
    }
    CHECK(lines == 9);
}

TEST_CASE("fixed-eps hard run followed by fit") {
    TempDir dir;
    const std::string csv = dir / "h.csv";
    REQUIRE(call({"hard", "--k", "2", "--j", "1", "--eps", "0.1", "--n-grid", "64:16384:x2", "--repeats", "50", "--seed",
                  "1", "--out", csv})
                .code == 0);
    CHECK(slurp(csv).find("\nhard-eps=0.1,subspace,") != std::string::npos);
    const auto fit = call({"fit", "--csv", csv, "--manifest", dir / "m.jsonl"});
    REQUIRE(fit.code == 0);
    const double q2 = nlohmann::json::parse(fit.out)["q2"].get<double>();
    CHECK(q2 >= 0.35);
    CHECK(q2 <= 0.65);
}
