#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("lzn_cli_" + std::to_string(std::rand()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(LZN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("simulate -> detect -> evaluate round trip through the binary") {
    TempDir tmp;
    const std::string scene = tmp.file("scene");
    REQUIRE(run("simulate --sf 8 --os 4 --snr-db 10 --payload-len 12 --seed 5 --out " + scene) == 0);
    REQUIRE(std::filesystem::exists(scene + ".iq"));
    REQUIRE(std::filesystem::exists(scene + ".iq.meta.json"));
    REQUIRE(std::filesystem::exists(scene + ".truth.jsonl"));

    const std::string det = tmp.file("det.jsonl");
    const std::string hyp = tmp.file("hyp.jsonl");
    REQUIRE(run("detect --sf 8 --os 4 --grid 2x2 --in " + scene + ".iq --out " + det +
                " --hyp-out " + hyp) == 0);
    REQUIRE(std::filesystem::exists(det));
    REQUIRE(std::filesystem::exists(hyp));
    CHECK(slurp(det).find("\"validated\":true") != std::string::npos);

    const std::string metrics = tmp.file("metrics.csv");
    REQUIRE(run("evaluate --sf 8 --os 4 --truth " + scene + ".truth.jsonl --detections " + det +
                " --capture " + scene + ".iq --out " + metrics) == 0);
    const std::string csv = slurp(metrics);
    CHECK(csv.find("mfr") != std::string::npos);
    // single clean frame at 10 dB: detected and decoded
    CHECK(csv.find("0.000000,1.000000,0.000000,1.000000") != std::string::npos);
}

TEST_CASE("fixed seeds reproduce captures and sweep tables byte for byte") {
    TempDir tmp;
    REQUIRE(run("simulate --sf 7 --os 2 --rate-pps 10 --duration-s 1 --snr-db 0 "
                "--snr-hi-db 10 --seed 9 --out " + tmp.file("a")) == 0);
    REQUIRE(run("simulate --sf 7 --os 2 --rate-pps 10 --duration-s 1 --snr-db 0 "
                "--snr-hi-db 10 --seed 9 --out " + tmp.file("b")) == 0);
    CHECK(slurp(tmp.file("a.iq")) == slurp(tmp.file("b.iq")));
    CHECK(slurp(tmp.file("a.truth.jsonl")) == slurp(tmp.file("b.truth.jsonl")));

    REQUIRE(run("model --kind single --sf 8 --axis -16:-12:1 --l-list 1,7 --out " +
                tmp.file("m1.csv")) == 0);
    REQUIRE(run("model --kind single --sf 8 --axis -16:-12:1 --l-list 1,7 --out " +
                tmp.file("m2.csv")) == 0);
    CHECK(slurp(tmp.file("m1.csv")) == slurp(tmp.file("m2.csv")));
}

TEST_CASE("model table golden content") {
    TempDir tmp;
    REQUIRE(run("model --kind opposite --sf 8 --out " + tmp.file("o.csv")) == 0);
    const std::string csv = slurp(tmp.file("o.csv"));
    CHECK(csv.find("sf,threshold_db") == 0);
    CHECK(csv.find("-15.051") != std::string::npos);
}

TEST_CASE("invalid spreading factor is a usage error") {
    TempDir tmp;
    CHECK(run("simulate --sf 13 --out " + tmp.file("x")) != 0);
    CHECK(run("detect --grid 0x2 --in nonexistent.iq") != 0);
}
