#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dim3/dataset.hpp"
#include "dim3/generator.hpp"

using namespace dim3;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("save then load reproduces the bundle bit-exactly") {
    auto bundle = generate_fixed(synthetic_truth(2, 12), 12, 3, 9, "roundtrip");
    bundle.node_labels.clear();
    std::string p1 = temp_path("dim3_rt1.txt");
    std::string p2 = temp_path("dim3_rt2.txt");
    save_dataset(bundle, p1);
    auto loaded = load_dataset(p1);
    REQUIRE(loaded.data == bundle.data);
    REQUIRE(loaded.name == bundle.name);
    REQUIRE(loaded.truth.has_value());
    REQUIRE(loaded.truth->membership == bundle.truth->membership);
    REQUIRE(loaded.truth->compat.w == bundle.truth->compat.w);
    save_dataset(loaded, p2);
    REQUIRE(slurp(p1) == slurp(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("bad edge value is rejected with its line number") {
    std::string p = temp_path("dim3_bad.txt");
    {
        std::ofstream out(p);
        out << "dim3 dataset 1\nname bad\nn 2\nT 1\nblock 1\n- 2\n0 -\nend\n";
    }
    try {
        load_dataset(p);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        std::string msg = e.what();
        REQUIRE(msg.find(":6:") != std::string::npos);  // the offending row
        REQUIRE(msg.find("0 or 1") != std::string::npos);
    }
    std::remove(p.c_str());
}

TEST_CASE("diagonal must be written as a dash") {
    std::string p = temp_path("dim3_diag.txt");
    {
        std::ofstream out(p);
        out << "dim3 dataset 1\nname bad\nn 2\nT 1\nblock 1\n0 1\n0 -\nend\n";
    }
    REQUIRE_THROWS_AS(load_dataset(p), DataError);
    std::remove(p.c_str());
}

TEST_CASE("sampson-style selection data round-trips") {
    auto bundle = sampson_like_fixture(7);
    std::string p = temp_path("dim3_sampson.txt");
    save_dataset(bundle, p);
    auto loaded = load_dataset(p);
    REQUIRE(loaded.data == bundle.data);
    REQUIRE(loaded.data.nodes() == 18);
    REQUIRE(loaded.data.steps() == 3);
    std::remove(p.c_str());
}

TEST_CASE("truncated files and dimension mismatches fail cleanly") {
    std::string p = temp_path("dim3_trunc.txt");
    {
        std::ofstream out(p);
        out << "dim3 dataset 1\nname x\nn 3\nT 2\nblock 1\n- 0 1\n";
    }
    REQUIRE_THROWS_AS(load_dataset(p), DataError);
    {
        std::ofstream out(p);
        out << "dim3 dataset 1\nname x\nn 2\nT 1\nblock 1\n- 0 1\n1 -\nend\n";
    }
    REQUIRE_THROWS_AS(load_dataset(p), DataError);  // row too long
    std::remove(p.c_str());
}
