/*
   Copyright 2026 The conelab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conelab/cli.hpp"
#include "conelab/error.hpp"
#include "conelab/region_json.hpp"
#include "conelab/volume.hpp"

using namespace conelab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir
{
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("conelab_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string write(const std::string& name, const std::string& text) const
    {
        std::ofstream(path / name) << text;
        return (path / name).string();
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

struct Result
{
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "conelab");
    std::vector<const char*> argv;
    for (const auto& a : args)
    {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("dims parsing")
    {
        CHECK(cli::parse_dims("64x64x32") == std::array<int, 3>{64, 64, 32});
        CHECK_THROWS_AS(cli::parse_dims("64x64"), ParseError);
        CHECK_THROWS_AS(cli::parse_dims("axbxc"), ParseError);
    }

    TEST_CASE("config files")
    {
        TempDir t;
        const std::string p = t.write("run.cfg", "# comment\n\nseed = 7\nsamples=2000\n");
        const auto kv = cli::read_config_file(p);
        CHECK(kv.at("seed") == "7");
        CHECK(kv.at("samples") == "2000");
        CHECK_THROWS_AS(cli::read_config_file(t.write("bad.cfg", "novalue\n")), ParseError);

        std::ostringstream sink;
        const std::string pa = p;
        const char* argv[] = {"conelab", "volume", "--config", pa.c_str(), "--seed", "9"};
        const cli::RunConfig c = cli::parse_run_config(6, argv, sink);
        CHECK(c.command == "volume");
        CHECK(c.seed == 9);
        CHECK(c.seed_given);
        CHECK(c.samples == 2000);
    }

    TEST_CASE("defaults")
    {
        std::ostringstream sink;
        const char* argv[] = {"conelab", "verify", "--lemma", "overlap"};
        const cli::RunConfig c = cli::parse_run_config(4, argv, sink);
        CHECK(c.seed == 42);
        CHECK_FALSE(c.seed_given);
        CHECK_FALSE(c.tol.has_value());
        CHECK(c.lemma == "overlap");
    }

    TEST_CASE("volume command")
    {
        TempDir t;
        const std::string box = t.write("box.json", R"({"type":"box","tau":[0,1],"xi1":[0,1],"xi2":[0,1]})");
        const Result r = run_cli({"volume", "--spec", box, "--samples", "100000"});
        REQUIRE(r.code == 0);
        CHECK(json::parse(r.out).at("value").get<double>() == 1.0);

        const Region ann = Region::cone_annulus(Sign::Plus, 1, 0.1);
        const std::string spec = t.write("ann.json", json{{"region", to_json(ann)}}.dump());
        const std::string out = t.file("vol.json");
        const Result a = run_cli({"volume", "--spec", spec, "--samples", "20000", "--seed", "5", "--out", out});
        REQUIRE(a.code == 0);
        const double lib = mc_volume(ann, bounding_box(ann), 20000, 5).value;
        CHECK(json::parse(slurp(out)).at("value").get<double>() == lib);

        CHECK(run_cli({"volume", "--spec", t.write("bad.json", "{oops")}).code == 2);
        CHECK(run_cli({"volume", "--spec", t.write("strip.json", to_json(Region::spatial_strip(0.1, {1, 0})).dump())})
                  .code
              == 3);
        CHECK(run_cli({"volume", "--spec", t.file("missing.json")}).code == 2);
    }

    TEST_CASE("verify command")
    {
        TempDir t;
        const std::string out = t.file("gf.json");
        const Result g = run_cli({"verify", "--lemma", "gradient-flow", "--trials", "1000", "--out", out});
        CHECK(g.code == 0);
        const json j = json::parse(slurp(out));
        CHECK(j.at("lemma") == "gradient-flow");
        CHECK(j.at("pass") == true);
        CHECK(j.at("max_err").get<double>() <= 1e-6);

        const Result o = run_cli({"verify", "--lemma", "overlap", "--trials", "2000"});
        CHECK(o.code == 0);
        CHECK(run_cli({"verify", "--lemma", "no-such-lemma"}).code == 2);
        CHECK(run_cli({"verify"}).code == 2);
    }

    TEST_CASE("usage errors")
    {
        CHECK(run_cli({}).code == 2);
        CHECK(run_cli({"frobnicate"}).code == 2);
        CHECK(run_cli({"verify", "--lemma", "overlap", "--threads", "abc"}).code == 2);
        CHECK(run_cli({"sweep", "--spec", "x.json", "--dims", "1x2"}).code == 2);
        CHECK(run_cli({"--help"}).code == 0);
    }

    TEST_CASE("single point sweep and determinism across thread counts")
    {
        TempDir t;
        const std::string spec = t.write(
            "s.json",
            R"({"id":"KM_A110","params":{"N":[2,1,1],"L":["inf",0.25,0.25]},"strategy":"random","dims":[32,32,32],
                "axes":{"L1":[0.25,0.5]},"sign_patterns":[[1,1,1],[1,-1,1]]})");
        const std::string a = t.file("a.csv"), b = t.file("b.csv");
        const Result ra = run_cli({"sweep", "--spec", spec, "--out", a, "--threads", "1"});
        const Result rb = run_cli({"sweep", "--spec", spec, "--out", b, "--threads", "3"});
        CHECK(ra.code == 0);
        CHECK(rb.code == 0);
        const std::string ca = slurp(a);
        CHECK(ca == slurp(b));
        CHECK(std::count(ca.begin(), ca.end(), '\n') == 5);
        CHECK(fs::exists(t.file("a.summary.json")));
        CHECK(slurp(t.file("a.summary.json")) == slurp(t.file("b.summary.json")));

        const std::string one = t.write(
            "one.json", R"({"id":"KM_A110","params":{"N":[1,1,1],"L":["inf",0.01,0.04]},"strategy":"volume_route"})");
        const std::string c = t.file("c.csv");
        REQUIRE(run_cli({"sweep", "--spec", one, "--out", c}).code == 0);
        const std::string cc = slurp(c);
        CHECK(std::count(cc.begin(), cc.end(), '\n') == 2);

        const Result rep = run_cli({"report", "--spec", c});
        CHECK(rep.code == 0);
    }

    TEST_CASE("sweep pass flags")
    {
        TempDir t;
        const std::string spec = t.write(
            "s.json",
            R"({"id":"KM_A110","params":{"N":[1,1,1],"L":["inf",0.01,0.04]},"strategy":"volume_route",
                "max_ratio_bound":1e-9})");
        CHECK(run_cli({"sweep", "--spec", spec, "--out", t.file("s.csv")}).code == 1);
    }

    TEST_CASE("partial sweeps persist and exit 5")
    {
        TempDir t;
        // The second thickness is below the lattice resolution.
        const std::string spec = t.write(
            "s.json",
            R"({"id":"KM_A110","params":{"N":[2,1,1],"L":["inf",0.25,0.25]},"strategy":"random","dims":[16,16,16],
                "axes":{"L1":[0.5,0.0078125]}})");
        const std::string out = t.file("p.csv");
        CHECK(run_cli({"sweep", "--spec", spec, "--out", out}).code == 5);
        CHECK(fs::exists(out));
    }

    TEST_CASE("extremize records best lower bounds")
    {
        TempDir t;
        const std::string spec = t.write(
            "e.json",
            R"({"id":"KM_A110","params":{"N":[2,1,1],"L":["inf",0.25,0.25]},"strategy":"random","dims":[64,16,16]})");
        const std::string out = t.file("e.csv");
        const Result r = run_cli({"extremize", "--spec", spec, "--out", out});
        CHECK(r.code == 0);
        const json s = json::parse(slurp(t.file("e.summary.json")));
        CHECK(s.contains("min_best_ratio"));
    }
}
