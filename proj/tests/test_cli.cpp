// end-to-end runs of the installed binary; expectations are exact bytes

#include <doctest.h>

#include "parcalc/partitions.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct CliResult {
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    auto base = std::filesystem::temp_directory_path() /
                ("parcalc_cli_capture_" + std::to_string(++counter));
    std::string cmd = env_prefix + std::string(PARCALC_CLI_PATH) + " " + args + " >" +
                      base.string() + ".out 2>" + base.string() + ".err";
    int raw = std::system(cmd.c_str());
    CliResult r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(base.string() + ".out");
    r.err = slurp(base.string() + ".err");
    std::filesystem::remove(base.string() + ".out");
    std::filesystem::remove(base.string() + ".err");
    return r;
}

std::filesystem::path write_fixture(const std::string& name, const std::string& body) {
    auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream f(p, std::ios::binary);
    f << body;
    return p;
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

const char* holim_fixture = R"json({
  "objects": ["a", "b"],
  "arrows": [{"src": "a", "dst": "b"}],
  "variance": "co",
  "complexes": {
    "a": {"dims": [2, 1], "diffs": [[[1], [-1]]]},
    "b": {"dims": [1]}
  },
  "maps": {"a>b": [[[1, 1]], []]}
})json";

// three-object chain; the composite x>z map is left out on purpose
const char* contra_fixture = R"json({
  "objects": ["x", "y", "z"],
  "arrows": [{"src": "x", "dst": "y"}, {"src": "y", "dst": "z"}, {"src": "x", "dst": "z"}],
  "variance": "contra",
  "complexes": {
    "x": {"dims": [1]},
    "y": {"dims": [1]},
    "z": {"dims": [2, 1], "diffs": [[[1], [-1]]]}
  },
  "maps": {
    "x>y": [[[1]]],
    "y>z": [[[1, 1]], []]
  }
})json";

const char* split_pass_fixture = R"json({
  "diagram": {
    "objects": ["a", "b"],
    "arrows": [{"src": "a", "dst": "b"}],
    "variance": "co",
    "complexes": {
      "a": {"dims": [1, 1], "diffs": [[[0]]]},
      "b": {"dims": [1, 1], "diffs": [[[0]]]}
    },
    "maps": {"a>b": [[[1]], [[1]]]}
  },
  "summands": [
    {
      "complexes": {"a": {"dims": [1]}, "b": {"dims": [1]}},
      "maps": {"a>b": [[[1]]]}
    },
    {
      "complexes": {"a": {"dims": [0, 1]}, "b": {"dims": [0, 1]}},
      "maps": {"a>b": [[], [[1]]]}
    }
  ],
  "witness": {
    "a": [[[1]], [[1]]],
    "b": [[[1]], [[1]]]
  }
})json";

// witness scaled by 2 at one object in degree 1: still a quasi-iso objectwise
// but the naturality square with the identity action breaks
const char* split_fail_fixture = R"json({
  "diagram": {
    "objects": ["a", "b"],
    "arrows": [{"src": "a", "dst": "b"}],
    "variance": "co",
    "complexes": {
      "a": {"dims": [1, 1], "diffs": [[[0]]]},
      "b": {"dims": [1, 1], "diffs": [[[0]]]}
    },
    "maps": {"a>b": [[[1]], [[1]]]}
  },
  "summands": [
    {
      "complexes": {"a": {"dims": [1]}, "b": {"dims": [1]}},
      "maps": {"a>b": [[[1]]]}
    },
    {
      "complexes": {"a": {"dims": [0, 1]}, "b": {"dims": [0, 1]}},
      "maps": {"a>b": [[], [[1]]]}
    }
  ],
  "witness": {
    "a": [[[1]], [[1]]],
    "b": [[[1]], [[2]]]
  }
})json";

}  // namespace

TEST_CASE("cli: tn output is frozen in all three formats") {
    auto table = run_cli("tn --n 4");
    CHECK(table.status == 0);
    CHECK(table.out == "tn n=4\ndegree  rank\n3       6\n");
    CHECK(table.err.empty());

    auto csv = run_cli("tn --n 4 --format csv");
    CHECK(csv.status == 0);
    CHECK(csv.out == "n,degree,rank\n4,3,6\n");

    auto js = run_cli("tn --n 4 --format json");
    CHECK(js.status == 0);
    std::string expected = R"json({
  "schema": "parcalc.tn/1",
  "subcommand": "tn",
  "input": {
    "n": 4
  },
  "result": {
    "ranks": [
      {
        "degree": 3,
        "rank": 6
      }
    ],
    "total": 6
  },
  "exit": 0
})json";
    expected += "\n";
    CHECK(js.out == expected);
}

TEST_CASE("cli: tlambda reports the concentration degree and rank") {
    auto r = run_cli("tlambda --blocks '1,2|3,4,5' --format csv");
    CHECK(r.status == 0);
    CHECK(r.out == "partition,excess,degree,rank\n\"1,2|3,4,5\",3,3,2\n");
}

TEST_CASE("cli: layer table csv matches the frozen rows") {
    auto r = run_cli("layers --k 3 --dim 3 --format csv");
    CHECK(r.status == 0);
    CHECK(r.out == "k,d,i,degree,rank\n3,3,0,0,1\n3,3,1,2,3\n3,3,2,4,2\n");

    auto one = run_cli("layers --k 3 --dim 3 --excess 1 --format csv");
    CHECK(one.status == 0);
    CHECK(one.out == "k,d,i,degree,rank\n3,3,1,2,3\n");

    auto empty = run_cli("layers --k 3 --dim 3 --excess 5 --format csv");
    CHECK(empty.status == 0);
    CHECK(empty.out == "k,d,i,degree,rank\n");
}

TEST_CASE("cli: collapse passes and separates computation from verdict") {
    auto csv = run_cli("collapse --k 5 --dim 3 --format csv");
    CHECK(csv.status == 0);
    CHECK(csv.out ==
          "k,d,degree,table_rank,oracle_rank,match\n"
          "5,3,0,1,1,1\n5,3,2,10,10,1\n5,3,4,35,35,1\n5,3,6,50,50,1\n5,3,8,24,24,1\n");

    auto js = run_cli("collapse --k 4 --dim 4 --format json");
    CHECK(js.status == 0);
    auto j = nlohmann::json::parse(js.out);
    CHECK(j["schema"] == "parcalc.collapse/1");
    CHECK(j["verdict"] == "pass");
    CHECK(j["exit"] == 0);
    CHECK(j["result"]["diff"].empty());
    CHECK(j["result"]["table"].size() == j["result"]["oracle"].size());
}

TEST_CASE("cli: goodmap reproduces the example classifications") {
    struct Case {
        const char* map;
        const char* cls;
    };
    const Case cases[] = {
        {"1:a,2:b,3:c,4:d", "good"},
        {"1:a,2:b,3:b,4:c", "good"},
        {"1:a,2:a,3:b,4:c", "bad"},
        {"1:a,2:b,3:a,4:b", "bad"},
    };
    for (const auto& c : cases) {
        auto r = run_cli(std::string("goodmap --blocks '1,2|3,4' --map '") + c.map +
                         "' --format csv");
        CHECK(r.status == 0);
        std::string expected =
            std::string("blocks,map,class\n\"1,2|3,4\",\"") + c.map + "\"," + c.cls + "\n";
        CHECK(r.out == expected);
    }
    auto table = run_cli("goodmap --blocks '1,2|3,4' --map '1:a,2:b,3:b,4:c'");
    CHECK(table.status == 0);
    CHECK(table.out == "goodmap blocks=1,2|3,4 map=1:a,2:b,3:b,4:c\nclass good\n");
}

TEST_CASE("cli: ek lists the skeletal objects of excess two") {
    auto r = run_cli("ek --k 2 --format json");
    CHECK(r.status == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["result"]["object_count"] == 4);
    std::vector<std::string> partitions;
    for (const auto& o : j["result"]["objects"]) partitions.push_back(o["partition"]);
    std::vector<std::string> expected{"1,2,3", "1,2|3,4", "1,3|2,4", "1,4|2,3"};
    CHECK(partitions == expected);
    auto cat = parcalc::build_ek(2);
    CHECK(j["result"]["morphism_count"] == cat.morphisms.size());
    CHECK(j["result"]["morphisms"].size() == cat.morphisms.size());
}

TEST_CASE("cli: holim of spec files with initial and terminal objects") {
    auto p1 = write_fixture("parcalc_fix_holim.json", holim_fixture);
    auto r1 = run_cli("holim --spec " + p1.string() + " --format csv");
    CHECK(r1.status == 0);
    CHECK(r1.out == "degree,rank\n0,1\n");

    auto p2 = write_fixture("parcalc_fix_contra.json", contra_fixture);
    auto r2 = run_cli("holim --spec " + p2.string() + " --format csv");
    CHECK(r2.status == 0);
    CHECK(r2.out == "degree,rank\n0,1\n");
}

TEST_CASE("cli: split-check verdicts drive the exit code") {
    auto pass = write_fixture("parcalc_fix_split_pass.json", split_pass_fixture);
    auto r = run_cli("split-check --spec " + pass.string() + " --format csv");
    CHECK(r.status == 0);
    CHECK(r.out == "degree,lhs_rank,rhs_rank\n0,1,1\n1,1,1\n");

    auto js = run_cli("split-check --spec " + pass.string() + " --format json");
    auto j = nlohmann::json::parse(js.out);
    CHECK(j["verdict"] == "pass");
    CHECK(j["result"]["problems"].empty());
    CHECK(j["result"]["diff"].empty());

    auto fail = write_fixture("parcalc_fix_split_fail.json", split_fail_fixture);
    auto rf = run_cli("split-check --spec " + fail.string() + " --format json");
    CHECK(rf.status == 1);
    auto jf = nlohmann::json::parse(rf.out);
    CHECK(jf["verdict"] == "fail");
    CHECK(jf["exit"] == 1);
    REQUIRE(jf["result"]["problems"].size() == 1);
    std::string problem = jf["result"]["problems"][0];
    CHECK(problem.find("witness") != std::string::npos);
}

TEST_CASE("cli: usage errors exit two with a one-line diagnostic") {
    const char* bad[] = {
        "tn",
        "tn --n 9",
        "tn --n 4 --format xml",
        "layers --k 11 --dim 3",
        "layers --k 3 --dim 17",
        "ek --k 4",
        "goodmap --blocks '1,2|3' --map '1:a,2:b'",
        "goodmap --blocks '1,2|' --map '1:a,2:b,3:c'",
        "holim --spec /definitely/not/there.json",
        "frobnicate --k 2",
        "",
    };
    for (const char* args : bad) {
        auto r = run_cli(args);
        CHECK(r.status == 2);
        CHECK(r.out.empty());
        CHECK(count_lines(r.err) == 1);
    }
    auto help = run_cli("--help");
    CHECK(help.status == 0);
    CHECK(help.err.empty());
    CHECK(help.out.find("SUBCOMMAND") != std::string::npos);
}

TEST_CASE("cli: malformed spec files are rejected before any verdict") {
    auto missing = write_fixture("parcalc_fix_missing_map.json", R"json({
  "objects": ["a", "b"],
  "arrows": [{"src": "a", "dst": "b"}],
  "variance": "co",
  "complexes": {"a": {"dims": [1]}, "b": {"dims": [1]}}
})json");
    auto r = run_cli("holim --spec " + missing.string());
    CHECK(r.status == 2);
    CHECK(r.err.find("missing map for arrow 'a>b'") != std::string::npos);

    auto cyclic = write_fixture("parcalc_fix_cycle.json", R"json({
  "objects": ["a", "b"],
  "arrows": [{"src": "a", "dst": "b"}, {"src": "b", "dst": "a"}],
  "variance": "co",
  "complexes": {"a": {"dims": [1]}, "b": {"dims": [1]}},
  "maps": {"a>b": [[[1]]], "b>a": [[[1]]]}
})json");
    auto rc = run_cli("holim --spec " + cyclic.string());
    CHECK(rc.status == 2);
    CHECK(count_lines(rc.err) == 1);

    auto notjson = write_fixture("parcalc_fix_garbage.json", "{]");
    auto rg = run_cli("holim --spec " + notjson.string());
    CHECK(rg.status == 2);
    CHECK(count_lines(rg.err) == 1);
}

TEST_CASE("cli: reruns are byte-identical and --out mirrors stdout") {
    auto a = run_cli("collapse --k 5 --dim 3 --format json");
    auto b = run_cli("collapse --k 5 --dim 3 --format json");
    CHECK(a.out == b.out);

    auto out_path = std::filesystem::temp_directory_path() / "parcalc_fix_layers_out.csv";
    std::filesystem::remove(out_path);
    auto direct = run_cli("layers --k 4 --dim 3 --format csv");
    auto filed = run_cli("layers --k 4 --dim 3 --format csv --out " + out_path.string());
    CHECK(filed.status == 0);
    CHECK(filed.out.empty());
    CHECK(slurp(out_path) == direct.out);
    std::filesystem::remove(out_path);
}

TEST_CASE("cli: PARCALC_THREADS caps workers without changing output") {
    auto plain = run_cli("layers --k 5 --dim 3 --format csv");
    auto capped = run_cli("layers --k 5 --dim 3 --format csv", "PARCALC_THREADS=3 ");
    CHECK(capped.status == 0);
    CHECK(capped.out == plain.out);
    auto bad = run_cli("layers --k 5 --dim 3", "PARCALC_THREADS=zero ");
    CHECK(bad.status == 2);
    CHECK(count_lines(bad.err) == 1);
}
