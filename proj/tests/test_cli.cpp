// Integration tests that drive the sdglab binary end to end on the shipped
// fixtures. SDGLAB_BIN and FIXTURES_DIR are injected by CMake.
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(SDGLAB_BIN) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path write_config(const fs::path& dir, const std::string& out_dir) {
    fs::create_directories(dir);
    fs::path cfg = dir / "run.cfg";
    std::ofstream f(cfg);
    f << "[inputs]\n"
      << "corpus = " << FIXTURES_DIR << "/corpus.jsonl\n"
      << "corpus_format = jsonl\n"
      << "taxonomy = " << FIXTURES_DIR << "/taxonomy.csv\n"
      << "assignments = " << FIXTURES_DIR << "/assignments.csv\n"
      << "systems = " << FIXTURES_DIR << "/systems.csv\n"
      << "[output]\n"
      << "dir = " << out_dir << "\n"
      << "[params]\n"
      << "level = paper\n"
      << "workers = 2\n";
    return cfg;
}

}  // namespace

TEST_CASE("cli pipeline on the shipped fixtures") {
    fs::path work = fs::temp_directory_path() / "sdglab_cli";
    fs::remove_all(work);
    fs::path out = work / "out";
    fs::path cfg = write_config(work, out.string());

    CHECK(run("validate --config " + cfg.string()) == 0);

    REQUIRE(run("label --config " + cfg.string()) == 0);
    CHECK(fs::exists(out / "labels.csv"));
    CHECK(fs::exists(out / "traces.csv"));
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(fs::file_size(out / "labels.csv") > 0);
    CHECK(fs::file_size(out / "traces.csv") > 0);

    CHECK(run("report coverage --config " + cfg.string()) == 0);
    CHECK(fs::exists(out / "coverage.csv"));

    CHECK(run("report similarity --config " + cfg.string() + " --level paper --clamp 0.5") == 0);
    CHECK(fs::exists(out / "similarity_paper.csv"));
    CHECK(fs::exists(out / "similarity_paper.svg"));

    CHECK(run("report similarity --config " + cfg.string() + " --level topic") == 0);
    CHECK(fs::exists(out / "similarity_topic.csv"));

    CHECK(run("report diversity --config " + cfg.string()) == 0);
    CHECK(fs::exists(out / "diversity.csv"));

    CHECK(run("report topics --config " + cfg.string() + " --system S1 --sdg 3 --top-k 5") == 0);
    CHECK(fs::exists(out / "topics_S1_sdg3.csv"));

    CHECK(run("report cooccur --config " + cfg.string() + " --system S2 --sdg 10 --min-weight 5") == 0);
    CHECK(fs::exists(out / "cooccur_S2_sdg10.net"));
    CHECK(fs::exists(out / "cooccur_S2_sdg10_map.txt"));
    CHECK(fs::exists(out / "cooccur_S2_sdg10_network.txt"));

    SUBCASE("reruns are byte-identical apart from the manifest") {
        auto labels1 = slurp(out / "labels.csv");
        auto coverage1 = slurp(out / "coverage.csv");
        auto sim1 = slurp(out / "similarity_paper.csv");
        REQUIRE(run("label --config " + cfg.string()) == 0);
        REQUIRE(run("report coverage --config " + cfg.string()) == 0);
        REQUIRE(run("report similarity --config " + cfg.string() + " --level paper --clamp 0.5") == 0);
        CHECK(slurp(out / "labels.csv") == labels1);
        CHECK(slurp(out / "coverage.csv") == coverage1);
        CHECK(slurp(out / "similarity_paper.csv") == sim1);
    }

    SUBCASE("similarity csv marks empty SDG-17 cells as NA") {
        // no fixture system except S2 has an SDG-17 query, and S2's never fires
        std::string sim = slurp(out / "similarity_paper.csv");
        CHECK(sim.find(",NA") != std::string::npos);
    }
}

TEST_CASE("cli error exit codes") {
    fs::path work = fs::temp_directory_path() / "sdglab_cli_err";
    fs::remove_all(work);
    fs::create_directories(work);

    SUBCASE("missing corpus path -> 2") {
        fs::path cfg = work / "bad.cfg";
        std::ofstream(cfg) << "[inputs]\ncorpus = /nonexistent/corpus.jsonl\nsystems = "
                           << FIXTURES_DIR << "/systems.csv\n";
        CHECK(run("label --config " + cfg.string()) == 2);
    }

    SUBCASE("empty systems file -> 2") {
        fs::path empty = work / "empty_systems.csv";
        std::ofstream(empty) << "system,sdg,query_id,query\n";
        fs::path cfg = work / "empty.cfg";
        std::ofstream(cfg) << "[inputs]\ncorpus = " << FIXTURES_DIR << "/corpus.jsonl\nsystems = "
                           << empty.string() << "\n[output]\ndir = " << (work / "out").string()
                           << "\n";
        CHECK(run("label --config " + cfg.string()) == 2);
    }

    SUBCASE("invalid systems content -> 3") {
        fs::path bad = work / "bad_systems.csv";
        std::ofstream(bad) << "system,sdg,query_id,query\nS1,18,q1,poverty\n";
        fs::path cfg = work / "badsys.cfg";
        std::ofstream(cfg) << "[inputs]\ncorpus = " << FIXTURES_DIR << "/corpus.jsonl\nsystems = "
                           << bad.string() << "\n[output]\ndir = " << (work / "out").string()
                           << "\n";
        CHECK(run("label --config " + cfg.string()) == 3);
    }

    SUBCASE("unknown report name -> 2") {
        fs::path cfg = write_config(work / "ok", (work / "ok" / "out").string());
        CHECK(run("report bogus --config " + cfg.string()) == 2);
    }

    SUBCASE("report before label -> 2") {
        fs::path cfg = write_config(work / "fresh", (work / "fresh" / "out").string());
        CHECK(run("report coverage --config " + cfg.string()) == 2);
    }

    SUBCASE("no config -> 2") { CHECK(run("label") == 2); }
}

TEST_CASE("cli determinism across worker counts") {
    fs::path work = fs::temp_directory_path() / "sdglab_cli_workers";
    fs::remove_all(work);

    fs::path out1 = work / "out1";
    fs::path cfg1 = write_config(work / "c1", out1.string());
    REQUIRE(run("label --config " + cfg1.string() + " --workers 1") == 0);

    fs::path out8 = work / "out8";
    fs::path cfg8 = write_config(work / "c8", out8.string());
    REQUIRE(run("label --config " + cfg8.string() + " --workers 8") == 0);

    CHECK(slurp(out1 / "labels.csv") == slurp(out8 / "labels.csv"));
    CHECK(slurp(out1 / "traces.csv") == slurp(out8 / "traces.csv"));
}
