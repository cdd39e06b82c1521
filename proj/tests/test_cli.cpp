#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "modlab/report.hpp"
#include "modlab/set_library.hpp"

using namespace modlab;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = "env -u MODLAB_OUT " + std::string(MODLAB_CLI) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
        out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path workdir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "modlab_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("unknown subcommand") {
    const auto r = run("bogus");
    CHECK(r.code == 64);
    CHECK(r.out.find("Usage") != std::string::npos);
}

TEST_CASE("gen-set prints the generation") {
    const auto r = run("gen-set cantor 1/3 --depth 4");
    CHECK(r.code == 0);
    CHECK(r.out.find("16 intervals") != std::string::npos);
    CHECK(run("gen-set cantor 2 --depth 4").code == 2);
}

TEST_CASE("annulus modulus from the command line") {
    const auto r = run("modulus --annulus 1 2.71828 --n 257");
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    double value = 0.0;
    for (std::string word; in >> word;)
        try {
            std::size_t used = 0;
            const double v = std::stod(word, &used);
            if (used == word.size() && v > 1.0) {
                value = v;
                break;
            }
        } catch (const std::exception&) {
        }
    CHECK(value == doctest::Approx(2 * std::numbers::pi).epsilon(0.03));

    const auto j = run("modulus --rect 2 1 --n 65 --json");
    REQUIRE(j.code == 0);
    const auto parsed = nlohmann::json::parse(j.out);
    CHECK(parsed["value"].get<double>() == doctest::Approx(0.5).epsilon(0.01));
    CHECK(parsed["solver"] == "conductance");
}

TEST_CASE("weight PGM vanishes exactly on the mask") {
    const auto dir = workdir("weight");
    const auto mask_path = dir / "set.mask";
    REQUIRE(run("gen-set cantor_product 1/3 --depth 2 --n 65 --out " + mask_path.string()).code == 0);
    REQUIRE(run("distance --mask " + mask_path.string() + " --out " + (dir / "delta.csv").string()).code == 0);
    REQUIRE(run("weight --field " + (dir / "delta.csv").string() + " --kind lemma35 --out " +
                (dir / "omega.pgm").string())
                .code == 0);
    const auto mask = load_mask(mask_path);
    const std::string pgm = read_text(dir / "omega.pgm");
    std::size_t pos = 0;
    for (int line = 0; line < 4; ++line)
        pos = pgm.find('\n', pos) + 1;
    const Grid& g = mask.grid();
    REQUIRE(pgm.size() == pos + 2 * g.size());
    int mismatches = 0;
    for (int row = 0; row < g.ny(); ++row)
        for (int i = 0; i < g.nx(); ++i) {
            const std::size_t at = pos + 2 * (static_cast<std::size_t>(row) * g.nx() + i);
            const bool zero = pgm[at] == 0 && pgm[at + 1] == 0;
            mismatches += zero != mask.at(i, g.ny() - 1 - row);
        }
    CHECK(mismatches == 0);
}

TEST_CASE("run with an empty set") {
    const auto dir = workdir("empty");
    save_mask(PixelMask(Grid::square({0, 0}, 1.0, 17)), dir / "empty.mask");
    write_text(dir / "empty.cfg", "[experiment]\nname = empty\n[set]\nkind = raw_mask\nmask = empty.mask\n"
                                  "[deficiency]\nenabled = true\nresolutions = 9, 17\n[output]\ndir = " +
                                      (dir / "out").string() + "\n");
    const auto r = run("run " + (dir / "empty.cfg").string());
    CHECK(r.code == 0);
    const auto csv = read_text(dir / "out" / "empty_deficiency.csv");
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "set,depth,quad_id,n,mod_full,mod_removed,ratio");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.substr(line.rfind(',') + 1) == "1");
        ++rows;
    }
    CHECK(rows == 12);
}

TEST_CASE("invalid config exits 2 naming the field") {
    const auto dir = workdir("invalid");
    write_text(dir / "bad.cfg", "[set]\nkind = cantor_line\n[deficiency]\nenabled = true\nresolutions = 64, 32\n");
    const auto r = run("run " + (dir / "bad.cfg").string());
    CHECK(r.code == 2);
    CHECK(r.out.find("resolutions must increase") != std::string::npos);
    CHECK(r.out.find("deficiency.resolutions") != std::string::npos);
    CHECK(run("run " + (dir / "missing.cfg").string()).code == 2);
}

TEST_CASE("non-convergence exits 3 and still writes reports") {
    const auto dir = workdir("capped");
    write_text(dir / "capped.cfg", "[experiment]\nname = capped\n[set]\nkind = cantor_line\ndepths = 2\n"
                                   "[battery]\nquads = frame_2\n[reciprocality]\nenabled = true\nresolutions = 17\n"
                                   "[solver]\ncp_max_paths = 2\ncp_paths_per_round = 1\n[output]\ndir = " +
                                       (dir / "out").string() + "\n");
    const auto r = run("run " + (dir / "capped.cfg").string());
    CHECK(r.code == 3);
    CHECK(r.out.find("frame_2") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "capped_reciprocality.json"));
    CHECK(fs::exists(dir / "out" / "capped_reciprocality.csv"));
}

TEST_CASE("report merges cell files in any order") {
    const auto dir = workdir("report");
    write_text(dir / "a.cfg", "[experiment]\nname = a\n[set]\nkind = cantor_product\nratio = 1/2\ndepths = 2\n"
                              "[battery]\nquads = h_cross\n[deficiency]\nenabled = true\nresolutions = 9, 17\n"
                              "[dimension]\nenabled = true\nresolutions = 33\n[output]\ndir = " +
                                  (dir / "out").string() + "\n");
    REQUIRE(run("run " + (dir / "a.cfg").string()).code == 0);
    const auto d = (dir / "out" / "a_deficiency.json").string(), m = (dir / "out" / "a_dimension.json").string();
    REQUIRE(run("report " + d + " " + m + " --out " + (dir / "one.json").string()).code == 0);
    REQUIRE(run("report " + m + " " + d + " --out " + (dir / "two.json").string()).code == 0);
    CHECK(read_text(dir / "one.json") == read_text(dir / "two.json"));
    const auto summary = nlohmann::json::parse(read_text(dir / "one.json"));
    CHECK(summary["total_cells"] == 3);
    write_text(dir / "junk.json", "{ not json");
    CHECK(run("report " + (dir / "junk.json").string()).code == 2);
}

TEST_CASE("single experiment subcommands") {
    const auto dir = workdir("single");
    write_text(dir / "s.cfg", "[experiment]\nname = s\n[set]\nkind = cantor_line\ndepths = 3\n"
                              "[battery]\nquads = frame_2\n[deficiency]\nenabled = true\nresolutions = 9\n"
                              "[output]\ndir = " +
                                  (dir / "out").string() + "\n");
    CHECK(run("deficiency " + (dir / "s.cfg").string()).code == 0);
    CHECK(fs::exists(dir / "out" / "s_deficiency.csv"));
    CHECK(run("dimension " + (dir / "s.cfg").string()).code == 2);
}
