#include <doctest.h>

#include <cstdlib>

#include "modlab/config.hpp"
#include "modlab/errors.hpp"

using namespace modlab;

namespace {

const char* kBase = R"(# comment
[experiment]
name = probe

[set]
kind = cantor_line
ratio = 1/3
depths = 2, 4

[deficiency]
enabled = true
resolutions = 17, 33
)";

std::string field_of(const std::string& text) {
    try {
        parse_config(text).validate();
    } catch (const ParameterError& e) {
        return e.field();
    }
    return "";
}

struct NoEnv {
    NoEnv() { unsetenv("MODLAB_OUT"); }
};

} // namespace

TEST_CASE("number parsing") {
    CHECK(parse_real("1/3", "x") == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(parse_real(" 0.25 ", "x") == 0.25);
    CHECK(parse_real("1e-3", "x") == 0.001);
    CHECK_THROWS_WITH_AS(parse_real("abc", "set.ratio"), doctest::Contains("set.ratio"), ParameterError);
    CHECK_THROWS_AS(parse_real("1/0", "x"), ParameterError);
    CHECK(parse_int_list("17, 33,65", "r") == std::vector<int>{17, 33, 65});
    CHECK_THROWS_AS(parse_int("3.5", "n"), ParameterError);
    CHECK(parse_point("0.5, -1", "p") == Point{0.5, -1.0});
    CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("parse a minimal config") {
    NoEnv guard;
    const auto cfg = parse_config(kBase);
    CHECK(cfg.name == "probe");
    CHECK(cfg.set.kind == SetKind::cantor_line);
    CHECK(cfg.set.ratio == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(cfg.depths == std::vector<int>{2, 4});
    CHECK(cfg.deficiency.enabled);
    CHECK_FALSE(cfg.reciprocality.enabled);
    CHECK(cfg.deficiency.resolutions == std::vector<int>{17, 33});
    CHECK(cfg.output_dir == "out");
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("shared resolutions fill experiments without their own") {
    NoEnv guard;
    const auto cfg = parse_config(std::string(kBase) + "[grid]\nresolutions = 9, 17\n[dimension]\nenabled = yes\n");
    CHECK(cfg.dimension.resolutions == std::vector<int>{9, 17});
    CHECK(cfg.deficiency.resolutions == std::vector<int>{17, 33});
}

TEST_CASE("validation errors name the field") {
    NoEnv guard;
    const std::string bad_res = R"([set]
kind = cantor_line
[deficiency]
enabled = true
resolutions = 64, 32
)";
    CHECK_THROWS_WITH_AS(parse_config(bad_res).validate(), doctest::Contains("resolutions must increase"),
                         ParameterError);
    CHECK(field_of(bad_res) == "deficiency.resolutions");

    const std::string bad_depths = std::string(kBase).replace(std::string(kBase).find("2, 4"), 4, "4, 2");
    CHECK(field_of(bad_depths) == "set.depths");

    CHECK(field_of(std::string(kBase) + "[solver]\ncp_tol = 0\n") == "solver.cp_tol");
    CHECK(field_of(std::string(kBase) + "[solver]\ncg_tol = -1\n") == "solver.cg_tol");
    const std::string bad_ratio = std::string(kBase).replace(std::string(kBase).find("1/3"), 3, "3/2");
    CHECK(field_of(bad_ratio) == "set.ratio");
    CHECK(field_of(std::string(kBase) + "[sett]\nkind = x\n") == "sett.kind");
    CHECK(field_of(std::string(kBase) + "[weight]\nkind = gaussian\n") == "weight.kind");
    CHECK(field_of("[set]\nkind = cantor_line\n") == "experiments");
    CHECK(field_of("[set]\nkind = circle\n[dimension]\nenabled = true\nresolutions = 9, 17\n") ==
          "dimension.enabled");
    CHECK_THROWS_WITH_AS(parse_config("kind = x\n"), doctest::Contains("outside any section"), ParameterError);
}

TEST_CASE("duplicate keys are rejected") {
    CHECK_THROWS_WITH_AS(KeyValueFile::parse("[a]\nx = 1\nx = 2\n"), doctest::Contains("duplicate"), ParameterError);
    const auto kv = KeyValueFile::parse("[a]\nx = 1 # trailing\n\n[b]\ny=2\n");
    CHECK(kv.get("a.x") == "1");
    CHECK(kv.line("b.y") == 5);
}

TEST_CASE("config echo carries every tolerance") {
    NoEnv guard;
    const auto cfg = parse_config(std::string(kBase) + "[solver]\ncp_tol = 1e-4\n");
    const auto echo = config_echo(cfg);
    for (const char* key : {"solver.cg_tol", "solver.cg_max_iter_factor", "solver.cp_tol", "solver.cp_inner_tol",
                            "solver.cp_max_paths", "solver.cp_paths_per_round", "set.ratio", "set.depths",
                            "weight.kind", "deficiency.resolutions", "battery.quads"})
        CHECK(echo.count(key) == 1);
    CHECK(echo.at("solver.cp_tol") == "0.0001");
    CHECK(echo.at("solver.cp_inner_tol") == format_real(1e-5));
    CHECK(echo.count("output.dir") == 0);
}

TEST_CASE("fat cantor echo lists the default gaps") {
    NoEnv guard;
    const auto cfg = parse_config("[set]\nkind = fat_cantor\ndepths = 3\n[deficiency]\nenabled = true\nresolutions = 9\n");
    CHECK(config_echo(cfg).at("set.gaps") == "0.25, 0.0625, 0.015625");
}

TEST_CASE("MODLAB_OUT replaces the output directory") {
    setenv("MODLAB_OUT", "/tmp/modlab_env_out", 1);
    const auto cfg = parse_config(std::string(kBase) + "[output]\ndir = elsewhere\n");
    unsetenv("MODLAB_OUT");
    CHECK(cfg.output_dir == "/tmp/modlab_env_out");
    CHECK(parse_config(std::string(kBase) + "[output]\ndir = elsewhere\n").output_dir == "elsewhere");
}

TEST_CASE("shipped flagship config validates") {
    NoEnv guard;
    const auto cfg = load_config(MODLAB_CONFIGS "/cantor_thirds.cfg");
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.set.kind == SetKind::cantor_line);
    CHECK(cfg.deficiency.enabled);
    CHECK(cfg.reciprocality.enabled);
    CHECK(cfg.dimension.enabled);
}
