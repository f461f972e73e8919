#include <catch2/catch_amalgamated.hpp>

#include "spinflip/config.hpp"

using namespace spinflip;

static const char* kSample = R"(
# experiment description
[model]
type = chain
n = 6
bond_mu = 0.3        # trailing comment
region_first = 3

[run]
betas = 0.25 0.5 1.0
suites = lemma1 lemma2
verbose = true
)";

TEST_CASE("config parsing: sections, comments, lists") {
    ConfigTree c = ConfigTree::parse(kSample);
    REQUIRE(c.get("model.type") == "chain");
    REQUIRE(c.get_int("model.n") == 6);
    REQUIRE(c.get_double("model.bond_mu") == Catch::Approx(0.3));
    REQUIRE(c.get_doubles("run.betas") == std::vector<double>{0.25, 0.5, 1.0});
    REQUIRE(c.get_words("run.suites") == std::vector<std::string>{"lemma1", "lemma2"});
    REQUIRE(c.get_bool("run.verbose", false));
    REQUIRE(c.get_bool("run.missing", true));
    REQUIRE(c.get("run.absent", "fallback") == "fallback");
    REQUIRE(c.get_int("model.other", 7) == 7);
    REQUIRE_FALSE(c.has("model.nope"));
}

TEST_CASE("config parsing errors") {
    REQUIRE_THROWS(ConfigTree::parse("[broken\nk = v\n"));
    REQUIRE_THROWS(ConfigTree::parse("just a line without equals\n"));
    REQUIRE_THROWS(ConfigTree::parse(" = novalue\n"));
    ConfigTree c = ConfigTree::parse("x = 1.5abc\ny = yes\n");
    REQUIRE_THROWS(c.get_double("x"));
    REQUIRE_THROWS(c.get_int("x"));
    REQUIRE_THROWS(c.get("missing"));
    REQUIRE_THROWS(ConfigTree::parse("b = maybe\n").get_bool("b", false));
}

TEST_CASE("repeated keys accumulate") {
    ConfigTree c = ConfigTree::parse("row = 1\nrow = 2\nrow = 3\n");
    REQUIRE(c.get_all("row") == std::vector<std::string>{"1", "2", "3"});
    REQUIRE(c.get("row") == "3");  // scalar access sees the last value
}

TEST_CASE("chain model from config") {
    ConfigTree c = ConfigTree::parse(kSample);
    InteractionModel m = model_from_config(c);
    REQUIRE(m.n_sites() == 6);
    REQUIRE(m.n_interactions() == 5);
    REQUIRE(m.region_size() == 3);
    REQUIRE(m.interior().size() == 2);  // bonds (0,1) and (1,2)
    REQUIRE(m.interactions()[0].mu == Catch::Approx(0.3));
}

TEST_CASE("ea2d model from config") {
    ConfigTree c = ConfigTree::parse(
        "[model]\ntype = ea2d\nside = 3\nmu = 0.5\nregion_sites = 0 1 3 4\n");
    InteractionModel m = model_from_config(c);
    REQUIRE(m.n_sites() == 9);
    REQUIRE(m.n_interactions() == 18);
    REQUIRE(m.region_size() == 4);
    REQUIRE(m.interior().size() == 4);  // the four bonds inside the 2x2 block
}

TEST_CASE("explicit model from config") {
    ConfigTree c = ConfigTree::parse(
        "[model]\n"
        "type = explicit\n"
        "n = 2\n"
        "interaction = 0 0.3 1.0\n"
        "interaction = 0 1 0.2 0.8\n"
        "interaction = 1 0.4 0.6\n"
        "region_sites = 0\n");
    InteractionModel m = model_from_config(c);
    REQUIRE(m.n_sites() == 2);
    REQUIRE(m.n_interactions() == 3);
    REQUIRE(m.interior().size() == 1);
    REQUIRE(m.interactions()[1].sites == std::vector<int>{0, 1});
    REQUIRE(m.interactions()[1].delta2 == Catch::Approx(0.8));
    REQUIRE(m.interactions()[2].mu == Catch::Approx(0.4));
}

TEST_CASE("unknown model type throws") {
    ConfigTree c = ConfigTree::parse("[model]\ntype = kagome\n");
    REQUIRE_THROWS(model_from_config(c));
}
