#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "isac_otfs/config.hpp"

using namespace isac_otfs;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, EmptyDocumentGivesDefaults) {
    const auto cfg = parse_config("{}");
    EXPECT_EQ(cfg.modem.N, 30u);
    EXPECT_EQ(cfg.modem.M, 128u);
    EXPECT_EQ(cfg.array.n_tx, 64u);
    EXPECT_EQ(cfg.scenario.vehicles.size(), 4u);
    EXPECT_EQ(cfg.scenario.instants, 200u);
    EXPECT_DOUBLE_EQ(cfg.scenario.dt, 0.02);
    EXPECT_DOUBLE_EQ(cfg.sensing.noise_var, 1.0);
    EXPECT_EQ(cfg.uplink.guard_kmax, 6u);
    EXPECT_EQ(cfg.uplink.guard_lmax, 10u);
    EXPECT_EQ(cfg.run.seeds, 20u);
    EXPECT_EQ(cfg.schemes.size(), 4u);
    EXPECT_TRUE(cfg.has_metric(Metric::Uplink));
}

TEST(Config, ReadsNestedValues) {
    const auto cfg = parse_config(R"({
        "scenario": {"vehicles": [{"position": [3, 40], "rcs": 0.5}], "instants": 12, "dt": 0.01},
        "modem": {"N": 16, "M": 64},
        "array": {"n_tx": 32, "n_rx": 16},
        "sensing": {"noise_var": 0.25, "angle_refine": 2, "burn_in": 3},
        "downlink": {"snr_db": [1, 2], "modulation": "qpsk"},
        "uplink": {"channel": "geometric", "pilot_cell": [2, 5], "guard_kmax": 2, "guard_lmax": 4},
        "run": {"seed": 99, "seeds": 3, "threads": 2, "metrics": ["downlink"]},
        "schemes": ["perfect_csi"]
    })");
    ASSERT_EQ(cfg.scenario.vehicles.size(), 1u);
    EXPECT_EQ(cfg.scenario.vehicles[0].position, (Vec2{3, 40}));
    EXPECT_DOUBLE_EQ(cfg.scenario.vehicles[0].rcs, 0.5);
    EXPECT_EQ(cfg.modem.N, 16u);
    EXPECT_EQ(cfg.array.n_rx, 16u);
    EXPECT_EQ(cfg.sensing.angle_refine, 2u);
    EXPECT_EQ(cfg.downlink.snr_db, (std::vector<double>{1, 2}));
    EXPECT_EQ(cfg.uplink.channel, UplinkChannelMode::Geometric);
    ASSERT_TRUE(cfg.uplink.pilot_cell.has_value());
    EXPECT_EQ(cfg.uplink.pilot_cell->second, 5u);
    EXPECT_EQ(cfg.run.seed, 99u);
    EXPECT_FALSE(cfg.has_metric(Metric::Tracking));
    EXPECT_TRUE(cfg.has_scheme(Scheme::PerfectCsi));
    EXPECT_FALSE(cfg.has_scheme(Scheme::Proposed));
}

TEST(Config, UnknownKeysAreRejectedAtEveryLevel) {
    EXPECT_NE(error_of(R"({"bogus": 1})").find("unknown key 'bogus'"), std::string::npos);
    EXPECT_NE(error_of(R"({"modem": {"N": 30, "K": 1}})").find("modem.K"), std::string::npos);
    EXPECT_NE(error_of(R"({"scenario": {"vehicles": [{"position": [1, 2], "colour": "red"}]}})")
                  .find("scenario.vehicles[0].colour"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"uplink": {"spa_iters": 3}})").find("uplink.spa_iters"), std::string::npos);
}

TEST(Config, WrongTypesNameTheField) {
    EXPECT_NE(error_of(R"({"modem": {"N": "thirty"}})").find("modem.N"), std::string::npos);
    EXPECT_NE(error_of(R"({"modem": {"N": -3}})").find("modem.N"), std::string::npos);
    EXPECT_NE(error_of(R"({"sensing": {"noise_var": [1]}})").find("sensing.noise_var"), std::string::npos);
    EXPECT_NE(error_of(R"({"scenario": {"rsu_position": [1]}})").find("scenario.rsu_position"), std::string::npos);
    EXPECT_NE(error_of(R"({"modem": 5})").find("modem"), std::string::npos);
}

TEST(Config, InvalidValuesAreRejected) {
    EXPECT_NE(error_of(R"({"scenario": {"vehicles": []}})").find("scenario.vehicles"), std::string::npos);
    EXPECT_NE(error_of(R"({"scenario": {"dt": 0}})").find("scenario.dt"), std::string::npos);
    EXPECT_NE(error_of(R"({"sensing": {"burn_in": 500}})").find("sensing.burn_in"), std::string::npos);
    EXPECT_NE(error_of(R"({"uplink": {"guard_kmax": 10}})").find("guard"), std::string::npos);
    EXPECT_NE(error_of(R"({"uplink": {"pilot_cell": [30, 0]}})").find("uplink.pilot_cell"), std::string::npos);
    EXPECT_NE(error_of(R"({"uplink": {"channel": "fancy"}})").find("uplink.channel"), std::string::npos);
    EXPECT_NE(error_of(R"({"downlink": {"modulation": "16qam"}})").find("modulation"), std::string::npos);
    EXPECT_NE(error_of(R"({"run": {"metrics": ["radar"]}})").find("run.metrics"), std::string::npos);
    EXPECT_NE(error_of(R"({"schemes": ["magic"]})").find("magic"), std::string::npos);
    EXPECT_NE(error_of(R"({"scenario": {"vehicles": [{"rcs": 1}]}})").find("position"), std::string::npos);
    EXPECT_NE(error_of(R"({"scenario": {"vehicles": [{"position": [0, 0]}]}})").find("RSU"), std::string::npos);
}

TEST(Config, MalformedJsonIsAConfigError) { EXPECT_NE(error_of("{\"modem\": ").find("JSON"), std::string::npos); }

TEST(Config, SchemeNamesRoundTrip) {
    for (Scheme s : {Scheme::Proposed, Scheme::PerfectCsi, Scheme::SpaNoUncertainty, Scheme::GuardSpaceBaseline})
        EXPECT_EQ(parse_scheme(scheme_name(s)), s);
    EXPECT_THROW(parse_scheme("nope"), ConfigError);
}

TEST(Config, LoadFromFile) {
    const auto path = std::filesystem::temp_directory_path() / "isac_otfs_test_config.json";
    {
        std::ofstream f(path);
        f << R"({"run": {"seed": 7}})";
    }
    EXPECT_EQ(load_config(path.string()).run.seed, 7u);
    std::filesystem::remove(path);
    EXPECT_THROW(load_config(path.string()), ConfigError);
}

TEST(Config, Fnv1aKnownVectors) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Config, ShippedConfigsParse) {
    const std::filesystem::path dir = std::filesystem::path(ISAC_OTFS_SOURCE_DIR) / "configs";
    std::size_t n = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".json") {
            SCOPED_TRACE(e.path().string());
            EXPECT_NO_THROW(load_config(e.path().string()));
            ++n;
        }
    EXPECT_GE(n, 1u);
}
