#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <functional>

#include "cqad/io/config.hpp"
#include "cqad/io/tables.hpp"

using namespace cqad;
using io::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cqad_test_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no cqad::Error thrown";
    return ErrorCode::InvalidArgument;
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Config, DefaultProfileValues) {
    const auto c = io::parse_config_text("{}");
    EXPECT_NEAR(c.device.ladder.at("b").g_m, khz_to_angular(257.0), 1e-12);
    EXPECT_NEAR(c.device.ladder.fsr, to_angular(12.62955), 1e-12);
    EXPECT_NEAR(c.device.qubit.alpha, to_angular(218.0), 1e-12);
    EXPECT_FALSE(c.drive.has_value());
    EXPECT_DOUBLE_EQ(c.operating_point.modulation_depth, 0.61);
    EXPECT_NEAR(c.three_mode.modulation_depth, 1.4347, 1e-3);
}

TEST(Config, EmptyFileIsParseError) {
    EXPECT_EQ(code_of([] { io::parse_config_text(""); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of([] { io::parse_config_text("  \n "); }), ErrorCode::ParseError);
}

TEST(Config, SyntaxErrorReportsLocation) {
    const auto msg = message_of([] { io::parse_config_text("{\n  \"rng_seed\": 1,\n  oops\n}", "cfg.json"); });
    EXPECT_NE(msg.find("cfg.json:3:"), std::string::npos) << msg;
}

TEST(Config, NegativeT1IsValidationError) {
    const std::string text = R"({"device": {"qubit": {"t1_us": -1}}})";
    EXPECT_EQ(code_of([&] { io::parse_config_text(text); }), ErrorCode::ValidationError);
    EXPECT_NE(message_of([&] { io::parse_config_text(text); }).find("t1 > 0"), std::string::npos);
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_EQ(code_of([] { io::parse_config_text(R"({"rng_sed": 1})"); }), ErrorCode::ParseError);
    const auto msg = message_of([] { io::parse_config_text(R"({"hom": {"taus": [1]}})"); });
    EXPECT_NE(msg.find("hom.taus"), std::string::npos) << msg;
}

TEST(Config, WrongTypeNamesField) {
    const auto msg = message_of([] { io::parse_config_text(R"({"chevron": {"delta_points": "many"}})"); });
    EXPECT_NE(msg.find("chevron.delta_points"), std::string::npos) << msg;
}

TEST(Config, DriveAndOperatingPointExclusive) {
    const std::string text = R"({"drive": {"omega_1_mhz": 6450, "omega_2_mhz": 6462.6, "Omega_1_mhz": 50,
                                 "Omega_2_mhz": 50, "phi": 0}, "operating_point": {}})";
    EXPECT_EQ(code_of([&] { io::parse_config_text(text); }), ErrorCode::ValidationError);
}

TEST(Config, ExplicitDriveIsUsedVerbatim) {
    const auto c = io::parse_config_text(R"({"drive": {"omega_1_mhz": 6450, "omega_2_mhz": 6462.6,
                                             "Omega_1_mhz": 50, "Omega_2_mhz": 40, "phi": 0.25}})");
    ASSERT_TRUE(c.drive.has_value());
    EXPECT_DOUBLE_EQ(c.drive->omega_1, to_angular(6450.0));
    EXPECT_DOUBLE_EQ(c.drive->Omega_2, to_angular(40.0));
    EXPECT_DOUBLE_EQ(c.drive->phi, 0.25);
    EXPECT_EQ(c.three_mode.modulation_depth, 0.0);
}

TEST(Config, ResolvedConfigRoundTrips) {
    const auto a = io::parse_config_text(R"({"rng_seed": 9, "hom": {"taus_us": [1, 2]}, "chevron": {"noise_sigma": 0.01}})");
    const auto b = io::parse_config(a.resolved);
    EXPECT_EQ(a.resolved.dump(), b.resolved.dump());
    EXPECT_EQ(b.rng_seed, 9u);
    EXPECT_EQ(b.hom.taus_us, (std::vector<double>{1.0, 2.0}));
}

TEST(Config, RelativePathsResolveAgainstConfigDirectory) {
    const auto dir = scratch("paths");
    io::write_text(dir / "c.json", R"({"fit": {"dataset": "data/x.csv"}})");
    const auto c = io::load_config(dir / "c.json");
    EXPECT_EQ(fs::weakly_canonical(c.fit.dataset), fs::weakly_canonical(dir / "data" / "x.csv"));
    EXPECT_TRUE(fs::path(c.resolved["fit"]["dataset"].get<std::string>()).is_absolute());
}

TEST(Config, MissingFileIsIoError) {
    EXPECT_EQ(code_of([] { io::load_config("/nonexistent/cqad.json"); }), ErrorCode::IoError);
}

TEST(Tables, NumbersRoundTripExactly) {
    for (double v : {0.1, -1e-300, 6.02214076e23, 1.0 / 3.0, std::nextafter(1.0, 2.0)})
        EXPECT_EQ(io::parse_number(io::format_number(v), "x"), v);
    EXPECT_EQ(io::format_number(-0.0), "0");
    EXPECT_EQ(code_of([] { io::parse_number("1.5e", "x"); }), ErrorCode::ParseError);
}

TEST(Tables, RecordsRoundTrip) {
    const auto dir = scratch("records");
    const auto recs = synthetic_records(Eigen::Matrix4cd::Identity() / 4.0, reference_fidelity_model(), 500, 3);
    io::write_records(dir / "r.csv", recs);
    const auto back = io::load_records(dir / "r.csv");
    ASSERT_EQ(back.size(), recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        EXPECT_EQ(back[i].a, recs[i].a);
        EXPECT_EQ(back[i].b, recs[i].b);
        EXPECT_EQ(back[i].shots, recs[i].shots);
        EXPECT_EQ(back[i].p, recs[i].p);
    }
}

TEST(Tables, BadRecordRejected) {
    const auto dir = scratch("badrec");
    io::write_text(dir / "r.csv", "operator_a,operator_b,p00,p01,p10,p11,shots\nX,Q,0.25,0.25,0.25,0.25,10\n");
    EXPECT_THROW(io::load_records(dir / "r.csv"), Error);
    io::write_text(dir / "s.csv", "operator_a,operator_b,p00,p01,p10,p11,shots\nX,X,0.25,0.25,0.25\n");
    EXPECT_EQ(code_of([&] { io::load_records(dir / "s.csv"); }), ErrorCode::ParseError);
}

TEST(Tables, DensityJsonRoundTrip) {
    DensityMatrix2Q rho = DensityMatrix2Q::Identity() / 4.0;
    rho(0, 3) = {0.1, -0.2};
    rho(3, 0) = std::conj(rho(0, 3));
    EXPECT_EQ(io::density_from_json(io::density_to_json(rho)), rho);
    EXPECT_EQ(code_of([] { io::density_from_json(json{{"real", 1}}); }), ErrorCode::ParseError);
}

TEST(Tables, ChevronCsvLoadsAsDataset) {
    const auto dir = scratch("chevron");
    ChevronMap map;
    map.delta_grid = {-0.1, 0.0, 0.1};
    map.tau_grid = {0.0, 1.0};
    map.reference_delta = 0.05;
    map.population["a"] = {{0.0, 0.2}, {0.0, 0.3}, {0.0, 0.4}};
    map.population["b"] = {{1.0, 0.7}, {1.0, 0.6}, {1.0, 0.5}};
    io::write_chevron(dir / "c.csv", map);
    const auto d = io::load_chevron_dataset(dir / "c.csv", 0.01);
    ASSERT_EQ(d.delta_grid.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_NEAR(d.delta_grid[i], map.reference_delta + map.delta_grid[i], 1e-12);
    EXPECT_EQ(d.tau_grid, map.tau_grid);
    EXPECT_EQ(d.population.at("a"), map.population.at("a"));
    EXPECT_DOUBLE_EQ(d.initial.at("b"), 1.0);
    EXPECT_DOUBLE_EQ(d.readout_g_infidelity, 0.01);
}

TEST(Tables, IncompleteChevronGridRejected) {
    const auto dir = scratch("chevron_bad");
    io::write_text(dir / "c.csv", "detuning_mhz,delta_mhz,tau_us,p_b\n0,0,0,1\n0,0,1,0.5\n0,0.1,0,1\n");
    EXPECT_EQ(code_of([&] { io::load_chevron_dataset(dir / "c.csv"); }), ErrorCode::ParseError);
}
