#include "cvdp/io.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace cvdp;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("cvdp_io_" + name);
  std::ofstream(path) << text;
  return path.string();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST(Parse, MatrixFormats) {
  const Matrix want = from_rows({{1, -2.5}, {3e-3, 4}});
  EXPECT_EQ(load_matrix(write_temp("m.json", "[[1,-2.5],[0.003,4]]")), want);
  EXPECT_EQ(load_matrix(write_temp("m.csv", "1,-2.5\n0.003, 4\n")), want);
  EXPECT_EQ(load_matrix(write_temp("m.txt", "  {\"matrix\": [[1,-2.5],[0.003,4]]}")), want);
  EXPECT_EQ(load_matrix(write_temp("m2.txt", "# comment\n1,-2.5\r\n0.003,4\r\n")), want);
}

TEST(Parse, VectorFormats) {
  const Vector want = (Vector(3) << 0, 1, -2).finished();
  EXPECT_EQ(load_vector(write_temp("v.json", "[0,1,-2]")), want);
  EXPECT_EQ(load_vector(write_temp("v.csv", "0,1,-2\n")), want);
  EXPECT_EQ(load_vector(write_temp("vc.csv", "0\n1\n-2\n")), want);
  EXPECT_EQ(load_vector(write_temp("vo.json", "{\"x\":[0,1,-2]}")), want);
}

TEST(Parse, Errors) {
  EXPECT_EQ(code_of([] { load_matrix(write_temp("bad.json", "[[1,2],[3")); }), ErrorCode::parse_error);
  EXPECT_EQ(code_of([] { load_matrix(write_temp("ragged.json", "[[1,2],[3]]")); }), ErrorCode::shape_error);
  EXPECT_EQ(code_of([] { load_matrix(write_temp("ragged.csv", "1,2\n3\n")); }), ErrorCode::shape_error);
  EXPECT_EQ(code_of([] { load_matrix(write_temp("nan.csv", "1,x\n")); }), ErrorCode::parse_error);
  EXPECT_EQ(code_of([] { load_matrix(write_temp("str.json", "[[1,\"a\"]]")); }), ErrorCode::parse_error);
  EXPECT_EQ(code_of([] { load_matrix("/nonexistent/file.csv"); }), ErrorCode::parse_error);
  EXPECT_EQ(code_of([] { load_vector(write_temp("mat.csv", "1,2\n3,4\n")); }), ErrorCode::shape_error);
}

TEST(RoundTrip, SignReport) {
  for (const auto& v : {std::vector<double>{0, 1, -2}, std::vector<double>{1, 0, -1}}) {
    const auto r = sign_report(v);
    EXPECT_EQ(sign_report_from_json(Json::parse(to_json(r).dump())), r);
  }
}

TEST(RoundTrip, Compound) {
  std::mt19937_64 rng(1);
  const Matrix a = oracle::random_matrix(rng, 4, 4);
  for (const auto& c : {add_compound(a, 2), mult_compound(a, 3), mult_compound(oracle::random_matrix(rng, 5, 3), 2)}) {
    const auto j = Json::parse(to_json(c).dump());
    EXPECT_EQ(j.at("schema"), 1);
    EXPECT_EQ(compound_from_json(j), c);
  }
  const auto j = to_json(add_compound(a, 2));
  EXPECT_EQ(j.at("row_labels")[1], Json::parse("[1,3]"));
}

TEST(RoundTrip, Classification) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = trial % 2 ? oracle::random_q_plus(rng, 4) : oracle::random_matrix(rng, 3, 4 + trial % 2);
    const auto r = classify(a);
    EXPECT_EQ(classification_from_json(Json::parse(to_json(r).dump())), r);
  }
}

TEST(RoundTrip, VdpVerdict) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = check_scvdp(oracle::random_matrix(rng, 3, 3), {kDefaultTol, 500, 7});
    EXPECT_EQ(vdp_verdict_from_json(Json::parse(to_json(v).dump())), v);
  }
}

TEST(RoundTrip, EventsAndCvds) {
  const Matrix a = from_rows({{-1, 1, -0.5}, {1, -1, 1}, {0.2, 1, -1}});
  const auto v = verify_cvds(LtvSystem::constant(a), 0.0, {1e-3});
  EXPECT_EQ(cvds_verdict_from_json(Json::parse(to_json(v).dump()), 3), v);
  const auto tr = simulate(LtvSystem::constant(a), (Vector(3) << 1, -1, 0.5).finished(), 0.0, 2.0);
  const auto j = Json::parse(events_to_json(tr.events, tr.observed_settling_time).dump());
  ASSERT_EQ(j.at("events").size(), tr.events.size());
  for (std::size_t k = 0; k < tr.events.size(); ++k) EXPECT_EQ(sign_event_from_json(j.at("events")[k]), tr.events[k]);
}

TEST(RoundTrip, Systems) {
  std::mt19937_64 rng(4);
  const Matrix a = oracle::random_matrix(rng, 3, 3), b = oracle::random_matrix(rng, 3, 3);
  for (const auto& sys : {LtvSystem::constant(a), LtvSystem::piecewise_constant({0.5}, {a, b}),
                          LtvSystem::sampled({0.0, 1.0}, {a, b}, Interpolation::linear)}) {
    const auto back = system_from_json(Json::parse(system_to_json(sys).dump()));
    EXPECT_EQ(system_to_json(back), system_to_json(sys));
    EXPECT_EQ(transition_matrix(back, 0.0, 0.8), transition_matrix(sys, 0.0, 0.8));
  }
  EXPECT_EQ(code_of([] { system_from_json(Json::parse(R"({"generator":"wavy"})")); }), ErrorCode::parse_error);
  EXPECT_EQ(code_of([] { system_from_json(Json::parse(R"({"generator":"constant","matrix":[[1,2]]})")); }),
            ErrorCode::shape_error);
}

TEST(RoundTrip, CsvKeepsFullPrecision) {
  std::mt19937_64 rng(5);
  const Matrix a = oracle::random_matrix(rng, 3, 4);
  EXPECT_EQ(matrix_from_csv(matrix_to_csv(a)), a);
}

TEST(Spec, RingModelDefaults) {
  const auto s = rfmr_spec_from_json(Json::parse(R"({"n":3,"lambda":[1,2,3],"x0":[0.5,0.25,1.0]})"));
  EXPECT_EQ(s.z0, rfmr_rhs(s.params, s.x0));
  EXPECT_DOUBLE_EQ(s.horizon, 10.0);
  EXPECT_EQ(code_of([] { rfmr_spec_from_json(Json::parse(R"({"n":2,"lambda":[1,2,3],"x0":[0,0,1]})")); }),
            ErrorCode::shape_error);
}

TEST(Errors, JsonObject) {
  const auto j = error_to_json(Error(ErrorCode::shape_error, "bad"));
  EXPECT_EQ(j.at("schema"), 1);
  EXPECT_EQ(j.at("error").at("code"), "ShapeError");
  EXPECT_EQ(j.at("error").at("message"), "bad");
}
