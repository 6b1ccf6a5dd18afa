#include "bellrelax/error.hpp"
#include "bellrelax/record_io.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace bellrelax;
namespace fs = std::filesystem;

namespace {

RelaxationRecord sample() {
  RelaxationRecord r;
  r.N = 21;
  r.mL = 5;
  r.bc = BoundaryCondition::Periodic;
  r.Nk = 3;
  r.seed = 17;
  r.epsilon_factor = 0.02;
  r.momentum_spread = 9.7;
  SeriesPoint p;
  p.step = 100;
  p.t_over_L = 0.1;
  p.c = 0.05;
  p.r2 = 0.99;
  p.modes_used = 25;
  p.fit_available = true;
  p.dispersion = 0.9;
  p.v0_distance = 0.01;
  r.series.push_back(p);
  p.step = 200;
  p.v0_distance.reset();
  p.lambda1 = std::nan("");
  r.series.push_back(p);
  r.fit.status = FitStatus::Ok;
  r.fit.t_eq_over_L = 4.5;
  r.fit.points = 7;
  r.seed_t_eq = {4.4, 4.6};
  r.steps_run = 200;
  r.stop_reason = "spectral_floor";
  r.repaired_columns = 3;
  return r;
}

}  // namespace

TEST_CASE("record JSON round trip") {
  const RelaxationRecord r = sample();
  const nlohmann::json j = record_to_json(r);
  CHECK(j["schema_version"] == kRecordSchemaVersion);
  CHECK(j["series"][1]["lambda1"].is_null());
  const RelaxationRecord back = record_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.bc == BoundaryCondition::Periodic);
  CHECK(back.seed == 17);
  CHECK(back.series.size() == 2);
  CHECK(back.series[0].v0_distance.value() == 0.01);
  CHECK_FALSE(back.series[1].v0_distance.has_value());
  CHECK(std::isnan(back.series[1].lambda1));
  CHECK(back.fit.t_eq_over_L == 4.5);
  CHECK(back.seed_t_eq == r.seed_t_eq);
  CHECK(back.stop_reason == "spectral_floor");
  CHECK(record_to_json(back) == j);

  nlohmann::json wrong = j;
  wrong["schema_version"] = 99;
  CHECK_THROWS_AS(record_from_json(wrong), ValidationError);
  wrong = j;
  wrong.erase("fit");
  CHECK_THROWS_AS(record_from_json(wrong), ValidationError);
}

TEST_CASE("csv tables") {
  SpectrumSnapshot s;
  s.t_over_L = 2.0;
  s.eigenvalues = {{1.0, 0.0}, {0.3, 0.4}};
  std::ostringstream spec;
  write_spectrum_csv(spec, {s});
  CHECK(spec.str() == "t_over_L,s,re_lambda,im_lambda,abs_lambda\n2,0,1,0,1\n2,1,0.3,0.4,0.5\n");

  std::ostringstream fit;
  write_fit_csv(fit, sample());
  CHECK(fit.str() ==
        "t_over_L,c,c_stderr,r2,dispersion,v0_tv_distance\n"
        "0.1,0.05,0,0.99,0.9,0.01\n0.1,0.05,0,0.99,0.9,\n");

  std::ostringstream sweep;
  write_sweep_csv(sweep, "N", {"21"}, {sample()});
  const std::string text = sweep.str();
  CHECK(text.rfind("N,N,mL,bc", 0) == 0);
  CHECK(text.find("\n21,21,5,periodic,3,17,9.7,ok,") != std::string::npos);

  ScalingFit sf;
  sf.points = {{0.05, 0.3, 0.01, false}, {0.0, 0.0, 0.01, true}};
  std::ostringstream sc;
  write_scaling_csv(sc, sf);
  CHECK(sc.str() == "model,x,y,y_err,origin\nvs_a,0.05,0.3,0.01,0\nvs_a,0,0,0.01,1\n");
}

TEST_CASE("sha256 of a file") {
  const fs::path p = fs::temp_directory_path() / "bellrelax_sha.txt";
  std::ofstream(p, std::ios::binary) << "abc";
  CHECK(sha256_file(p) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK_THROWS_AS(sha256_file(p.string() + ".missing"), ValidationError);
}
