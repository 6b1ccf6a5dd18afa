#include "bellrelax/record_io.hpp"

#include "bellrelax/error.hpp"
#include "bellrelax/format.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <fstream>
#include <memory>
#include <ostream>

namespace bellrelax {

using nlohmann::json;

namespace {

// JSON has no NaN/Inf; non-finite values become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_number(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

template <typename T>
T field(const json& obj, const char* name) {
  if (!obj.contains(name)) throw ValidationError(std::string("record JSON lacks '") + name + "'");
  return obj.at(name).get<T>();
}

double real_field(const json& obj, const char* name) {
  if (!obj.contains(name)) throw ValidationError(std::string("record JSON lacks '") + name + "'");
  return read_number(obj.at(name));
}

}  // namespace

json record_to_json(const RelaxationRecord& r) {
  json series = json::array();
  for (const SeriesPoint& p : r.series) {
    series.push_back({{"step", p.step},
                      {"t_over_L", number(p.t_over_L)},
                      {"c", number(p.c)},
                      {"c_stderr", number(p.c_stderr)},
                      {"r2", number(p.r2)},
                      {"modes_used", p.modes_used},
                      {"fit_available", p.fit_available},
                      {"lambda1", number(p.lambda1)},
                      {"unit_eigenvalues", p.unit_eigenvalues},
                      {"dispersion", number(p.dispersion)},
                      {"v0_distance", p.v0_distance ? number(*p.v0_distance) : json(nullptr)},
                      {"transport_error", number(p.transport_error)}});
  }
  return {
      {"schema_version", kRecordSchemaVersion},
      {"config",
       {{"N", r.N},
        {"mL", number(r.mL)},
        {"bc", to_string(r.bc)},
        {"Nk", r.Nk},
        {"seed", r.seed},
        {"epsilon_factor", number(r.epsilon_factor)},
        {"initial", to_string(r.initial)}}},
      {"momentum_spread", number(r.momentum_spread)},
      {"series", series},
      {"fit",
       {{"status", to_string(r.fit.status)},
        {"c0", number(r.fit.c0)},
        {"c0_stderr", number(r.fit.c0_stderr)},
        {"inverse_t_eq", number(r.fit.inverse_t_eq)},
        {"inverse_t_eq_stderr", number(r.fit.inverse_t_eq_stderr)},
        {"t_eq_over_L", number(r.fit.t_eq_over_L)},
        {"t_eq_stderr", number(r.fit.t_eq_stderr)},
        {"r2", number(r.fit.r2)},
        {"points", r.fit.points}}},
      {"seed_t_eq", r.seed_t_eq},
      {"run",
       {{"steps_run", r.steps_run},
        {"stop_reason", r.stop_reason},
        {"repaired_columns", r.repaired_columns},
        {"frozen_columns", r.frozen_columns},
        {"repaired_fraction", number(r.repaired_fraction)},
        {"renormalizations", r.renormalizations},
        {"max_transport_error", number(r.max_transport_error)},
        {"max_T_column_defect", number(r.max_T_column_defect)},
        {"min_T_entry", number(r.min_T_entry)},
        {"max_cumulative_defect", number(r.max_cumulative_defect)}}},
  };
}

RelaxationRecord record_from_json(const json& doc) {
  try {
    const int version = field<int>(doc, "schema_version");
    if (version != kRecordSchemaVersion)
      throw ValidationError("record schema version " + std::to_string(version) + " (expected " +
                            std::to_string(kRecordSchemaVersion) + ")");
    RelaxationRecord r;
    const json& cfg = doc.at("config");
    r.N = field<int>(cfg, "N");
    r.mL = real_field(cfg, "mL");
    r.bc = parse_boundary_condition(field<std::string>(cfg, "bc"));
    r.Nk = field<int>(cfg, "Nk");
    r.seed = field<std::uint64_t>(cfg, "seed");
    r.epsilon_factor = real_field(cfg, "epsilon_factor");
    r.initial = parse_initial_kind(field<std::string>(cfg, "initial"));
    r.momentum_spread = real_field(doc, "momentum_spread");
    for (const json& p : doc.at("series")) {
      SeriesPoint s;
      s.step = field<std::int64_t>(p, "step");
      s.t_over_L = real_field(p, "t_over_L");
      s.c = real_field(p, "c");
      s.c_stderr = real_field(p, "c_stderr");
      s.r2 = real_field(p, "r2");
      s.modes_used = field<int>(p, "modes_used");
      s.fit_available = field<bool>(p, "fit_available");
      s.lambda1 = real_field(p, "lambda1");
      s.unit_eigenvalues = field<int>(p, "unit_eigenvalues");
      s.dispersion = real_field(p, "dispersion");
      if (!p.at("v0_distance").is_null()) s.v0_distance = p.at("v0_distance").get<double>();
      s.transport_error = real_field(p, "transport_error");
      r.series.push_back(s);
    }
    const json& fit = doc.at("fit");
    r.fit.status = parse_fit_status(field<std::string>(fit, "status"));
    r.fit.c0 = real_field(fit, "c0");
    r.fit.c0_stderr = real_field(fit, "c0_stderr");
    r.fit.inverse_t_eq = real_field(fit, "inverse_t_eq");
    r.fit.inverse_t_eq_stderr = real_field(fit, "inverse_t_eq_stderr");
    r.fit.t_eq_over_L = real_field(fit, "t_eq_over_L");
    r.fit.t_eq_stderr = real_field(fit, "t_eq_stderr");
    r.fit.r2 = real_field(fit, "r2");
    r.fit.points = field<int>(fit, "points");
    r.seed_t_eq = doc.at("seed_t_eq").get<std::vector<double>>();
    const json& run = doc.at("run");
    r.steps_run = field<std::int64_t>(run, "steps_run");
    r.stop_reason = field<std::string>(run, "stop_reason");
    r.repaired_columns = field<std::int64_t>(run, "repaired_columns");
    r.frozen_columns = field<std::int64_t>(run, "frozen_columns");
    r.repaired_fraction = real_field(run, "repaired_fraction");
    r.renormalizations = field<int>(run, "renormalizations");
    r.max_transport_error = real_field(run, "max_transport_error");
    r.max_T_column_defect = real_field(run, "max_T_column_defect");
    r.min_T_entry = real_field(run, "min_T_entry");
    r.max_cumulative_defect = real_field(run, "max_cumulative_defect");
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed record JSON: ") + e.what());
  }
}

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumSnapshot>& snapshots,
                        bool header) {
  if (header) out << "t_over_L,s,re_lambda,im_lambda,abs_lambda\n";
  for (const SpectrumSnapshot& snap : snapshots) {
    const std::string t = fmt_double(snap.t_over_L);
    for (std::size_t s = 0; s < snap.eigenvalues.size(); ++s) {
      const auto& l = snap.eigenvalues[s];
      out << t << ',' << s << ',' << fmt_double(l.real()) << ',' << fmt_double(l.imag()) << ','
          << fmt_double(std::abs(l)) << '\n';
    }
  }
}

void write_fit_csv(std::ostream& out, const RelaxationRecord& record) {
  out << "t_over_L,c,c_stderr,r2,dispersion,v0_tv_distance\n";
  for (const SeriesPoint& p : record.series) {
    out << fmt_double(p.t_over_L) << ',' << fmt_double(p.c) << ',' << fmt_double(p.c_stderr) << ','
        << fmt_double(p.r2) << ',' << fmt_double(p.dispersion) << ','
        << (p.v0_distance ? fmt_double(*p.v0_distance) : std::string()) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::string& axis,
                     const std::vector<std::string>& values,
                     const std::vector<RelaxationRecord>& records) {
  out << axis << ",N,mL,bc,Nk,seed,LdP,status,c0,c0_stderr,inv_t_eq,inv_t_eq_stderr,t_eq_over_L,"
                 "t_eq_stderr,r2,points,steps_run,stop_reason\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const RelaxationRecord& r = records[i];
    out << values.at(i) << ',' << r.N << ',' << fmt_double(r.mL) << ',' << to_string(r.bc) << ','
        << r.Nk << ',' << r.seed << ',' << fmt_double(r.momentum_spread) << ','
        << to_string(r.fit.status) << ',' << fmt_double(r.fit.c0) << ','
        << fmt_double(r.fit.c0_stderr) << ',' << fmt_double(r.fit.inverse_t_eq) << ','
        << fmt_double(r.fit.inverse_t_eq_stderr) << ',' << fmt_double(r.fit.t_eq_over_L) << ','
        << fmt_double(r.fit.t_eq_stderr) << ',' << fmt_double(r.fit.r2) << ',' << r.fit.points
        << ',' << r.steps_run << ',' << r.stop_reason << '\n';
  }
}

void write_scaling_csv(std::ostream& out, const ScalingFit& fit) {
  out << "model,x,y,y_err,origin\n";
  for (const ScalingPoint& p : fit.points) {
    out << to_string(fit.model) << ',' << fmt_double(p.x) << ',' << fmt_double(p.y) << ','
        << fmt_double(p.y_err) << ',' << (p.origin ? 1 : 0) << '\n';
  }
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string() + " for checksum", "io");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

}  // namespace bellrelax
