#include <poldoa/report_io.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

namespace poldoa {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string format_rmse_csv(const RmseTable& table) {
  std::string out =
      "snr_db,parameter,source,rmse_deg,crb_sqrt_deg,grid_floor_deg,grid_step_deg,trials,failures,"
      "snapshots,method,geometry\n";
  for (const auto& r : table.rows) {
    out += format_number(r.snr_db) + ',' + r.parameter + ',' + std::to_string(r.source) + ',' +
           format_number(r.rmse_deg) + ',' + format_number(r.crb_deg) + ',' +
           format_number(r.grid_floor_deg) + ',' + format_number(r.grid_step_deg) + ',' +
           std::to_string(r.trials) + ',' + std::to_string(r.failures) + ',' +
           std::to_string(r.snapshots) + ',' + r.method + ',' + csv_field(r.geometry) + '\n';
  }
  return out;
}

std::string format_crb_csv(const std::vector<CrbRow>& rows) {
  std::string out = "snr_db,parameter,source,crb_sqrt_deg,snapshots,geometry\n";
  for (const auto& r : rows)
    out += format_number(r.snr_db) + ',' + r.parameter + ',' + std::to_string(r.source) + ',' +
           format_number(r.crb_deg) + ',' + std::to_string(r.snapshots) + ',' + csv_field(r.geometry) +
           '\n';
  return out;
}

std::string format_ambiguity_csv(const AmbiguityReport& report) {
  std::string out = "kind,alpha1_deg,alpha2_deg,cosine,parallel,detail\n";
  for (const auto& r : report.rows) {
    char cos[40];
    std::snprintf(cos, sizeof cos, "%.15f", r.cosine);
    out += r.kind + ',' + csv_field(r.alpha1) + ',' + csv_field(r.alpha2) + ',' + cos + ',' +
           (r.parallel ? "true" : "false") + ',' + csv_field(r.detail) + '\n';
  }
  return out;
}

std::string format_complexity_csv(std::int64_t N, std::int64_t M, std::int64_t L,
                                  const ComplexityCounts& c) {
  return "N,M,L,music_4d,reduced_det,reduced_mineig\n" + std::to_string(N) + ',' + std::to_string(M) +
         ',' + std::to_string(L) + ',' + std::to_string(c.music_4d) + ',' +
         std::to_string(c.reduced_det) + ',' + std::to_string(c.reduced_mineig) + '\n';
}

std::string format_spectrum_csv(const SpectrumGrid& spectrum) {
  std::string out;
  for (std::size_t i = 0; i < spectrum.axes.size(); ++i)
    out += spectrum.axes[i].name + "_deg,";
  out += "value\n";
  out.reserve(out.size() + spectrum.size() * 32);
  for (std::size_t f = 0; f < spectrum.size(); ++f) {
    for (const double c : spectrum.coordinates(f)) out += format_number(c) + ',';
    out += format_number(spectrum.value(f)) + '\n';
  }
  return out;
}

std::string format_spectrum_json(const SpectrumGrid& spectrum, const std::string& description) {
  nlohmann::ordered_json j;
  j["description"] = description;
  j["layout"] = "row-major, last axis fastest";
  j["cap"] = spectrum.cap;
  j["cells"] = spectrum.size();
  auto& axes = j["axes"] = nlohmann::ordered_json::array();
  for (const auto& a : spectrum.axes)
    axes.push_back({{"name", a.name}, {"unit", "deg"}, {"start", a.start}, {"step", a.step},
                    {"count", a.count}, {"periodic", a.periodic}});
  const Peak p = global_peak(spectrum);
  j["global_peak"] = {{"coordinates_deg", p.coordinates}, {"value", p.value}};
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  out.close();
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace poldoa
