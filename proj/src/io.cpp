#include "sqz/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "sqz/error.hpp"

namespace sqz::io {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) {
      f.remove_suffix(1);
    }
  }
  return out;
}

bool skippable(std::string_view line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string_view::npos || line[first] == '#';
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                                 std::chars_format::general, 17);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidData, "cannot format number");
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw Error(ErrorCode::InvalidData, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spec,
                        const std::vector<std::string>& channels, std::string_view omega_column) {
  std::vector<std::span<const double>> cols;
  out << omega_column;
  for (const auto& name : channels) {
    cols.push_back(spec.values(name));
    out << ',' << name;
  }
  out << '\n';
  for (std::size_t i = 0; i < spec.size(); ++i) {
    out << format_double(spec.omega()[i]);
    for (const auto& c : cols) out << ',' << format_double(c[i]);
    out << '\n';
  }
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spec) {
  write_spectrum_csv(out, spec, {"noise_psd", "signal_tf_sq", "snr"});
}

Spectrum read_spectrum_csv(std::istream& in) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    for (auto f : split_commas(line)) header.emplace_back(f);
    break;
  }
  if (header.size() < 2) throw Error(ErrorCode::InvalidData, "spectrum CSV needs a header row");
  std::vector<double> grid;
  std::vector<std::vector<double>> cols(header.size() - 1);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split_commas(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::InvalidData, "wrong field count on line " + std::to_string(line_no));
    }
    grid.push_back(parse_double(fields[0]));
    for (std::size_t c = 1; c < fields.size(); ++c) cols[c - 1].push_back(parse_double(fields[c]));
  }
  Spectrum spec(std::move(grid));
  for (std::size_t c = 1; c < header.size(); ++c) {
    spec.set_channel(header[c], "", std::move(cols[c - 1]));
  }
  return spec;
}

MeasuredSpectrum read_measured_csv(std::istream& in) {
  std::string line;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    header_line = line;
    header = split_commas(header_line);
    break;
  }
  const bool has_sigma = header.size() == 3 && header[2] == "sigma_db";
  if (header.size() < 2 || header[0] != "freq_hz" || header[1] != "psd_db" ||
      (header.size() == 3 && !has_sigma) || header.size() > 3) {
    throw Error(ErrorCode::InvalidData, "measured CSV header must be freq_hz,psd_db[,sigma_db]");
  }
  MeasuredSpectrum data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split_commas(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::InvalidData, "wrong field count on line " + std::to_string(line_no));
    }
    data.freq_hz.push_back(parse_double(fields[0]));
    data.psd_db.push_back(parse_double(fields[1]));
    if (has_sigma) data.sigma_db.push_back(parse_double(fields[2]));
  }
  validate(data);
  return data;
}

void write_measured_csv(std::ostream& out, const MeasuredSpectrum& data) {
  const bool has_sigma = !data.sigma_db.empty();
  out << (has_sigma ? "freq_hz,psd_db,sigma_db\n" : "freq_hz,psd_db\n");
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << format_double(data.freq_hz[i]) << ',' << format_double(data.psd_db[i]);
    if (has_sigma) out << ',' << format_double(data.sigma_db[i]);
    out << '\n';
  }
}

nlohmann::json to_json(const OpticalConfig& cfg) {
  return {{"lambda0", cfg.lambda0}, {"length", cfg.length}, {"t_c_sq", cfg.t_c_sq},
          {"t_b_sq", cfg.t_b_sq},   {"r_int_sq", cfg.r_int_sq}, {"q", cfg.q},
          {"eta_det", cfg.eta_det}, {"p_circ", cfg.p_circ}};
}

OpticalConfig config_from_json(const nlohmann::json& j, OpticalConfig base) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) {
      throw Error(ErrorCode::InvalidConfig, "config key '" + key + "' must be a number");
    }
    const double v = value.get<double>();
    if (key == "lambda0") base.lambda0 = v;
    else if (key == "length") base.length = v;
    else if (key == "t_c_sq") base.t_c_sq = v;
    else if (key == "t_b_sq") base.t_b_sq = v;
    else if (key == "r_int_sq") base.r_int_sq = v;
    else if (key == "q") base.q = v;
    else if (key == "eta_det") base.eta_det = v;
    else if (key == "p_circ") base.p_circ = v;
    else throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
  }
  return base;
}

nlohmann::json to_json(const CavityRates& rates) {
  return {{"gamma_c_rad_s", rates.gamma_c},
          {"gamma_s_rad_s", rates.gamma_s},
          {"gamma_l_rad_s", rates.gamma_l},
          {"total_rate_rad_s", rates.total_rate()},
          {"eta", rates.eta},
          {"prefactor", rates.prefactor}};
}

nlohmann::json to_json(const FitResult& fit) {
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json fixed = nlohmann::json::array();
  nlohmann::json hit = nlohmann::json::array();
  for (std::size_t k = 0; k < kParamCount; ++k) {
    const std::string name(kParamNames[k]);
    params[name] = fit.params[k];
    if (fit.fixed[k]) fixed.push_back(name);
    if (fit.bounds_hit[k]) hit.push_back(name);
  }
  return {{"params", params},
          {"covariance", fit.covariance},
          {"chi2_reduced", fit.chi2_reduced},
          {"fixed_params", fixed},
          {"bounds_hit", hit},
          {"flags",
           {{"converged", true},
            {"iterations", fit.iterations},
            {"termination", fit.termination},
            {"any_bound_hit", !hit.empty()}}},
          {"model_version", kModelVersion}};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorCode::InvalidConfig, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::InvalidConfig, "cannot rename onto " + path.string());
  }
}

}  // namespace sqz::io
