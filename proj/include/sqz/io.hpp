#pragma once

// File formats: spectrum CSV, measured-spectrum CSV, fit result JSON and the
// optical configuration JSON used by the command-line tool.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sqz/estimation.hpp"
#include "sqz/optics.hpp"
#include "sqz/reduced.hpp"
#include "sqz/spectrum.hpp"

namespace sqz::io {

inline constexpr std::string_view kModelVersion = "sqz-cavity-model/1";
inline constexpr std::string_view kSpectrumHeader = "omega_rad_s,noise_psd,signal_tf_sq,snr";

/// Shortest-exact decimal with 17 significant digits; parses back bit-exactly.
std::string format_double(double x);
/// Throws InvalidData on anything but a complete floating-point literal.
double parse_double(std::string_view text);

/// Writes `header` followed by one row per grid point: omega, then the named
/// channels in order.
void write_spectrum_csv(std::ostream& out, const Spectrum& spec,
                        const std::vector<std::string>& channels,
                        std::string_view omega_column = "omega_rad_s");
/// Spectrum CSV: omega_rad_s,noise_psd,signal_tf_sq,snr.
void write_spectrum_csv(std::ostream& out, const Spectrum& spec);
/// Reads a CSV whose first column is the grid; remaining header names become
/// channels (unit "").
Spectrum read_spectrum_csv(std::istream& in);

/// freq_hz,psd_db[,sigma_db]; lines starting with '#' and blank lines skipped.
MeasuredSpectrum read_measured_csv(std::istream& in);
void write_measured_csv(std::ostream& out, const MeasuredSpectrum& data);

nlohmann::json to_json(const OpticalConfig& cfg);
/// Overlays keys present in j onto base; unknown keys throw InvalidConfig.
OpticalConfig config_from_json(const nlohmann::json& j, OpticalConfig base = {});
nlohmann::json to_json(const CavityRates& rates);
nlohmann::json to_json(const FitResult& fit);

/// Writes via a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace sqz::io
