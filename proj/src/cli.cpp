#include "sqz/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "sqz/analysis.hpp"
#include "sqz/constants.hpp"
#include "sqz/estimation.hpp"
#include "sqz/io.hpp"
#include "sqz/optics.hpp"
#include "sqz/reduced.hpp"

namespace sqz::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidData:
    case ErrorCode::InsufficientData: return kConfigError;
    case ErrorCode::AboveThreshold:
    case ErrorCode::SingularSystem:
    case ErrorCode::NumericalDomain:
    case ErrorCode::NoCrossing:
    case ErrorCode::QuadratureFailure: return kModelError;
    case ErrorCode::NonConvergence: return kNonConvergence;
    case ErrorCode::DegenerateJacobian: return kDegenerateJacobian;
  }
  return kModelError;
}

namespace {

// Optical flags; each overrides the config file only when given.
struct OpticalFlags {
  std::string config_file;
  struct Flag {
    const char* name;
    double OpticalConfig::*field;
    double value = 0.0;
    CLI::Option* option = nullptr;
  };
  std::vector<Flag> flags = {
      {"--lambda0", &OpticalConfig::lambda0},   {"--length", &OpticalConfig::length},
      {"--t-c-sq", &OpticalConfig::t_c_sq},     {"--t-b-sq", &OpticalConfig::t_b_sq},
      {"--r-int-sq", &OpticalConfig::r_int_sq}, {"--q", &OpticalConfig::q},
      {"--eta", &OpticalConfig::eta_det},       {"--p-circ", &OpticalConfig::p_circ},
  };

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "JSON file with optical configuration fields")
        ->check(CLI::ExistingFile);
    static const std::map<std::string, std::string> help = {
        {"--lambda0", "carrier wavelength [m]"},
        {"--length", "one-way cavity length [m]"},
        {"--t-c-sq", "coupling mirror power transmissivity"},
        {"--t-b-sq", "back mirror power transmissivity"},
        {"--r-int-sq", "internal round-trip power loss"},
        {"--q", "single-pass squeeze factor"},
        {"--eta", "detection efficiency"},
        {"--p-circ", "circulating power [W]"},
    };
    for (auto& f : flags) f.option = app->add_option(f.name, f.value, help.at(f.name));
  }

  // defaults < config file < flags
  OpticalConfig resolve() const {
    OpticalConfig cfg;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, "cannot parse " + config_file + ": " + e.what());
      }
      cfg = io::config_from_json(j, cfg);
    }
    for (const auto& f : flags) {
      if (f.option->count() > 0) cfg.*(f.field) = f.value;
    }
    validate(cfg);
    return cfg;
  }
};

struct GridFlags {
  double start_hz = 1e5;
  double stop_hz = 1e9;
  std::size_t points = 200;
  std::string spacing = "log";

  void attach(CLI::App* app) {
    app->add_option("--start-hz", start_hz, "first grid frequency [Hz]");
    app->add_option("--stop-hz", stop_hz, "last grid frequency [Hz]");
    app->add_option("--points", points, "number of grid points");
    app->add_option("--spacing", spacing, "grid spacing")
        ->check(CLI::IsMember({"lin", "log"}));
  }

  std::vector<double> hz() const {
    if (!(start_hz < stop_hz) || points < 2) {
      throw Error(ErrorCode::InvalidConfig, "grid needs start-hz < stop-hz and points >= 2");
    }
    return spacing == "log" ? log_grid(start_hz, stop_hz, points)
                            : linear_grid(start_hz, stop_hz, points);
  }
};

// The only Hz -> rad/s conversion at the tool boundary.
std::vector<double> to_angular(const std::vector<double>& hz) {
  std::vector<double> w(hz.size());
  std::transform(hz.begin(), hz.end(), w.begin(), [](double f) { return constants::two_pi * f; });
  return w;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(io::parse_double(item));
  }
  if (out.empty()) throw Error(ErrorCode::InvalidConfig, "empty list '" + text + "'");
  return out;
}

std::size_t param_or_throw(const std::string& name) {
  const auto k = param_index(name);
  if (!k) {
    throw Error(ErrorCode::InvalidConfig,
                "unknown parameter '" + name + "' (expected q, t_c_sq, l_sq or eta)");
  }
  return *k;
}

std::pair<std::string, std::optional<std::string>> split_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) return {text, std::nullopt};
  return {text.substr(0, eq), text.substr(eq + 1)};
}

fs::path sidecar_path(const fs::path& out) {
  fs::path p = out;
  if (p.extension() == ".json") return p += ".sidecar.json";
  return p.replace_extension(".json");
}

MeasuredSpectrum read_measured_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidData, "cannot open " + path);
  return io::read_measured_csv(in);
}

json rates_json(const OpticalConfig& cfg) {
  json j = io::to_json(rates_from_optics(cfg));
  j["gamma_c_hz"] = j["gamma_c_rad_s"].get<double>() / constants::two_pi;
  j["gamma_s_hz"] = j["gamma_s_rad_s"].get<double>() / constants::two_pi;
  j["gamma_l_hz"] = j["gamma_l_rad_s"].get<double>() / constants::two_pi;
  return j;
}

// --- spectrum -------------------------------------------------------------

struct SpectrumCommand {
  OpticalFlags optics;
  GridFlags grid;
  std::string model = "exact";
  std::string format = "csv";
  std::string out_path;

  void attach(CLI::App* app) {
    optics.attach(app);
    grid.attach(app);
    app->add_option("--model", model, "noise model")->check(CLI::IsMember({"exact", "reduced"}));
    app->add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("-o,--out", out_path, "output file")->required();
  }

  int run(std::ostream& out) const {
    const OpticalConfig cfg = optics.resolve();
    const auto hz = grid.hz();
    const auto omega = to_angular(hz);
    const Spectrum spec = model == "exact" ? snr_spectrum(cfg, omega)
                                           : snr_spectrum(rates_from_optics(cfg), omega);
    std::ostringstream body;
    if (format == "csv") {
      io::write_spectrum_csv(body, spec);
    } else {
      json j = {{"omega_rad_s", spec.omega()}};
      for (const auto& c : spec.channels()) j[c.name] = c.values;
      body << j.dump(2) << '\n';
    }
    json sidecar = {{"config", io::to_json(cfg)},
                    {"rates", rates_json(cfg)},
                    {"q_threshold", opo_threshold(cfg)},
                    {"omega_fsr_rad_s", cfg.omega_fsr()},
                    {"standard_limit", cfg.sensitivity_prefactor()},
                    {"model", model},
                    {"grid",
                     {{"start_hz", grid.start_hz},
                      {"stop_hz", grid.stop_hz},
                      {"points", grid.points},
                      {"spacing", grid.spacing}}},
                    {"model_version", io::kModelVersion}};
    const fs::path side = sidecar_path(out_path);
    io::write_file_atomic(out_path, body.str());
    io::write_file_atomic(side, sidecar.dump(2) + "\n");
    out << out_path << '\n' << side.string() << '\n';
    return kOk;
  }
};

// --- fit ------------------------------------------------------------------

struct FitCommand {
  OpticalFlags optics;
  std::string data_path;
  std::string anti_path;
  std::vector<std::string> init;
  std::vector<std::string> fix;
  std::vector<std::string> bounds;
  std::string space = "db";
  double band_sigma = 2.0;
  std::string out_json;
  std::string out_csv;

  void attach(CLI::App* app) {
    optics.attach(app);
    app->add_option("--data", data_path, "squeezing spectrum CSV (freq_hz,psd_db[,sigma_db])")
        ->required();
    app->add_option("--anti", anti_path, "anti-squeezing spectrum CSV, same format");
    app->add_option("--init", init, "initial value, name=value (repeatable)");
    app->add_option("--fix", fix, "hold a parameter, name or name=value (repeatable)");
    app->add_option("--bound", bounds, "parameter interval, name=lo:hi (repeatable)");
    app->add_option("--space", space, "residual space")->check(CLI::IsMember({"db", "linear"}));
    app->add_option("--band-sigma", band_sigma, "confidence band half-width in sigma");
    app->add_option("--out-json", out_json, "fit result JSON")->required();
    app->add_option("--out-csv", out_csv, "prediction CSV")->required();
  }

  int run(std::ostream& out) const {
    const OpticalConfig known = optics.resolve();
    FitOptions opt = default_fit_options(known);
    opt.space = space == "db" ? FitSpace::Decibel : FitSpace::Linear;
    for (const auto& item : init) {
      auto [name, value] = split_assignment(item);
      if (!value) throw Error(ErrorCode::InvalidConfig, "--init needs name=value");
      opt.init[param_or_throw(name)] = io::parse_double(*value);
    }
    for (const auto& item : bounds) {
      auto [name, value] = split_assignment(item);
      const auto colon = value ? value->find(':') : std::string::npos;
      if (colon == std::string::npos) {
        throw Error(ErrorCode::InvalidConfig, "--bound needs name=lo:hi");
      }
      const std::size_t k = param_or_throw(name);
      opt.bounds[k] = {io::parse_double(value->substr(0, colon)),
                       io::parse_double(value->substr(colon + 1))};
    }
    for (const auto& item : fix) {
      auto [name, value] = split_assignment(item);
      const std::size_t k = param_or_throw(name);
      opt.fixed[k] = true;
      if (value) opt.init[k] = io::parse_double(*value);
    }
    const MeasuredSpectrum sq = read_measured_file(data_path);
    std::optional<MeasuredSpectrum> anti;
    if (!anti_path.empty()) anti = read_measured_file(anti_path);

    const FitResult fit = fit_squeezing_spectrum(sq, anti, opt);
    Spectrum pred = predict_deamplification(fit, known, sq.freq_hz, band_sigma);
    const Spectrum gain = snr_improvement(fit, sq.freq_hz);
    pred.set_channel("snr_gain_db", "dB", gain.channel("snr_gain_db").values);

    std::ostringstream csv;
    csv << "freq_hz,squeezing_db_model,deamp_db,deamp_db_lo,deamp_db_hi,snr_gain_db\n";
    const char* cols[] = {"squeezing_db_model", "deamp_db", "deamp_db_lo", "deamp_db_hi",
                          "snr_gain_db"};
    for (std::size_t i = 0; i < pred.size(); ++i) {
      csv << io::format_double(sq.freq_hz[i]);
      for (const char* c : cols) csv << ',' << io::format_double(pred.values(c)[i]);
      csv << '\n';
    }
    json result = io::to_json(fit);
    result["config"] = io::to_json(fit.config);
    io::write_file_atomic(out_json, result.dump(2) + "\n");
    io::write_file_atomic(out_csv, csv.str());
    out << out_json << '\n' << out_csv << '\n';
    return kOk;
  }
};

// --- gain-curve -----------------------------------------------------------

struct GainCurveCommand {
  OpticalFlags optics;
  std::string eta_list = "0.82";
  std::string q_list;
  std::size_t q_points = 64;
  double q_max_fraction = 0.999;
  std::string out_path;

  void attach(CLI::App* app) {
    optics.attach(app);
    app->add_option("--eta-list", eta_list, "comma-separated detection efficiencies");
    app->add_option("--q-list", q_list, "comma-separated ascending q values (overrides --q-points)");
    app->add_option("--q-points", q_points, "q grid points from 0 to q-max-fraction * q_th");
    app->add_option("--q-max-fraction", q_max_fraction, "last q grid value relative to q_th");
    app->add_option("-o,--out", out_path, "output CSV")->required();
  }

  int run(std::ostream& out) const {
    const OpticalConfig cfg = optics.resolve();
    const auto etas = parse_list(eta_list);
    std::vector<double> qs;
    if (!q_list.empty()) {
      qs = parse_list(q_list);
    } else {
      if (q_points < 2 || !(q_max_fraction > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "need q-points >= 2 and q-max-fraction > 0");
      }
      qs = linear_grid(0.0, q_max_fraction * opo_threshold(cfg), q_points);
    }
    const auto curves = gain_curve(cfg, etas, qs);
    std::ostringstream csv;
    csv << "eta,q,detected_squeeze_db,gain,bandwidth_rad_s\n";
    for (const auto& curve : curves) {
      for (const auto& p : curve.points) {
        csv << io::format_double(curve.eta) << ',' << io::format_double(p.q) << ','
            << io::format_double(p.detected_squeeze_db) << ',' << io::format_double(p.gain) << ','
            << io::format_double(p.bandwidth) << '\n';
      }
    }
    io::write_file_atomic(out_path, csv.str());
    out << out_path << '\n';
    return kOk;
  }
};

// --- limits ---------------------------------------------------------------

struct LimitsCommand {
  OpticalFlags optics;
  std::string out_path;

  void attach(CLI::App* app) {
    optics.attach(app);
    app->add_option("-o,--out", out_path, "output JSON (default: standard output)");
  }

  int run(std::ostream& out) const {
    const OpticalConfig cfg = optics.resolve();
    OpticalConfig passive = cfg;
    passive.q = 0.0;
    const CavityRates rates = rates_from_optics(cfg);
    const CavityRates classical = rates_from_optics(passive);
    const double limit = standard_limit(cfg.p_circ, cfg.lambda0, cfg.length);
    auto product = [](const CavityRates& r) {
      return peak_sensitivity(r) * closed_form_bandwidth(r);
    };
    const auto ceiling = outcoupled_squeezing_ceiling(cfg);
    const auto optimum = optimal_squeeze(cfg);
    json report = {
        {"config", io::to_json(cfg)},
        {"rates", rates_json(cfg)},
        {"standard_limit", limit},
        {"q_threshold", opo_threshold(cfg)},
        {"sensitivity_bandwidth_classical", product(classical)},
        {"sensitivity_bandwidth_squeezed", product(rates)},
        {"enhancement_gain_reduced", enhancement_gain(rates)},
        {"enhancement_gain_exact", exact_gain(cfg)},
        {"detected_noise_psd_0", exact_noise_psd(cfg, 0.0)},
        {"intracavity_squeeze_ratio", intracavity_squeeze_ratio(cfg)},
        {"intracavity_variance_ratio", intracavity_variance_ratio(cfg)},
        {"outcoupled_squeezing_ceiling",
         {{"min_noise_psd_0", ceiling.min_noise_psd},
          {"min_noise_db", 10.0 * std::log10(ceiling.min_noise_psd)},
          {"q_at_min", ceiling.q_at_min}}},
        {"optimal_squeeze",
         {{"q_opt", optimum.q_opt},
          {"gain_max", optimum.loss_limited ? json(nullptr) : json(optimum.gain_max)},
          {"q_analytic", optimum.q_analytic},
          {"loss_limited", optimum.loss_limited},
          {"at_boundary", optimum.at_boundary}}},
        {"model_version", io::kModelVersion},
    };
    if (out_path.empty()) {
      out << report.dump(2) << '\n';
    } else {
      io::write_file_atomic(out_path, report.dump(2) + "\n");
      out << out_path << '\n';
    }
    return kOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum-noise model and estimation for cavities with internal squeezing",
               "sqz-cavity"};
  app.require_subcommand(1);

  SpectrumCommand spectrum;
  FitCommand fit;
  GainCurveCommand gain;
  LimitsCommand limits;
  CLI::App* sub_spectrum = app.add_subcommand("spectrum", "noise, signal and SNR spectra");
  CLI::App* sub_fit = app.add_subcommand("fit", "fit measured squeezing spectra");
  CLI::App* sub_gain = app.add_subcommand("gain-curve", "enhancement versus detected squeezing");
  CLI::App* sub_limits = app.add_subcommand("limits", "standard limit, threshold and ceilings");
  spectrum.attach(sub_spectrum);
  fit.attach(sub_fit);
  gain.attach(sub_gain);
  limits.attach(sub_limits);

  // CLI11 consumes a reversed argument vector without the program name.
  std::vector<std::string> reversed;
  if (!args.empty()) reversed.assign(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (sub_spectrum->parsed()) return spectrum.run(out);
    if (sub_fit->parsed()) return fit.run(out);
    if (sub_gain->parsed()) return gain.run(out);
    if (sub_limits->parsed()) return limits.run(out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kModelError;
  }
  return kConfigError;
}

}  // namespace sqz::cli
