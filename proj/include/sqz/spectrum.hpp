#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sqz {

struct Channel {
  std::string name;
  std::string unit;
  std::vector<double> values;
};

/// Real-valued channels sampled on a strictly increasing angular-frequency
/// grid. Every channel has one value per grid point.
class Spectrum {
 public:
  Spectrum() = default;
  /// Throws InvalidData unless omega is strictly increasing.
  explicit Spectrum(std::vector<double> omega);

  const std::vector<double>& omega() const { return omega_; }
  std::size_t size() const { return omega_.size(); }

  /// Adds or replaces a channel. Throws InvalidData on a length mismatch.
  void set_channel(std::string name, std::string unit, std::vector<double> values);

  bool has_channel(std::string_view name) const;
  /// Throws InvalidData if the channel is missing.
  const Channel& channel(std::string_view name) const;
  std::span<const double> values(std::string_view name) const { return channel(name).values; }
  const std::vector<Channel>& channels() const { return channels_; }

 private:
  std::vector<double> omega_;
  std::vector<Channel> channels_;
};

/// Evenly spaced (linear) or geometrically spaced (log) grid, both ends included.
std::vector<double> linear_grid(double start, double stop, std::size_t points);
std::vector<double> log_grid(double start, double stop, std::size_t points);

}  // namespace sqz
