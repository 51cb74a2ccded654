#include "sqz/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sqz/error.hpp"

namespace sqz {

Spectrum::Spectrum(std::vector<double> omega) : omega_(std::move(omega)) {
  for (std::size_t i = 1; i < omega_.size(); ++i) {
    if (!(omega_[i] > omega_[i - 1])) {
      std::ostringstream os;
      os << "frequency grid not strictly increasing at index " << i;
      throw Error(ErrorCode::InvalidData, os.str());
    }
  }
}

void Spectrum::set_channel(std::string name, std::string unit, std::vector<double> values) {
  if (values.size() != omega_.size()) {
    std::ostringstream os;
    os << "channel '" << name << "' has " << values.size() << " values for " << omega_.size()
       << " grid points";
    throw Error(ErrorCode::InvalidData, os.str());
  }
  auto it = std::find_if(channels_.begin(), channels_.end(),
                         [&](const Channel& c) { return c.name == name; });
  if (it != channels_.end()) {
    it->unit = std::move(unit);
    it->values = std::move(values);
  } else {
    channels_.push_back({std::move(name), std::move(unit), std::move(values)});
  }
}

bool Spectrum::has_channel(std::string_view name) const {
  return std::any_of(channels_.begin(), channels_.end(),
                     [&](const Channel& c) { return c.name == name; });
}

const Channel& Spectrum::channel(std::string_view name) const {
  for (const auto& c : channels_) {
    if (c.name == name) return c;
  }
  throw Error(ErrorCode::InvalidData, "no channel named '" + std::string(name) + "'");
}

std::vector<double> linear_grid(double start, double stop, std::size_t points) {
  if (points < 2 || !(stop > start)) {
    throw Error(ErrorCode::InvalidConfig, "grid needs start < stop and at least 2 points");
  }
  std::vector<double> g(points);
  const double step = (stop - start) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = start + step * static_cast<double>(i);
  g.back() = stop;
  return g;
}

std::vector<double> log_grid(double start, double stop, std::size_t points) {
  if (!(start > 0.0)) throw Error(ErrorCode::InvalidConfig, "log grid needs start > 0");
  auto g = linear_grid(std::log(start), std::log(stop), points);
  for (auto& x : g) x = std::exp(x);
  g.front() = start;
  g.back() = stop;
  return g;
}

}  // namespace sqz
