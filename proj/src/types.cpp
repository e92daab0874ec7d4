#include "mrtime/types.hpp"

#include <algorithm>

#include "mrtime/error.hpp"

namespace mrtime {

ConfigPoint::ConfigPoint(std::vector<Parameter> params) : params_(std::move(params)) {
  if (params_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "configuration needs at least one parameter");
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& p = params_[i];
    if (p.name.empty()) throw Error(ErrorKind::InvalidArgument, "empty parameter name");
    if (p.value < 1) {
      throw Error(ErrorKind::InvalidArgument,
                  "parameter " + p.name + " must be >= 1, got " + std::to_string(p.value));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (params_[j].name == p.name) {
        throw Error(ErrorKind::InvalidArgument, "duplicate parameter " + p.name);
      }
    }
  }
}

ConfigPoint ConfigPoint::mappers_reducers(std::int64_t mappers, std::int64_t reducers) {
  return ConfigPoint({{kMappers, mappers}, {kReducers, reducers}});
}

std::vector<std::string> ConfigPoint::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.name);
  return out;
}

std::int64_t ConfigPoint::value(const std::string& name) const {
  auto it = std::find_if(params_.begin(), params_.end(),
                         [&](const Parameter& p) { return p.name == name; });
  if (it == params_.end()) {
    throw Error(ErrorKind::InvalidArgument, "configuration has no parameter " + name);
  }
  return it->value;
}

bool ConfigPoint::same_names(const ConfigPoint& other) const {
  return std::equal(params_.begin(), params_.end(), other.params_.begin(), other.params_.end(),
                    [](const Parameter& a, const Parameter& b) { return a.name == b.name; });
}

std::string ConfigPoint::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (i) out += ", ";
    out += params_[i].name + "=" + std::to_string(params_[i].value);
  }
  return out + ")";
}

std::vector<ParamRange> default_ranges() {
  return {{kMappers, 5, 40}, {kReducers, 5, 40}};
}

}  // namespace mrtime
