#include "lindstedt/errors.hpp"

#include <utility>

namespace lindstedt {

namespace {
std::string join_violations(const std::vector<std::string>& violations) {
  std::string msg = "invalid configuration";
  for (const auto& v : violations) msg += "\n  " + v;
  return msg;
}
}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : LindstedtError(join_violations(violations)),
      violations_(std::move(violations)) {}

}  // namespace lindstedt
