#pragma once

#include "flamegrad/params.hpp"

#include <stdexcept>
#include <string>

namespace flamegrad {

/// Parse or schema failure; message names the offending field (or the parser
/// position for malformed JSON).
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// JSON document with version tag "flamegrad-v1". Doubles are written in a
/// shortest exact decimal form, so deserialize(serialize(p)) == p bit for bit.
std::string serialize(const SceneParams& params);
SceneParams deserialize(const std::string& text);

}  // namespace flamegrad
