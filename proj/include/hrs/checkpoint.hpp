#pragma once

#include <string>

#include "hrs/model.hpp"

namespace hrs {

//! Versioned binary container: model kind, configuration block, and every
//! parameter tensor as a shape-prefixed little-endian f64 array. Round
//! trips are bit-exact.
void save_forecaster(const std::string& path, const Forecaster& f);
Forecaster load_forecaster(const std::string& path);

std::string serialize_config(const HrsConfig& cfg);
HrsConfig parse_config_block(const std::string& text);

}  // namespace hrs
