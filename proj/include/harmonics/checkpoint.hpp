#pragma once

#include <map>
#include <string>

#include "harmonics/vae.hpp"

namespace harmonics {

/// Structured-text checkpoints: a version line, an FNV-1a checksum of the
/// payload, then layer shapes, activations and parameters printed with 17
/// significant digits so load(save(m)) is bit-exact.
namespace checkpoint {

std::string serialize(const DenseNetwork& net);
DenseNetwork deserialize_network(const std::string& text);

std::string serialize(const VaeModel& model,
                      const std::map<std::string, std::string>& metadata = {});
VaeModel deserialize_model(const std::string& text,
                           std::map<std::string, std::string>* metadata_out = nullptr);

void save_model(const VaeModel& model, const std::string& path,
                const std::map<std::string, std::string>& metadata = {});
VaeModel load_model(const std::string& path,
                    std::map<std::string, std::string>* metadata_out = nullptr);

} // namespace checkpoint

} // namespace harmonics
