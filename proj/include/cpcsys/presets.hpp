#pragma once

// Ready-to-run audit configurations shipped with the binary:
//   af-toy           doubling tower, every defect exactly zero
//   z5-full          full windows over the cyclic group of order 5
//   z-folner         integer-lattice windows up to radius 128, encoding
//                    conditions with calibrated tolerances
//   z-folner-nf-check  the multiplicativity witness expected to fail

#include <optional>
#include <string>
#include <vector>

namespace cpcsys {

std::vector<std::string> preset_names();

// The embedded config JSON, or nullopt for an unknown name.
std::optional<std::string> preset_config_json(const std::string& name);

}  // namespace cpcsys
