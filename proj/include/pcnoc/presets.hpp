#pragma once

#include <string>
#include <vector>

namespace pcnoc {

// Embedded JSON for a named elevator-placement preset (p_s1, p_s2, p_s3,
// p_m), or nullptr when the name is not a preset. The same documents are
// shipped under presets/ for use outside the binary.
const char* preset_topology_json(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace pcnoc
