#include "pcnoc/presets.hpp"

namespace pcnoc {

// p_s1/p_s3/p_m were produced by `pcnoc placement` (greedy + local swap on
// the average-distance objective, uniform traffic); p_s2 is the fixed
// corner pattern. Coordinates are frozen here so every consumer sees the
// same layouts.
namespace {

constexpr const char* kPs1 =
    R"({"dims":[4,4,4],"elevators":[[1,1],[2,1],[1,2]]})";

constexpr const char* kPs2 =
    R"({"dims":[4,4,4],"elevators":[[0,0],[3,0],[0,3],[3,3]]})";

constexpr const char* kPs3 =
    R"({"dims":[4,4,4],"elevators":[[1,0],[2,0],[0,1],[1,1],[2,1],[3,1],[1,2],[2,2]]})";

constexpr const char* kPm =
    R"({"dims":[8,8,4],"elevators":[[3,2],[4,2],[2,3],[3,3],[4,3],[5,3],[3,4],[4,4]]})";

}  // namespace

const char* preset_topology_json(const std::string& name) {
  if (name == "p_s1") return kPs1;
  if (name == "p_s2") return kPs2;
  if (name == "p_s3") return kPs3;
  if (name == "p_m") return kPm;
  return nullptr;
}

std::vector<std::string> preset_names() { return {"p_s1", "p_s2", "p_s3", "p_m"}; }

}  // namespace pcnoc
