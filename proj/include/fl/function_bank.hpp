#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fl/domain.hpp"

namespace fl {

/// One fixed test profile on the reference interval (-1, 1), zero outside.
struct BankEntry {
  std::string name;
  std::function<double(double)> f;
};

/// The ten pinned profiles: six bumps (three positions, two widths each),
/// an odd and an even two-bump combination, a boundary-concentrated
/// rho^{0.3} collar, and an oscillatory bump.  None is identically zero.
/// The list and every sample are fixed; reports quote bank_checksum() so
/// runs are comparable across machines.
const std::vector<BankEntry>& function_bank();

/// Nodal samples of an entry on a grid over (-1, 1).
GridFunction sample_entry(const BankEntry& e, const GridPtr& g);

/// FNV-1a over the entry names and their values at 512 fixed midpoints,
/// printed to 17 significant digits; changing any profile changes this.
std::uint64_t bank_checksum();

}  // namespace fl
