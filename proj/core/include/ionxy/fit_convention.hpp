#pragma once

#include <string_view>

namespace ionxy {

/// Which coupling pairs enter a power-law fit, and what "distance" means.
enum class FitConvention {
  EndIonChainIndex,     // pairs (1, j), r = j − 1 (the headline α)
  AllPairsChainIndex,   // all pairs i < j, r = j − i
  EndIonAxial,          // pairs (1, j), r = |z_j − z_1| in metres
  CentreIonChainIndex,  // pairs (c, j), c = ⌊(N−1)/2⌋ zero-based, r = |j − c|
};

std::string_view to_string(FitConvention convention);
FitConvention fit_convention_from_string(std::string_view name);

}  // namespace ionxy
