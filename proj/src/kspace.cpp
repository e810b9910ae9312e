#include "coreks/kspace.hpp"

#include <algorithm>
#include <cmath>

namespace coreks {

void SamplingMask::validate() const {
  for (int t = 0; t < nt; ++t) {
    bool any = false;
    for (int y = 0; y < ny && !any; ++y) any = is_selected(y, t);
    if (!any) throw contract_error("mask frame " + std::to_string(t) + " samples no lines");
  }
  double ra = r_achieved();
  if (std::abs(ra - r_target) > 0.05 * r_target)
    throw contract_error("achieved acceleration " + std::to_string(ra) +
                         " deviates more than 5% from target " + std::to_string(r_target));
}

void KSpaceSet::validate() const {
  if (data_.size() != coords_.size() * static_cast<size_t>(k_))
    throw contract_error("k-space data length != J*K");
  std::vector<ReadoutCoord> sorted = coords_;
  std::sort(sorted.begin(), sorted.end(), [](const ReadoutCoord& a, const ReadoutCoord& b) {
    return std::tie(a.frame, a.pe, a.coil) < std::tie(b.frame, b.pe, b.coil);
  });
  for (size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] == sorted[i - 1])
      throw contract_error("duplicate readout coordinate (pe=" + std::to_string(sorted[i].pe) +
                           ", frame=" + std::to_string(sorted[i].frame) + ")");
}

}  // namespace coreks
