#include "crossflow/types.hpp"

#include <stdexcept>

namespace crossflow {

bool follower_relation(const std::vector<Bubble>& bubbles, int leader_id, int follower_id) {
  const Bubble* lead = nullptr;
  const Bubble* fol = nullptr;
  for (const Bubble& b : bubbles) {
    if (b.id == leader_id) lead = &b;
    if (b.id == follower_id) fol = &b;
  }
  if (lead == nullptr || fol == nullptr) {
    throw std::invalid_argument("follower_relation: unknown bubble id");
  }
  if (lead->branch != fol->branch) return false;
  if (!(fol->lead_pos < lead->lead_pos)) return false;
  for (const Bubble& b : bubbles) {
    if (b.id == leader_id || b.id == follower_id) continue;
    if (b.branch == lead->branch && b.lead_pos > fol->lead_pos && b.lead_pos < lead->lead_pos) {
      return false;
    }
  }
  return true;
}

}  // namespace crossflow
