#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace leg {

struct IdentityCheck {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  int samples = 0;
  bool passed = false;
};

struct IdentityOptions {
  std::uint64_t seed = 0;
  int samples = 10000;
  // Use a copy of J_H with the sign of its first block flipped.
  bool inject_jh_bug = false;
};

// Random-point algebraic identities on V2(R^4) and H^2, one entry per check.
std::vector<IdentityCheck> verify_identities(const IdentityOptions& opt = {});

}  // namespace leg
