#pragma once

#include <cstdint>
#include <vector>

#include "istn/scenario.hpp"
#include "istn/tensor.hpp"

namespace istn {

/// Zipf popularity q_f = f^-omega / sum_i i^-omega for f = 1..F.
std::vector<double> zipf_popularity(int n_files, double omega);

struct CacheState {
  std::vector<std::vector<int>> placement; // per TBS, sorted file ids (0-based)
  std::vector<int> requests;               // per GU, file id
  Matrix<char> cached;                     // [M][J]: TBS m holds GU j's request
};

/// Random-scheme placement of `cache_capacity` files per TBS and one Zipf
/// request per GU. Placement depends on the seed only; requests are redrawn
/// per slot unless `static_requests` is set.
CacheState place_and_request(const Scenario& sc, int t);

/// Rebuilds `cached` from placement and requests.
Matrix<char> cache_hits(const std::vector<std::vector<int>>& placement, const std::vector<int>& requests);

struct GuPartition {
  std::vector<int> local;
  std::vector<int> backhaul;
};

/// Splits GUs by whether their associated TBS caches their request.
/// `association[j]` is the TBS of GU j; a negative entry is an error.
GuPartition classify_gus(const CacheState& cache, const std::vector<int>& association);

} // namespace istn
