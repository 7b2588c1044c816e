#include "istn/caching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "istn/rng.hpp"

namespace istn {

std::vector<double> zipf_popularity(int n_files, double omega) {
  std::vector<double> q(n_files);
  double total = 0.0;
  for (int f = 0; f < n_files; ++f) {
    q[f] = std::pow(static_cast<double>(f + 1), -omega);
    total += q[f];
  }
  for (double& v : q) v /= total;
  return q;
}

Matrix<char> cache_hits(const std::vector<std::vector<int>>& placement, const std::vector<int>& requests) {
  const int M = static_cast<int>(placement.size());
  const int J = static_cast<int>(requests.size());
  Matrix<char> g(M, J, 0);
  for (int m = 0; m < M; ++m) {
    for (int j = 0; j < J; ++j) {
      g(m, j) = std::binary_search(placement[m].begin(), placement[m].end(), requests[j]) ? 1 : 0;
    }
  }
  return g;
}

CacheState place_and_request(const Scenario& sc, int t) {
  const auto& cfg = sc.caching;
  CacheState cs;

  auto place_rng = make_rng(sc.rng_seed, Stream::CachePlacement);
  std::vector<int> files(cfg.n_files);
  cs.placement.resize(sc.n_tbs);
  for (int m = 0; m < sc.n_tbs; ++m) {
    std::iota(files.begin(), files.end(), 0);
    // partial Fisher-Yates: the first cache_capacity entries form a uniform subset
    for (int i = 0; i < cfg.cache_capacity; ++i) {
      std::uniform_int_distribution<int> pick(i, cfg.n_files - 1);
      std::swap(files[i], files[pick(place_rng)]);
    }
    cs.placement[m].assign(files.begin(), files.begin() + cfg.cache_capacity);
    std::sort(cs.placement[m].begin(), cs.placement[m].end());
  }

  const auto q = zipf_popularity(cfg.n_files, cfg.zipf_omega);
  std::discrete_distribution<int> request(q.begin(), q.end());
  auto req_rng = make_rng(sc.rng_seed, Stream::Requests, cfg.static_requests ? 0 : static_cast<std::uint64_t>(t));
  cs.requests.resize(sc.n_gu);
  for (int& r : cs.requests) r = request(req_rng);

  cs.cached = cache_hits(cs.placement, cs.requests);
  return cs;
}

GuPartition classify_gus(const CacheState& cache, const std::vector<int>& association) {
  GuPartition p;
  for (int j = 0; j < static_cast<int>(association.size()); ++j) {
    const int m = association[j];
    if (m < 0 || m >= cache.cached.rows()) throw std::invalid_argument("GU " + std::to_string(j) + " has no association");
    (cache.cached(m, j) ? p.local : p.backhaul).push_back(j);
  }
  return p;
}

} // namespace istn
