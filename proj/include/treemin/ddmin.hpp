#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "treemin/outcome.hpp"

namespace treemin {

/// Splits `config` into `n` contiguous chunks whose sizes differ by at most
/// one; the longer chunks come first.
template <typename Unit>
std::vector<std::vector<Unit>> partition(const std::vector<Unit>& config, std::size_t n) {
  if (n < 1 || n > config.size()) throw std::invalid_argument("partition: need 1 <= n <= |config|");
  std::vector<std::vector<Unit>> chunks;
  chunks.reserve(n);
  const std::size_t base = config.size() / n;
  const std::size_t extra = config.size() % n;
  auto it = config.begin();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t len = base + (i < extra ? 1 : 0);
    chunks.emplace_back(it, it + static_cast<std::ptrdiff_t>(len));
    it += static_cast<std::ptrdiff_t>(len);
  }
  return chunks;
}

struct DdminHooks {
  /// Called on entry to every granularity round with |c| and n.
  std::function<void(std::size_t size, std::size_t n)> on_round;
  /// Called when the input is returned unchanged because it does not fail.
  std::function<void()> on_degenerate;
};

/// Minimizing delta debugging. Returns a 1-minimal failing subsequence of
/// `units`; inputs with fewer than two units, or that do not fail, come back
/// unchanged. PASS and UNRESOLVED are both treated as "not failing".
template <typename Unit>
std::vector<Unit> ddmin(std::vector<Unit> units, const std::function<Outcome(const std::vector<Unit>&)>& test,
                        const DdminHooks& hooks = {}) {
  if (units.size() < 2) return units;
  if (test(units) != Outcome::Fail) {
    if (hooks.on_degenerate) hooks.on_degenerate();
    return units;
  }
  std::vector<Unit> c = std::move(units);
  std::size_t n = 2;
  while (c.size() >= 2) {
    if (hooks.on_round) hooks.on_round(c.size(), n);
    auto chunks = partition(c, n);

    bool reduced = false;
    for (auto& chunk : chunks) {
      if (test(chunk) == Outcome::Fail) {
        c = std::move(chunk);
        n = 2;
        reduced = true;
        break;
      }
    }
    // With two chunks every complement is the other chunk, already tested.
    if (!reduced && n > 2) {
      for (std::size_t i = 0; i < chunks.size(); ++i) {
        std::vector<Unit> complement;
        complement.reserve(c.size() - chunks[i].size());
        for (std::size_t j = 0; j < chunks.size(); ++j) {
          if (j != i) complement.insert(complement.end(), chunks[j].begin(), chunks[j].end());
        }
        if (test(complement) == Outcome::Fail) {
          c = std::move(complement);
          n = std::max<std::size_t>(n - 1, 2);
          reduced = true;
          break;
        }
      }
    }
    if (reduced) continue;
    if (n >= c.size()) break;
    n = std::min(c.size(), 2 * n);
  }
  return c;
}

}  // namespace treemin
