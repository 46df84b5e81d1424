#pragma once

#include <optional>
#include <string_view>

namespace treemin {

/// FAIL: the candidate is interesting (it still shows the property being
/// preserved). PASS: it is not. UNRESOLVED: the test could not decide.
enum class Outcome { Fail, Pass, Unresolved };

constexpr std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Fail: return "FAIL";
    case Outcome::Pass: return "PASS";
    case Outcome::Unresolved: return "UNRESOLVED";
  }
  return "UNRESOLVED";
}

}  // namespace treemin
