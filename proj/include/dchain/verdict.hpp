#pragma once

#include <string>

namespace dchain {

enum class Verdict { pass, fail, hypotheses_not_met, resolution_insufficient };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::hypotheses_not_met: return "hypotheses-not-met";
    case Verdict::resolution_insufficient: return "resolution-insufficient";
  }
  return "?";
}

}  // namespace dchain
