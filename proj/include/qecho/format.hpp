#pragma once

#include <cstdio>
#include <string>

namespace qecho::detail {

// 17 significant digits: enough to reproduce any double bit-exactly on parse.
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace qecho::detail
