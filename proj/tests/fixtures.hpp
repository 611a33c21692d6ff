#pragma once

#include "monojunta/functions.hpp"

namespace monojunta::testing {

/// sigma* = ({1,2}, {3,4}, {1,3}, {2,4}) with d = 5, t = 2, m = 4.
inline SetFamily fixture_family() { return SetFamily(5, 2, {{1, 2}, {3, 4}, {1, 3}, {2, 4}}); }

/// x bits followed by y bits, e.g. word("1100", "1000").
inline InputWord word(std::string_view x, std::string_view y = "") {
  return InputWord::from_string(std::string(x) + std::string(y));
}

}  // namespace monojunta::testing
