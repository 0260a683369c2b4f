// SPDX-License-Identifier: Apache-2.0
#include "scriv/tensor.hpp"

#include <sstream>

namespace scriv {

std::string shape_str(const Shape& s) {
    std::ostringstream ss;
    ss << "[";
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) ss << "x";
        ss << s[i];
    }
    ss << "]";
    return ss.str();
}

}  // namespace scriv
