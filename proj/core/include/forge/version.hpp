#pragma once

#include <string_view>

namespace forge {

std::string_view version();

}  // namespace forge
