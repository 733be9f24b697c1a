// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace levylab {
inline constexpr const char* kVersion = "levylab 0.1.0";
}
