#pragma once

#define EITCOOL_VERSION_MAJOR 0
#define EITCOOL_VERSION_MINOR 1
#define EITCOOL_VERSION_PATCH 0
#define EITCOOL_VERSION_STRING "0.1.0"

namespace eitcool {

inline const char* version() { return EITCOOL_VERSION_STRING; }

} // namespace eitcool
