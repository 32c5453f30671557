#pragma once

#include "sphint/errors.hpp"
#include "sphint/io.hpp"
#include "sphint/ldp.hpp"
#include "sphint/measures.hpp"
#include "sphint/randmat.hpp"
#include "sphint/spherical.hpp"

namespace sphint {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sphint
