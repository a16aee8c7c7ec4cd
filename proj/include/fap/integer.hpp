#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace fap {

// The integer sort is unbounded; there is no overflow.
using Integer = boost::multiprecision::cpp_int;

inline std::string to_string(const Integer& value) { return value.str(); }

}  // namespace fap
