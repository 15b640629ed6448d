#include "htlr/error.hpp"

namespace htlr {

void throw_dimension(const std::string& what) { throw DimensionError(what); }

}  // namespace htlr
