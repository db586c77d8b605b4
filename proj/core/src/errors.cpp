#include "phonongate/errors.hpp"

namespace phonongate {

void throw_layout(const std::string& what) { throw LayoutError(what); }

}  // namespace phonongate
