#include "pipeslip/error.hpp"

#include <sstream>

namespace pipeslip {

std::string describe(const SolveContext& ctx) {
  std::ostringstream os;
  os.precision(6);
  os << "phi=" << ctx.phi << " xi=" << ctx.xi << " alpha=" << ctx.alpha << " n=" << ctx.n_points
     << " cond~" << ctx.condition_estimate;
  return os.str();
}

}  // namespace pipeslip
