#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "mph/persistence.hpp"

namespace mph {

// MPHGRID v1: text serialization of the four invariant grids.
//   MPHGRID v1 channels=4 rows=<bins_r> cols=<bins_t>
//   r_values <bins_r doubles>
//   t_values <bins_t doubles>
//   one line of <cols> integers per (channel, row); channels hilb, xi0, xi1, xi2
// Doubles print as shortest-round-trip %.17g, so identical values give
// identical bytes on every platform.
void write_mphgrid(std::ostream& os, const BifiltrationInvariants& inv);
void write_mphgrid_file(const std::string& path, const BifiltrationInvariants& inv);

BifiltrationInvariants read_mphgrid(std::istream& is);
BifiltrationInvariants read_mphgrid_file(const std::string& path);

std::string format_double(double v);

}  // namespace mph
