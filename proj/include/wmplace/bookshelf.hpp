#pragma once

#include <filesystem>
#include <string>

#include "wmplace/design.hpp"

namespace wmp {

// Reads a Bookshelf bundle (.aux naming .nodes/.nets/.pl/.scl, optional .wts)
// plus the optional fence sidecar. The sidecar is taken from the .aux file
// list when it names a ".fence" file, otherwise from "<aux stem>.fence" when
// that exists. Sidecar lines:
//   region <id> <x_lo> <y_lo> <x_hi> <y_hi>   (repeat an id for more rects)
//   member <region_id> <cell_name>
//   endpoint <net_name>                       (timing endpoint flag)
// Terminal nodes whose sides are both at least one row height become macros;
// smaller terminals become IO pads.
Design parse_bookshelf(const std::filesystem::path &aux_path);

// Writes <dir>/<stem>.{aux,nodes,nets,pl,scl} and, when the design has fences
// or endpoint flags, <dir>/<stem>.fence. Returns the .aux path.
std::filesystem::path write_bookshelf(const Design &design,
                                      const Placement &placement,
                                      const std::filesystem::path &dir,
                                      const std::string &stem);

// ".pl"-style placement dump: name x y : N, with "/FIXED" on fixed cells.
void write_pl(const Design &design, const Placement &placement,
              const std::filesystem::path &path);
std::string format_pl(const Design &design, const Placement &placement);
Placement read_pl(const Design &design, const std::filesystem::path &path,
                  Stage stage = Stage::Detailed);

}  // namespace wmp
