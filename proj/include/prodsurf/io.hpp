#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

#include "prodsurf/discrete_minimizer.hpp"
#include "prodsurf/immersion_lab.hpp"

namespace prodsurf {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text documents share one layout:
//
//   prodsurf <kind> 1
//   <header lines: key values...>
//   data
//   <row-major rows, one node per line>
//   summary                      (optional)
//   <key value lines>
//
// Numbers are written with 17 significant digits so files round-trip.

using Summary = std::map<std::string, std::string>;

void write_field(std::ostream& out, const ScalarField& f);
ScalarField read_field(std::istream& in);

/// Chart patches store x1 x2 y1 y2 per node, embedded ones the 6 ambient
/// coordinates.
void write_patch(std::ostream& out, const ImmersedPatch& patch, const Summary& summary = {});
ImmersedPatch read_patch(std::istream& in, Summary* summary = nullptr);

/// OFF with a `factors a b` line after the header; 6 coordinates per vertex.
/// Deck generators and per-corner shifts, when present, follow as
/// `deck <18 reals>` lines and extra integers on face lines.
void write_mesh(std::ostream& out, const TriMesh& mesh);
TriMesh read_mesh(std::istream& in);

/// Node table: i,j,x,y,u,C1,C2,ReA,ImA,Re/Im gamma, Re/Im f,|H|,K,Kperp,M1,M2.
void write_node_table(std::ostream& out, const Analysis& a);

ScalarField load_field(const std::string& path);
ImmersedPatch load_patch(const std::string& path, Summary* summary = nullptr);
TriMesh load_mesh(const std::string& path);
/// Writes through a temporary string so a failed write leaves no partial file.
void save_text(const std::string& path, const std::string& content);

}  // namespace prodsurf
