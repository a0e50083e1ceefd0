#pragma once

// Plain-text mesh and interface files.
//
// Body mesh:
//   nodes N elements M type {tri|quad}
//   N lines "x y"
//   M lines of 3 or 4 zero-based node indices
//   facets K
//   K lines "n0 n1 tag", tag in {dirichlet, neumann, contact, traction}
//
// Interface:
//   interface V
//   V lines "x y"
//   orient {left|right}
//   [closed]

#include "hnc/mesh.hpp"

#include <iosfwd>
#include <string>

namespace hnc {

BodyMesh read_body_mesh(std::istream& in);
BodyMesh read_body_mesh_file(const std::string& path);
void write_body_mesh(std::ostream& out, const BodyMesh& mesh);

InterfaceMesh read_interface(std::istream& in);
InterfaceMesh read_interface_file(const std::string& path);
void write_interface(std::ostream& out, const InterfaceMesh& interface);

}  // namespace hnc
