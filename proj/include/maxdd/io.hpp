#pragma once

#include <string>
#include <vector>

#include "maxdd/mesh.hpp"
#include "maxdd/nedelec.hpp"
#include "maxdd/types.hpp"

namespace maxdd {

/// Matrix Market coordinate files ("complex general" / "real general").
void write_matrix_market(const std::string& path, const ComplexSparseMatrix& A);
void write_matrix_market(const std::string& path, const RealSparseMatrix& A);
/// Dense complex vector as an n x 1 "array" file.
void write_matrix_market(const std::string& path, const CVector& v);

/// Legacy ASCII VTK unstructured grid. With a solution, cell data holds the
/// real and imaginary parts of the field at cell centroids; with
/// permittivity, its real part per cell.
void write_vtk(const std::string& path, const BoxMesh& mesh);
void write_vtk(const std::string& path, const EdgeDofMap& dofmap, const CVector& solution,
               const std::vector<cplx>& permittivity = {});

}  // namespace maxdd
