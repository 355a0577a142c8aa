#include "maxdd/io.hpp"

#include <fstream>
#include <iomanip>

namespace maxdd {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << std::setprecision(17);
  return out;
}

template <typename Mat>
void write_coordinate(const std::string& path, const Mat& A, bool is_complex) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix coordinate " << (is_complex ? "complex" : "real") << " general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  for (int r = 0; r < A.outerSize(); ++r)
    for (typename Mat::InnerIterator it(A, r); it; ++it) {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ';
      if constexpr (std::is_same_v<typename Mat::Scalar, cplx>)
        out << it.value().real() << ' ' << it.value().imag() << '\n';
      else
        out << it.value() << '\n';
    }
}

void write_geometry(std::ofstream& out, const BoxMesh& mesh) {
  out << "# vtk DataFile Version 3.0\nmaxdd\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& v : mesh.vertices()) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  out << "CELLS " << mesh.num_cells() << ' ' << 5 * mesh.num_cells() << '\n';
  for (const auto& c : mesh.cells()) out << "4 " << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (int c = 0; c < mesh.num_cells(); ++c) out << "10\n";
}

}  // namespace

void write_matrix_market(const std::string& path, const ComplexSparseMatrix& A) {
  write_coordinate(path, A, true);
}

void write_matrix_market(const std::string& path, const RealSparseMatrix& A) {
  write_coordinate(path, A, false);
}

void write_matrix_market(const std::string& path, const CVector& v) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix array complex general\n" << v.size() << " 1\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) out << v[i].real() << ' ' << v[i].imag() << '\n';
}

void write_vtk(const std::string& path, const BoxMesh& mesh) {
  auto out = open_out(path);
  write_geometry(out, mesh);
}

void write_vtk(const std::string& path, const EdgeDofMap& dofmap, const CVector& solution,
               const std::vector<cplx>& permittivity) {
  const BoxMesh& mesh = dofmap.mesh();
  auto out = open_out(path);
  write_geometry(out, mesh);
  out << "CELL_DATA " << mesh.num_cells() << '\n';
  const std::array<double, 4> centroid{0.25, 0.25, 0.25, 0.25};
  std::vector<CVec3> values(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) values[c] = evaluate_field(dofmap, solution, c, centroid);
  out << "VECTORS E_real double\n";
  for (const auto& v : values) out << v[0].real() << ' ' << v[1].real() << ' ' << v[2].real() << '\n';
  out << "VECTORS E_imag double\n";
  for (const auto& v : values) out << v[0].imag() << ' ' << v[1].imag() << ' ' << v[2].imag() << '\n';
  if (!permittivity.empty()) {
    out << "SCALARS eps_r_real double 1\nLOOKUP_TABLE default\n";
    for (const auto& e : permittivity) out << e.real() << '\n';
  }
}

}  // namespace maxdd
