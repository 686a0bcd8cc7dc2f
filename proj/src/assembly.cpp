#include "robin/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "robin/errors.hpp"

namespace robin {

namespace {

using Triplet = Eigen::Triplet<double>;

std::vector<int> build_dof_map(const Mesh& mesh, int m, std::vector<int>& electrode_dofs) {
  const int nodes = static_cast<int>(mesh.nodes.size());
  std::vector<int> owner(nodes, -1);
  for (const TaggedEdge& e : mesh.boundary_edges) {
    if (e.tag == kInsulated) continue;
    if (e.tag < 0 || e.tag >= m) throw AssemblyError("boundary edge carries unknown electrode tag");
    for (int v : {e.a, e.b}) {
      if (owner[v] >= 0 && owner[v] != e.tag) {
        throw AssemblyError("node " + std::to_string(v) + " lies on electrodes " +
                            std::to_string(owner[v] + 1) + " and " + std::to_string(e.tag + 1));
      }
      owner[v] = e.tag;
    }
  }

  std::vector<int> count(m, 0);
  for (int o : owner) {
    if (o >= 0) ++count[o];
  }
  for (int k = 0; k < m; ++k) {
    if (count[k] == 0) throw AssemblyError("electrode " + std::to_string(k + 1) + " contains no mesh nodes");
  }

  // Free nodes first in node order, then one DOF per electrode.
  std::vector<int> dof_map(nodes, -1);
  int next = 0;
  for (int v = 0; v < nodes; ++v) {
    if (owner[v] < 0) dof_map[v] = next++;
  }
  electrode_dofs.resize(m);
  for (int k = 0; k < m; ++k) electrode_dofs[k] = next + k;
  for (int v = 0; v < nodes; ++v) {
    if (owner[v] >= 0) dof_map[v] = electrode_dofs[owner[v]];
  }
  return dof_map;
}

}  // namespace

AssembledSystem assemble(const Mesh& mesh, const Geometry& geometry, const Conductivity& sigma, Exec exec) {
  if (!(sigma.sigma1 > 0.0) || !(sigma.sigma2 > 0.0)) throw DomainError("assemble: conductivity must be positive");

  AssembledSystem sys;
  sys.n = geometry.config.n;
  sys.m = geometry.config.m;
  sys.dof_map = build_dof_map(mesh, sys.m, sys.electrode_dofs);
  sys.dofs = sys.electrode_dofs.back() + 1;
  const int D = sys.dofs;

  // Element stiffness: sigma * area * grad(phi_a) . grad(phi_b). Each
  // triangle owns nine fixed triplet slots, so the parallel and serial loops
  // feed setFromTriplets the same sequence.
  std::vector<Triplet> stiffness(9 * mesh.triangles.size());
  for_each_index(exec, mesh.triangles.size(), [&](std::size_t t) {
    const Triangle& tri = mesh.triangles[t];
    const Point& p0 = mesh.nodes[tri.nodes[0]];
    const Point& p1 = mesh.nodes[tri.nodes[1]];
    const Point& p2 = mesh.nodes[tri.nodes[2]];
    const double area2 = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    const double gx[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
    const double gy[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
    const double s = (tri.region == Region::inner ? sigma.sigma1 : sigma.sigma2) / (2.0 * area2);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const double k = s * (gx[a] * gx[b] + gy[a] * gy[b]);
        stiffness[9 * t + 3 * a + b] = Triplet(sys.dof_map[tri.nodes[a]], sys.dof_map[tri.nodes[b]], k);
      }
    }
  });
  sys.B0.resize(D, D);
  sys.B0.setFromTriplets(stiffness.begin(), stiffness.end());

  // Interface trace mass: h/6 [[2, 1], [1, 2]] per edge.
  std::vector<Triplet> mass(4 * mesh.interface_edges.size());
  for_each_index(exec, mesh.interface_edges.size(), [&](std::size_t e) {
    const TaggedEdge& edge = mesh.interface_edges[e];
    const Point& p = mesh.nodes[edge.a];
    const Point& q = mesh.nodes[edge.b];
    const double h = std::hypot(q.x - p.x, q.y - p.y);
    const int i = sys.dof_map[edge.a];
    const int j = sys.dof_map[edge.b];
    mass[4 * e + 0] = Triplet(i, i, h / 3.0);
    mass[4 * e + 1] = Triplet(i, j, h / 6.0);
    mass[4 * e + 2] = Triplet(j, i, h / 6.0);
    mass[4 * e + 3] = Triplet(j, j, h / 3.0);
  });
  sys.B.resize(sys.n);
  for (int i = 0; i < sys.n; ++i) {
    std::vector<Triplet> part;
    for (std::size_t e = 0; e < mesh.interface_edges.size(); ++e) {
      if (mesh.interface_edges[e].tag == i) part.insert(part.end(), mass.begin() + 4 * e, mass.begin() + 4 * e + 4);
    }
    sys.B[i].resize(D, D);
    sys.B[i].setFromTriplets(part.begin(), part.end());
  }
  for (const TaggedEdge& edge : mesh.interface_edges) {
    if (edge.tag < 0 || edge.tag >= sys.n) throw AssemblyError("interface edge carries unknown arc tag");
  }

  sys.P = Matrix::Zero(D, sys.m);
  for (int k = 0; k < sys.m; ++k) sys.P(sys.electrode_dofs[k], k) = 1.0;

  finalize_interface(sys);
  return sys;
}

void finalize_interface(AssembledSystem& sys) {
  std::vector<int> dofs;
  for (const SparseMatrix& b : sys.B) {
    for (int c = 0; c < b.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(b, c); it; ++it) dofs.push_back(static_cast<int>(it.row()));
    }
  }
  std::sort(dofs.begin(), dofs.end());
  dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
  sys.interface_dofs = dofs;

  std::vector<int> local(sys.dofs, -1);
  for (std::size_t i = 0; i < dofs.size(); ++i) local[dofs[i]] = static_cast<int>(i);

  const auto g = static_cast<Eigen::Index>(dofs.size());
  sys.B_interface.assign(sys.B.size(), Matrix::Zero(g, g));
  for (std::size_t i = 0; i < sys.B.size(); ++i) {
    const SparseMatrix& b = sys.B[i];
    for (int c = 0; c < b.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(b, c); it; ++it) {
        sys.B_interface[i](local[it.row()], local[it.col()]) = it.value();
      }
    }
  }
}

void require_positive(const AssembledSystem& sys, const Vector& gamma, const char* what) {
  if (gamma.size() != sys.n) {
    throw DomainError(std::string(what) + ": expected " + std::to_string(sys.n) + " coefficients, got " +
                      std::to_string(gamma.size()));
  }
  for (Eigen::Index i = 0; i < gamma.size(); ++i) {
    if (!(gamma[i] > 0.0) || !std::isfinite(gamma[i])) {
      throw DomainError(std::string(what) + ": coefficient " + std::to_string(i + 1) + " must be positive");
    }
  }
}

SparseMatrix system_matrix(const AssembledSystem& sys, const Vector& gamma) {
  require_positive(sys, gamma, "system_matrix");
  SparseMatrix a = sys.B0;
  for (int i = 0; i < sys.n; ++i) a += gamma[i] * sys.B[i];
  return a;
}

void write_system(std::ostream& out, const AssembledSystem& sys) {
  const auto old_precision = out.precision(17);
  out << "robin-system v1\n";
  out << "dofs " << sys.dofs << " n " << sys.n << " m " << sys.m << "\n";
  out << "dof_map " << sys.dof_map.size() << "\n";
  for (std::size_t v = 0; v < sys.dof_map.size(); ++v) out << (v ? " " : "") << sys.dof_map[v];
  out << "\n";

  auto write_matrix = [&out](const std::string& name, const SparseMatrix& a) {
    long nnz = 0;
    for (int c = 0; c < a.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(a, c); it; ++it) nnz += it.row() >= it.col();
    }
    out << "matrix " << name << " " << nnz << "\n";
    for (int c = 0; c < a.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
        if (it.row() >= it.col()) out << it.row() << " " << it.col() << " " << it.value() << "\n";
      }
    }
  };
  write_matrix("B0", sys.B0);
  for (int i = 0; i < sys.n; ++i) write_matrix("B" + std::to_string(i + 1), sys.B[i]);

  out << "P " << sys.P.rows() << " " << sys.P.cols() << "\n";
  for (Eigen::Index r = 0; r < sys.P.rows(); ++r) {
    for (Eigen::Index c = 0; c < sys.P.cols(); ++c) out << (c ? " " : "") << sys.P(r, c);
    out << "\n";
  }
  out.precision(old_precision);
}

AssembledSystem read_system(std::istream& in) {
  auto fail = [](const std::string& what) { throw AssemblyError("read_system: " + what); };
  auto expect = [&](const std::string& word) {
    std::string got;
    if (!(in >> got) || got != word) fail("expected '" + word + "', got '" + got + "'");
  };

  expect("robin-system");
  expect("v1");
  AssembledSystem sys;
  expect("dofs");
  in >> sys.dofs;
  expect("n");
  in >> sys.n;
  expect("m");
  in >> sys.m;
  if (!in || sys.dofs <= 0 || sys.n < 1 || sys.m < 1) fail("bad header");

  expect("dof_map");
  std::size_t nodes = 0;
  in >> nodes;
  sys.dof_map.resize(nodes);
  for (int& d : sys.dof_map) in >> d;

  auto read_matrix = [&](const std::string& name) {
    expect("matrix");
    expect(name);
    long nnz = 0;
    in >> nnz;
    std::vector<Triplet> triplets;
    triplets.reserve(2 * static_cast<std::size_t>(nnz));
    for (long t = 0; t < nnz; ++t) {
      int r = 0;
      int c = 0;
      double v = 0.0;
      in >> r >> c >> v;
      if (!in || r < 0 || r >= sys.dofs || c < 0 || c > r) fail("bad entry in " + name);
      triplets.emplace_back(r, c, v);
      if (r != c) triplets.emplace_back(c, r, v);
    }
    SparseMatrix a(sys.dofs, sys.dofs);
    a.setFromTriplets(triplets.begin(), triplets.end());
    return a;
  };
  sys.B0 = read_matrix("B0");
  for (int i = 0; i < sys.n; ++i) sys.B.push_back(read_matrix("B" + std::to_string(i + 1)));

  expect("P");
  long rows = 0;
  long cols = 0;
  in >> rows >> cols;
  if (rows != sys.dofs || cols != sys.m) fail("P has wrong shape");
  sys.P.resize(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) in >> sys.P(r, c);
  }
  if (!in) fail("truncated input");

  sys.electrode_dofs.assign(sys.m, -1);
  for (int k = 0; k < sys.m; ++k) {
    for (long r = 0; r < rows; ++r) {
      if (sys.P(r, k) == 1.0) sys.electrode_dofs[k] = static_cast<int>(r);
    }
    if (sys.electrode_dofs[k] < 0) fail("P column " + std::to_string(k + 1) + " is not an indicator");
  }
  finalize_interface(sys);
  return sys;
}

}  // namespace robin
