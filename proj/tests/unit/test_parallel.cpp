#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "robin/assembly.hpp"
#include "robin/forward.hpp"
#include "robin/parallel.hpp"
#include "support/oracles.hpp"

using namespace robin;

TEST_SUITE("parallel") {
  TEST_CASE("assembly is bit-identical under both policies") {
    const auto& built = fixture::get({5, 12, 2});
    const AssembledSystem s = assemble(built.mesh, built.geometry, Conductivity{1.5, 0.7}, Exec::serial);
    const AssembledSystem p = assemble(built.mesh, built.geometry, Conductivity{1.5, 0.7}, Exec::parallel);
    CHECK((Matrix(s.B0).array() == Matrix(p.B0).array()).all());
    for (int i = 0; i < s.n; ++i) CHECK((Matrix(s.B[i]).array() == Matrix(p.B[i]).array()).all());
    CHECK(s.dof_map == p.dof_map);
  }

  TEST_CASE("linearization is bit-identical under both policies") {
    const AssembledSystem& sys = fixture::system(5, 12, 2);
    const Vector gamma = Vector::LinSpaced(5, 1.0, 3.0);
    const Linearization s(sys, gamma, Exec::serial);
    const Linearization p(sys, gamma, Exec::parallel);
    CHECK((s.value().array() == p.value().array()).all());
    for (int i = 0; i < 5; ++i) CHECK((s.sensitivities()[i].array() == p.sensitivities()[i].array()).all());
  }

  TEST_CASE("every index is visited once and slots are independent of the schedule") {
    for (bool det : {false, true}) {
      set_deterministic(det);
      CHECK(deterministic() == det);
      std::vector<int> hits(1000, 0);
      for_each_index(Exec::parallel, hits.size(), [&](std::size_t i) { hits[i] += static_cast<int>(i); });
      for (std::size_t i = 0; i < hits.size(); ++i) CHECK(hits[i] == static_cast<int>(i));
    }
    set_deterministic(false);
    CHECK(max_threads() >= 1);
  }

  TEST_CASE("the lowest failing index is rethrown") {
    for (Exec exec : {Exec::serial, Exec::parallel}) {
      try {
        for_each_index(exec, 100, [](std::size_t i) {
          if (i == 17 || i == 63) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected an exception");
      } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "17");
      }
    }
  }
}
