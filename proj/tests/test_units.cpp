#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "h1sim/config.hpp"
#include "h1sim/units.hpp"

using namespace h1sim;

TEST_CASE("config parses unit suffixes") {
  Config cfg = Config::from_string(
      "lattice_constant = 270 nm\n"
      "membrane_thickness = 0.26 um   # microns\n"
      "slab_index = 3.46\n"
      "exciton_lifetime = 1 ns\n"
      "splitting = 2 ueV\n"
      "gamma_flip = 5e9 /s\n"
      "d_values = 0.10, 0.12, 0.16\n"
      "offsets = 0:25:100 nm\n");
  CHECK(cfg.get_length("lattice_constant") == doctest::Approx(270e-9));
  CHECK(cfg.get_length("membrane_thickness") == doctest::Approx(0.26e-6));
  CHECK(cfg.get_number("slab_index") == doctest::Approx(3.46));
  CHECK(cfg.get_time("exciton_lifetime") == doctest::Approx(1e-9));
  CHECK(cfg.get_energy("splitting") == doctest::Approx(2e-6 * electron_volt));
  CHECK(cfg.get_rate("gamma_flip") == doctest::Approx(5e9));
  CHECK(cfg.get_number_list("d_values").size() == 3);
  auto offs = cfg.get_length_list("offsets");
  REQUIRE(offs.size() == 5);
  CHECK(offs[1] == doctest::Approx(25e-9));
  CHECK(offs[4] == doctest::Approx(100e-9));
}

TEST_CASE("config rejects malformed input") {
  CHECK_THROWS(Config::from_string("key_without_equals\n"));
  Config cfg = Config::from_string("x = 3 parsec\n");
  CHECK_THROWS(cfg.get_length("x"));
  CHECK_THROWS(cfg.get_length("missing"));
}

TEST_CASE("rate accepts energy tags") {
  Config cfg = Config::from_string("splitting_half = 1 ueV\n");
  CHECK(cfg.get_rate("splitting_half") ==
        doctest::Approx(1e-6 * electron_volt / hbar).epsilon(1e-12));
}
