#include <doctest.h>

#include <sstream>

#include "floqspec/dpo.hpp"
#include "floqspec/errors.hpp"
#include "floqspec/floquet.hpp"
#include "floqspec/sampled_system.hpp"
#include "support.hpp"

using namespace floqspec;
using floqspec::test::relative_error;

TEST_CASE("sampled DPO round-trips and reproduces the Floquet exponents") {
  const auto original = build_dpo_system({3.0, 0.5}, DpoMode::Full);
  std::stringstream buffer;
  write_sampled_system(buffer, original, 256);
  const auto sampled = read_sampled_system(buffer, "dpo.csv");
  CHECK(sampled.dimension() == 2);
  CHECK(sampled.noise_count() == 2);
  CHECK(sampled.period() == doctest::Approx(original.period()).epsilon(1e-15));
  CHECK(relative_error(sampled.noise_correlation(), original.noise_correlation()) == 0.0);
  CHECK(relative_error(sampled.drift(original.period() * 17.0 / 256.0),
                       original.drift(original.period() * 17.0 / 256.0)) < 1e-14);
  CHECK(relative_error(sampled.drift(0.123), original.drift(0.123)) < 1e-6);
  CHECK(sampled.breakpoints().size() == 255);
  CHECK(sampled.description().find("cubic spline") != std::string::npos);

  const auto exact = FloquetDecomposition::build(original);
  const auto approx = FloquetDecomposition::build(sampled);
  CHECK(std::abs(exact.exponents()(0) - approx.exponents()(0)) < 1e-6);
  CHECK(std::abs(exact.exponents()(1) - approx.exponents()(1)) < 1e-6);
}

TEST_CASE("sampled-system files are validated") {
  auto parse = [](const std::string& text) {
    std::stringstream in(text);
    return read_sampled_system(in);
  };
  const std::string preamble =
      "# floqspec sampled system v1\n# dimension=1 noise_count=1 period=2\n# G=1,0\n";
  const std::string header = "t,L11_re,L11_im,B11_re,B11_im\n";
  const std::string rows = "0,-1,0,1,0\n0.5,-1,0,1,0\n1,-1,0,1,0\n1.5,-1,0,1,0\n";
  CHECK_NOTHROW(parse(preamble + header + rows));
  CHECK_THROWS_AS(parse(header + rows), ConfigError);
  CHECK_THROWS_AS(parse(preamble + "t,L11_re,L11_im,B11_im,B11_re\n" + rows), ConfigError);
  CHECK_THROWS_AS(parse(preamble + header + "0,-1,0,1,0\n0.5,-1,0,1,0\n"), ConfigError);
  CHECK_THROWS_AS(parse(preamble + header + "0,-1,0,1,0\n0.6,-1,0,1,0\n1,-1,0,1,0\n1.5,-1,0,1,0\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse(preamble + header + "0,-1,0,x,0\n0.5,-1,0,1,0\n1,-1,0,1,0\n1.5,-1,0,1,0\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse("# floqspec sampled system v1\n# dimension=1 noise_count=1\n# G=1,0\n" + header + rows),
                  ConfigError);
  try {
    parse("# floqspec sampled system v1\n# dimension=1 noise_count=1 period=2\n# G=1\n" + header + rows);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "system-file.G");
  }
  const auto system = parse(preamble + header + rows);
  CHECK(system.drift(0.77)(0, 0) == Complex(-1.0));
}
