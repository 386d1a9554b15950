#include <string>

#include "doctest.h"
#include "mixconc/error.hpp"
#include "mixconc/spec_file.hpp"

using namespace mixconc;

namespace {

const std::string kData = MIXCONC_TEST_DATA;

ErrorCode code_of(const std::string& text) {
  try {
    parse_chain_spec(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected mixconc::Error");
  return ErrorCode::Io;
}

std::string message_of(const std::string& text) {
  try {
    parse_chain_spec(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("spec files load and transpose rows") {
  const ChainSpec two = load_chain_spec(kData + "/two_state.json");
  CHECK(two.name() == "two_state");
  CHECK(two.transition()(1, 0) == doctest::Approx(0.1));
  CHECK(two.transition()(0, 1) == doctest::Approx(0.2));
  // No initial law: the stationary law is used.
  CHECK(two.initial()[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK_FALSE(two.has_emission());

  const ChainSpec hmm = load_chain_spec(kData + "/hmm.json");
  CHECK(hmm.state_count() == 3);
  CHECK(hmm.symbol_count() == 2);
  CHECK((*hmm.emission())(1, 2) == doctest::Approx(0.8));
  CHECK(hmm.initial()[0] == 1.0);

  // Non-ergodic kernel without an initial law falls back to uniform.
  const ChainSpec frozen = parse_chain_spec(R"({"states": 2, "transition": [[1,0],[0,1]]})", "frozen");
  CHECK(frozen.initial()[1] == 0.5);
  CHECK(frozen.name() == "frozen");
}

TEST_CASE("spec files round-trip through chain_spec_to_json") {
  const ChainSpec hmm = load_chain_spec(kData + "/hmm.json");
  const ChainSpec again = parse_chain_spec(chain_spec_to_json(hmm));
  CHECK(again.transition() == hmm.transition());
  CHECK(*again.emission() == *hmm.emission());
  CHECK(again.initial() == hmm.initial());
  CHECK(again.name() == hmm.name());
}

TEST_CASE("spec files are validated with row diagnostics") {
  CHECK(code_of("{ \"states\": 2, ") == ErrorCode::Parse);
  CHECK(message_of("{\n \"states\": 2,\n \"transition\": [[0.9, 0.1],\n [0.2 0.8]]\n}").find("line 4") !=
        std::string::npos);
  CHECK(code_of("[1, 2]") == ErrorCode::Parse);

  const std::string bad_row = R"({"states": 2, "transition": [[0.9, 0.1], [0.2, 0.7]]})";
  CHECK(code_of(bad_row) == ErrorCode::InvalidArgument);
  CHECK(message_of(bad_row).find("transition row 1 sums to 0.9") != std::string::npos);

  CHECK(code_of(R"({"states": 2, "transition": [[0.9, 0.1]]})") == ErrorCode::DimensionMismatch);
  CHECK(code_of(R"({"states": 2, "transition": [[0.9, 0.1, 0.0], [0.2, 0.8, 0.0]]})") == ErrorCode::DimensionMismatch);
  CHECK(message_of(R"({"states": 2, "transition": [[1.1, -0.1], [0.2, 0.8]]})").find("transition row 0 entry 1") !=
        std::string::npos);
  CHECK(code_of(R"({"states": 0, "transition": []})") == ErrorCode::InvalidArgument);
  CHECK(code_of(R"({"states": 2})") == ErrorCode::InvalidArgument);
  CHECK(code_of(R"({"states": 2, "transition": [[1,0],[0,1]], "colour": "red"})") == ErrorCode::InvalidArgument);
  CHECK(code_of(R"({"states": 2, "transition": [[1,0],[0,1]], "emission": [[1,0],[0,1]]})") ==
        ErrorCode::InvalidArgument);
  CHECK(code_of(R"({"states": 2, "transition": [[1,0],[0,1]], "symbols": 2})") == ErrorCode::InvalidArgument);
  CHECK(code_of(R"({"states": 2, "transition": [[1,0],[0,1]], "initial": [0.5, 0.6]})") == ErrorCode::InvalidArgument);
  CHECK(message_of(R"({"states": 2, "transition": [[1,0],[0,1]], "symbols": 3, "emission": [[1,0,0],[0,"x",1]]})")
            .find("emission row 1 entry 1") != std::string::npos);

  try {
    load_chain_spec(kData + "/corrupted.json");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(std::string(e.what()).find("corrupted.json") != std::string::npos);
  }
  CHECK_THROWS_AS(load_chain_spec(kData + "/no_such_file.json"), Error);
}
